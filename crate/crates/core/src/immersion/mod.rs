//! Immersions of submanifolds N ⊂ M₁(c₁) × M₂(c₂) and their per-point data.
//!
//! An immersion is given by one expression per realization coordinate in the
//! parameters u₁ … u_n (see [`expr`] for the grammar).  Differentiating the
//! expressions through second order ([`jet`]) yields, at each parameter
//! point:
//!
//! - an orthonormal tangent frame e₁ … e_n of TN (Gram–Schmidt over the
//!   coordinate tangents, in index order) and a normal frame e_{n+1} … e_m
//!   completing it inside TM;
//! - the second fundamental form h(eᵢ,eⱼ) and shape operators A_r, with the
//!   sphere-factor radial component removed first so h is measured in M, not
//!   in the flat realization space;
//! - the mean curvature vector H = (1/n) tr h;
//! - the normal-bundle curvature R⊥ through the Ricci equation
//!   g(R⊥(X,Y)ξ,η) = g(R̃(X,Y)ξ,η) + g([A_ξ,A_η]X,Y);
//! - the φ-decomposition φX = TX + NX, φξ = tξ + nξ in the combined frame;
//! - slant angles θᵢ of supplied (or trivial) distributions, with the
//!   characterizing identity (PᵢT)²X = cos²θᵢ (p PᵢTX + qX) used as a
//!   residual check.
//!
//! The module's master validation is [`gauss_equation_residual`]: the
//! intrinsic curvature of the induced metric (Christoffel symbols by central
//! finite differences) must match the ambient curvature plus the h-terms of
//! the Gauss equation.

pub mod expr;
pub mod jet;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::ambient::{AmbientPoint, ProductSpaceForm, FRAME_PIVOT_TOL};
use crate::error::{GeoError, Result};
use expr::{eval_expr, parse_expression, Expr};
use jet::Jet2;

/// Tolerance for sphere-factor constraints of immersed points and for
/// tangency of coordinate derivatives.
pub const IMMERSION_TOL: f64 = 1e-8;

/// Maximum admissible condition number of the induced metric.
pub const METRIC_COND_LIMIT: f64 = 1e8;

/// A distribution counts as slant when per-vector angles deviate by at most
/// this much (radians) from their mean ...
pub const SLANT_ANGLE_TOL: f64 = 1e-6;

/// ... and the characterizing identity residual stays below this.
pub const SLANT_LEMMA_TOL: f64 = 1e-7;

/// A parsed immersion: one coordinate expression per realization dimension.
#[derive(Debug, Clone)]
pub struct ImmersionSpec {
    space: ProductSpaceForm,
    n: usize,
    coords: Vec<Expr>,
    coord_texts: Vec<String>,
    constants: BTreeMap<String, f64>,
}

/// Value, Jacobian, and per-coordinate Hessians of an immersion at a
/// parameter point.
#[derive(Debug, Clone)]
pub struct ImmersionJet {
    /// f(u) ∈ R^D.
    pub value: DVector<f64>,
    /// Columns are ∂f/∂uᵢ (D × n).
    pub jac: DMatrix<f64>,
    /// `hess[c]` is the n × n Hessian of coordinate c.
    pub hess: Vec<DMatrix<f64>>,
}

/// Everything the curvature invariants need at one parameter point.
#[derive(Debug, Clone)]
pub struct SubmanifoldPointData {
    pub u: Vec<f64>,
    pub x: AmbientPoint,
    /// Orthonormal tangent frame e₁ … e_n in realization coordinates.
    pub tangent_frame: Vec<DVector<f64>>,
    /// Orthonormal normal frame e_{n+1} … e_m within TM.
    pub normal_frame: Vec<DVector<f64>>,
    /// `h[r][(i,j)] = g(h(eᵢ,eⱼ), e_{n+1+r})`, symmetric; in an orthonormal
    /// frame these matrices are simultaneously the shape operators A_r.
    pub h: Vec<DMatrix<f64>>,
    /// Mean curvature components H^r = (1/n) tr A_r.
    pub mean_curvature: DVector<f64>,
    /// Condition number of the induced metric in coordinate tangents.
    pub metric_cond: f64,
}

impl SubmanifoldPointData {
    pub fn n(&self) -> usize {
        self.tangent_frame.len()
    }

    /// Codimension within M.
    pub fn codim(&self) -> usize {
        self.normal_frame.len()
    }

    /// Shape operators (equal to the h-component matrices in an orthonormal
    /// frame).
    pub fn shape_ops(&self) -> &[DMatrix<f64>] {
        &self.h
    }

    /// ‖H‖² from the stored components.
    pub fn mean_curvature_sq(&self) -> f64 {
        self.mean_curvature.norm_squared()
    }

    /// ‖H‖² recomputed from h as (1/n²) Σ_r (Σᵢ h^r_ii)².
    pub fn mean_curvature_sq_from_h(&self) -> f64 {
        let n = self.n() as f64;
        self.h.iter().map(|m| (m.trace() / n).powi(2)).sum()
    }

    /// ‖h‖² = Σ_{r,i,j} (h^r_ij)².
    pub fn h_norm_sq(&self) -> f64 {
        self.h.iter().map(|m| m.norm_squared()).sum()
    }

    /// Shape operator in the direction of the unit mean curvature vector;
    /// zero operator when H = 0.
    pub fn shape_op_mean(&self) -> DMatrix<f64> {
        let n = self.n();
        let norm = self.mean_curvature.norm();
        let mut out = DMatrix::zeros(n, n);
        if norm == 0.0 {
            return out;
        }
        for (r, a) in self.h.iter().enumerate() {
            out += a * (self.mean_curvature[r] / norm);
        }
        out
    }

    /// Max deviation of the joint frame Gram matrix from the identity.
    pub fn frame_gram_residual(&self) -> f64 {
        let all: Vec<&DVector<f64>> = self
            .tangent_frame
            .iter()
            .chain(self.normal_frame.iter())
            .collect();
        let mut worst = 0.0_f64;
        for (a, ea) in all.iter().enumerate() {
            for (b, eb) in all.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ea.dot(eb) - target).abs());
            }
        }
        worst
    }
}

/// Normal-bundle curvature components g(R⊥(eᵢ,eⱼ)ξ_t, ξ_s).
#[derive(Debug, Clone)]
pub struct NormalCurvature {
    n: usize,
    k: usize,
    /// `comps[t*k + s]` is the n × n matrix over (i, j).
    comps: Vec<DMatrix<f64>>,
}

impl NormalCurvature {
    /// Normal curvature of a synthetic point with the given shape operators
    /// in a flat ambient space: only the commutator term of the Ricci
    /// equation survives.  Used by the algebraic test suites.
    pub fn from_flat_shape_ops(ops: &[DMatrix<f64>]) -> Result<Self> {
        let k = ops.len();
        let n = if k == 0 { 0 } else { ops[0].nrows() };
        for a in ops {
            if a.nrows() != n || a.ncols() != n {
                return Err(GeoError::DimensionMismatch(
                    "shape operators must be square and share one size".into(),
                ));
            }
        }
        let mut comps = vec![DMatrix::zeros(n, n); k * k];
        for t in 0..k {
            for s in 0..k {
                let commutator = &ops[t] * &ops[s] - &ops[s] * &ops[t];
                comps[t * k + s] = commutator.transpose();
            }
        }
        Ok(NormalCurvature { n, k, comps })
    }

    pub fn tangent_dim(&self) -> usize {
        self.n
    }

    pub fn normal_dim(&self) -> usize {
        self.k
    }

    pub fn component(&self, i: usize, j: usize, t: usize, s: usize) -> f64 {
        self.comps[t * self.k + s][(i, j)]
    }

    /// Σ_{i<j} Σ_{t<s} component² — the square inside the normal scalar
    /// curvature.
    pub fn sum_sq_over_pairs(&self) -> f64 {
        let mut acc = 0.0;
        for t in 0..self.k {
            for s in (t + 1)..self.k {
                let m = &self.comps[t * self.k + s];
                for i in 0..self.n {
                    for j in (i + 1)..self.n {
                        acc += m[(i, j)] * m[(i, j)];
                    }
                }
            }
        }
        acc
    }

    /// Max violation of antisymmetry in (i,j) and in (t,s).
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for t in 0..self.k {
            for s in 0..self.k {
                let m = &self.comps[t * self.k + s];
                let m_swap = &self.comps[s * self.k + t];
                for i in 0..self.n {
                    for j in 0..self.n {
                        worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
                        worst = worst.max((m[(i, j)] + m_swap[(i, j)]).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Blocks of φ in the combined (tangent, normal) frame:
/// φX = TX + NX for tangent X and φξ = tξ + nξ for normal ξ.
#[derive(Debug, Clone)]
pub struct PhiDecomposition {
    /// T: tangent → tangent (n × n), g-symmetric.
    pub t_tangent: DMatrix<f64>,
    /// N: tangent → normal (k × n).
    pub n_tangent: DMatrix<f64>,
    /// t: normal → tangent (n × k).
    pub t_normal: DMatrix<f64>,
    /// n: normal → normal (k × k).
    pub n_normal: DMatrix<f64>,
}

impl PhiDecomposition {
    pub fn tangent_dim(&self) -> usize {
        self.t_tangent.nrows()
    }

    pub fn normal_dim(&self) -> usize {
        self.n_normal.nrows()
    }

    /// The full m × m block matrix [[T, t], [N, n]].
    pub fn reassemble(&self) -> DMatrix<f64> {
        let n = self.tangent_dim();
        let k = self.normal_dim();
        let mut out = DMatrix::zeros(n + k, n + k);
        out.view_mut((0, 0), (n, n)).copy_from(&self.t_tangent);
        out.view_mut((0, n), (n, k)).copy_from(&self.t_normal);
        out.view_mut((n, 0), (k, n)).copy_from(&self.n_tangent);
        out.view_mut((n, n), (k, k)).copy_from(&self.n_normal);
        out
    }

    /// Deviation of T from symmetry.
    pub fn t_symmetry_residual(&self) -> f64 {
        (&self.t_tangent - self.t_tangent.transpose()).amax()
    }
}

/// Slant angles, distributions, projections, and residuals of the two
/// characterizing identities.
#[derive(Debug, Clone)]
pub struct SlantData {
    /// Distribution bases in tangent-frame coordinates.
    pub d1_basis: Vec<DVector<f64>>,
    pub d2_basis: Vec<DVector<f64>>,
    pub d1: usize,
    pub d2: usize,
    /// Mean slant angles (radians); 0 for an empty distribution.
    pub theta1: f64,
    pub theta2: f64,
    /// Max |θ(X) − θᵢ| over the distribution frame.
    pub angle_deviation_1: f64,
    pub angle_deviation_2: f64,
    /// Orthogonal projections onto the distributions (tangent-frame coords).
    pub p1: DMatrix<f64>,
    pub p2: DMatrix<f64>,
    pub tr_tp1: f64,
    pub tr_tp2: f64,
    pub tr_t: f64,
    /// Trace of T² (equals ‖T‖²_F since T is symmetric).
    pub tr_t2: f64,
    /// max_X ‖(PᵢT)²X − cos²θᵢ (p PᵢTX + qX)‖ over the Dᵢ frame.
    pub lemma_residual_1: f64,
    pub lemma_residual_2: f64,
    /// max_X |‖TPᵢX‖² − cos²θᵢ (p g(φPᵢX,PᵢX) + q‖PᵢX‖²)| over the full
    /// tangent frame.
    pub angle_identity_residual_1: f64,
    pub angle_identity_residual_2: f64,
}

impl SlantData {
    /// Whether distribution i ∈ {1, 2} passes both slant criteria.
    pub fn is_slant(&self, i: usize) -> bool {
        let (d, dev, lemma) = match i {
            1 => (self.d1, self.angle_deviation_1, self.lemma_residual_1),
            2 => (self.d2, self.angle_deviation_2, self.lemma_residual_2),
            _ => panic!("distribution index must be 1 or 2"),
        };
        d == 0 || (dev <= SLANT_ANGLE_TOL && lemma <= SLANT_LEMMA_TOL)
    }

    /// ϑᵢ = cos²θᵢ (p·trTPᵢ + dᵢ·q) — the distribution's contribution to the
    /// theorem right-hand sides.
    pub fn vartheta(&self, i: usize, p: f64, q: f64) -> f64 {
        let (d, theta, tr_tp) = match i {
            1 => (self.d1, self.theta1, self.tr_tp1),
            2 => (self.d2, self.theta2, self.tr_tp2),
            _ => panic!("distribution index must be 1 or 2"),
        };
        if d == 0 {
            return 0.0;
        }
        theta.cos().powi(2) * (p * tr_tp + d as f64 * q)
    }
}

impl ImmersionSpec {
    /// Parses the coordinate expressions against n parameters and the
    /// declared constants; the expression count must match the space's
    /// realization dimension.
    pub fn parse<S: AsRef<str>>(
        space: ProductSpaceForm,
        n: usize,
        coord_texts: &[S],
        constants: BTreeMap<String, f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(GeoError::Argument(
                "submanifold dimension must be at least 1".into(),
            ));
        }
        if n > space.manifold_dim() {
            return Err(GeoError::Argument(format!(
                "submanifold dimension {n} exceeds the manifold dimension {}",
                space.manifold_dim()
            )));
        }
        if coord_texts.len() != space.embedding_dim() {
            return Err(GeoError::DimensionMismatch(format!(
                "expected {} coordinate expressions (realization dimension), got {}",
                space.embedding_dim(),
                coord_texts.len()
            )));
        }
        let mut coords = Vec::with_capacity(coord_texts.len());
        for (idx, text) in coord_texts.iter().enumerate() {
            let ast = parse_expression(text.as_ref(), n, &constants).map_err(|e| match e {
                GeoError::Parse { line, col, message } => GeoError::Parse {
                    line,
                    col,
                    message: format!("coordinate {}: {message}", idx + 1),
                },
                other => other,
            })?;
            coords.push(ast);
        }
        Ok(ImmersionSpec {
            space,
            n,
            coords,
            coord_texts: coord_texts.iter().map(|s| s.as_ref().to_string()).collect(),
            constants,
        })
    }

    pub fn space(&self) -> &ProductSpaceForm {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coord_texts(&self) -> &[String] {
        &self.coord_texts
    }

    pub fn constants(&self) -> &BTreeMap<String, f64> {
        &self.constants
    }

    fn check_u(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(GeoError::DimensionMismatch(format!(
                "parameter point has length {}, immersion has {} parameters",
                u.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// f(u), values only.
    pub fn value(&self, u: &[f64]) -> Result<DVector<f64>> {
        self.check_u(u)?;
        let mut out = DVector::zeros(self.coords.len());
        for (c, ast) in self.coords.iter().enumerate() {
            out[c] = eval_expr::<f64>(ast, u)?;
        }
        Ok(out)
    }

    /// f(u) with first and second derivatives by forward-mode jets.
    pub fn jet2(&self, u: &[f64]) -> Result<ImmersionJet> {
        self.check_u(u)?;
        let n = self.n;
        let dim = self.coords.len();
        let vars: Vec<Jet2> = u
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet2::variable(v, i, n))
            .collect();
        let mut value = DVector::zeros(dim);
        let mut jac = DMatrix::zeros(dim, n);
        let mut hess = Vec::with_capacity(dim);
        for (c, ast) in self.coords.iter().enumerate() {
            let jet = eval_expr::<Jet2>(ast, &vars)?;
            value[c] = jet.v;
            jac.row_mut(c).copy_from(&jet.grad.transpose());
            // Enforce exact symmetry of the stored Hessian.
            let sym = (&jet.hess + jet.hess.transpose()) * 0.5;
            hess.push(sym);
        }
        Ok(ImmersionJet { value, jac, hess })
    }

    /// Frames, second fundamental form, shape operators, mean curvature.
    pub fn point_data(&self, u: &[f64]) -> Result<SubmanifoldPointData> {
        let jets = self.jet2(u)?;
        let space = &self.space;
        let dim = space.embedding_dim();
        let n = self.n;
        let m = space.manifold_dim();
        let k = m - n;

        space.check_on_manifold(&jets.value, IMMERSION_TOL)?;
        let x = AmbientPoint { coords: jets.value.clone() };

        // Coordinate tangents, validated against the sphere constraints and
        // projected to TM to remove roundoff-level radial components.
        let mut coord_tangents: Vec<DVector<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let col = jets.jac.column(i).clone_owned();
            space.check_tangent(&x.coords, &col, IMMERSION_TOL).map_err(|_| {
                GeoError::OffManifold(format!(
                    "coordinate derivative ∂f/∂u{} is not tangent to the realized product",
                    i + 1
                ))
            })?;
            coord_tangents.push(space.project_raw(&x.coords, &col));
        }

        // Second derivatives as realization vectors, with second-order
        // validation of the sphere constraints along coordinate directions:
        // d²/duᵢduⱼ (|f_b|² − r²) = 2 (f_b·w_ij,b + v_i,b·v_j,b) must vanish.
        let mut second: Vec<Vec<DVector<f64>>> = vec![vec![DVector::zeros(dim); n]; n];
        for (i, row) in second.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = DVector::from_fn(dim, |c, _| jets.hess[c][(i, j)]);
            }
        }
        let split = space.factor_split();
        let blocks = [(0usize, split), (split, dim)];
        for (b, (lo, hi)) in blocks.iter().enumerate() {
            let factor = if b == 0 { space.spec().factor1 } else { space.spec().factor2 };
            if !matches!(factor.realization, crate::ambient::FactorRealization::Sphere { .. }) {
                continue;
            }
            let len = hi - lo;
            for (i, row) in second.iter().enumerate() {
                for (j, w_ij) in row.iter().enumerate() {
                    let constraint = x.coords.rows(*lo, len).dot(&w_ij.rows(*lo, len))
                        + jets.jac.column(i).rows(*lo, len).dot(&jets.jac.column(j).rows(*lo, len));
                    let scale = 1.0
                        + jets.jac.column(i).rows(*lo, len).norm()
                            * jets.jac.column(j).rows(*lo, len).norm();
                    if constraint.abs() > IMMERSION_TOL * scale {
                        return Err(GeoError::OffManifold(format!(
                            "immersion leaves the sphere factor to second order along (u{}, u{}): residual {:.3e}",
                            i + 1,
                            j + 1,
                            constraint
                        )));
                    }
                }
            }
        }

        // Induced metric and its condition number.
        let gram = DMatrix::from_fn(n, n, |i, j| coord_tangents[i].dot(&coord_tangents[j]));
        let sv = gram.clone().svd(false, false).singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        let metric_cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !metric_cond.is_finite() || metric_cond > METRIC_COND_LIMIT {
            return Err(GeoError::DegenerateImmersion(format!(
                "induced metric condition number {metric_cond:.3e} exceeds {METRIC_COND_LIMIT:.0e}"
            )));
        }

        // Tangent frame by Gram–Schmidt in index order, tracking the
        // change-of-basis coefficients e_a = Σᵢ B[a][i] · vᵢ.
        let scale = coord_tangents.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut frame: Vec<DVector<f64>> = Vec::with_capacity(n);
        let mut basis_coeff: Vec<DVector<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut w = coord_tangents[i].clone();
            let mut c = DVector::zeros(n);
            c[i] = 1.0;
            for _ in 0..2 {
                for (e, ce) in frame.iter().zip(basis_coeff.iter()) {
                    let proj = w.dot(e);
                    w -= e * proj;
                    c -= ce * proj;
                }
            }
            let norm = w.norm();
            if norm <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(GeoError::DegenerateImmersion(format!(
                    "coordinate tangent ∂f/∂u{} is linearly dependent on its predecessors",
                    i + 1
                )));
            }
            frame.push(w / norm);
            basis_coeff.push(c / norm);
        }

        // Normal frame: project realization basis vectors to TM and
        // orthonormalize against everything kept so far, in index order.
        let mut normal_frame: Vec<DVector<f64>> = Vec::with_capacity(k);
        for idx in 0..dim {
            if normal_frame.len() == k {
                break;
            }
            let mut v = DVector::zeros(dim);
            v[idx] = 1.0;
            let mut w = space.project_raw(&x.coords, &v);
            for _ in 0..2 {
                for e in frame.iter().chain(normal_frame.iter()) {
                    let proj = w.dot(e);
                    w -= e * proj;
                }
            }
            let norm = w.norm();
            if norm < FRAME_PIVOT_TOL {
                continue;
            }
            normal_frame.push(w / norm);
        }
        if normal_frame.len() != k {
            return Err(GeoError::DegenerateBasis {
                index: n + normal_frame.len(),
                pivot: 0.0,
                threshold: FRAME_PIVOT_TOL,
            });
        }

        // h in the coordinate basis: the normal-within-TM component of the
        // projected second derivatives (projection removes the sphere-radial
        // part, i.e. the second fundamental form of M itself).
        let bmat = DMatrix::from_fn(n, n, |a, i| basis_coeff[a][i]);
        let mut h = Vec::with_capacity(k);
        for xi in &normal_frame {
            let coord = DMatrix::from_fn(n, n, |i, j| {
                space.project_raw(&x.coords, &second[i][j]).dot(xi)
            });
            let in_frame = &bmat * coord * bmat.transpose();
            h.push((&in_frame + in_frame.transpose()) * 0.5);
        }
        let mean_curvature = DVector::from_fn(k, |r, _| h[r].trace() / n as f64);

        Ok(SubmanifoldPointData {
            u: u.to_vec(),
            x,
            tangent_frame: frame,
            normal_frame,
            h,
            mean_curvature,
            metric_cond,
        })
    }

    /// Normal-bundle curvature via the Ricci equation.
    pub fn normal_curvature(&self, data: &SubmanifoldPointData) -> NormalCurvature {
        let n = data.n();
        let k = data.codim();
        let space = &self.space;
        let sign = space.curv_sign();
        let mut comps = vec![DMatrix::zeros(n, n); k * k];
        for t in 0..k {
            for s in 0..k {
                let mut m = DMatrix::zeros(n, n);
                let commutator = &data.h[t] * &data.h[s] - &data.h[s] * &data.h[t];
                for i in 0..n {
                    for j in 0..n {
                        let ambient = space
                            .curvature_metallic_raw(
                                &data.tangent_frame[i],
                                &data.tangent_frame[j],
                                &data.normal_frame[t],
                                sign,
                            )
                            .dot(&data.normal_frame[s]);
                        // g([A_t, A_s]eᵢ, eⱼ) reads entry (j, i).
                        m[(i, j)] = ambient + commutator[(j, i)];
                    }
                }
                comps[t * k + s] = m;
            }
        }
        NormalCurvature { n, k, comps }
    }

    /// φ in the combined orthonormal frame, split into its four blocks.
    pub fn phi_decompose(&self, data: &SubmanifoldPointData) -> PhiDecomposition {
        let n = data.n();
        let k = data.codim();
        let combined: Vec<&DVector<f64>> = data
            .tangent_frame
            .iter()
            .chain(data.normal_frame.iter())
            .collect();
        let mut full = DMatrix::zeros(n + k, n + k);
        for (b, eb) in combined.iter().enumerate() {
            let img = self.space.apply_phi(eb);
            for (a, ea) in combined.iter().enumerate() {
                full[(a, b)] = ea.dot(&img);
            }
        }
        PhiDecomposition {
            t_tangent: full.view((0, 0), (n, n)).clone_owned(),
            n_tangent: full.view((n, 0), (k, n)).clone_owned(),
            t_normal: full.view((0, n), (n, k)).clone_owned(),
            n_normal: full.view((n, n), (k, k)).clone_owned(),
        }
    }

    /// Slant analysis of the supplied distributions (tangent-frame
    /// coordinates), or of the whole tangent bundle when none are given.
    pub fn slant_analysis(
        &self,
        data: &SubmanifoldPointData,
        d1_basis: Option<&[DVector<f64>]>,
        d2_basis: Option<&[DVector<f64>]>,
    ) -> Result<SlantData> {
        let n = data.n();
        let phi = self.phi_decompose(data);
        let t = &phi.t_tangent;

        let (b1, b2): (Vec<DVector<f64>>, Vec<DVector<f64>>) = match (d1_basis, d2_basis) {
            (None, None) => (
                (0..n)
                    .map(|i| DVector::from_fn(n, |a, _| if a == i { 1.0 } else { 0.0 }))
                    .collect(),
                Vec::new(),
            ),
            (Some(a), Some(b)) => (a.to_vec(), b.to_vec()),
            _ => {
                return Err(GeoError::Argument(
                    "supply both distribution bases or neither".into(),
                ))
            }
        };
        if b1.len() + b2.len() != n {
            return Err(GeoError::Argument(format!(
                "distribution dimensions {} + {} must add up to n = {n}",
                b1.len(),
                b2.len()
            )));
        }
        let joint: Vec<&DVector<f64>> = b1.iter().chain(b2.iter()).collect();
        for v in &joint {
            if v.len() != n {
                return Err(GeoError::Argument(format!(
                    "distribution basis vectors must have length n = {n}, got {}",
                    v.len()
                )));
            }
        }
        for (a, va) in joint.iter().enumerate() {
            for (b, vb) in joint.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                if (va.dot(vb) - target).abs() > 1e-8 {
                    return Err(GeoError::Argument(
                        "distribution bases are not jointly orthonormal".into(),
                    ));
                }
            }
        }

        let params = *self.space.params();
        let (p, q) = (params.p(), params.q());
        let mut per_dist = Vec::with_capacity(2);
        for basis in [&b1, &b2] {
            let d = basis.len();
            let mut proj = DMatrix::zeros(n, n);
            for b in basis.iter() {
                proj.ger(1.0, b, b, 1.0);
            }
            if d == 0 {
                per_dist.push((0.0_f64, 0.0_f64, proj, 0.0_f64, 0.0_f64));
                continue;
            }
            // Per-vector angles from cos θ = ‖TX‖ / ‖φX‖.
            let mut angles = Vec::with_capacity(d);
            for b in basis.iter() {
                let tx = t * b;
                let x_real = self.frame_coords_to_realization(data, b);
                let phi_x = self.space.apply_phi(&x_real);
                let cos = (tx.norm() / phi_x.norm()).clamp(0.0, 1.0);
                angles.push(cos.acos());
            }
            let theta = angles.iter().sum::<f64>() / d as f64;
            let deviation = angles
                .iter()
                .map(|a| (a - theta).abs())
                .fold(0.0, f64::max);
            let cos2 = theta.cos().powi(2);
            // Characterizing identity (PᵢT)²X = cos²θᵢ (p PᵢTX + qX), X ∈ Dᵢ.
            let pt = &proj * t;
            let lemma = basis
                .iter()
                .map(|b| {
                    let lhs = &pt * (&pt * b);
                    let rhs = (&pt * b) * (cos2 * p) + b * (cos2 * q);
                    (lhs - rhs).norm()
                })
                .fold(0.0, f64::max);
            per_dist.push((theta, deviation, proj, lemma, cos2));
        }

        let (theta1, dev1, p1, lemma1, cos2_1) = per_dist[0].clone();
        let (theta2, dev2, p2, lemma2, cos2_2) = per_dist[1].clone();

        // Metric form of the angle identity, probed on the full frame:
        // ‖TPᵢX‖² = cos²θᵢ (p g(φPᵢX, PᵢX) + q ‖PᵢX‖²).
        let mut identity_residuals = [0.0_f64; 2];
        for (slot, (proj, cos2, d)) in
            [(&p1, cos2_1, b1.len()), (&p2, cos2_2, b2.len())].iter().enumerate()
        {
            if *d == 0 {
                continue;
            }
            let mut worst = 0.0_f64;
            for a in 0..n {
                let unit = DVector::from_fn(n, |r, _| if r == a { 1.0 } else { 0.0 });
                let w = *proj * unit;
                let tw = t * &w;
                let w_real = self.frame_coords_to_realization(data, &w);
                let phi_w = self.space.apply_phi(&w_real);
                let g_phi = phi_w.dot(&w_real);
                let res = (tw.norm_squared() - cos2 * (p * g_phi + q * w.norm_squared())).abs();
                worst = worst.max(res);
            }
            identity_residuals[slot] = worst;
        }

        Ok(SlantData {
            d1: b1.len(),
            d2: b2.len(),
            d1_basis: b1,
            d2_basis: b2,
            theta1,
            theta2,
            angle_deviation_1: dev1,
            angle_deviation_2: dev2,
            tr_tp1: (t * &p1).trace(),
            tr_tp2: (t * &p2).trace(),
            tr_t: t.trace(),
            tr_t2: (t * t).trace(),
            p1,
            p2,
            lemma_residual_1: lemma1,
            lemma_residual_2: lemma2,
            angle_identity_residual_1: identity_residuals[0],
            angle_identity_residual_2: identity_residuals[1],
        })
    }

    /// Lift a tangent-frame coordinate vector to realization coordinates.
    fn frame_coords_to_realization(
        &self,
        data: &SubmanifoldPointData,
        coords: &DVector<f64>,
    ) -> DVector<f64> {
        let mut out = DVector::zeros(self.space.embedding_dim());
        for (a, e) in data.tangent_frame.iter().enumerate() {
            out += e * coords[a];
        }
        out
    }

    /// Induced metric in coordinate tangents at u.
    fn metric_at(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let jets = self.jet2(u)?;
        let n = self.n;
        let cols: Vec<DVector<f64>> = (0..n)
            .map(|i| self.space.project_raw(&jets.value, &jets.jac.column(i).clone_owned()))
            .collect();
        Ok(DMatrix::from_fn(n, n, |i, j| cols[i].dot(&cols[j])))
    }

    /// Christoffel symbols Γ^l_{ij} of the induced metric by central finite
    /// differences of the metric with the given step.
    fn christoffel_at(&self, u: &[f64], step: f64) -> Result<Vec<DMatrix<f64>>> {
        let n = self.n;
        let g = self.metric_at(u)?;
        let g_inv = g.clone().try_inverse().ok_or_else(|| {
            GeoError::DegenerateImmersion("induced metric is singular in the oracle".into())
        })?;
        // dg[k] = ∂_k G.
        let mut dg = Vec::with_capacity(n);
        for kk in 0..n {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[kk] += step;
            dn[kk] -= step;
            dg.push((self.metric_at(&up)? - self.metric_at(&dn)?) / (2.0 * step));
        }
        let mut gamma = vec![DMatrix::zeros(n, n); n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for mm in 0..n {
                        acc += g_inv[(l, mm)] * (dg[i][(j, mm)] + dg[j][(i, mm)] - dg[mm][(i, j)]);
                    }
                    gamma[l][(i, j)] = 0.5 * acc;
                }
            }
        }
        Ok(gamma)
    }

    /// Master validation: max over index 4-tuples of the Gauss-equation
    /// residual |R_intrinsic − (R̃ + h-terms)| on normalized coordinate
    /// tangents.  `step` is the finite-difference step (1e−4 is calibrated
    /// for the built-in examples).
    pub fn gauss_equation_residual(&self, u: &[f64], step: f64) -> Result<f64> {
        let n = self.n;
        let data = self.point_data(u)?;
        let jets = self.jet2(u)?;
        let space = &self.space;

        // Intrinsic curvature from finite differences of the Christoffels:
        // R(∂i,∂j)∂k = ∂ᵢΓ_{jk} − ∂ⱼΓ_{ik} + Γ_{iμ}Γ^μ_{jk} − Γ_{jμ}Γ^μ_{ik}.
        let gamma = self.christoffel_at(u, step)?;
        let mut dgamma = Vec::with_capacity(n);
        for kk in 0..n {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[kk] += step;
            dn[kk] -= step;
            let gu = self.christoffel_at(&up, step)?;
            let gd = self.christoffel_at(&dn, step)?;
            let diff: Vec<DMatrix<f64>> = gu
                .into_iter()
                .zip(gd)
                .map(|(a, b)| (a - b) / (2.0 * step))
                .collect();
            dgamma.push(diff);
        }
        let g = self.metric_at(u)?;
        let riem_vec = |i: usize, j: usize, kk: usize| -> DVector<f64> {
            DVector::from_fn(n, |l, _| {
                let mut acc = dgamma[i][l][(j, kk)] - dgamma[j][l][(i, kk)];
                for mu in 0..n {
                    acc += gamma[l][(i, mu)] * gamma[mu][(j, kk)]
                        - gamma[l][(j, mu)] * gamma[mu][(i, kk)];
                }
                acc
            })
        };

        // Extrinsic side: ambient curvature plus h-terms, in the coordinate
        // basis.
        let coord_tangents: Vec<DVector<f64>> = (0..n)
            .map(|i| space.project_raw(&data.x.coords, &jets.jac.column(i).clone_owned()))
            .collect();
        let h_coord: Vec<DMatrix<f64>> = data
            .normal_frame
            .iter()
            .map(|xi| {
                DMatrix::from_fn(n, n, |i, j| {
                    let w = DVector::from_fn(space.embedding_dim(), |c, _| jets.hess[c][(i, j)]);
                    space.project_raw(&data.x.coords, &w).dot(xi)
                })
            })
            .collect();
        let norms: Vec<f64> = coord_tangents.iter().map(|v| v.norm()).collect();

        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let rv = (0..n).map(|kk| riem_vec(i, j, kk)).collect::<Vec<_>>();
                for kk in 0..n {
                    let ambient = space.curvature_metallic_raw(
                        &coord_tangents[i],
                        &coord_tangents[j],
                        &coord_tangents[kk],
                        space.curv_sign(),
                    );
                    for l in 0..n {
                        let intrinsic: f64 = (0..n).map(|mu| rv[kk][mu] * g[(mu, l)]).sum();
                        let mut extrinsic = ambient.dot(&coord_tangents[l]);
                        for hr in &h_coord {
                            extrinsic += hr[(i, l)] * hr[(j, kk)] - hr[(i, kk)] * hr[(j, l)];
                        }
                        let denom = norms[i] * norms[j] * norms[kk] * norms[l];
                        worst = worst.max((intrinsic - extrinsic).abs() / denom);
                    }
                }
            }
        }
        Ok(worst)
    }
}
