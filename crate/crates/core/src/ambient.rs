//! Realized product space forms M₁(c₁) × M₂(c₂) with their metallic geometry.
//!
//! Each factor is realized isometrically: a flat factor (c = 0) as Rᵐ, a
//! positively curved factor as the round sphere Sᵐ(r) ⊂ Rᵐ⁺¹ with
//! c = 1/r².  Points and tangent vectors live in the flat realization space
//! R^D, D = Σ(mᵢ + 1 if sphere else mᵢ), where the induced metric is the
//! Euclidean one, so all inner products below are plain dot products.
//!
//! The canonical almost product structure acts blockwise,
//! F = +id on factor-1 directions and −id on factor-2 directions, and
//! induces the metallic structure φ = (p/2)I ± (α/2)F of the chosen
//! [`Branch`].  The curvature tensor of the product metric is evaluated in
//! two independent closed forms:
//!
//! ```text
//!   R(X,Y)Z = (c₁+c₂)/4 [ g(Y,Z)X − g(X,Z)Y + g(FY,Z)FX − g(FX,Z)FY ]
//!           + (c₁−c₂)/4 [ g(FY,Z)X − g(FX,Z)Y + g(Y,Z)FX − g(X,Z)FY ]
//! ```
//!
//! and the equivalent φ-form whose (c₁−c₂)-weighted half carries an explicit
//! sign tied to the branch (`Branch::First` ↔ `CurvSign::Plus`,
//! `Branch::Second` ↔ `CurvSign::Minus)`.  Construction cross-checks the two
//! forms on random tangent triples and rejects a mismatched pairing whenever
//! c₁ ≠ c₂ makes the sign observable.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::metallic::{Branch, CurvSign, Endomorphism, MetallicParams};

/// Tolerance for on-manifold checks of directly constructed points
/// (relative, on squared block norms).
pub const POINT_TOL: f64 = 1e-10;

/// Tolerance for tangency checks of ambient tangent vectors.
pub const TANGENT_TOL: f64 = 1e-8;

/// Pivot threshold when completing adapted frames from realization basis
/// vectors.
pub const FRAME_PIVOT_TOL: f64 = 1e-8;

/// Largest supported realization dimension.
pub const MAX_EMBED_DIM: usize = 32;

/// How a factor is realized in flat space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorRealization {
    /// Rᵐ with the identity chart; requires curvature 0.
    Flat,
    /// Round sphere Sᵐ(radius) ⊂ Rᵐ⁺¹; requires curvature 1/radius² > 0.
    Sphere { radius: f64 },
}

/// One factor of the product: intrinsic dimension, curvature, realization.
///
/// Deserializes from `{dim, curvature}` alone; the realization is derived
/// (curvature 0 → flat chart, curvature > 0 → round sphere).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FactorInput")]
pub struct FactorSpec {
    pub dim: usize,
    pub curvature: f64,
    pub realization: FactorRealization,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorInput {
    dim: usize,
    curvature: f64,
}

impl TryFrom<FactorInput> for FactorSpec {
    type Error = GeoError;

    fn try_from(input: FactorInput) -> Result<Self> {
        if !input.curvature.is_finite() || input.curvature < 0.0 {
            return Err(GeoError::Argument(format!(
                "factor curvature must be 0 (flat) or positive (sphere), got {}",
                input.curvature
            )));
        }
        if input.curvature == 0.0 {
            Ok(FactorSpec::flat(input.dim))
        } else {
            Ok(FactorSpec::sphere(input.dim, input.curvature))
        }
    }
}

impl FactorSpec {
    /// A flat factor Rᵐ.
    pub fn flat(dim: usize) -> Self {
        FactorSpec {
            dim,
            curvature: 0.0,
            realization: FactorRealization::Flat,
        }
    }

    /// A sphere factor Sᵐ(1/√c) of curvature c > 0.
    pub fn sphere(dim: usize, curvature: f64) -> Self {
        FactorSpec {
            dim,
            curvature,
            realization: FactorRealization::Sphere {
                radius: 1.0 / curvature.max(f64::MIN_POSITIVE).sqrt(),
            },
        }
    }

    fn embed_dim(&self) -> usize {
        match self.realization {
            FactorRealization::Flat => self.dim,
            FactorRealization::Sphere { .. } => self.dim + 1,
        }
    }

    fn validate(&self, label: &str) -> Result<()> {
        if self.dim == 0 {
            return Err(GeoError::Realization(format!(
                "{label}: factor dimension must be at least 1"
            )));
        }
        match self.realization {
            FactorRealization::Flat => {
                if self.curvature != 0.0 {
                    return Err(GeoError::Realization(format!(
                        "{label}: flat realization requires curvature 0, got {}",
                        self.curvature
                    )));
                }
            }
            FactorRealization::Sphere { radius } => {
                if self.curvature <= 0.0 {
                    return Err(GeoError::Realization(format!(
                        "{label}: sphere realization requires positive curvature, got {}",
                        self.curvature
                    )));
                }
                let expected = 1.0 / self.curvature.sqrt();
                if radius.is_nan() || radius <= 0.0 || (radius - expected).abs() > 1e-12 * expected {
                    return Err(GeoError::Realization(format!(
                        "{label}: sphere radius {radius} inconsistent with curvature {} (expected {expected})",
                        self.curvature
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Full specification of a metallic product space form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub factor1: FactorSpec,
    pub factor2: FactorSpec,
    pub params: MetallicParams,
    pub branch: Branch,
    pub curv_sign: CurvSign,
}

/// A point of the product, stored in realization coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    pub coords: DVector<f64>,
}

/// A tangent vector of the product at a base point, in realization
/// coordinates.  Sphere-block components are orthogonal to the block radius
/// to within [`TANGENT_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientTangent {
    pub base: DVector<f64>,
    pub vec: DVector<f64>,
}

/// The sign of the metallic curvature form that reproduces the almost
/// product form for a given branch.
pub fn matched_sign(branch: Branch) -> CurvSign {
    match branch {
        Branch::First => CurvSign::Plus,
        Branch::Second => CurvSign::Minus,
    }
}

/// A validated, realized product space form.
#[derive(Debug, Clone)]
pub struct ProductSpaceForm {
    spec: SpaceSpec,
    embed_dim: usize,
    split: usize,
}

impl ProductSpaceForm {
    /// Validates the specification, realizes the product, and cross-checks
    /// the curvature-sign pairing on random tangent triples.
    pub fn new(spec: SpaceSpec) -> Result<Self> {
        spec.factor1.validate("factor 1")?;
        spec.factor2.validate("factor 2")?;
        let embed_dim = spec.factor1.embed_dim() + spec.factor2.embed_dim();
        if embed_dim > MAX_EMBED_DIM {
            return Err(GeoError::Realization(format!(
                "realization dimension {embed_dim} exceeds supported maximum {MAX_EMBED_DIM}"
            )));
        }
        let space = ProductSpaceForm {
            split: spec.factor1.embed_dim(),
            spec,
            embed_dim,
        };
        space.validate_sign_pairing()?;
        Ok(space)
    }

    /// The two curvature forms must agree; with c₁ ≠ c₂ the metallic form is
    /// sign-sensitive, so this rejects a (branch, curv_sign) pairing that
    /// contradicts the almost product form.
    fn validate_sign_pairing(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ee0);
        let mut worst = 0.0_f64;
        for _ in 0..40 {
            let x = self.random_point(&mut rng);
            let (xv, yv, zv) = (
                self.random_tangent_raw(&x.coords, &mut rng),
                self.random_tangent_raw(&x.coords, &mut rng),
                self.random_tangent_raw(&x.coords, &mut rng),
            );
            let a = self.curvature_product_raw(&xv, &yv, &zv);
            let b = self.curvature_metallic_raw(&xv, &yv, &zv, self.spec.curv_sign);
            let scale = 1.0 + a.amax().max(b.amax());
            worst = worst.max((a - b).amax() / scale);
        }
        if worst > 1e-9 {
            return Err(GeoError::Realization(format!(
                "curvature sign {:?} is inconsistent with branch {:?} (cross-check residual {:.3e}); \
                 the matched sign for this branch is {:?}",
                self.spec.curv_sign,
                self.spec.branch,
                worst,
                matched_sign(self.spec.branch)
            )));
        }
        Ok(())
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn params(&self) -> &MetallicParams {
        &self.spec.params
    }

    pub fn branch(&self) -> Branch {
        self.spec.branch
    }

    pub fn curv_sign(&self) -> CurvSign {
        self.spec.curv_sign
    }

    pub fn c1(&self) -> f64 {
        self.spec.factor1.curvature
    }

    pub fn c2(&self) -> f64 {
        self.spec.factor2.curvature
    }

    /// Dimension of the flat realization space R^D.
    pub fn embedding_dim(&self) -> usize {
        self.embed_dim
    }

    /// Intrinsic dimension m = m₁ + m₂ of the product manifold.
    pub fn manifold_dim(&self) -> usize {
        self.spec.factor1.dim + self.spec.factor2.dim
    }

    /// Index where the factor-2 block starts in realization coordinates.
    pub fn factor_split(&self) -> usize {
        self.split
    }

    fn blocks(&self) -> [(usize, usize, &FactorSpec); 2] {
        [
            (0, self.split, &self.spec.factor1),
            (self.split, self.embed_dim, &self.spec.factor2),
        ]
    }

    /// Validates realization constraints and wraps the coordinates.
    pub fn point(&self, coords: DVector<f64>) -> Result<AmbientPoint> {
        self.check_on_manifold(&coords, POINT_TOL)?;
        Ok(AmbientPoint { coords })
    }

    /// Checks sphere-block norms against their radii at a relative tolerance.
    pub fn check_on_manifold(&self, coords: &DVector<f64>, tol: f64) -> Result<()> {
        if coords.len() != self.embed_dim {
            return Err(GeoError::DimensionMismatch(format!(
                "point has length {}, realization dimension is {}",
                coords.len(),
                self.embed_dim
            )));
        }
        for (lo, hi, factor) in self.blocks() {
            if let FactorRealization::Sphere { radius } = factor.realization {
                let norm_sq: f64 = coords.rows(lo, hi - lo).norm_squared();
                let r_sq = radius * radius;
                if (norm_sq - r_sq).abs() > tol * r_sq {
                    return Err(GeoError::OffManifold(format!(
                        "sphere block [{lo}..{hi}) has |x|^2 = {norm_sq:.12}, expected {r_sq:.12}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Validates that `vec` is tangent at `base` and wraps the pair.
    pub fn tangent(&self, base: &AmbientPoint, vec: DVector<f64>) -> Result<AmbientTangent> {
        self.check_tangent(&base.coords, &vec, TANGENT_TOL)?;
        Ok(AmbientTangent {
            base: base.coords.clone(),
            vec,
        })
    }

    /// Checks that sphere-block components are orthogonal to the block
    /// radius.
    pub fn check_tangent(&self, base: &DVector<f64>, vec: &DVector<f64>, tol: f64) -> Result<()> {
        if vec.len() != self.embed_dim {
            return Err(GeoError::DimensionMismatch(format!(
                "tangent vector has length {}, realization dimension is {}",
                vec.len(),
                self.embed_dim
            )));
        }
        for (lo, hi, factor) in self.blocks() {
            if let FactorRealization::Sphere { radius } = factor.realization {
                let dot = base.rows(lo, hi - lo).dot(&vec.rows(lo, hi - lo));
                let scale = radius * vec.rows(lo, hi - lo).norm() + f64::MIN_POSITIVE;
                if dot.abs() > tol * scale.max(1.0) {
                    return Err(GeoError::OffManifold(format!(
                        "vector is not tangent on sphere block [{lo}..{hi}): radial component {dot:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Orthogonal projection of an arbitrary realization vector onto T_xM
    /// (removes the radial component of each sphere block).
    pub fn project_to_manifold_tangent(
        &self,
        x: &AmbientPoint,
        v: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        if v.len() != self.embed_dim {
            return Err(GeoError::DimensionMismatch(format!(
                "vector has length {}, realization dimension is {}",
                v.len(),
                self.embed_dim
            )));
        }
        Ok(self.project_raw(&x.coords, v))
    }

    pub(crate) fn project_raw(&self, base: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        for (lo, hi, factor) in self.blocks() {
            if let FactorRealization::Sphere { radius } = factor.realization {
                let len = hi - lo;
                let dot = base.rows(lo, len).dot(&v.rows(lo, len));
                let coeff = dot / (radius * radius);
                let radial = base.rows(lo, len) * coeff;
                let mut block = out.rows_mut(lo, len);
                block -= radial;
            }
        }
        out
    }

    /// F applied to a realization vector: +id on the factor-1 block, −id on
    /// the factor-2 block.  Maps tangent vectors to tangent vectors.
    pub fn apply_f(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        out.rows_mut(self.split, self.embed_dim - self.split)
            .neg_mut();
        out
    }

    /// φ applied to a realization vector, φ = (p/2)·v ± (α/2)·F v per the
    /// branch.
    pub fn apply_phi(&self, v: &DVector<f64>) -> DVector<f64> {
        let m = &self.spec.params;
        let half_alpha = match self.spec.branch {
            Branch::First => m.alpha() / 2.0,
            Branch::Second => -m.alpha() / 2.0,
        };
        let mut out = self.apply_f(v) * half_alpha;
        out += v * (m.p() / 2.0);
        out
    }

    /// Orthonormal adapted tangent frame of T_xM, built by projecting the
    /// realization basis vectors in index order and dropping near-dependent
    /// candidates.  Factor-1 directions come first.
    pub fn adapted_frame(&self, x: &AmbientPoint) -> Result<Vec<DVector<f64>>> {
        let m = self.manifold_dim();
        let mut frame: Vec<DVector<f64>> = Vec::with_capacity(m);
        for k in 0..self.embed_dim {
            if frame.len() == m {
                break;
            }
            let mut v = DVector::zeros(self.embed_dim);
            v[k] = 1.0;
            let mut w = self.project_raw(&x.coords, &v);
            for _ in 0..2 {
                for e in &frame {
                    let c = w.dot(e);
                    w -= e * c;
                }
            }
            let norm = w.norm();
            if norm < FRAME_PIVOT_TOL {
                continue;
            }
            frame.push(w / norm);
        }
        if frame.len() != m {
            return Err(GeoError::DegenerateBasis {
                index: frame.len(),
                pivot: 0.0,
                threshold: FRAME_PIVOT_TOL,
            });
        }
        Ok(frame)
    }

    /// F restricted to T_xM, expressed in the adapted frame:
    /// diag(+1, ..., +1, −1, ..., −1) with multiplicities (m₁, m₂).
    pub fn product_structure_at(&self, x: &AmbientPoint) -> Result<Endomorphism> {
        let frame = self.adapted_frame(x)?;
        self.structure_in_frame(&frame, |v| self.apply_f(v))
    }

    /// φ restricted to T_xM in the adapted frame: eigenvalues σ and p − σ
    /// with multiplicities (m₁, m₂) for `Branch::First`, swapped for
    /// `Branch::Second`.
    pub fn metallic_structure_at(&self, x: &AmbientPoint) -> Result<Endomorphism> {
        let frame = self.adapted_frame(x)?;
        self.structure_in_frame(&frame, |v| self.apply_phi(v))
    }

    fn structure_in_frame(
        &self,
        frame: &[DVector<f64>],
        op: impl Fn(&DVector<f64>) -> DVector<f64>,
    ) -> Result<Endomorphism> {
        let m = frame.len();
        let mut mat = DMatrix::zeros(m, m);
        for (b, eb) in frame.iter().enumerate() {
            let img = op(eb);
            for (a, ea) in frame.iter().enumerate() {
                mat[(a, b)] = ea.dot(&img);
            }
        }
        Endomorphism::new(mat)
    }

    /// Curvature operator R(X,Y)Z in the almost product closed form.
    pub fn curvature_product(
        &self,
        x: &AmbientPoint,
        xv: &DVector<f64>,
        yv: &DVector<f64>,
        zv: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        for v in [xv, yv, zv] {
            self.check_tangent(&x.coords, v, TANGENT_TOL)?;
        }
        Ok(self.curvature_product_raw(xv, yv, zv))
    }

    /// Curvature operator R(X,Y)Z in the metallic closed form, using the
    /// space's validated sign.
    pub fn curvature_metallic(
        &self,
        x: &AmbientPoint,
        xv: &DVector<f64>,
        yv: &DVector<f64>,
        zv: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        for v in [xv, yv, zv] {
            self.check_tangent(&x.coords, v, TANGENT_TOL)?;
        }
        Ok(self.curvature_metallic_raw(xv, yv, zv, self.spec.curv_sign))
    }

    /// Metallic curvature form with an explicit sign override (used to probe
    /// the sign pairing; the mismatched sign disagrees with the product form
    /// whenever c₁ ≠ c₂).
    pub fn curvature_metallic_with_sign(
        &self,
        x: &AmbientPoint,
        xv: &DVector<f64>,
        yv: &DVector<f64>,
        zv: &DVector<f64>,
        sign: CurvSign,
    ) -> Result<DVector<f64>> {
        for v in [xv, yv, zv] {
            self.check_tangent(&x.coords, v, TANGENT_TOL)?;
        }
        Ok(self.curvature_metallic_raw(xv, yv, zv, sign))
    }

    pub(crate) fn curvature_product_raw(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
    ) -> DVector<f64> {
        let (c1, c2) = (self.c1(), self.c2());
        let fx = self.apply_f(x);
        let fy = self.apply_f(y);
        let g_yz = y.dot(z);
        let g_xz = x.dot(z);
        let g_fyz = fy.dot(z);
        let g_fxz = fx.dot(z);

        let mut sum = x * g_yz;
        sum -= y * g_xz;
        sum += &fx * g_fyz;
        sum -= &fy * g_fxz;
        let mut out = sum * ((c1 + c2) / 4.0);

        let mut dif = x * g_fyz;
        dif -= y * g_fxz;
        dif += &fx * g_yz;
        dif -= &fy * g_xz;
        out += dif * ((c1 - c2) / 4.0);
        out
    }

    pub(crate) fn curvature_metallic_raw(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        sign: CurvSign,
    ) -> DVector<f64> {
        let (c1, c2) = (self.c1(), self.c2());
        let m = self.spec.params;
        let (p, alpha) = (m.p(), m.alpha());
        let a2 = alpha * alpha;
        let px = self.apply_phi(x);
        let py = self.apply_phi(y);
        let g_yz = y.dot(z);
        let g_xz = x.dot(z);
        let g_pyz = py.dot(z);
        let g_pxz = px.dot(z);

        // (c₁+c₂)-weighted half.
        let mut sum = DVector::zeros(x.len());
        sum += x * ((a2 + p * p) * g_yz);
        sum -= y * ((a2 + p * p) * g_xz);
        sum += &px * (4.0 * g_pyz);
        sum -= &py * (4.0 * g_pxz);
        sum += y * (2.0 * p * g_pxz);
        sum += &py * (2.0 * p * g_xz);
        sum -= x * (2.0 * p * g_pyz);
        sum -= &px * (2.0 * p * g_yz);
        let mut out = sum * ((c1 + c2) / (4.0 * a2));

        // ±(c₁−c₂)-weighted half.
        let mut dif = DVector::zeros(x.len());
        dif += x * g_pyz;
        dif += &px * g_yz;
        dif -= y * g_pxz;
        dif -= &py * g_xz;
        dif += y * (p * g_xz);
        dif -= x * (p * g_yz);
        out += dif * (sign.factor() * (c1 - c2) / (2.0 * alpha));
        out
    }

    /// Uniform-ish random point (flat blocks in [−1, 1]ᵐ, sphere blocks on
    /// the sphere).  Used for construction checks and test suites.
    pub fn random_point(&self, rng: &mut impl Rng) -> AmbientPoint {
        let mut coords = DVector::zeros(self.embed_dim);
        for (lo, hi, factor) in self.blocks() {
            let len = hi - lo;
            match factor.realization {
                FactorRealization::Flat => {
                    for k in lo..hi {
                        coords[k] = rng.gen_range(-1.0..1.0);
                    }
                }
                FactorRealization::Sphere { radius } => loop {
                    let v = DVector::from_fn(len, |_, _| rng.gen_range(-1.0_f64..1.0));
                    let norm = v.norm();
                    if norm > 1e-3 {
                        let mut block = coords.rows_mut(lo, len);
                        block.copy_from(&(v * (radius / norm)));
                        break;
                    }
                },
            }
        }
        AmbientPoint { coords }
    }

    /// Random tangent vector at `x` with entries O(1).
    pub fn random_tangent(&self, x: &AmbientPoint, rng: &mut impl Rng) -> DVector<f64> {
        self.random_tangent_raw(&x.coords, rng)
    }

    fn random_tangent_raw(&self, base: &DVector<f64>, rng: &mut impl Rng) -> DVector<f64> {
        let v = DVector::from_fn(self.embed_dim, |_, _| rng.gen_range(-1.0_f64..1.0));
        self.project_raw(base, &v)
    }
}
