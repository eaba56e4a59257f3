//! Shared linear algebra for metallic and almost product structures.
//!
//! For positive integers p, q the metallic number is the positive root of
//! x² = p·x + q,
//!
//! ```text
//!   σ_{p,q} = (p + √(p² + 4q)) / 2,        α = √(p² + 4q) = 2σ − p.
//! ```
//!
//! An almost product structure is a g-symmetric endomorphism F with F² = I.
//! Every such F induces exactly two metallic structures
//!
//! ```text
//!   φ = (p/2)·I ± (α/2)·F,
//! ```
//!
//! and conversely F = ±((2/α)·φ − (p/α)·I).  Both signs are carried as
//! explicit enums ([`Branch`], [`CurvSign`]); nothing is inferred.
//!
//! Matrices are dense ([`nalgebra::DMatrix`]); intended dimensions are small
//! (≤ 32).  Structure checks use absolute entrywise tolerances, 1e−9 by
//! default.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Default absolute tolerance for structural identity checks.
pub const STRUCTURE_TOL: f64 = 1e-9;

/// Default relative pivot threshold for Gram–Schmidt orthonormalization.
pub const PIVOT_REL_TOL: f64 = 1e-10;

/// Which of the two metallic structures is induced by an almost product
/// structure: `First` is φ = (p/2)I + (α/2)F, `Second` is φ = (p/2)I − (α/2)F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    First,
    Second,
}

/// Sign of the (c₁ − c₂)-weighted half of the metallic curvature form.  The
/// sign is tied to the [`Branch`]: `First` pairs with `Plus`, `Second` with
/// `Minus`; the pairing is validated empirically at space construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvSign {
    Plus,
    Minus,
}

impl CurvSign {
    /// The sign as a factor, +1.0 or −1.0.
    pub fn factor(self) -> f64 {
        match self {
            CurvSign::Plus => 1.0,
            CurvSign::Minus => -1.0,
        }
    }

    /// The opposite sign.
    pub fn flipped(self) -> CurvSign {
        match self {
            CurvSign::Plus => CurvSign::Minus,
            CurvSign::Minus => CurvSign::Plus,
        }
    }
}

/// Structure constants of the metallic family (p, q, σ, α).
///
/// Invariants: p ≥ 1, q ≥ 1, σ = (p + α)/2 > 1, α = √(p² + 4q) = 2σ − p > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsInput", into = "ParamsInput")]
pub struct MetallicParams {
    p: u32,
    q: u32,
    sigma: f64,
    alpha: f64,
}

/// Serialized form of [`MetallicParams`]: only the defining integers; σ and
/// α are recomputed on deserialization.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsInput {
    p: u32,
    q: u32,
}

impl TryFrom<ParamsInput> for MetallicParams {
    type Error = GeoError;

    fn try_from(input: ParamsInput) -> Result<Self> {
        MetallicParams::new(input.p, input.q)
    }
}

impl From<MetallicParams> for ParamsInput {
    fn from(params: MetallicParams) -> Self {
        ParamsInput {
            p: params.p,
            q: params.q,
        }
    }
}

impl MetallicParams {
    /// Computes σ and α for positive integers p, q.
    ///
    /// (1,1) is the golden case σ = (1+√5)/2, (2,1) the silver case 1+√2.
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(GeoError::InvalidParams {
                p: p as i64,
                q: q as i64,
            });
        }
        let pf = p as f64;
        let qf = q as f64;
        let alpha = (pf * pf + 4.0 * qf).sqrt();
        let sigma = (pf + alpha) / 2.0;
        Ok(MetallicParams {
            p,
            q,
            sigma,
            alpha,
        })
    }

    /// The golden parameters (p, q) = (1, 1).
    pub fn golden() -> Self {
        MetallicParams::new(1, 1).expect("(1,1) is valid")
    }

    pub fn p(&self) -> f64 {
        self.p as f64
    }

    pub fn q(&self) -> f64 {
        self.q as f64
    }

    pub fn p_int(&self) -> u32 {
        self.p
    }

    pub fn q_int(&self) -> u32 {
        self.q
    }

    /// The metallic number σ = (p + √(p²+4q))/2.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// α = √(p² + 4q) = 2σ − p, the gap between the two eigenvalues σ and
    /// p − σ of any induced metallic structure.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The second eigenvalue p − σ = −q/σ of an induced metallic structure.
    pub fn sigma_conjugate(&self) -> f64 {
        self.p() - self.sigma
    }
}

/// A dense linear endomorphism of Rⁿ, understood relative to a declared
/// inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism {
    entries: DMatrix<f64>,
}

impl Endomorphism {
    /// Wraps a square matrix.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(GeoError::DimensionMismatch(format!(
                "endomorphism matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Endomorphism { entries })
    }

    /// The identity on Rⁿ.
    pub fn identity(dim: usize) -> Self {
        Endomorphism {
            entries: DMatrix::identity(dim, dim),
        }
    }

    /// Builds a diagonal endomorphism.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        Endomorphism {
            entries: DMatrix::from_diagonal(&DVector::from_row_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Applies the endomorphism to a vector.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.entries * v
    }

    /// Largest absolute entry of `self² − target`, the residual used by the
    /// structural identity checks.
    fn square_residual(&self, target: &DMatrix<f64>) -> f64 {
        let sq = &self.entries * &self.entries;
        (sq - target).amax()
    }
}

/// A symmetric positive definite Gram matrix defining an inner product on Rⁿ.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    gram: DMatrix<f64>,
}

impl InnerProduct {
    /// The standard Euclidean inner product.
    pub fn standard(dim: usize) -> Self {
        InnerProduct {
            gram: DMatrix::identity(dim, dim),
        }
    }

    /// Wraps a Gram matrix, validating symmetry and positive definiteness
    /// (via Cholesky).
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        if !gram.is_square() {
            return Err(GeoError::DimensionMismatch(format!(
                "Gram matrix must be square, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        let asym = (&gram - gram.transpose()).amax();
        if asym > 1e-12 * (1.0 + gram.amax()) {
            return Err(GeoError::NotPositiveDefinite(format!(
                "Gram matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        if gram.clone().cholesky().is_none() {
            return Err(GeoError::NotPositiveDefinite(
                "Cholesky factorization failed".to_string(),
            ));
        }
        Ok(InnerProduct { gram })
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// g(x, y).
    pub fn pairing(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    /// ‖x‖ = √g(x, x).
    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.pairing(x, x).max(0.0).sqrt()
    }

    /// Largest absolute entry of G·A − Aᵀ·G, zero iff A is g-symmetric.
    pub fn symmetry_residual(&self, a: &Endomorphism) -> f64 {
        let ga = &self.gram * a.matrix();
        let atg = a.matrix().transpose() * &self.gram;
        (ga - atg).amax()
    }
}

/// Outcome of a structure check: residuals of the quadratic identity and of
/// g-symmetry, plus the combined verdict.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StructureCheck {
    pub ok: bool,
    pub polynomial_residual: f64,
    pub symmetry_residual: f64,
    pub tol: f64,
}

/// Builds the metallic structure φ = (p/2)·I ± (α/2)·F induced by an almost
/// product structure F.
///
/// Validates F² = I to `STRUCTURE_TOL` before converting.
pub fn metallic_from_product(
    f: &Endomorphism,
    params: &MetallicParams,
    branch: Branch,
) -> Result<Endomorphism> {
    let dim = f.dim();
    let id = DMatrix::<f64>::identity(dim, dim);
    let residual = f.square_residual(&id);
    if residual > STRUCTURE_TOL {
        return Err(GeoError::StructureCheck {
            role: "almost product structure (F^2 = I)",
            residual,
            tol: STRUCTURE_TOL,
        });
    }
    let half_alpha = match branch {
        Branch::First => params.alpha() / 2.0,
        Branch::Second => -params.alpha() / 2.0,
    };
    let entries = id * (params.p() / 2.0) + f.matrix() * half_alpha;
    Endomorphism::new(entries)
}

/// Recovers the almost product structure F = ±((2/α)·φ − (p/α)·I) from a
/// metallic structure φ.
///
/// Validates φ² = pφ + qI to `STRUCTURE_TOL` before converting.  With
/// `CurvSign::Plus` this inverts [`metallic_from_product`] with
/// `Branch::First`; with `CurvSign::Minus`, `Branch::Second`.
pub fn product_from_metallic(
    phi: &Endomorphism,
    params: &MetallicParams,
    sign: CurvSign,
) -> Result<Endomorphism> {
    let dim = phi.dim();
    let id = DMatrix::<f64>::identity(dim, dim);
    let target = phi.matrix() * params.p() + &id * params.q();
    let residual = phi.square_residual(&target);
    if residual > STRUCTURE_TOL {
        return Err(GeoError::StructureCheck {
            role: "metallic structure (phi^2 = p phi + q I)",
            residual,
            tol: STRUCTURE_TOL,
        });
    }
    let scale = sign.factor() * 2.0 / params.alpha();
    let shift = sign.factor() * params.p() / params.alpha();
    let entries = phi.matrix() * scale - id * shift;
    Endomorphism::new(entries)
}

/// Checks whether φ is a g-compatible metallic structure: φ² = pφ + qI and
/// g(φX, Y) = g(X, φY), both to the supplied absolute tolerance.
///
/// Compatibility g(φX, φY) = p·g(X, φY) + q·g(X, Y) is equivalent to
/// g-symmetry given the quadratic identity, so symmetry is what is measured.
pub fn check_metallic(
    phi: &Endomorphism,
    g: &InnerProduct,
    params: &MetallicParams,
    tol: f64,
) -> StructureCheck {
    let dim = phi.dim();
    let id = DMatrix::<f64>::identity(dim, dim);
    let target = phi.matrix() * params.p() + id * params.q();
    let polynomial_residual = phi.square_residual(&target);
    let symmetry_residual = g.symmetry_residual(phi);
    StructureCheck {
        ok: polynomial_residual <= tol && symmetry_residual <= tol,
        polynomial_residual,
        symmetry_residual,
        tol,
    }
}

/// Modified Gram–Schmidt with respect to an arbitrary inner product.
///
/// Vectors are processed in index order; a vector whose residual norm after
/// orthogonalization falls below `PIVOT_REL_TOL · max-input-norm` aborts with
/// [`GeoError::DegenerateBasis`].  Output spans the same space, orthonormal
/// to machine precision under `g` (a second orthogonalization pass keeps the
/// Gram residual near 1e−15).
pub fn orthonormalize(basis: &[DVector<f64>], g: &InnerProduct) -> Result<Vec<DVector<f64>>> {
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let dim = g.dim();
    for (i, v) in basis.iter().enumerate() {
        if v.len() != dim {
            return Err(GeoError::DimensionMismatch(format!(
                "basis vector {i} has length {}, inner product has dimension {dim}",
                v.len()
            )));
        }
    }
    let scale = basis
        .iter()
        .map(|v| g.norm(v))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let threshold = PIVOT_REL_TOL * scale;
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(basis.len());
    for (i, v) in basis.iter().enumerate() {
        let mut w = v.clone();
        // Two MGS passes: the second removes the O(ε·cond) leakage of the first.
        for _ in 0..2 {
            for e in &out {
                let c = g.pairing(&w, e);
                w -= e * c;
            }
        }
        let norm = g.norm(&w);
        if norm < threshold {
            return Err(GeoError::DegenerateBasis {
                index: i,
                pivot: norm,
                threshold,
            });
        }
        out.push(w / norm);
    }
    Ok(out)
}
