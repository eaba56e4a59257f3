//! Verification of five optimal curvature inequalities for bi-slant
//! submanifolds N ⊂ M₁(c₁) × M₂(c₂) with metallic structure φ.
//!
//! Each theorem bounds one curvature invariant by an expression in the
//! structure constants (p, q, α), the tangential traces of φ, and the slant
//! data of N:
//!
//!  * Wintgen:      ‖H‖² ≥ ρ + ρ⊥ + ambient correction,
//!  * Chen δ:       δ(n₁,…,n_k) ≤ trace terms + c(n₁,…,n_k)‖H‖²,
//!  * shape–Ricci:  (tr A_H)² ≥ n(n−1)Ω_k + ω + trace terms,
//!  * mean–scalar:  n(n−1)‖H‖² ≥ 2τ + trace terms,
//!  * Casorati:     2τ ≤ δ_C(u; n−1) (or δ̂_C) + trace terms,
//!
//! together with the equality-case characterizations (special shape-operator
//! forms) and the four corollary specializations (semi-slant, hemi-slant,
//! semi-invariant, slant).
//!
//! Two readings of the symbol tr²φ are supported — (tr T)² and tr(T²) — and
//! both signs of the (c₁−c₂)-weighted curvature terms; every verdict records
//! the interpretation it was computed under and the slack the alternatives
//! would give.  A falsified inequality is reported as a negative slack, never
//! masked: the slack landscape is the point of the computation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ambient::ProductSpaceForm;
use crate::error::{GeoError, Result};
use crate::immersion::{ImmersionSpec, NormalCurvature, SlantData, SubmanifoldPointData};
use crate::invariants::{
    chen_delta, delta_casorati, normal_scalar_curvature, normalized_scalar, omega_k,
    optimize_over_frames, CurvatureTensor, OptimizerConfig,
};
use crate::metallic::CurvSign;

/// Equality detection threshold |slack| ≤ eq_tol on theorem slacks.
pub const EQUALITY_TOL: f64 = 1e-8;

/// Residual threshold below which an equality-case shape-operator pattern is
/// considered attained.
pub const PATTERN_TOL: f64 = 1e-6;

/// Tolerance for matching measured slant angles against the angles a
/// submanifold type pins (0 or π/2).
pub const ANGLE_MATCH_TOL: f64 = 1e-6;

/// The five verified theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    Wintgen,
    ChenDelta,
    ShapeRicci,
    MeanScalar,
    Casorati,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [
        TheoremId::Wintgen,
        TheoremId::ChenDelta,
        TheoremId::ShapeRicci,
        TheoremId::MeanScalar,
        TheoremId::Casorati,
    ];

    /// Stable kebab-case name used in reports and CLI selectors.
    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Wintgen => "wintgen",
            TheoremId::ChenDelta => "chen-delta",
            TheoremId::ShapeRicci => "shape-ricci",
            TheoremId::MeanScalar => "mean-scalar",
            TheoremId::Casorati => "casorati",
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Interpretation of the symbol tr²φ in the closed-form right-hand sides:
/// the square of the tangential trace, (tr T)², or the trace of the square,
/// tr(T²).  The default is the square of the trace; `check-derivation`
/// compares both against direct curvature sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceSquaredReading {
    #[default]
    SquareOfTrace,
    TraceOfSquare,
}

impl TraceSquaredReading {
    pub fn other(self) -> TraceSquaredReading {
        match self {
            TraceSquaredReading::SquareOfTrace => TraceSquaredReading::TraceOfSquare,
            TraceSquaredReading::TraceOfSquare => TraceSquaredReading::SquareOfTrace,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TraceSquaredReading::SquareOfTrace => "square-of-trace",
            TraceSquaredReading::TraceOfSquare => "trace-of-square",
        }
    }
}

/// Tangential traces of the metallic structure on N: tr T = Σᵢ g(φeᵢ, eᵢ),
/// both readings of tr²φ, and the distribution-restricted traces tr TPᵢ.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TraceData {
    pub tr_t: f64,
    /// (tr T)² — the square-of-trace reading of tr²φ.
    pub tr_t_outer: f64,
    /// tr(T²) — the trace-of-square reading of tr²φ.
    pub tr_t2: f64,
    pub tr_tp1: f64,
    pub tr_tp2: f64,
}

impl TraceData {
    pub fn new(tr_t: f64, tr_t2: f64, tr_tp1: f64, tr_tp2: f64) -> Self {
        TraceData {
            tr_t,
            tr_t_outer: tr_t * tr_t,
            tr_t2,
            tr_tp1,
            tr_tp2,
        }
    }

    pub fn from_slant(slant: &SlantData) -> Self {
        TraceData::new(slant.tr_t, slant.tr_t2, slant.tr_tp1, slant.tr_tp2)
    }

    /// tr²φ under the requested reading.
    pub fn tr_phi_squared(&self, reading: TraceSquaredReading) -> f64 {
        match reading {
            TraceSquaredReading::SquareOfTrace => self.tr_t_outer,
            TraceSquaredReading::TraceOfSquare => self.tr_t2,
        }
    }

    /// |tr T − tr TP₁ − tr TP₂|; zero whenever P₁ + P₂ = I.
    pub fn split_residual(&self) -> f64 {
        (self.tr_t - self.tr_tp1 - self.tr_tp2).abs()
    }
}

/// Scalar context every right-hand side is a pure function of: structure
/// constants, factor curvatures with the chosen sign of the (c₁−c₂) terms,
/// submanifold dimension, slant angles and distribution dimensions, traces,
/// and the tr²φ reading.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhsContext {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub sign: CurvSign,
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub traces: TraceData,
    pub reading: TraceSquaredReading,
}

impl RhsContext {
    /// Assembles the context from a space and measured slant data.
    pub fn from_measurements(
        space: &ProductSpaceForm,
        slant: &SlantData,
        reading: TraceSquaredReading,
    ) -> Self {
        let params = space.params();
        RhsContext {
            p: params.p(),
            q: params.q(),
            alpha: params.alpha(),
            c1: space.c1(),
            c2: space.c2(),
            sign: space.curv_sign(),
            n: slant.d1 + slant.d2,
            d1: slant.d1,
            d2: slant.d2,
            theta1: slant.theta1,
            theta2: slant.theta2,
            traces: TraceData::from_slant(slant),
            reading,
        }
    }

    pub fn csum(&self) -> f64 {
        self.c1 + self.c2
    }

    /// The (c₁ − c₂) factor carrying the curvature-form sign.
    pub fn cdiff(&self) -> f64 {
        self.sign.factor() * (self.c1 - self.c2)
    }

    pub fn tr_sq(&self) -> f64 {
        self.traces.tr_phi_squared(self.reading)
    }

    /// ϑ₁ = cos²θ₁ (p·tr TP₁ + d₁q); zero for an empty distribution.
    pub fn vartheta1(&self) -> f64 {
        vartheta(self.theta1, self.traces.tr_tp1, self.d1, self.p, self.q)
    }

    /// ϑ₂ = cos²θ₂ (p·tr TP₂ + d₂q); zero for an empty distribution.
    pub fn vartheta2(&self) -> f64 {
        vartheta(self.theta2, self.traces.tr_tp2, self.d2, self.p, self.q)
    }

    /// The bi-slant trace block ϑ₁ + ϑ₂.
    pub fn vartheta_block(&self) -> f64 {
        self.vartheta1() + self.vartheta2()
    }

    /// Closed-form value of the ambient double sum Σ_{i≠j} K̃(eᵢ ∧ eⱼ):
    ///
    ///   n(n−1)(c₁+c₂)(p²+2q)/(2α²)
    ///   + ((c₁+c₂)/α²)[(n−1)(n·tr²φ − p·tr φ) − ϑ₁ − ϑ₂]
    ///   + (n−1)(c₁−c₂)(2·tr φ − np)/(2α).
    ///
    /// The mean–scalar and Casorati right-hand sides are 2τ − (this) and
    /// bound + (this); the Wintgen right-hand side subtracts it normalized by
    /// n(n−1).
    pub fn scalar_assembly(&self) -> f64 {
        let nf = self.n as f64;
        let a2 = self.alpha * self.alpha;
        let quad = self.p * self.p + 2.0 * self.q;
        nf * (nf - 1.0) * self.csum() * quad / (2.0 * a2)
            + self.csum() / a2
                * ((nf - 1.0) * (nf * self.tr_sq() - self.p * self.traces.tr_t)
                    - self.vartheta_block())
            + (nf - 1.0) * self.cdiff() * (2.0 * self.traces.tr_t - nf * self.p)
                / (2.0 * self.alpha)
    }

    pub fn with_reading(&self, reading: TraceSquaredReading) -> Self {
        let mut ctx = self.clone();
        ctx.reading = reading;
        ctx
    }

    pub fn with_flipped_sign(&self) -> Self {
        let mut ctx = self.clone();
        ctx.sign = self.sign.flipped();
        ctx
    }
}

fn vartheta(theta: f64, tr_tp: f64, d: usize, p: f64, q: f64) -> f64 {
    if d == 0 {
        return 0.0;
    }
    theta.cos().powi(2) * (p * tr_tp + d as f64 * q)
}

/// The constants ω, ω₁, ω₂, ω₃ of the shape–Ricci bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShapeRicciConstants {
    pub omega: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
}

impl ShapeRicciConstants {
    /// ω₁ = p(n−1)(c₁−c₂)/(2α) − (n−1)(c₁+c₂)(p²+2q)/(2α²),
    /// ω₂ = ((n−1)/(2α²))[p(c₁+c₂) + α(c₁−c₂)],
    /// ω₃ = [p(c₁+c₂) − α(c₁−c₂)]/(2α²),
    /// ω  = nω₁ + [(n−1)ω₃ − ω₂]·tr φ − n(n−1)(c₁+c₂)·tr²φ/α².
    pub fn compute(ctx: &RhsContext) -> Self {
        let nf = ctx.n as f64;
        let a = ctx.alpha;
        let a2 = a * a;
        let csum = ctx.csum();
        let cdiff = ctx.cdiff();
        let quad = ctx.p * ctx.p + 2.0 * ctx.q;
        let omega1 = ctx.p * (nf - 1.0) * cdiff / (2.0 * a) - (nf - 1.0) * csum * quad / (2.0 * a2);
        let omega2 = (nf - 1.0) / (2.0 * a2) * (ctx.p * csum + a * cdiff);
        let omega3 = (ctx.p * csum - a * cdiff) / (2.0 * a2);
        let omega = nf * omega1 + ((nf - 1.0) * omega3 - omega2) * ctx.traces.tr_t
            - nf * (nf - 1.0) * csum * ctx.tr_sq() / a2;
        ShapeRicciConstants {
            omega,
            omega1,
            omega2,
            omega3,
        }
    }
}

/// Fitted equality-case shape-operator pattern with its attainment residual
/// (zero exactly at the characterized equality configurations).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EqualityPattern {
    /// Two anticommuting traceless generators of equal norm on a rank-2
    /// support, one further umbilical direction, all remaining shape
    /// operators zero: A' = α₁I + βE, A'' = α₂I + βD with ED + DE = 0,
    /// E² = D² a rank-2 projection, A''' = α₃I.
    Wintgen {
        alpha1: f64,
        alpha2: f64,
        alpha3: f64,
        beta: f64,
        residual: f64,
    },
    /// Block-diagonal shape operators adapted to the optimal subspaces
    /// L₁,…,L_k: tr(A_H|Lⱼ) = ν for all j, trailing block νI; every other
    /// normal direction has zero block traces and zero trailing block.
    Chen { nu: f64, residual: f64 },
    /// Vanishing Ricci curvature of every k-plane section together with zero
    /// shape operators orthogonal to the mean-curvature direction.  The
    /// constancy (sup − inf) and magnitude (max |·|) of the k-plane Ricci
    /// values are reported separately.
    RicciShape {
        constancy: f64,
        magnitude: f64,
        trailing: f64,
        residual: f64,
    },
    /// Invariantly quasi-umbilical with trivial normal connection: a single
    /// normal direction with shape operator diag(a,…,a, a(n²−n)/u), all
    /// others zero.
    Casorati { a: f64, residual: f64 },
    /// Totally umbilical: every A_r a multiple of the identity.
    Umbilical { residual: f64 },
}

impl EqualityPattern {
    /// The attainment residual, ≥ 0, comparable against [`PATTERN_TOL`].
    pub fn residual(&self) -> f64 {
        match *self {
            EqualityPattern::Wintgen { residual, .. }
            | EqualityPattern::Chen { residual, .. }
            | EqualityPattern::RicciShape { residual, .. }
            | EqualityPattern::Casorati { residual, .. }
            | EqualityPattern::Umbilical { residual } => residual,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EqualityPattern::Wintgen { .. } => "wintgen",
            EqualityPattern::Chen { .. } => "chen",
            EqualityPattern::RicciShape { .. } => "ricci-shape",
            EqualityPattern::Casorati { .. } => "casorati",
            EqualityPattern::Umbilical { .. } => "umbilical",
        }
    }
}

/// Verdict for one theorem at one point.  `slack` is oriented so that the
/// theorem asserts slack ≥ 0; `holds`/`equality` compare it against `eq_tol`.
/// The slacks the flipped curvature sign and the alternate tr²φ reading
/// would produce are reported whenever they can differ.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityResult {
    pub theorem: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub equality: bool,
    pub eq_tol: f64,
    pub reading: TraceSquaredReading,
    pub sign: CurvSign,
    pub alt_sign_slack: Option<f64>,
    pub alt_reading_slack: Option<f64>,
    pub equality_case: EqualityPattern,
}

/// Knobs shared by all verifiers.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub eq_tol: f64,
    pub reading: TraceSquaredReading,
    pub optimizer: OptimizerConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            eq_tol: EQUALITY_TOL,
            reading: TraceSquaredReading::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

/// Everything the verifiers need at one submanifold point: the ambient
/// space, the second-order point data, the normal-bundle curvature, and the
/// intrinsic curvature tensor.
#[derive(Debug, Clone)]
pub struct PointBundle {
    pub space: ProductSpaceForm,
    pub data: SubmanifoldPointData,
    pub normal: NormalCurvature,
    pub tensor: CurvatureTensor,
}

impl PointBundle {
    /// Evaluates an immersion at a parameter point and assembles the bundle.
    pub fn from_immersion(immersion: &ImmersionSpec, u: &[f64]) -> Result<Self> {
        let data = immersion.point_data(u)?;
        let normal = immersion.normal_curvature(&data);
        let tensor = CurvatureTensor::from_point_data(immersion.space(), &data);
        Ok(PointBundle {
            space: immersion.space().clone(),
            data,
            normal,
            tensor,
        })
    }

    /// Assembles the bundle from precomputed parts.
    pub fn from_parts(
        space: ProductSpaceForm,
        data: SubmanifoldPointData,
        normal: NormalCurvature,
    ) -> Self {
        let tensor = CurvatureTensor::from_point_data(&space, &data);
        PointBundle {
            space,
            data,
            normal,
            tensor,
        }
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }
}

fn checked_context(
    bundle: &PointBundle,
    slant: &SlantData,
    reading: TraceSquaredReading,
) -> Result<RhsContext> {
    if slant.d1 + slant.d2 != bundle.n() {
        return Err(GeoError::Argument(format!(
            "slant data covers {} + {} tangent directions but the point has n = {}",
            slant.d1,
            slant.d2,
            bundle.n()
        )));
    }
    Ok(RhsContext::from_measurements(&bundle.space, slant, reading))
}

fn assemble_result(
    theorem: TheoremId,
    lhs: f64,
    lhs_minus_rhs: bool,
    rhs_fn: &dyn Fn(&RhsContext) -> f64,
    ctx: &RhsContext,
    opts: &VerifyOptions,
    equality_case: EqualityPattern,
) -> InequalityResult {
    let slack_of = |c: &RhsContext| {
        if lhs_minus_rhs {
            lhs - rhs_fn(c)
        } else {
            rhs_fn(c) - lhs
        }
    };
    let rhs = rhs_fn(ctx);
    let slack = slack_of(ctx);
    let alt_sign_slack = (ctx.c1 != ctx.c2).then(|| slack_of(&ctx.with_flipped_sign()));
    let alt_reading_slack =
        (ctx.csum() != 0.0).then(|| slack_of(&ctx.with_reading(ctx.reading.other())));
    InequalityResult {
        theorem,
        lhs,
        rhs,
        slack,
        holds: slack >= -opts.eq_tol,
        equality: slack.abs() <= opts.eq_tol,
        eq_tol: opts.eq_tol,
        reading: ctx.reading,
        sign: ctx.sign,
        alt_sign_slack,
        alt_reading_slack,
        equality_case,
    }
}

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

/// Wintgen bound:
/// ρ + ρ⊥ − (c₁+c₂)(p²+2q)/(2α²)
/// + ((c₁+c₂)/(nα²(n−1)))[(n−1)(p·tr φ − n·tr²φ) + ϑ₁ + ϑ₂]
/// + ((c₁−c₂)/(2nα))(np − 2·tr φ).
pub fn wintgen_rhs(ctx: &RhsContext, rho: f64, rho_perp: f64) -> f64 {
    let nf = ctx.n as f64;
    let a = ctx.alpha;
    let a2 = a * a;
    let quad = ctx.p * ctx.p + 2.0 * ctx.q;
    rho + rho_perp - ctx.csum() * quad / (2.0 * a2)
        + ctx.csum() / (nf * a2 * (nf - 1.0))
            * ((nf - 1.0) * (ctx.p * ctx.traces.tr_t - nf * ctx.tr_sq()) + ctx.vartheta_block())
        + ctx.cdiff() / (2.0 * nf * a) * (nf * ctx.p - 2.0 * ctx.traces.tr_t)
}

/// Chen bound: ((c₁+c₂)/(2α²))[b(p²+2q+2·tr²φ) − d·p·tr φ + (k−1)(ϑ₁+ϑ₂)] +
/// ((c₁−c₂)/(4α))[2·tr φ·d − p·b] + c‖H‖², where (b, c, d) are the tuple
/// constants and k the tuple length.
pub fn chen_delta_rhs(ctx: &RhsContext, b: f64, c: f64, d: f64, k_len: f64, h_sq: f64) -> f64 {
    let a = ctx.alpha;
    let a2 = a * a;
    let quad = ctx.p * ctx.p + 2.0 * ctx.q;
    ctx.csum() / (2.0 * a2)
        * (b * (quad + 2.0 * ctx.tr_sq()) - d * ctx.p * ctx.traces.tr_t
            + (k_len - 1.0) * ctx.vartheta_block())
        + ctx.cdiff() / (4.0 * a) * (2.0 * ctx.traces.tr_t * d - ctx.p * b)
        + c * h_sq
}

/// Shape–Ricci bound: n(n−1)Ω_k + ω + ((c₁+c₂)/α²)(ϑ₁+ϑ₂).
pub fn shape_ricci_rhs(ctx: &RhsContext, omega_k_value: f64) -> f64 {
    let nf = ctx.n as f64;
    let a2 = ctx.alpha * ctx.alpha;
    let constants = ShapeRicciConstants::compute(ctx);
    nf * (nf - 1.0) * omega_k_value + constants.omega + ctx.csum() / a2 * ctx.vartheta_block()
}

/// Mean–scalar bound: 2τ minus the closed-form ambient double sum.
pub fn mean_scalar_rhs(ctx: &RhsContext, two_tau: f64) -> f64 {
    two_tau - ctx.scalar_assembly()
}

/// Casorati bound: δ_C(u; n−1) (or δ̂_C) plus the closed-form ambient double
/// sum.
pub fn casorati_rhs(ctx: &RhsContext, bound: f64) -> f64 {
    bound + ctx.scalar_assembly()
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

/// ‖H‖² against the Wintgen bound; slack = LHS − RHS.
pub fn verify_wintgen(
    bundle: &PointBundle,
    slant: &SlantData,
    opts: &VerifyOptions,
) -> Result<InequalityResult> {
    if bundle.n() < 2 {
        return Err(GeoError::Argument(
            "the Wintgen bound needs n ≥ 2 (normalized scalar curvatures)".into(),
        ));
    }
    let ctx = checked_context(bundle, slant, opts.reading)?;
    let rho = normalized_scalar(bundle.tensor.tau(), bundle.n());
    let rho_perp = normal_scalar_curvature(&bundle.normal);
    let lhs = bundle.data.mean_curvature_sq();
    let pattern = wintgen_pattern(bundle.data.shape_ops());
    Ok(assemble_result(
        TheoremId::Wintgen,
        lhs,
        true,
        &|c| wintgen_rhs(c, rho, rho_perp),
        &ctx,
        opts,
        pattern,
    ))
}

/// δ(n₁,…,n_k) against the Chen bound; slack = RHS − LHS.
pub fn verify_chen_delta(
    bundle: &PointBundle,
    slant: &SlantData,
    tuple: &[usize],
    opts: &VerifyOptions,
) -> Result<InequalityResult> {
    let ctx = checked_context(bundle, slant, opts.reading)?;
    let cd = chen_delta(&bundle.tensor, tuple, opts.optimizer)?;
    let lhs = cd.delta;
    let h_sq = bundle.data.mean_curvature_sq();
    let k_len = tuple.len() as f64;
    let (b, c, d) = (cd.b, cd.c, cd.d);
    let pattern = chen_pattern(
        bundle.data.shape_ops(),
        &bundle.data.mean_curvature,
        tuple,
        &cd.inf_certificate.frame,
    )?;
    Ok(assemble_result(
        TheoremId::ChenDelta,
        lhs,
        false,
        &|ctx| chen_delta_rhs(ctx, b, c, d, k_len, h_sq),
        &ctx,
        opts,
        pattern,
    ))
}

/// (tr A_H)² against the shape–Ricci bound; slack = LHS − RHS.
pub fn verify_shape_ricci(
    bundle: &PointBundle,
    slant: &SlantData,
    k: usize,
    opts: &VerifyOptions,
) -> Result<InequalityResult> {
    let ctx = checked_context(bundle, slant, opts.reading)?;
    let om = omega_k(&bundle.tensor, k, opts.optimizer)?;
    let lhs = bundle.data.shape_op_mean().trace().powi(2);
    let pattern = ricci_shape_pattern(
        &bundle.tensor,
        bundle.data.shape_ops(),
        &bundle.data.mean_curvature,
        k,
        opts.optimizer,
    )?;
    Ok(assemble_result(
        TheoremId::ShapeRicci,
        lhs,
        true,
        &|c| shape_ricci_rhs(c, om.omega),
        &ctx,
        opts,
        pattern,
    ))
}

/// n(n−1)‖H‖² against the mean–scalar bound; slack = LHS − RHS.  Equality
/// characterizes totally umbilical points.
pub fn verify_mean_scalar(
    bundle: &PointBundle,
    slant: &SlantData,
    opts: &VerifyOptions,
) -> Result<InequalityResult> {
    let ctx = checked_context(bundle, slant, opts.reading)?;
    let nf = bundle.n() as f64;
    let lhs = nf * (nf - 1.0) * bundle.data.mean_curvature_sq();
    let two_tau = 2.0 * bundle.tensor.tau();
    let pattern = umbilical_pattern(bundle.data.shape_ops());
    Ok(assemble_result(
        TheoremId::MeanScalar,
        lhs,
        true,
        &|c| mean_scalar_rhs(c, two_tau),
        &ctx,
        opts,
        pattern,
    ))
}

/// 2τ against the Casorati bound for parameter u; slack = RHS − LHS.  The
/// bound uses δ_C(u; n−1) for u < n(n−1) and δ̂_C(u; n−1) for u > n(n−1).
pub fn verify_casorati(
    bundle: &PointBundle,
    slant: &SlantData,
    u: f64,
    opts: &VerifyOptions,
) -> Result<InequalityResult> {
    let ctx = checked_context(bundle, slant, opts.reading)?;
    let cas = delta_casorati(bundle.data.shape_ops(), bundle.n(), u, opts.optimizer)?;
    let bound = cas.bound_value(bundle.n());
    let lhs = 2.0 * bundle.tensor.tau();
    let pattern = casorati_pattern(bundle.data.shape_ops(), u)?;
    Ok(assemble_result(
        TheoremId::Casorati,
        lhs,
        false,
        &|c| casorati_rhs(c, bound),
        &ctx,
        opts,
        pattern,
    ))
}

// ---------------------------------------------------------------------------
// Derivation cross-check
// ---------------------------------------------------------------------------

/// Residual of the closed-form scalar-curvature assembly under one
/// interpretation pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivationCheck {
    pub reading: TraceSquaredReading,
    pub sign: CurvSign,
    /// Whether `sign` is the one validated for the space's branch.
    pub matched_sign: bool,
    /// |2τ (direct Gauss sum) − closed-form assembly|.
    pub residual: f64,
}

/// Compares the direct value of 2τ with the closed-form assembly
/// 2τ = (ambient double sum) + n²‖H‖² − ‖h‖² under each tr²φ reading and
/// each curvature sign; the four residuals identify which interpretation the
/// closed forms are consistent with.
pub fn derivation_residuals(bundle: &PointBundle, slant: &SlantData) -> Result<Vec<DerivationCheck>> {
    let base = checked_context(bundle, slant, TraceSquaredReading::SquareOfTrace)?;
    let n2 = (bundle.n() * bundle.n()) as f64;
    let extrinsic = n2 * bundle.data.mean_curvature_sq() - bundle.data.h_norm_sq();
    let direct = 2.0 * bundle.tensor.tau();
    let mut checks = Vec::with_capacity(4);
    for reading in [
        TraceSquaredReading::SquareOfTrace,
        TraceSquaredReading::TraceOfSquare,
    ] {
        for sign in [CurvSign::Plus, CurvSign::Minus] {
            let mut ctx = base.with_reading(reading);
            ctx.sign = sign;
            let closed = ctx.scalar_assembly() + extrinsic;
            checks.push(DerivationCheck {
                reading,
                sign,
                matched_sign: sign == bundle.space.curv_sign(),
                residual: (direct - closed).abs(),
            });
        }
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// Corollary specialization
// ---------------------------------------------------------------------------

/// The four corollary families of submanifold types: each pins one or both
/// slant angles (semi-slant: θ₁ = 0; hemi-slant: θ₂ = π/2; semi-invariant:
/// both; slant: a single slant distribution).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubmanifoldType {
    SemiSlant,
    HemiSlant,
    SemiInvariant,
    Slant,
}

impl SubmanifoldType {
    pub const ALL: [SubmanifoldType; 4] = [
        SubmanifoldType::SemiSlant,
        SubmanifoldType::HemiSlant,
        SubmanifoldType::SemiInvariant,
        SubmanifoldType::Slant,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SubmanifoldType::SemiSlant => "semi-slant",
            SubmanifoldType::HemiSlant => "hemi-slant",
            SubmanifoldType::SemiInvariant => "semi-invariant",
            SubmanifoldType::Slant => "slant",
        }
    }
}

/// Theorem-specific scalars that complete a right-hand side: the invariant
/// values the bound is built around.
#[derive(Debug, Clone, Serialize)]
pub enum TheoremAux {
    Wintgen { rho: f64, rho_perp: f64 },
    ChenDelta { tuple: Vec<usize>, h_sq: f64 },
    ShapeRicci { omega_k: f64 },
    MeanScalar { two_tau: f64 },
    Casorati { bound: f64 },
}

impl TheoremAux {
    pub fn theorem(&self) -> TheoremId {
        match self {
            TheoremAux::Wintgen { .. } => TheoremId::Wintgen,
            TheoremAux::ChenDelta { .. } => TheoremId::ChenDelta,
            TheoremAux::ShapeRicci { .. } => TheoremId::ShapeRicci,
            TheoremAux::MeanScalar { .. } => TheoremId::MeanScalar,
            TheoremAux::Casorati { .. } => TheoremId::Casorati,
        }
    }
}

/// Agreement between the bi-slant right-hand side under the type's exact
/// angle substitution and the corollary-table formula for that type.
#[derive(Debug, Clone, Serialize)]
pub struct SpecializationCheck {
    pub theorem: TheoremId,
    pub sub_type: SubmanifoldType,
    pub bi_slant_rhs: f64,
    pub table_rhs: f64,
    pub difference: f64,
}

fn angle_is(theta: f64, target: f64) -> bool {
    (theta - target).abs() <= ANGLE_MATCH_TOL
}

fn validate_type(sub_type: SubmanifoldType, ctx: &RhsContext) -> Result<()> {
    let fail = |angle: &str, measured: f64, required: &str| {
        Err(GeoError::Classification(format!(
            "{} submanifold requires {angle} = {required}, measured {angle} = {measured:.12}",
            sub_type.label()
        )))
    };
    match sub_type {
        SubmanifoldType::SemiSlant => {
            if ctx.d1 > 0 && !angle_is(ctx.theta1, 0.0) {
                return fail("θ₁", ctx.theta1, "0");
            }
        }
        SubmanifoldType::HemiSlant => {
            if ctx.d2 > 0 && !angle_is(ctx.theta2, std::f64::consts::FRAC_PI_2) {
                return fail("θ₂", ctx.theta2, "π/2");
            }
        }
        SubmanifoldType::SemiInvariant => {
            if ctx.d1 > 0 && !angle_is(ctx.theta1, 0.0) {
                return fail("θ₁", ctx.theta1, "0");
            }
            if ctx.d2 > 0 && !angle_is(ctx.theta2, std::f64::consts::FRAC_PI_2) {
                return fail("θ₂", ctx.theta2, "π/2");
            }
        }
        SubmanifoldType::Slant => {
            if ctx.d1 != 0 && ctx.d2 != 0 {
                return Err(GeoError::Classification(format!(
                    "slant submanifold requires a single slant distribution, got splits d₁ = {} (θ₁ = {:.12}) and d₂ = {} (θ₂ = {:.12})",
                    ctx.d1, ctx.theta1, ctx.d2, ctx.theta2
                )));
            }
        }
    }
    if ctx.traces.split_residual() > 1e-9 {
        return Err(GeoError::Classification(format!(
            "trace split tr TP₁ + tr TP₂ = {} does not reproduce tr T = {}",
            ctx.traces.tr_tp1 + ctx.traces.tr_tp2,
            ctx.traces.tr_t
        )));
    }
    Ok(())
}

/// The context with the type's pinned angles substituted exactly.
fn substituted_context(sub_type: SubmanifoldType, ctx: &RhsContext) -> RhsContext {
    let mut out = ctx.clone();
    match sub_type {
        SubmanifoldType::SemiSlant => out.theta1 = 0.0,
        SubmanifoldType::HemiSlant => out.theta2 = std::f64::consts::FRAC_PI_2,
        SubmanifoldType::SemiInvariant => {
            out.theta1 = 0.0;
            out.theta2 = std::f64::consts::FRAC_PI_2;
        }
        SubmanifoldType::Slant => {
            let theta = if ctx.d1 > 0 { ctx.theta1 } else { ctx.theta2 };
            out.theta1 = theta;
            out.theta2 = theta;
        }
    }
    out
}

/// The corollary tables' trace block for the type, transcribed row by row:
/// semi-slant      p·tr TP₁ + d₁q + cos²θ (p·tr TP₂ + d₂q),
/// hemi-slant      cos²θ (p·tr TP₁ + d₁q),
/// semi-invariant  p·tr TP₁ + d₁q,
/// slant           cos²θ (p·tr T + nq).
fn table_trace_block(sub_type: SubmanifoldType, ctx: &RhsContext) -> f64 {
    let t = &ctx.traces;
    let (d1, d2) = (ctx.d1 as f64, ctx.d2 as f64);
    match sub_type {
        SubmanifoldType::SemiSlant => {
            ctx.p * t.tr_tp1
                + d1 * ctx.q
                + ctx.theta2.cos().powi(2) * (ctx.p * t.tr_tp2 + d2 * ctx.q)
        }
        SubmanifoldType::HemiSlant => ctx.theta1.cos().powi(2) * (ctx.p * t.tr_tp1 + d1 * ctx.q),
        SubmanifoldType::SemiInvariant => ctx.p * t.tr_tp1 + d1 * ctx.q,
        SubmanifoldType::Slant => {
            let theta = if ctx.d1 > 0 { ctx.theta1 } else { ctx.theta2 };
            theta.cos().powi(2) * (ctx.p * t.tr_t + ctx.n as f64 * ctx.q)
        }
    }
}

/// One theorem right-hand side with the trace block supplied explicitly;
/// scaffolds are shared between the bi-slant formulas and the table rows,
/// which differ only in that block.
fn rhs_with_block(aux: &TheoremAux, ctx: &RhsContext, block: f64) -> f64 {
    let nf = ctx.n as f64;
    let a = ctx.alpha;
    let a2 = a * a;
    let quad = ctx.p * ctx.p + 2.0 * ctx.q;
    let tr_t = ctx.traces.tr_t;
    match aux {
        TheoremAux::Wintgen { rho, rho_perp } => {
            rho + rho_perp - ctx.csum() * quad / (2.0 * a2)
                + ctx.csum() / (nf * a2 * (nf - 1.0))
                    * ((nf - 1.0) * (ctx.p * tr_t - nf * ctx.tr_sq()) + block)
                + ctx.cdiff() / (2.0 * nf * a) * (nf * ctx.p - 2.0 * tr_t)
        }
        TheoremAux::ChenDelta { tuple, h_sq } => {
            let (b, c, d) = crate::invariants::chen_constants(ctx.n, tuple)
                .expect("tuple validated before specialization");
            let k_len = tuple.len() as f64;
            ctx.csum() / (2.0 * a2)
                * (b * (quad + 2.0 * ctx.tr_sq()) - d * ctx.p * tr_t + (k_len - 1.0) * block)
                + ctx.cdiff() / (4.0 * a) * (2.0 * tr_t * d - ctx.p * b)
                + c * h_sq
        }
        TheoremAux::ShapeRicci { omega_k } => {
            let constants = ShapeRicciConstants::compute(ctx);
            nf * (nf - 1.0) * omega_k + constants.omega + ctx.csum() / a2 * block
        }
        TheoremAux::MeanScalar { two_tau } => {
            two_tau - nf * (nf - 1.0) * ctx.csum() * quad / (2.0 * a2)
                + ctx.csum() / a2 * (block - (nf - 1.0) * (nf * ctx.tr_sq() - ctx.p * tr_t))
                - (nf - 1.0) * ctx.cdiff() * (2.0 * tr_t - nf * ctx.p) / (2.0 * a)
        }
        TheoremAux::Casorati { bound } => {
            bound + nf * (nf - 1.0) * ctx.csum() * quad / (2.0 * a2)
                + ctx.csum() / a2 * ((nf - 1.0) * (nf * ctx.tr_sq() - ctx.p * tr_t) - block)
                + (nf - 1.0) * ctx.cdiff() * (2.0 * tr_t - nf * ctx.p) / (2.0 * a)
        }
    }
}

/// Checks one corollary row: validates the measured angles against the
/// claimed type, substitutes the type's exact angles into the bi-slant
/// right-hand side, evaluates the corollary-table row, and reports both
/// values with their difference.
pub fn specialize(
    sub_type: SubmanifoldType,
    ctx: &RhsContext,
    aux: &TheoremAux,
) -> Result<SpecializationCheck> {
    if let TheoremAux::ChenDelta { tuple, .. } = aux {
        crate::invariants::chen_constants(ctx.n, tuple)?;
    }
    validate_type(sub_type, ctx)?;
    let subst = substituted_context(sub_type, ctx);
    let bi_slant_rhs = rhs_with_block(aux, &subst, subst.vartheta_block());
    let table_rhs = rhs_with_block(aux, &subst, table_trace_block(sub_type, &subst));
    Ok(SpecializationCheck {
        theorem: aux.theorem(),
        sub_type,
        bi_slant_rhs,
        table_rhs,
        difference: bi_slant_rhs - table_rhs,
    })
}

// ---------------------------------------------------------------------------
// Equality-case detectors
// ---------------------------------------------------------------------------

fn frobenius_ip(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn traceless_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mean = m.trace() / n as f64;
    let mut out = m.clone();
    for i in 0..n {
        out[(i, i)] -= mean;
    }
    out
}

fn sorted_eigs_desc(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

/// Extends a set of orthonormal columns to a full orthonormal basis with
/// coordinate-vector candidates (deterministic modified Gram–Schmidt).
fn extend_orthonormal(mut basis: Vec<DVector<f64>>, dim: usize) -> Vec<DVector<f64>> {
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.dot(&v);
                v -= b * coeff;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    basis
}

/// Totally umbilical test: max_r ‖A_r − (tr A_r/n) I‖_F.
pub fn umbilical_pattern(shape_ops: &[DMatrix<f64>]) -> EqualityPattern {
    let residual = shape_ops
        .iter()
        .map(|a| traceless_part(a).norm())
        .fold(0.0_f64, f64::max);
    EqualityPattern::Umbilical { residual }
}

/// Tests the Wintgen equality form: after an optimal rotation of the normal
/// frame, at most two shape operators have nonzero traceless parts βE, βD of
/// equal norm, with ED + DE = 0 and E² = D² a rank-2 projection; every
/// remaining operator is a multiple of the identity, and at most one of those
/// multiples is nonzero.  All conditions are evaluated basis-invariantly
/// through the Gram matrix of the traceless parts.
pub fn wintgen_pattern(shape_ops: &[DMatrix<f64>]) -> EqualityPattern {
    let zero = EqualityPattern::Wintgen {
        alpha1: 0.0,
        alpha2: 0.0,
        alpha3: 0.0,
        beta: 0.0,
        residual: 0.0,
    };
    let Some(first) = shape_ops.first() else {
        return zero;
    };
    let n = first.nrows();
    let k = shape_ops.len();
    if n == 0 {
        return zero;
    }
    let nf = n as f64;
    let traceless: Vec<DMatrix<f64>> = shape_ops.iter().map(traceless_part).collect();
    let means: Vec<f64> = shape_ops.iter().map(|a| a.trace() / nf).collect();
    let mut gram = DMatrix::zeros(k, k);
    for r in 0..k {
        for s in r..k {
            let ip = frobenius_ip(&traceless[r], &traceless[s]);
            gram[(r, s)] = ip;
            gram[(s, r)] = ip;
        }
    }
    let (vals, vecs) = sorted_eigs_desc(&gram);
    let l1 = vals.first().copied().unwrap_or(0.0).max(0.0);
    let l2 = vals.get(1).copied().unwrap_or(0.0).max(0.0);
    let tail = vals
        .iter()
        .skip(2)
        .map(|v| v.max(0.0))
        .sum::<f64>()
        .sqrt();
    let beta = ((l1 + l2) / 4.0).sqrt();
    let mismatch = l1.sqrt() - l2.sqrt();

    let combo_traceless = |col: usize| -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(n, n);
        for r in 0..k {
            acc += &traceless[r] * vecs[(r, col)];
        }
        acc
    };
    let combo_mean = |col: usize| -> f64 { (0..k).map(|r| vecs[(r, col)] * means[r]).sum() };

    let mut structure = 0.0_f64;
    let (alpha1, alpha2, alpha3);
    if beta > 1e-12 && n >= 2 {
        let u1 = combo_traceless(0);
        let u2 = if k >= 2 {
            combo_traceless(1)
        } else {
            DMatrix::zeros(n, n)
        };
        let anticomm = (&u1 * &u2 + &u2 * &u1).norm();
        let b2 = beta * beta;
        let square_residual = |u: &DMatrix<f64>| -> f64 {
            let (e, _) = sorted_eigs_desc(&(u * u));
            let mut acc = (e[0] - b2).powi(2) + (e[1] - b2).powi(2);
            for v in e.iter().skip(2) {
                acc += v * v;
            }
            acc.sqrt()
        };
        let sq1 = square_residual(&u1);
        let sq2 = square_residual(&u2);
        let sq_diff = (&u1 * &u1 - &u2 * &u2).norm();
        structure = anticomm.max(sq1).max(sq2).max(sq_diff);
        alpha1 = combo_mean(0);
        alpha2 = if k >= 2 { combo_mean(1) } else { 0.0 };
        alpha3 = (2..k).map(|c| combo_mean(c).powi(2)).sum::<f64>().sqrt();
    } else {
        alpha1 = means.iter().map(|m| m * m).sum::<f64>().sqrt();
        alpha2 = 0.0;
        alpha3 = 0.0;
    }
    let residual = tail.max(mismatch).max(structure);
    EqualityPattern::Wintgen {
        alpha1,
        alpha2,
        alpha3,
        beta,
        residual,
    }
}

/// Tests the Chen equality form in the basis adapted to the optimal
/// subspaces L₁,…,L_k (the columns of `partition_frame`) with the first
/// normal direction aligned to the mean curvature vector: all shape
/// operators block-diagonal, tr(A_H|Lⱼ) = ν with trailing block νI, and zero
/// block traces / trailing blocks for the other normal directions.  With
/// ‖H‖ = 0 the conventions ν = 0 and the zero-trace conditions apply to
/// every normal direction.
pub fn chen_pattern(
    shape_ops: &[DMatrix<f64>],
    mean: &DVector<f64>,
    tuple: &[usize],
    partition_frame: &DMatrix<f64>,
) -> Result<EqualityPattern> {
    let Some(first) = shape_ops.first() else {
        return Ok(EqualityPattern::Chen {
            nu: 0.0,
            residual: 0.0,
        });
    };
    let n = first.nrows();
    let k_ops = shape_ops.len();
    let s: usize = tuple.iter().sum();
    if s > n || tuple.contains(&0) {
        return Err(GeoError::Argument(format!(
            "partition {tuple:?} does not fit a tangent space of dimension {n}"
        )));
    }
    if partition_frame.nrows() != n || partition_frame.ncols() != s {
        return Err(GeoError::Argument(format!(
            "partition frame must be {n}×{s}, got {}×{}",
            partition_frame.nrows(),
            partition_frame.ncols()
        )));
    }
    if mean.len() != k_ops {
        return Err(GeoError::Argument(format!(
            "mean curvature vector has {} normal components, expected {k_ops}",
            mean.len()
        )));
    }

    let cols: Vec<DVector<f64>> = (0..s).map(|c| partition_frame.column(c).clone_owned()).collect();
    let basis = extend_orthonormal(cols, n);
    if basis.len() != n {
        return Err(GeoError::Argument(
            "partition frame could not be completed to an orthonormal basis".into(),
        ));
    }
    let q = DMatrix::from_fn(n, n, |r, c| basis[c][r]);
    let rotated: Vec<DMatrix<f64>> = shape_ops.iter().map(|a| q.transpose() * a * &q).collect();

    // Block index per tangent direction: 0..k for the Lⱼ, k for the trailing
    // complement.
    let blocks = tuple.len();
    let mut block_of = vec![blocks; n];
    let mut offset = 0;
    for (j, &nj) in tuple.iter().enumerate() {
        for b in block_of.iter_mut().skip(offset).take(nj) {
            *b = j;
        }
        offset += nj;
    }

    let h_norm = mean.norm();
    let aligned = h_norm > 1e-12;
    let normal_basis = if aligned {
        extend_orthonormal(vec![mean / h_norm], k_ops)
    } else {
        (0..k_ops)
            .map(|i| DVector::from_fn(k_ops, |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect()
    };
    if normal_basis.len() != k_ops {
        return Err(GeoError::Argument(
            "mean direction could not be completed to a normal basis".into(),
        ));
    }
    let combos: Vec<DMatrix<f64>> = normal_basis
        .iter()
        .map(|w| {
            let mut acc = DMatrix::zeros(n, n);
            for (r, op) in rotated.iter().enumerate() {
                acc += op * w[r];
            }
            acc
        })
        .collect();

    let block_trace = |m: &DMatrix<f64>, j: usize| -> f64 {
        (0..n).filter(|&i| block_of[i] == j).map(|i| m[(i, i)]).sum()
    };

    let mut acc = 0.0_f64;
    for m in &combos {
        for i in 0..n {
            for j in (i + 1)..n {
                if block_of[i] != block_of[j] {
                    acc += m[(i, j)].powi(2);
                }
            }
        }
    }
    let mut nu = 0.0;
    for (t, m) in combos.iter().enumerate() {
        let is_mean_direction = aligned && t == 0;
        if is_mean_direction {
            nu = (0..blocks).map(|j| block_trace(m, j)).sum::<f64>() / blocks as f64;
        }
        let target = if is_mean_direction { nu } else { 0.0 };
        for j in 0..blocks {
            acc += (block_trace(m, j) - target).powi(2);
        }
        for i in 0..n {
            if block_of[i] != blocks {
                continue;
            }
            acc += (m[(i, i)] - target).powi(2);
            for j in (i + 1)..n {
                if block_of[j] == blocks {
                    acc += m[(i, j)].powi(2);
                }
            }
        }
    }
    Ok(EqualityPattern::Chen {
        nu,
        residual: acc.sqrt(),
    })
}

/// Tests the shape–Ricci equality criterion: the Ricci curvature of every
/// k-plane section vanishes (constancy and magnitude of the optimized
/// values) and the shape operators orthogonal to the mean-curvature
/// direction vanish (trailing norm).
pub fn ricci_shape_pattern(
    tensor: &CurvatureTensor,
    shape_ops: &[DMatrix<f64>],
    mean: &DVector<f64>,
    k: usize,
    config: OptimizerConfig,
) -> Result<EqualityPattern> {
    let n = tensor.n();
    if k < 2 || k > n {
        return Err(GeoError::Argument(format!(
            "partial Ricci index must satisfy 2 ≤ k ≤ n = {n}, got {k}"
        )));
    }
    let objective = |frame: &DMatrix<f64>| -> f64 {
        let x = frame.column(0).clone_owned();
        let mut acc = 0.0;
        for j in 1..k {
            let y = frame.column(j).clone_owned();
            acc += tensor.r4(&x, &y, &y, &x);
        }
        acc
    };
    let inf = optimize_over_frames(n, k, &objective, true, config).value;
    let sup = optimize_over_frames(n, k, &objective, false, config).value;
    let constancy = (sup - inf).max(0.0);
    let magnitude = inf.abs().max(sup.abs());

    let h_sq: f64 = shape_ops.iter().map(|a| frobenius_ip(a, a)).sum();
    let k_ops = shape_ops.len();
    let aligned_sq = if k_ops == 0 {
        0.0
    } else {
        let dir = if mean.norm() > 1e-12 {
            mean / mean.norm()
        } else {
            // With H = 0 take the normal direction carrying the most shape
            // operator, the best case for the trailing criterion.
            let mut gram = DMatrix::zeros(k_ops, k_ops);
            for r in 0..k_ops {
                for s in r..k_ops {
                    let ip = frobenius_ip(&shape_ops[r], &shape_ops[s]);
                    gram[(r, s)] = ip;
                    gram[(s, r)] = ip;
                }
            }
            let (_, vecs) = sorted_eigs_desc(&gram);
            vecs.column(0).clone_owned()
        };
        let mut acc = DMatrix::zeros(shape_ops[0].nrows(), shape_ops[0].ncols());
        for (r, op) in shape_ops.iter().enumerate() {
            acc += op * dir[r];
        }
        frobenius_ip(&acc, &acc)
    };
    let trailing = (h_sq - aligned_sq).max(0.0).sqrt();
    let residual = constancy.max(magnitude).max(trailing);
    Ok(EqualityPattern::RicciShape {
        constancy,
        magnitude,
        trailing,
        residual,
    })
}

/// Tests the Casorati equality form: the stacked shape operators have rank
/// one over the normal directions (a single profile matrix carries all of
/// h, so the normal connection is trivial), and the profile's eigenvalues
/// are {a × (n−1), a(n²−n)/u} for a fitted a.
pub fn casorati_pattern(shape_ops: &[DMatrix<f64>], u: f64) -> Result<EqualityPattern> {
    if u.is_nan() || u <= 0.0 {
        return Err(GeoError::Argument(format!(
            "Casorati parameter must be positive, got {u}"
        )));
    }
    let Some(first) = shape_ops.first() else {
        return Ok(EqualityPattern::Casorati {
            a: 0.0,
            residual: 0.0,
        });
    };
    let n = first.nrows();
    let k = shape_ops.len();
    let dim = n * (n + 1) / 2;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut stacked = DMatrix::zeros(k, dim);
    for (r, op) in shape_ops.iter().enumerate() {
        let mut col = 0;
        for i in 0..n {
            for j in i..n {
                stacked[(r, col)] = if i == j {
                    op[(i, i)]
                } else {
                    sqrt2 * op[(i, j)]
                };
                col += 1;
            }
        }
    }
    let svd = stacked.svd(false, true);
    let mut singular: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular.sort_by(|a, b| b.total_cmp(a));
    let sigma1 = singular.first().copied().unwrap_or(0.0);
    let rank_residual = singular.iter().skip(1).map(|s| s * s).sum::<f64>().sqrt();
    if sigma1 <= 1e-12 {
        return Ok(EqualityPattern::Casorati {
            a: 0.0,
            residual: rank_residual,
        });
    }
    let v_t = svd.v_t.expect("right singular vectors requested");
    // Row of v_t matching the largest singular value.
    let top_row = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut profile = DMatrix::zeros(n, n);
    let mut col = 0;
    for i in 0..n {
        for j in i..n {
            let value = sigma1 * v_t[(top_row, col)];
            if i == j {
                profile[(i, i)] = value;
            } else {
                profile[(i, j)] = value / sqrt2;
                profile[(j, i)] = value / sqrt2;
            }
            col += 1;
        }
    }
    if profile.trace() < 0.0 {
        profile = -profile;
    }
    let (eigs, _) = sorted_eigs_desc(&profile);
    let m = (n * n - n) as f64 / u;
    let mut best = f64::INFINITY;
    let mut best_a = 0.0;
    for l in 0..n {
        let sum_rest: f64 = eigs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != l)
            .map(|(_, v)| v)
            .sum();
        let a = (sum_rest + m * eigs[l]) / ((n - 1) as f64 + m * m);
        let mut res = (eigs[l] - m * a).powi(2);
        for (i, v) in eigs.iter().enumerate() {
            if i != l {
                res += (v - a).powi(2);
            }
        }
        if res < best {
            best = res;
            best_a = a;
        }
    }
    Ok(EqualityPattern::Casorati {
        a: best_a,
        residual: (rank_residual * rank_residual + best).sqrt(),
    })
}
