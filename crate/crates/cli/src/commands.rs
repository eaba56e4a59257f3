//! Subcommand drivers: grid sweeps (invariants, verify, check-derivation),
//! algebraic oracle batteries, and the built-in case listing.
//!
//! Grid points are evaluated concurrently but reported in index order, and
//! every random draw comes from a seeded counter-based generator, so reruns
//! with identical inputs produce byte-identical reports.  A falsification
//! (slack below −slack_tol) never aborts a sweep; it is recorded and the
//! remaining points still run.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use metallic_geo::inequalities::{
    derivation_residuals, verify_casorati, verify_chen_delta, verify_mean_scalar,
    verify_shape_ricci, verify_wintgen, InequalityResult, PointBundle, TheoremId,
    TraceSquaredReading, VerifyOptions,
};
use metallic_geo::{
    catalog, chen_lemma_check, ddvv_component_check, CurvatureInvariants, OptimizerConfig,
    SlantData,
};

use crate::config::{CliError, ResolvedCase};
use crate::report::{
    ChenOracleSummary, DdvvOracleSummary, DerivationAggregate, Falsification, InvariantBlock,
    ListingEntry, OracleReport, PointFailure, PointReport, Report, SkipEntry, TheoremReport,
};

/// Sweep verdict; `main` maps it onto the exit-status contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    /// At least one bound was violated beyond the slack tolerance.
    Falsified,
    /// No grid point produced a valid result.
    NumericalFailure,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Clean => 0,
            Outcome::Falsified => 1,
            Outcome::NumericalFailure => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepMode {
    Invariants,
    Verify,
    CheckDerivation,
}

/// One pre-validated verification task, run at every grid point.
#[derive(Debug, Clone)]
enum PlanItem {
    Wintgen,
    Chen(Vec<usize>),
    ShapeRicci(usize),
    MeanScalar,
    Casorati(f64),
}

impl PlanItem {
    fn label(&self) -> String {
        match self {
            PlanItem::Wintgen => "wintgen".into(),
            PlanItem::Chen(tuple) => format!("chen-delta {tuple:?}"),
            PlanItem::ShapeRicci(k) => format!("shape-ricci k={k}"),
            PlanItem::MeanScalar => "mean-scalar".into(),
            PlanItem::Casorati(u) => format!("casorati u={u}"),
        }
    }
}

pub fn cmd_invariants(case: &ResolvedCase) -> Result<(Report, Outcome), CliError> {
    run_sweep(case, SweepMode::Invariants, "invariants")
}

pub fn cmd_verify(case: &ResolvedCase) -> Result<(Report, Outcome), CliError> {
    run_sweep(case, SweepMode::Verify, "verify")
}

pub fn cmd_check_derivation(case: &ResolvedCase) -> Result<(Report, Outcome), CliError> {
    run_sweep(case, SweepMode::CheckDerivation, "check-derivation")
}

struct PointOutcome {
    report: PointReport,
    falsifications: Vec<Falsification>,
    /// (theorem name, slack) pairs feeding the worst-slack table.
    slacks: Vec<(&'static str, f64)>,
}

fn run_sweep(
    case: &ResolvedCase,
    mode: SweepMode,
    command: &str,
) -> Result<(Report, Outcome), CliError> {
    let (plan, skipped) = if mode == SweepMode::Verify {
        build_plan(case)?
    } else {
        (Vec::new(), Vec::new())
    };
    let opts = VerifyOptions {
        eq_tol: case.eq_tol,
        reading: case.reading,
        optimizer: OptimizerConfig::new(case.restarts, case.seed),
    };

    let evaluations: Vec<Result<PointOutcome, PointFailure>> = case
        .points
        .par_iter()
        .enumerate()
        .map(|(index, params)| evaluate_point(case, index, params, mode, &plan, &opts))
        .collect();

    let mut report = Report::new(command, case.reading.label());
    report.interpretation.curvature_sign = Some(case.immersion.space().curv_sign());
    report.case = Some(case.name.clone());
    report.seed = Some(case.seed);
    report.restarts = Some(case.restarts);
    report.slack_tol = Some(case.slack_tol);
    report.eq_tol = Some(case.eq_tol);
    report.skipped = skipped;

    let mut derivation_max: Vec<DerivationAggregate> = Vec::new();
    let mut valid = 0usize;
    for evaluation in evaluations {
        match evaluation {
            Ok(outcome) => {
                valid += 1;
                for (name, slack) in outcome.slacks {
                    report
                        .worst_slacks
                        .entry(name.to_string())
                        .and_modify(|w| *w = w.min(slack))
                        .or_insert(slack);
                }
                report.falsifications.extend(outcome.falsifications);
                for (i, check) in outcome.report.derivation.iter().enumerate() {
                    if derivation_max.len() <= i {
                        derivation_max.push(DerivationAggregate {
                            reading: check.reading.label(),
                            sign: check.sign,
                            matched_sign: check.matched_sign,
                            max_residual: check.residual,
                        });
                    } else {
                        let agg = &mut derivation_max[i];
                        agg.max_residual = agg.max_residual.max(check.residual);
                    }
                }
                report.points.push(outcome.report);
            }
            Err(failure) => report.failures.push(failure),
        }
    }
    report.derivation_summary = derivation_max;

    let outcome = if !case.points.is_empty() && valid == 0 {
        Outcome::NumericalFailure
    } else if !report.falsifications.is_empty() {
        Outcome::Falsified
    } else {
        Outcome::Clean
    };
    Ok((report, outcome))
}

fn evaluate_point(
    case: &ResolvedCase,
    index: usize,
    params: &[f64],
    mode: SweepMode,
    plan: &[PlanItem],
    opts: &VerifyOptions,
) -> Result<PointOutcome, PointFailure> {
    let fail = |error: String| PointFailure {
        point: index,
        params: params.to_vec(),
        error,
    };

    let bundle =
        PointBundle::from_immersion(&case.immersion, params).map_err(|e| fail(e.to_string()))?;
    let slant = case
        .immersion
        .slant_analysis(&bundle.data, case.d1_basis.as_deref(), case.d2_basis.as_deref())
        .map_err(|e| fail(e.to_string()))?;
    let invariants = CurvatureInvariants::compute(&bundle.space, &bundle.data, &bundle.normal);
    let block = invariant_block(&invariants, &slant);
    check_block_finite(&block).map_err(&fail)?;

    let mut theorems = Vec::new();
    let mut falsifications = Vec::new();
    let mut slacks = Vec::new();
    if mode == SweepMode::Verify {
        for item in plan {
            let (result, tuple, k, u) = match item {
                PlanItem::Wintgen => (verify_wintgen(&bundle, &slant, opts), None, None, None),
                PlanItem::Chen(tuple) => (
                    verify_chen_delta(&bundle, &slant, tuple, opts),
                    Some(tuple.clone()),
                    None,
                    None,
                ),
                PlanItem::ShapeRicci(k) => (
                    verify_shape_ricci(&bundle, &slant, *k, opts),
                    None,
                    Some(*k),
                    None,
                ),
                PlanItem::MeanScalar => (verify_mean_scalar(&bundle, &slant, opts), None, None, None),
                PlanItem::Casorati(u) => (
                    verify_casorati(&bundle, &slant, *u, opts),
                    None,
                    None,
                    Some(*u),
                ),
            };
            let result = result.map_err(|e| fail(format!("{}: {e}", item.label())))?;
            check_result_finite(&result)
                .map_err(|field| fail(format!("{}: non-finite {field}", item.label())))?;
            slacks.push((result.theorem.name(), result.slack));
            if result.slack < -case.slack_tol {
                falsifications.push(Falsification {
                    point: index,
                    theorem: result.theorem,
                    slack: result.slack,
                    detail: format!(
                        "{}: lhs {:.9} under rhs {:.9} (slack {:.3e})",
                        item.label(),
                        result.lhs,
                        result.rhs,
                        result.slack
                    ),
                });
            }
            theorems.push(TheoremReport {
                tuple,
                k,
                u,
                result,
            });
        }
    }

    let derivation = if mode == SweepMode::CheckDerivation {
        let checks = derivation_residuals(&bundle, &slant).map_err(|e| fail(e.to_string()))?;
        if let Some(bad) = checks.iter().find(|c| !c.residual.is_finite()) {
            return Err(fail(format!(
                "non-finite assembly residual under ({}, {:?})",
                bad.reading.label(),
                bad.sign
            )));
        }
        checks
    } else {
        Vec::new()
    };

    Ok(PointOutcome {
        report: PointReport {
            index,
            params: params.to_vec(),
            invariants: Some(block),
            theorems,
            derivation,
        },
        falsifications,
        slacks,
    })
}

fn invariant_block(inv: &CurvatureInvariants, slant: &SlantData) -> InvariantBlock {
    InvariantBlock {
        tau: inv.tau,
        rho: inv.rho,
        rho_perp: inv.rho_perp,
        mean_curvature_sq: inv.h_sq,
        casorati: inv.casorati,
        d1: slant.d1,
        d2: slant.d2,
        theta1: slant.theta1,
        theta2: slant.theta2,
        angle_deviation_1: slant.angle_deviation_1,
        angle_deviation_2: slant.angle_deviation_2,
        tr_t: slant.tr_t,
        tr_t2: slant.tr_t2,
        tr_tp1: slant.tr_tp1,
        tr_tp2: slant.tr_tp2,
    }
}

fn check_block_finite(block: &InvariantBlock) -> Result<(), String> {
    for (name, value) in [
        ("tau", block.tau),
        ("rho", block.rho),
        ("rho_perp", block.rho_perp),
        ("mean_curvature_sq", block.mean_curvature_sq),
        ("casorati", block.casorati),
        ("theta1", block.theta1),
        ("theta2", block.theta2),
        ("tr_t", block.tr_t),
        ("tr_t2", block.tr_t2),
        ("tr_tp1", block.tr_tp1),
        ("tr_tp2", block.tr_tp2),
    ] {
        if !value.is_finite() {
            return Err(format!("non-finite invariant {name} = {value}"));
        }
    }
    Ok(())
}

fn check_result_finite(result: &InequalityResult) -> Result<(), &'static str> {
    if !result.lhs.is_finite() {
        return Err("lhs");
    }
    if !result.rhs.is_finite() {
        return Err("rhs");
    }
    if !result.slack.is_finite() {
        return Err("slack");
    }
    if result.alt_sign_slack.is_some_and(|v| !v.is_finite()) {
        return Err("alt_sign_slack");
    }
    if result.alt_reading_slack.is_some_and(|v| !v.is_finite()) {
        return Err("alt_reading_slack");
    }
    Ok(())
}

/// Expands the theorem selection into concrete tasks, splitting
/// inapplicable theorems into skips (default selection) or configuration
/// errors (explicit selection).  Malformed analysis parameters are always
/// configuration errors.
fn build_plan(case: &ResolvedCase) -> Result<(Vec<PlanItem>, Vec<SkipEntry>), CliError> {
    let n = case.immersion.n();
    let mut plan = Vec::new();
    let mut skipped = Vec::new();
    let mut seen = Vec::new();
    for &theorem in &case.theorems {
        if seen.contains(&theorem) {
            continue;
        }
        seen.push(theorem);
        let mut inapplicable = |reason: String| -> Result<(), CliError> {
            if case.explicit_theorems {
                Err(CliError::Config(format!("{}: {reason}", theorem.name())))
            } else {
                skipped.push(SkipEntry { theorem, reason });
                Ok(())
            }
        };
        match theorem {
            TheoremId::Wintgen => {
                if n < 2 {
                    inapplicable(format!("needs n ≥ 2, case has n = {n}"))?;
                } else {
                    plan.push(PlanItem::Wintgen);
                }
            }
            TheoremId::MeanScalar => plan.push(PlanItem::MeanScalar),
            TheoremId::ChenDelta => {
                if case.tuples.is_empty() {
                    inapplicable("no partition tuples configured (analysis.tuples)".into())?;
                } else if n < 3 {
                    inapplicable(format!("needs n ≥ 3, case has n = {n}"))?;
                } else {
                    for (i, tuple) in case.tuples.iter().enumerate() {
                        let sum: usize = tuple.iter().sum();
                        if tuple.is_empty() || tuple.iter().any(|&v| v < 2 || v + 1 > n) || sum > n
                        {
                            return Err(CliError::Config(format!(
                                "analysis.tuples[{i}]: {tuple:?} is not admissible at n = {n} \
                                 (need 2 ≤ nⱼ ≤ n−1 and Σnⱼ ≤ n)"
                            )));
                        }
                        plan.push(PlanItem::Chen(tuple.clone()));
                    }
                }
            }
            TheoremId::ShapeRicci => {
                if case.k_values.is_empty() {
                    inapplicable("no Ricci plane dimensions configured (analysis.k_values)".into())?;
                } else {
                    for (i, &k) in case.k_values.iter().enumerate() {
                        if k < 2 || k > n {
                            return Err(CliError::Config(format!(
                                "analysis.k_values[{i}]: need 2 ≤ k ≤ n = {n}, got {k}"
                            )));
                        }
                        plan.push(PlanItem::ShapeRicci(k));
                    }
                }
            }
            TheoremId::Casorati => {
                if case.u_values.is_empty() {
                    inapplicable("no Casorati parameters configured (analysis.u_values)".into())?;
                } else if n < 2 {
                    inapplicable(format!("needs n ≥ 2, case has n = {n}"))?;
                } else {
                    let excluded = (n * (n - 1)) as f64;
                    for (i, &u) in case.u_values.iter().enumerate() {
                        if !u.is_finite() || u <= 0.0 || u == excluded {
                            return Err(CliError::Config(format!(
                                "analysis.u_values[{i}]: need finite u > 0 with u ≠ n(n−1) = \
                                 {excluded}, got {u}"
                            )));
                        }
                        plan.push(PlanItem::Casorati(u));
                    }
                }
            }
        }
    }
    Ok((plan, skipped))
}

// ---------------------------------------------------------------------------
// Oracle batteries
// ---------------------------------------------------------------------------

pub struct OracleParams {
    pub seed: u64,
    pub ddvv_samples: usize,
    pub chen_samples: usize,
}

/// Constructed equality configurations run alongside each random battery.
const EQUALITY_CASES: usize = 200;

pub fn cmd_oracles(params: &OracleParams) -> (Report, Outcome) {
    let ddvv = ddvv_battery(params.seed, params.ddvv_samples);
    let chen = chen_battery(params.seed.wrapping_add(1), params.chen_samples);

    let mut report = Report::new("oracles", TraceSquaredReading::default().label());
    report.seed = Some(params.seed);
    let outcome = if ddvv.violations == 0 && chen.violations == 0 {
        Outcome::Clean
    } else {
        Outcome::Falsified
    };
    report.oracles = Some(OracleReport {
        ddvv,
        chen_lemma: chen,
    });
    (report, outcome)
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&raw + raw.transpose()) * 0.5
}

fn ddvv_battery(seed: u64, samples: usize) -> DdvvOracleSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_slack = f64::INFINITY;
    let mut violations = 0usize;
    for _ in 0..samples {
        let n = rng.gen_range(2..=5);
        let s = rng.gen_range(1..=4);
        let ops: Vec<DMatrix<f64>> = (0..s).map(|_| random_symmetric(n, &mut rng)).collect();
        let check = ddvv_component_check(&ops).expect("operators are symmetric by construction");
        worst_slack = worst_slack.min(check.slack);
        if check.slack < -1e-9 {
            violations += 1;
        }
    }
    if !worst_slack.is_finite() {
        worst_slack = 0.0;
    }

    // Two anticommuting traceless operators of equal norm reach equality;
    // the family below conjugates that pair by a rotation and shifts each by
    // a multiple of the identity, both of which preserve every term.
    let mut eq_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut equality_hits = 0usize;
    let mut max_equality_slack = 0.0f64;
    for _ in 0..EQUALITY_CASES {
        let lambda: f64 = eq_rng.gen_range(0.2..2.0);
        let angle: f64 = eq_rng.gen_range(0.0..std::f64::consts::TAU);
        let mu1: f64 = eq_rng.gen_range(-1.0..1.0);
        let mu2: f64 = eq_rng.gen_range(-1.0..1.0);
        let (c, s) = (angle.cos(), angle.sin());
        let q = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let d = DMatrix::from_row_slice(2, 2, &[lambda, 0.0, 0.0, -lambda]);
        let e = DMatrix::from_row_slice(2, 2, &[0.0, lambda, lambda, 0.0]);
        let a1 = q.transpose() * &d * &q + DMatrix::identity(2, 2) * mu1;
        let a2 = q.transpose() * &e * &q + DMatrix::identity(2, 2) * mu2;
        let check = ddvv_component_check(&[a1, a2]).expect("constructed symmetric pair");
        let deviation = check.slack.abs();
        max_equality_slack = max_equality_slack.max(deviation);
        if deviation <= 1e-8 {
            equality_hits += 1;
        }
    }

    DdvvOracleSummary {
        samples,
        worst_slack,
        violations,
        equality_hits,
        max_equality_slack,
    }
}

fn chen_battery(seed: u64, samples: usize) -> ChenOracleSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gap = f64::INFINITY;
    let mut violations = 0usize;
    for _ in 0..samples {
        let n = rng.gen_range(3..=8);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let check = chen_lemma_check(&a, constrained_eps(&a)).expect("ε solves the constraint");
        worst_gap = worst_gap.min(check.gap);
        if !check.holds {
            violations += 1;
        }
    }
    if !worst_gap.is_finite() {
        worst_gap = 0.0;
    }

    // a₁ + a₂ = a₃ = … = a_n forces ε = 2a₁a₂, the exact equality case.
    let mut eq_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut equality_hits = 0usize;
    let mut max_equality_residual = 0.0f64;
    for _ in 0..EQUALITY_CASES {
        let n = eq_rng.gen_range(3..=8);
        let a1: f64 = eq_rng.gen_range(-1.5..1.5);
        let a2: f64 = eq_rng.gen_range(-1.5..1.5);
        let mut a = vec![a1, a2];
        a.resize(n, a1 + a2);
        let check = chen_lemma_check(&a, constrained_eps(&a)).expect("ε solves the constraint");
        let deviation = check.equality_residual.max(check.gap.abs());
        max_equality_residual = max_equality_residual.max(deviation);
        if check.equality && deviation <= 1e-8 {
            equality_hits += 1;
        }
    }

    ChenOracleSummary {
        samples,
        worst_gap,
        violations,
        equality_hits,
        max_equality_residual,
    }
}

/// The ε for which (Σa)² = (n−1)(ε + Σa²) holds exactly.
fn constrained_eps(a: &[f64]) -> f64 {
    let sum: f64 = a.iter().sum();
    let sum_sq: f64 = a.iter().map(|v| v * v).sum();
    sum * sum / (a.len() as f64 - 1.0) - sum_sq
}

// ---------------------------------------------------------------------------
// Listing
// ---------------------------------------------------------------------------

pub fn cmd_examples() -> Result<(Report, Outcome), CliError> {
    let mut listing = Vec::new();
    for entry in catalog::entries() {
        let built = catalog::build(entry.name)
            .map_err(|e| CliError::Config(format!("catalogue: {e}")))?;
        listing.push(ListingEntry {
            name: entry.name,
            summary: entry.summary,
            dimension: built.immersion.n(),
            points: built.points.len(),
            highlights: entry.highlights.to_vec(),
        });
    }
    let mut report = Report::new("examples", TraceSquaredReading::default().label());
    report.listing = Some(listing);
    Ok((report, Outcome::Clean))
}
