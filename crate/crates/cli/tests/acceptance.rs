//! End-to-end acceptance gate: ten go/no-go criteria covering structure
//! algebra, the two ambient curvature forms, Gauss-equation residuals, the
//! component-level inequality batteries, the randomized immersion suite,
//! equality fixtures, optimizer certification against brute-force oracles,
//! corollary-table substitution, and byte-determinism of the binary's
//! reports.  One line per criterion is printed (visible with
//! `--nocapture`); each carries a wall-clock budget enforced as a hard
//! failure, and the test asserts that every criterion passes.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use metallic_geo::ambient::matched_sign;
use metallic_geo::catalog;
use metallic_geo::invariants::{casorati_hyperplane, chen_delta, delta_casorati, omega_k};
use metallic_geo::metallic::{check_metallic, metallic_from_product, product_from_metallic};
use metallic_geo::{
    chen_lemma_check, ddvv_component_check, specialize, verify_casorati, verify_chen_delta,
    verify_mean_scalar, verify_shape_ricci, verify_wintgen, Branch, CurvSign, CurvatureTensor,
    Endomorphism, FactorSpec, ImmersionSpec, InnerProduct, MetallicParams, OptimizerConfig,
    PointBundle, ProductSpaceForm, RhsContext, SpaceSpec, SubmanifoldType, TheoremAux, TheoremId,
    TraceData, TraceSquaredReading, VerifyOptions,
};

/// Records a failure message when the condition does not hold, without
/// aborting the criterion: every violated check is reported, not just the
/// first.
macro_rules! ensure {
    ($fails:expr, $cond:expr, $($arg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            $fails.push(format!($($arg)+));
        }
    }};
}

struct Outcome {
    index: usize,
    name: &'static str,
    budget: f64,
    elapsed: f64,
    failures: Vec<String>,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn run_criterion(
    index: usize,
    name: &'static str,
    budget: f64,
    body: impl FnOnce(&mut Vec<String>),
) -> Outcome {
    let mut failures = Vec::new();
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(|| body(&mut failures)));
    let elapsed = start.elapsed().as_secs_f64();
    if let Err(payload) = result {
        let msg = payload
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic payload".into());
        failures.push(format!("panicked: {msg}"));
    }
    if elapsed > budget {
        failures.push(format!(
            "exceeded the time budget: {elapsed:.2}s > {budget:.0}s"
        ));
    }
    Outcome {
        index,
        name,
        budget,
        elapsed,
        failures,
    }
}

#[test]
fn acceptance_criteria() {
    let outcomes = vec![
        run_criterion(1, "metallic structure construction and round-trip", 1.0, structure_round_trip),
        run_criterion(2, "product vs metallic curvature cross-oracle", 5.0, curvature_cross_oracle),
        run_criterion(3, "Gauss-equation residual on built-in immersions", 30.0, gauss_residuals),
        run_criterion(4, "shape-operator commutator battery", 60.0, ddvv_battery),
        run_criterion(5, "constrained quadratic lemma battery", 30.0, chen_lemma_battery),
        run_criterion(6, "randomized immersion suite slack floor", 600.0, random_immersion_suite),
        run_criterion(7, "equality fixtures", 10.0, equality_fixtures),
        run_criterion(8, "optimizer certification against brute force", 300.0, optimizer_certification),
        run_criterion(9, "corollary tables vs angle substitution", 1.0, corollary_substitution),
        run_criterion(10, "byte-identical verify reports", 60.0, deterministic_reports),
    ];

    let mut report = String::new();
    let mut all_pass = true;
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        report.push_str(&format!(
            "criterion {:2}: {} ({:6.2}s / {:3.0}s budget) — {}\n",
            o.index, status, o.elapsed, o.budget, o.name
        ));
        for f in o.failures.iter().take(8) {
            report.push_str(&format!("    - {f}\n"));
        }
        if o.failures.len() > 8 {
            report.push_str(&format!("    … and {} more failures\n", o.failures.len() - 8));
        }
        all_pass &= o.passed();
    }
    print!("{report}");
    assert!(all_pass, "acceptance criteria failed:\n{report}");
}

// ---------------------------------------------------------------------------
// Criterion 1: for every (p, q) in {1..5}² and both branches, the structure
// built from a random almost product structure satisfies its defining
// polynomial and metric symmetry to 1e-10 and inverts back to F to 1e-10.
// ---------------------------------------------------------------------------

fn structure_round_trip(fails: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in 1..=5u32 {
        for q in 1..=5u32 {
            let params = match MetallicParams::new(p, q) {
                Ok(v) => v,
                Err(e) => {
                    fails.push(format!("(p,q)=({p},{q}): construction failed: {e}"));
                    continue;
                }
            };
            for branch in [Branch::First, Branch::Second] {
                let dim = rng.gen_range(2..=8);
                let f_mat = random_product_structure(dim, &mut rng);
                let f = Endomorphism::new(f_mat.clone()).expect("square matrix");
                let phi = match metallic_from_product(&f, &params, branch) {
                    Ok(v) => v,
                    Err(e) => {
                        fails.push(format!(
                            "(p,q)=({p},{q}) {branch:?} dim {dim}: construction failed: {e}"
                        ));
                        continue;
                    }
                };
                let g = InnerProduct::standard(dim);
                let check = check_metallic(&phi, &g, &params, 1e-10);
                ensure!(
                    fails,
                    check.ok,
                    "(p,q)=({p},{q}) {branch:?} dim {dim}: polynomial residual {:.3e}, symmetry residual {:.3e} exceed 1e-10",
                    check.polynomial_residual,
                    check.symmetry_residual
                );
                match product_from_metallic(&phi, &params, matched_sign(branch)) {
                    Ok(back) => {
                        let residual = (back.matrix() - &f_mat).amax();
                        ensure!(
                            fails,
                            residual <= 1e-10,
                            "(p,q)=({p},{q}) {branch:?} dim {dim}: round-trip residual {residual:.3e} exceeds 1e-10"
                        );
                    }
                    Err(e) => fails.push(format!(
                        "(p,q)=({p},{q}) {branch:?} dim {dim}: inversion failed: {e}"
                    )),
                }
            }
        }
    }
}

/// Random involution F = Q·diag(±1)·Qᵀ with Q orthogonal from the QR of a
/// uniform matrix; symmetric, hence compatible with the standard metric.
fn random_product_structure(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0_f64..1.0));
    let q = m.qr().q();
    let signs = DVector::from_fn(dim, |_, _| if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
    &q * DMatrix::from_diagonal(&signs) * q.transpose()
}

// ---------------------------------------------------------------------------
// Criterion 2: the almost-product curvature form and the metallic curvature
// form agree to 1e-9 on 1000 random tangent triples per space, over six
// spaces covering c₁ = c₂, c₁ ≠ c₂, flat and sphere factors, both branches.
// ---------------------------------------------------------------------------

fn curvature_cross_oracle(fails: &mut Vec<String>) {
    let golden = MetallicParams::golden();
    let silver = MetallicParams::new(2, 1).expect("(2,1) is valid");
    let bronze = MetallicParams::new(1, 2).expect("(1,2) is valid");
    let specs: Vec<(&str, SpaceSpec)> = vec![
        (
            "golden S²(1)×S²(1)",
            space_spec(FactorSpec::sphere(2, 1.0), FactorSpec::sphere(2, 1.0), golden, Branch::First),
        ),
        (
            "golden S²(1)×S²(4)",
            space_spec(FactorSpec::sphere(2, 1.0), FactorSpec::sphere(2, 4.0), golden, Branch::First),
        ),
        (
            "golden R²×R³",
            space_spec(FactorSpec::flat(2), FactorSpec::flat(3), golden, Branch::First),
        ),
        (
            "golden S³(1)×R²",
            space_spec(FactorSpec::sphere(3, 1.0), FactorSpec::flat(2), golden, Branch::First),
        ),
        (
            "silver S²(2)×R, second branch",
            space_spec(FactorSpec::sphere(2, 2.0), FactorSpec::flat(1), silver, Branch::Second),
        ),
        (
            "(1,2) R²×S²(1/2), second branch",
            space_spec(FactorSpec::flat(2), FactorSpec::sphere(2, 0.5), bronze, Branch::Second),
        ),
    ];
    ensure!(fails, specs.len() >= 6, "need at least six spaces, have {}", specs.len());

    for (label, spec) in specs {
        let space = match ProductSpaceForm::new(spec) {
            Ok(s) => s,
            Err(e) => {
                fails.push(format!("{label}: space construction failed: {e}"));
                continue;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst = 0.0_f64;
        for _ in 0..1000 {
            let x = space.random_point(&mut rng);
            let xv = space.random_tangent(&x, &mut rng);
            let yv = space.random_tangent(&x, &mut rng);
            let zv = space.random_tangent(&x, &mut rng);
            let a = space.curvature_product(&x, &xv, &yv, &zv).expect("tangent input");
            let b = space.curvature_metallic(&x, &xv, &yv, &zv).expect("tangent input");
            let scale = 1.0 + a.amax().max(b.amax());
            worst = worst.max((&a - &b).amax() / scale);
        }
        ensure!(
            fails,
            worst <= 1e-9,
            "{label}: worst curvature-form disagreement {worst:.3e} exceeds 1e-9"
        );
    }
}

fn space_spec(f1: FactorSpec, f2: FactorSpec, params: MetallicParams, branch: Branch) -> SpaceSpec {
    SpaceSpec {
        factor1: f1,
        factor2: f2,
        params,
        branch,
        curv_sign: matched_sign(branch),
    }
}

// ---------------------------------------------------------------------------
// Criterion 3: the finite-difference intrinsic curvature of every built-in
// immersion matches the Gauss-equation right-hand side to 1e-4 at 20
// jittered parameter points each.
// ---------------------------------------------------------------------------

fn gauss_residuals(fails: &mut Vec<String>) {
    let entries = catalog::entries();
    ensure!(fails, entries.len() >= 5, "need at least five built-ins, have {}", entries.len());
    for entry in entries {
        let case = match catalog::build(entry.name) {
            Ok(c) => c,
            Err(e) => {
                fails.push(format!("{}: build failed: {e}", entry.name));
                continue;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst = 0.0_f64;
        for k in 0..20 {
            let base = &case.points[k % case.points.len()];
            let u: Vec<f64> = base.iter().map(|v| v + rng.gen_range(-0.15..0.15)).collect();
            match case.immersion.gauss_equation_residual(&u, 1e-4) {
                Ok(r) => worst = worst.max(r),
                Err(e) => fails.push(format!(
                    "{}: residual evaluation failed at {u:?}: {e}",
                    entry.name
                )),
            }
        }
        ensure!(
            fails,
            worst <= 1e-4,
            "{}: worst Gauss-equation residual {worst:.3e} exceeds 1e-4",
            entry.name
        );
    }
}

// ---------------------------------------------------------------------------
// Criterion 4: the squared-commutator matrix inequality holds with slack
// ≥ -1e-9 over 100 000 random symmetric tuples (n ≤ 5, ≤ 4 operators), and
// the two-operator equality configuration reproduces slack 0 to 1e-12.
// ---------------------------------------------------------------------------

fn ddvv_battery(fails: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::INFINITY;
    let mut violations = 0usize;
    for _ in 0..100_000 {
        let n = rng.gen_range(2..=5);
        let s = rng.gen_range(1..=4);
        let ops: Vec<DMatrix<f64>> = (0..s).map(|_| random_symmetric(n, &mut rng)).collect();
        let check = ddvv_component_check(&ops).expect("symmetric square input");
        worst = worst.min(check.slack);
        if check.slack < -1e-9 {
            violations += 1;
        }
    }
    ensure!(
        fails,
        violations == 0,
        "{violations} violations below -1e-9; worst slack {worst:.3e}"
    );

    // λ·diag(1,-1) and λ·offdiag(1,1) conjugated by a rotation and shifted
    // by multiples of the identity: the exact equality family.
    let mut eq_rng = ChaCha8Rng::seed_from_u64(44);
    let mut hits = 0usize;
    let mut worst_eq = 0.0_f64;
    for _ in 0..200 {
        let lam = eq_rng.gen_range(0.2..2.0);
        let ang = eq_rng.gen_range(0.0..TAU);
        let (c, s) = (ang.cos(), ang.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let d = DMatrix::from_row_slice(2, 2, &[lam, 0.0, 0.0, -lam]);
        let e = DMatrix::from_row_slice(2, 2, &[0.0, lam, lam, 0.0]);
        let id = DMatrix::<f64>::identity(2, 2);
        let a1 = rot.transpose() * &d * &rot + &id * eq_rng.gen_range(-1.0..1.0);
        let a2 = rot.transpose() * &e * &rot + &id * eq_rng.gen_range(-1.0..1.0);
        let check = ddvv_component_check(&[a1, a2]).expect("symmetric square input");
        worst_eq = worst_eq.max(check.slack.abs());
        if check.slack.abs() <= 1e-12 {
            hits += 1;
        }
    }
    ensure!(
        fails,
        hits == 200,
        "only {hits}/200 equality configurations reached |slack| ≤ 1e-12 (worst {worst_eq:.3e})"
    );
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0_f64..1.0));
    (&m + m.transpose()) * 0.5
}

// ---------------------------------------------------------------------------
// Criterion 5: the constrained quadratic lemma holds over one million random
// vectors, and the constructed equality family satisfies
// a₁ + a₂ = a₃ = … = a_n to 1e-8 with a vanishing gap.
// ---------------------------------------------------------------------------

fn chen_lemma_battery(fails: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0usize;
    let mut worst_gap = f64::INFINITY;
    for _ in 0..1_000_000 {
        let n = rng.gen_range(3..=8);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0_f64..2.0)).collect();
        let eps = constrained_eps(&a);
        let check = chen_lemma_check(&a, eps).expect("constructed constraint holds");
        worst_gap = worst_gap.min(check.gap);
        if !check.holds {
            violations += 1;
        }
    }
    ensure!(
        fails,
        violations == 0,
        "{violations} lemma violations over 10^6 samples; worst gap {worst_gap:.3e}"
    );

    let mut hits = 0usize;
    let mut worst_residual = 0.0_f64;
    for _ in 0..200 {
        let n = rng.gen_range(3..=8);
        let a1 = rng.gen_range(-1.5_f64..1.5);
        let a2 = rng.gen_range(-1.5_f64..1.5);
        let mut a = vec![a1, a2];
        a.resize(n, a1 + a2);
        let eps = constrained_eps(&a);
        let check = chen_lemma_check(&a, eps).expect("constructed constraint holds");
        let deviation = check.equality_residual.max(check.gap.abs());
        worst_residual = worst_residual.max(deviation);
        if deviation <= 1e-8 {
            hits += 1;
        }
    }
    ensure!(
        fails,
        hits == 200,
        "only {hits}/200 equality constructions satisfied the criterion to 1e-8 (worst {worst_residual:.3e})"
    );
}

/// ε solving the identity (Σa)² = (n−1)(ε + Σa²) exactly.
fn constrained_eps(a: &[f64]) -> f64 {
    let sum: f64 = a.iter().sum();
    let sum_sq: f64 = a.iter().map(|v| v * v).sum();
    sum * sum / (a.len() as f64 - 1.0) - sum_sq
}

// ---------------------------------------------------------------------------
// Criterion 6: over a randomized suite of at least 200 (immersion, point)
// pairs spanning invariant, anti-invariant, proper-slant, and bi-slant
// submanifolds with n ∈ {2,3,4}, every applicable verifier reports slack
// ≥ -1e-7 under the matched interpretation; negative findings are listed.
// ---------------------------------------------------------------------------

fn random_immersion_suite(fails: &mut Vec<String>) {
    let cases = match catalog::random_suite(20_260_814, 216) {
        Ok(c) => c,
        Err(e) => {
            fails.push(format!("suite generation failed: {e}"));
            return;
        }
    };
    ensure!(fails, cases.len() >= 200, "need ≥ 200 pairs, have {}", cases.len());
    for family in [
        "invariant-graph",
        "invariant-great-sphere",
        "anti-invariant-torus",
        "proper-slant-torus",
        "bi-slant-torus",
        "proper-slant-plane",
        "bi-slant-plane",
        "umbilical-sphere",
    ] {
        ensure!(
            fails,
            cases.iter().any(|c| c.label.starts_with(family)),
            "suite must cover the {family} family"
        );
    }
    for n in 2..=4 {
        ensure!(
            fails,
            cases.iter().any(|c| c.label.contains(&format!("-n{n}-"))),
            "suite must cover dimension n = {n}"
        );
    }

    let opts = VerifyOptions {
        eq_tol: 1e-8,
        reading: TraceSquaredReading::SquareOfTrace,
        optimizer: OptimizerConfig::new(8, 42),
    };
    let per_case: Vec<(f64, Vec<String>)> = cases
        .par_iter()
        .map(|case| {
            let mut local = Vec::new();
            let mut min_slack = f64::INFINITY;
            match suite_case_slacks(case, &opts) {
                Ok(results) => {
                    for r in &results {
                        min_slack = min_slack.min(r.slack);
                        if !r.slack.is_finite() {
                            local.push(format!(
                                "{}: {} produced a non-finite slack",
                                case.label, r.theorem
                            ));
                        } else if r.slack < -1e-7 {
                            local.push(format!(
                                "falsification: {} slack {:.6e} on {}",
                                r.theorem, r.slack, case.label
                            ));
                        }
                    }
                }
                Err(e) => local.push(format!("{}: {e}", case.label)),
            }
            (min_slack, local)
        })
        .collect();

    let mut worst = f64::INFINITY;
    for (slack, local) in per_case {
        worst = worst.min(slack);
        fails.extend(local);
    }
    ensure!(
        fails,
        worst.is_finite(),
        "no slack was computed across the whole suite"
    );
}

fn suite_case_slacks(
    case: &catalog::SuiteCase,
    opts: &VerifyOptions,
) -> Result<Vec<metallic_geo::InequalityResult>, String> {
    let bundle =
        PointBundle::from_immersion(&case.immersion, &case.point).map_err(|e| e.to_string())?;
    let slant = case
        .immersion
        .slant_analysis(&bundle.data, case.d1_basis.as_deref(), case.d2_basis.as_deref())
        .map_err(|e| e.to_string())?;
    let n = case.immersion.n();
    let mut results = vec![
        verify_wintgen(&bundle, &slant, opts).map_err(|e| format!("wintgen: {e}"))?,
        verify_mean_scalar(&bundle, &slant, opts).map_err(|e| format!("mean-scalar: {e}"))?,
        verify_shape_ricci(&bundle, &slant, 2, opts).map_err(|e| format!("shape-ricci: {e}"))?,
        verify_casorati(&bundle, &slant, 1.0, opts).map_err(|e| format!("casorati: {e}"))?,
    ];
    if n >= 3 {
        results
            .push(verify_chen_delta(&bundle, &slant, &[2], opts).map_err(|e| format!("chen-delta: {e}"))?);
    }
    Ok(results)
}

// ---------------------------------------------------------------------------
// Criterion 7: the flat invariant plane attains equality in all five bounds
// with equality-pattern residuals ≤ 1e-8; the unit sphere in a flat factor
// attains Wintgen and mean-vs-scalar equality (umbilical residual ≤ 1e-8)
// and the derived strict Casorati slacks.
// ---------------------------------------------------------------------------

fn equality_fixtures(fails: &mut Vec<String>) {
    let opts = VerifyOptions {
        eq_tol: 1e-8,
        reading: TraceSquaredReading::SquareOfTrace,
        optimizer: OptimizerConfig::new(16, 42),
    };

    let flat = catalog::build("flat-invariant-plane").expect("built-in exists");
    let bundle = PointBundle::from_immersion(&flat.immersion, &flat.points[0]).expect("evaluates");
    let slant = flat
        .immersion
        .slant_analysis(&bundle.data, None, None)
        .expect("slant analysis succeeds");
    let checks: Vec<(&str, metallic_geo::InequalityResult)> = vec![
        ("wintgen", verify_wintgen(&bundle, &slant, &opts).expect("applicable")),
        ("chen-delta [2]", verify_chen_delta(&bundle, &slant, &[2], &opts).expect("applicable")),
        ("shape-ricci k=2", verify_shape_ricci(&bundle, &slant, 2, &opts).expect("applicable")),
        ("mean-scalar", verify_mean_scalar(&bundle, &slant, &opts).expect("applicable")),
        ("casorati u=2", verify_casorati(&bundle, &slant, 2.0, &opts).expect("applicable")),
        ("casorati u=8", verify_casorati(&bundle, &slant, 8.0, &opts).expect("applicable")),
    ];
    for (label, r) in checks {
        ensure!(
            fails,
            r.slack.abs() <= 1e-8,
            "flat plane {label}: slack {:.3e} is not an equality",
            r.slack
        );
        ensure!(fails, r.equality, "flat plane {label}: equality flag not set");
        let residual = r.equality_case.residual();
        ensure!(
            fails,
            residual <= 1e-8,
            "flat plane {label}: equality-pattern residual {residual:.3e} exceeds 1e-8"
        );
    }

    let sphere = catalog::build("sphere-in-flat").expect("built-in exists");
    let bundle = PointBundle::from_immersion(&sphere.immersion, &sphere.points[0]).expect("evaluates");
    let slant = sphere
        .immersion
        .slant_analysis(&bundle.data, None, None)
        .expect("slant analysis succeeds");

    let w = verify_wintgen(&bundle, &slant, &opts).expect("applicable");
    ensure!(
        fails,
        w.equality && w.slack.abs() <= 1e-8,
        "sphere wintgen: expected equality, slack {:.3e}",
        w.slack
    );
    let m = verify_mean_scalar(&bundle, &slant, &opts).expect("applicable");
    ensure!(
        fails,
        m.equality && m.slack.abs() <= 1e-8,
        "sphere mean-scalar: expected equality, slack {:.3e}",
        m.slack
    );
    let umbilical_residual = m.equality_case.residual();
    ensure!(
        fails,
        umbilical_residual <= 1e-8,
        "sphere mean-scalar: umbilical residual {umbilical_residual:.3e} exceeds 1e-8"
    );
    let c1 = verify_casorati(&bundle, &slant, 1.0, &opts).expect("applicable");
    ensure!(
        fails,
        (c1.slack - 0.5).abs() <= 1e-9,
        "sphere casorati u=1: slack {:.9} should be 0.5",
        c1.slack
    );
    let c3 = verify_casorati(&bundle, &slant, 3.0, &opts).expect("applicable");
    ensure!(
        fails,
        (c3.slack - 1.0 / 6.0).abs() <= 1e-9,
        "sphere casorati u=3: slack {:.9} should be 1/6",
        c3.slack
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: for n ≤ 4, the multi-start optimizer's Casorati hyperplane
// extrema, partial scalar-curvature infima, and partial Ricci infima match
// dense grid / Monte-Carlo oracles to 1e-4, and raising restarts 64 → 256
// moves the certified values by at most 1e-8.
// ---------------------------------------------------------------------------

fn optimizer_certification(fails: &mut Vec<String>) {
    let cfg = OptimizerConfig::new(64, 42);

    // Flat totally geodesic plane: every certified invariant is exactly zero.
    let flat = catalog::build("flat-invariant-plane").expect("built-in exists");
    let (t_flat, ops_flat) = bundle_parts(&flat.immersion, &flat.points[0]);
    let cd = chen_delta(&t_flat, &[2], cfg).expect("valid tuple");
    ensure!(fails, cd.delta.abs() <= 1e-8, "flat plane delta(2) = {:.3e}, want 0", cd.delta);
    let om = omega_k(&t_flat, 2, cfg).expect("valid k");
    ensure!(fails, om.omega.abs() <= 1e-8, "flat plane omega_2 = {:.3e}, want 0", om.omega);
    let ca = delta_casorati(&ops_flat, 3, 2.0, cfg).expect("valid u");
    ensure!(
        fails,
        ca.delta_c.abs() <= 1e-8 && ca.c_w_inf.abs() <= 1e-10 && ca.c_w_sup.abs() <= 1e-10,
        "flat plane Casorati data should vanish: delta_C {:.3e}, inf {:.3e}, sup {:.3e}",
        ca.delta_c,
        ca.c_w_inf,
        ca.c_w_sup
    );

    // Unit spheres in a flat factor: constant curvature 1 and unit shape
    // operator make every certified value exact.
    let s3 = unit_sphere_graph(3);
    let (t3s, ops3s) = bundle_parts(&s3, &[0.3, -0.4, 0.5]);
    let cd = chen_delta(&t3s, &[2], cfg).expect("valid tuple");
    ensure!(fails, (cd.delta - 2.0).abs() <= 1e-7, "S³ delta(2) = {:.9}, want 2", cd.delta);
    let om2 = omega_k(&t3s, 2, cfg).expect("valid k");
    ensure!(fails, (om2.omega - 1.0).abs() <= 1e-7, "S³ omega_2 = {:.9}, want 1", om2.omega);
    let om3 = omega_k(&t3s, 3, cfg).expect("valid k");
    ensure!(fails, (om3.omega - 1.0).abs() <= 1e-7, "S³ omega_3 = {:.9}, want 1", om3.omega);
    let ca = delta_casorati(&ops3s, 3, 2.0, cfg).expect("valid u");
    ensure!(
        fails,
        (ca.c_w_inf - 1.0).abs() <= 1e-7 && (ca.c_w_sup - 1.0).abs() <= 1e-7,
        "S³ hyperplane Casorati should be constant 1: inf {:.9}, sup {:.9}",
        ca.c_w_inf,
        ca.c_w_sup
    );

    let s4 = unit_sphere_graph(4);
    let (t4s, ops4s) = bundle_parts(&s4, &[0.4, -0.3, 0.2, 0.5]);
    let cd = chen_delta(&t4s, &[2], cfg).expect("valid tuple");
    ensure!(fails, (cd.delta - 5.0).abs() <= 1e-7, "S⁴ delta(2) = {:.9}, want 5", cd.delta);
    let cd22 = chen_delta(&t4s, &[2, 2], cfg).expect("valid tuple");
    ensure!(fails, (cd22.delta - 4.0).abs() <= 1e-7, "S⁴ delta(2,2) = {:.9}, want 4", cd22.delta);
    let om2 = omega_k(&t4s, 2, cfg).expect("valid k");
    ensure!(fails, (om2.omega - 1.0).abs() <= 1e-7, "S⁴ omega_2 = {:.9}, want 1", om2.omega);
    let om3 = omega_k(&t4s, 3, cfg).expect("valid k");
    ensure!(fails, (om3.omega - 1.0).abs() <= 1e-7, "S⁴ omega_3 = {:.9}, want 1", om3.omega);
    let ca = delta_casorati(&ops4s, 4, 3.0, cfg).expect("valid u");
    ensure!(
        fails,
        (ca.c_w_inf - 1.0).abs() <= 1e-7 && (ca.c_w_sup - 1.0).abs() <= 1e-7,
        "S⁴ hyperplane Casorati should be constant 1: inf {:.9}, sup {:.9}",
        ca.c_w_inf,
        ca.c_w_sup
    );

    // Product torus (n = 2): the hyperplane sweep is a circle, so a dense
    // one-dimensional grid is an exact oracle; the intrinsic metric is flat.
    let torus = catalog::build("torus-in-flat").expect("built-in exists");
    let (t_torus, ops_torus) = bundle_parts(&torus.immersion, &torus.points[0]);
    let om = omega_k(&t_torus, 2, cfg).expect("valid k");
    ensure!(fails, om.omega.abs() <= 1e-8, "flat torus omega_2 = {:.3e}, want 0", om.omega);
    let ca2 = delta_casorati(&ops_torus, 2, 1.0, cfg).expect("valid u");
    let (grid_inf, grid_sup) = circle_extrema(&ops_torus);
    ensure!(
        fails,
        (ca2.c_w_inf - grid_inf).abs() <= 1e-4,
        "torus inf C(W): optimizer {:.9} vs grid {:.9}",
        ca2.c_w_inf,
        grid_inf
    );
    ensure!(
        fails,
        (ca2.c_w_sup - grid_sup).abs() <= 1e-4,
        "torus sup C(W): optimizer {:.9} vs grid {:.9}",
        ca2.c_w_sup,
        grid_sup
    );
    let expected_delta = 1.0 * ca2.c + ca2.a_u * grid_inf;
    ensure!(
        fails,
        (ca2.delta_c - expected_delta).abs() <= 1e-4,
        "torus delta_C(1): optimizer {:.9} vs grid assembly {:.9}",
        ca2.delta_c,
        expected_delta
    );

    // Anisotropic wavy graph, n = 3: dense zoomed grids on S² certify the
    // hyperplane extrema, the plane-curvature infimum, and the Ricci infimum.
    let wavy3 = wavy_graph3();
    let (t3, ops3) = bundle_parts(&wavy3, &[0.3, -0.7, 0.5]);
    let ca3 = delta_casorati(&ops3, 3, 2.0, cfg).expect("valid u");
    let inf3 = sphere2_min(&|w| casorati_hyperplane(&ops3, w).expect("n = 3 conormal"));
    let sup3 = -sphere2_min(&|w| -casorati_hyperplane(&ops3, w).expect("n = 3 conormal"));
    ensure!(
        fails,
        (ca3.c_w_inf - inf3).abs() <= 1e-4,
        "wavy3 inf C(W): optimizer {:.9} vs grid {:.9}",
        ca3.c_w_inf,
        inf3
    );
    ensure!(
        fails,
        (ca3.c_w_sup - sup3).abs() <= 1e-4,
        "wavy3 sup C(W): optimizer {:.9} vs grid {:.9}",
        ca3.c_w_sup,
        sup3
    );

    let cd3 = chen_delta(&t3, &[2], cfg).expect("valid tuple");
    let plane_min3 = sphere2_min(&|w| plane_curvature3(&t3, w));
    ensure!(
        fails,
        ((cd3.tau - cd3.delta) - plane_min3).abs() <= 1e-4,
        "wavy3 inf plane curvature: optimizer {:.9} vs grid {:.9}",
        cd3.tau - cd3.delta,
        plane_min3
    );
    let om32 = omega_k(&t3, 2, cfg).expect("valid k");
    ensure!(
        fails,
        (om32.omega - plane_min3).abs() <= 1e-4,
        "wavy3 omega_2: optimizer {:.9} vs grid {:.9}",
        om32.omega,
        plane_min3
    );
    let om33 = omega_k(&t3, 3, cfg).expect("valid k");
    let ric_min3 = sphere2_min(&|x| ricci3(&t3, x));
    ensure!(
        fails,
        (om33.omega - ric_min3 / 2.0).abs() <= 1e-4,
        "wavy3 omega_3: optimizer {:.9} vs grid {:.9}",
        om33.omega,
        ric_min3 / 2.0
    );

    // Anisotropic wavy graph, n = 4: an S³ grid certifies the hyperplane
    // extrema; Monte-Carlo seeding plus compass descent on the plane
    // Grassmannian certifies the partial scalar-curvature infima.
    let wavy4 = wavy_graph4();
    let (t4, ops4) = bundle_parts(&wavy4, &[0.4, -0.3, 0.7, 0.2]);
    let ca4 = delta_casorati(&ops4, 4, 3.0, cfg).expect("valid u");
    let inf4 = sphere3_min(&|w| casorati_hyperplane(&ops4, w).expect("n = 4 conormal"));
    let sup4 = -sphere3_min(&|w| -casorati_hyperplane(&ops4, w).expect("n = 4 conormal"));
    ensure!(
        fails,
        (ca4.c_w_inf - inf4).abs() <= 1e-4,
        "wavy4 inf C(W): optimizer {:.9} vs grid {:.9}",
        ca4.c_w_inf,
        inf4
    );
    ensure!(
        fails,
        (ca4.c_w_sup - sup4).abs() <= 1e-4,
        "wavy4 sup C(W): optimizer {:.9} vs grid {:.9}",
        ca4.c_w_sup,
        sup4
    );

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let plane_min4 = gr24_min(&|f| plane_curvature4(&t4, f), &mut rng);
    let cd4 = chen_delta(&t4, &[2], cfg).expect("valid tuple");
    ensure!(
        fails,
        ((cd4.tau - cd4.delta) - plane_min4).abs() <= 1e-4,
        "wavy4 inf plane curvature: optimizer {:.9} vs search {:.9}",
        cd4.tau - cd4.delta,
        plane_min4
    );
    let om42 = omega_k(&t4, 2, cfg).expect("valid k");
    ensure!(
        fails,
        (om42.omega - plane_min4).abs() <= 1e-4,
        "wavy4 omega_2: optimizer {:.9} vs search {:.9}",
        om42.omega,
        plane_min4
    );
    let pair_min4 = gr24_min(
        &|f| plane_curvature4(&t4, f) + complement_curvature4(&t4, f),
        &mut rng,
    );
    let cd22 = chen_delta(&t4, &[2, 2], cfg).expect("valid tuple");
    ensure!(
        fails,
        ((cd22.tau - cd22.delta) - pair_min4).abs() <= 1e-4,
        "wavy4 inf paired plane curvature: optimizer {:.9} vs search {:.9}",
        cd22.tau - cd22.delta,
        pair_min4
    );

    // Restart stability: quadrupling the start count must not move the
    // certified values beyond agreement tolerance.
    let big = OptimizerConfig::new(256, 42);
    let drift_checks = [
        (
            "wavy3 delta_C(2)",
            delta_casorati(&ops3, 3, 2.0, cfg).expect("valid u").delta_c,
            delta_casorati(&ops3, 3, 2.0, big).expect("valid u").delta_c,
        ),
        (
            "wavy3 delta(2)",
            chen_delta(&t3, &[2], cfg).expect("valid tuple").delta,
            chen_delta(&t3, &[2], big).expect("valid tuple").delta,
        ),
        (
            "wavy3 omega_2",
            omega_k(&t3, 2, cfg).expect("valid k").omega,
            omega_k(&t3, 2, big).expect("valid k").omega,
        ),
        (
            "wavy4 delta(2)",
            chen_delta(&t4, &[2], cfg).expect("valid tuple").delta,
            chen_delta(&t4, &[2], big).expect("valid tuple").delta,
        ),
    ];
    for (label, v64, v256) in drift_checks {
        ensure!(
            fails,
            (v64 - v256).abs() <= 1e-8,
            "{label}: restarts 64 → 256 moved the value by {:.3e}",
            (v64 - v256).abs()
        );
    }
}

fn bundle_parts(im: &ImmersionSpec, u: &[f64]) -> (CurvatureTensor, Vec<DMatrix<f64>>) {
    let bundle = PointBundle::from_immersion(im, u).expect("fixture evaluates");
    let ops = bundle.data.shape_ops().to_vec();
    (bundle.tensor, ops)
}

fn golden_flat_space(d1: usize, d2: usize) -> ProductSpaceForm {
    ProductSpaceForm::new(SpaceSpec {
        factor1: FactorSpec::flat(d1),
        factor2: FactorSpec::flat(d2),
        params: MetallicParams::golden(),
        branch: Branch::First,
        curv_sign: CurvSign::Plus,
    })
    .expect("flat product is valid")
}

/// Unit sphere Sⁿ sitting inside the flat ℝ^{n+1} factor, in hyperspherical
/// coordinates; umbilical with unit shape operator and constant curvature 1.
fn unit_sphere_graph(n: usize) -> ImmersionSpec {
    let mut coords = spherical_coords(n);
    coords.push("0".to_string());
    ImmersionSpec::parse(golden_flat_space(n + 1, 1), n, &coords, BTreeMap::new())
        .expect("sphere immersion parses")
}

fn spherical_coords(n: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(n + 1);
    let mut first = String::from("cos(u1)");
    for l in 2..=n {
        first.push_str(&format!("*cos(u{l})"));
    }
    out.push(first);
    for j in 1..=n {
        let mut s = format!("sin(u{j})");
        for l in (j + 1)..=n {
            s.push_str(&format!("*cos(u{l})"));
        }
        out.push(s);
    }
    out
}

fn wavy_graph3() -> ImmersionSpec {
    ImmersionSpec::parse(
        golden_flat_space(4, 1),
        3,
        &["u1", "u2", "u3", "0.35*sin(u1)*cos(u2) + 0.25*sin(u3)*cos(u1)", "0"],
        BTreeMap::new(),
    )
    .expect("graph immersion parses")
}

fn wavy_graph4() -> ImmersionSpec {
    ImmersionSpec::parse(
        golden_flat_space(5, 1),
        4,
        &["u1", "u2", "u3", "u4", "0.3*sin(u1)*cos(u2) + 0.2*sin(u3)*cos(u4)", "0"],
        BTreeMap::new(),
    )
    .expect("graph immersion parses")
}

/// Dense sweep of the n = 2 hyperplane circle.
fn circle_extrema(ops: &[DMatrix<f64>]) -> (f64, f64) {
    let steps = 200_000;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in 0..steps {
        let ang = PI * t as f64 / steps as f64;
        let w = DVector::from_vec(vec![ang.cos(), ang.sin()]);
        let c = casorati_hyperplane(ops, &w).expect("n = 2 conormal");
        lo = lo.min(c);
        hi = hi.max(c);
    }
    (lo, hi)
}

/// Minimum of an even objective over unit vectors in ℝ³: coarse
/// latitude/longitude grid followed by six zoom levels around the best cell.
fn sphere2_min<F: Fn(&DVector<f64>) -> f64>(obj: &F) -> f64 {
    let eval = |t: f64, p: f64| {
        let w = DVector::from_vec(vec![t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]);
        obj(&w)
    };
    let (nt, np) = (120usize, 240usize);
    let mut best = f64::INFINITY;
    let (mut bt, mut bp) = (0.0, 0.0);
    for i in 0..=nt {
        let t = PI * i as f64 / nt as f64;
        for j in 0..np {
            let p = TAU * j as f64 / np as f64;
            let v = eval(t, p);
            if v < best {
                best = v;
                bt = t;
                bp = p;
            }
        }
    }
    refine2(&eval, bt, bp, PI / nt as f64).min(best)
}

fn refine2<F: Fn(f64, f64) -> f64>(obj: &F, a0: f64, b0: f64, range0: f64) -> f64 {
    let (mut a, mut b, mut range) = (a0, b0, range0);
    let mut best = obj(a, b);
    for _ in 0..6 {
        let (mut na, mut nb) = (a, b);
        for i in -10..=10i32 {
            for j in -10..=10i32 {
                let ca = a + range * f64::from(i) / 10.0;
                let cb = b + range * f64::from(j) / 10.0;
                let v = obj(ca, cb);
                if v < best {
                    best = v;
                    na = ca;
                    nb = cb;
                }
            }
        }
        a = na;
        b = nb;
        range *= 0.2;
    }
    best
}

/// Minimum of an even objective over unit vectors in ℝ⁴ via hyperspherical
/// angles: coarse grid plus six zoom levels.
fn sphere3_min<F: Fn(&DVector<f64>) -> f64>(obj: &F) -> f64 {
    let eval = |a: f64, b: f64, c: f64| {
        let w = DVector::from_vec(vec![
            a.cos() * b.cos() * c.cos(),
            a.sin() * b.cos() * c.cos(),
            b.sin() * c.cos(),
            c.sin(),
        ]);
        obj(&w)
    };
    let mut best = f64::INFINITY;
    let (mut ba, mut bb, mut bc) = (0.0, 0.0, 0.0);
    let na = 72usize;
    let nb = 36usize;
    for i in 0..na {
        let a = TAU * i as f64 / na as f64;
        for j in 0..=nb {
            let b = -FRAC_PI_2 + PI * j as f64 / nb as f64;
            for k in 0..=nb {
                let c = -FRAC_PI_2 + PI * k as f64 / nb as f64;
                let v = eval(a, b, c);
                if v < best {
                    best = v;
                    ba = a;
                    bb = b;
                    bc = c;
                }
            }
        }
    }
    refine3(&eval, ba, bb, bc, TAU / na as f64).min(best)
}

fn refine3<F: Fn(f64, f64, f64) -> f64>(obj: &F, a0: f64, b0: f64, c0: f64, range0: f64) -> f64 {
    let (mut a, mut b, mut c, mut range) = (a0, b0, c0, range0);
    let mut best = obj(a, b, c);
    for _ in 0..6 {
        let (mut na, mut nb, mut nc) = (a, b, c);
        for i in -6..=6i32 {
            for j in -6..=6i32 {
                for k in -6..=6i32 {
                    let ca = a + range * f64::from(i) / 6.0;
                    let cb = b + range * f64::from(j) / 6.0;
                    let cc = c + range * f64::from(k) / 6.0;
                    let v = obj(ca, cb, cc);
                    if v < best {
                        best = v;
                        na = ca;
                        nb = cb;
                        nc = cc;
                    }
                }
            }
        }
        a = na;
        b = nb;
        c = nc;
        range *= 0.25;
    }
    best
}

/// Orthonormal completion of a unit vector in ℝ³ to a basis of its
/// orthogonal plane.
fn complete_3d(w: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let mut k = 0;
    for i in 1..3 {
        if w[i].abs() < w[k].abs() {
            k = i;
        }
    }
    let mut e = DVector::zeros(3);
    e[k] = 1.0;
    let d = w.dot(&e);
    e.axpy(-d, w, 1.0);
    let norm = e.norm();
    e /= norm;
    let f = DVector::from_vec(vec![
        w[1] * e[2] - w[2] * e[1],
        w[2] * e[0] - w[0] * e[2],
        w[0] * e[1] - w[1] * e[0],
    ]);
    (e, f)
}

/// Sectional curvature of the plane orthogonal to the unit vector w (n = 3).
fn plane_curvature3(tensor: &CurvatureTensor, w: &DVector<f64>) -> f64 {
    let (e, f) = complete_3d(w);
    tensor.r4(&e, &f, &f, &e)
}

/// Full Ricci curvature of the unit direction x (n = 3).
fn ricci3(tensor: &CurvatureTensor, x: &DVector<f64>) -> f64 {
    let (e, f) = complete_3d(x);
    tensor.r4(x, &e, &e, x) + tensor.r4(x, &f, &f, x)
}

/// Sectional curvature of the plane spanned by the two frame columns (n = 4).
fn plane_curvature4(tensor: &CurvatureTensor, frame: &DMatrix<f64>) -> f64 {
    let a = frame.column(0).clone_owned();
    let b = frame.column(1).clone_owned();
    tensor.r4(&a, &b, &b, &a)
}

/// Sectional curvature of the orthogonal complement of the frame's plane.
fn complement_curvature4(tensor: &CurvatureTensor, frame: &DMatrix<f64>) -> f64 {
    let comp = complement42(frame);
    plane_curvature4(tensor, &comp)
}

/// Random plane in ℝ⁴ as an orthonormal 4×2 frame (thin QR of a uniform
/// matrix).
fn random_frame42(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(4, 2, |_, _| rng.gen_range(-1.0_f64..1.0));
    m.qr().q()
}

/// Orthonormal basis of the orthogonal complement of a 4×2 orthonormal
/// frame, via Gram-Schmidt over the coordinate axes.
fn complement42(frame: &DMatrix<f64>) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(2);
    for k in 0..4 {
        let mut v = DVector::zeros(4);
        v[k] = 1.0;
        for j in 0..2 {
            let c = frame.column(j).clone_owned();
            let d = c.dot(&v);
            v.axpy(-d, &c, 1.0);
        }
        for c in &cols {
            let d = c.dot(&v);
            v.axpy(-d, c, 1.0);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v / norm);
            if cols.len() == 2 {
                break;
            }
        }
    }
    DMatrix::from_columns(&cols)
}

fn orthonormalize_cols(m: &mut DMatrix<f64>) {
    for j in 0..m.ncols() {
        for i in 0..j {
            let ci = m.column(i).clone_owned();
            let d = ci.dot(&m.column(j).clone_owned());
            let new = m.column(j).clone_owned() - ci * d;
            m.set_column(j, &new);
        }
        let norm = m.column(j).norm();
        let new = m.column(j).clone_owned() / norm;
        m.set_column(j, &new);
    }
}

/// Global minimum over the plane Grassmannian of ℝ⁴: Monte-Carlo seeding
/// keeps the five best frames, and compass descent (single-angle rotations
/// toward the complement with halving step) polishes each.
fn gr24_min<F: Fn(&DMatrix<f64>) -> f64>(obj: &F, rng: &mut ChaCha8Rng) -> f64 {
    let mut starts: Vec<(f64, DMatrix<f64>)> = Vec::new();
    for _ in 0..30_000 {
        let f = random_frame42(rng);
        let v = obj(&f);
        if starts.len() < 5 {
            starts.push((v, f));
            starts.sort_by(|x, y| x.0.total_cmp(&y.0));
        } else if v < starts[4].0 {
            starts[4] = (v, f);
            starts.sort_by(|x, y| x.0.total_cmp(&y.0));
        }
    }
    let mut best = f64::INFINITY;
    for (_, frame) in starts {
        best = best.min(compass_min42(obj, frame));
    }
    best
}

fn compass_min42<F: Fn(&DMatrix<f64>) -> f64>(obj: &F, start: DMatrix<f64>) -> f64 {
    let mut frame = start;
    let mut best = obj(&frame);
    let mut range = 0.3_f64;
    let mut evals = 0usize;
    while range > 1e-7 && evals < 100_000 {
        let comp = complement42(&frame);
        let mut cand: Option<(f64, DMatrix<f64>)> = None;
        for i in 0..2 {
            for j in 0..2 {
                for s in [-1.0_f64, 1.0] {
                    evals += 1;
                    let ang = s * range;
                    let newcol = frame.column(i).clone_owned() * ang.cos()
                        + comp.column(j).clone_owned() * ang.sin();
                    let mut trial = frame.clone();
                    trial.set_column(i, &newcol);
                    orthonormalize_cols(&mut trial);
                    let v = obj(&trial);
                    if cand.as_ref().is_none_or(|(cv, _)| v < *cv) {
                        cand = Some((v, trial));
                    }
                }
            }
        }
        match cand {
            Some((v, f)) if v < best - 1e-14 => {
                best = v;
                frame = f;
            }
            _ => range *= 0.5,
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Criterion 9: for all four submanifold types and all five theorem families,
// the type's table row equals the bi-slant bound under the exact angle
// substitution, to 1e-10 on random invariant data across varied (p, q),
// curvature signs, and trace readings.
// ---------------------------------------------------------------------------

fn corollary_substitution(fails: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for round in 0..200 {
        for sub_type in SubmanifoldType::ALL {
            let n = rng.gen_range(3..=5usize);
            let (d1, d2) = match sub_type {
                SubmanifoldType::Slant => (n, 0),
                _ => {
                    let d1 = rng.gen_range(1..n);
                    (d1, n - d1)
                }
            };
            let (theta1, theta2) = match sub_type {
                SubmanifoldType::SemiSlant => (0.0, rng.gen_range(0.1..1.4)),
                SubmanifoldType::HemiSlant => (rng.gen_range(0.1..1.4), FRAC_PI_2),
                SubmanifoldType::SemiInvariant => (0.0, FRAC_PI_2),
                SubmanifoldType::Slant => (rng.gen_range(0.1..1.4), 0.0),
            };
            let p = f64::from(rng.gen_range(1..=3u32));
            let q = f64::from(rng.gen_range(1..=3u32));
            let tr_tp1 = if d1 == 0 { 0.0 } else { rng.gen_range(-2.0..4.0) };
            let tr_tp2 = if d2 == 0 { 0.0 } else { rng.gen_range(-2.0..4.0) };
            let ctx = RhsContext {
                p,
                q,
                alpha: (p * p + 4.0 * q).sqrt(),
                c1: rng.gen_range(-1.5..1.5),
                c2: rng.gen_range(-1.5..1.5),
                sign: if round % 2 == 0 { CurvSign::Plus } else { CurvSign::Minus },
                n,
                d1,
                d2,
                theta1,
                theta2,
                traces: TraceData::new(
                    tr_tp1 + tr_tp2,
                    rng.gen_range(0.0..6.0),
                    tr_tp1,
                    tr_tp2,
                ),
                reading: if round % 3 == 0 {
                    TraceSquaredReading::TraceOfSquare
                } else {
                    TraceSquaredReading::SquareOfTrace
                },
            };
            for theorem in TheoremId::ALL {
                let aux = match theorem {
                    TheoremId::Wintgen => TheoremAux::Wintgen {
                        rho: rng.gen_range(-2.0..2.0),
                        rho_perp: rng.gen_range(0.0..2.0),
                    },
                    TheoremId::ChenDelta => TheoremAux::ChenDelta {
                        tuple: vec![2; 1 + usize::from(n > 4)],
                        h_sq: rng.gen_range(0.0..3.0),
                    },
                    TheoremId::ShapeRicci => TheoremAux::ShapeRicci {
                        omega_k: rng.gen_range(-2.0..2.0),
                    },
                    TheoremId::MeanScalar => TheoremAux::MeanScalar {
                        two_tau: rng.gen_range(-4.0..4.0),
                    },
                    TheoremId::Casorati => TheoremAux::Casorati {
                        bound: rng.gen_range(0.0..5.0),
                    },
                };
                match specialize(sub_type, &ctx, &aux) {
                    Ok(check) => ensure!(
                        fails,
                        check.difference.abs() <= 1e-10,
                        "{} / {}: table row {:.12} vs substituted bound {:.12} (difference {:.3e})",
                        theorem,
                        sub_type.label(),
                        check.table_rhs,
                        check.bi_slant_rhs,
                        check.difference
                    ),
                    Err(e) => fails.push(format!(
                        "{} / {}: specialization failed: {e}",
                        theorem,
                        sub_type.label()
                    )),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Criterion 10: two runs of the binary's `verify` with the same config and
// seed produce byte-identical reports.
// ---------------------------------------------------------------------------

fn deterministic_reports(fails: &mut Vec<String>) {
    let bin = env!("CARGO_BIN_EXE_metallic-geo");
    let mut outputs = Vec::new();
    for run in 1..=2 {
        let path = format!("{}/acceptance-determinism-{run}.json", env!("CARGO_TARGET_TMPDIR"));
        let output = Command::new(bin)
            .args([
                "verify",
                "--config",
                "builtin:sphere-in-flat",
                "--seed",
                "42",
                "--out",
                &path,
            ])
            .output()
            .expect("binary runs");
        ensure!(
            fails,
            output.status.code() == Some(0),
            "run {run}: exit status {:?}, stderr: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        );
        outputs.push(std::fs::read(&path).unwrap_or_default());
    }
    ensure!(fails, !outputs[0].is_empty(), "first report is empty");
    ensure!(
        fails,
        outputs[0] == outputs[1],
        "reports differ between identical runs ({} vs {} bytes)",
        outputs[0].len(),
        outputs[1].len()
    );
}
