//! Built-in example immersions and the randomized verification suite.
//!
//! The named catalogue covers the qualitatively distinct situations the
//! engine handles: totally geodesic invariant and proper-slant planes
//! (equality in every bound), curves, products of circles, umbilical
//! spheres, and the two faces of a curved product ambient — a factor-split
//! torus (every bound holds) and the diagonal surface of S²×S², whose
//! ambient normal curvature falsifies the closed-form Wintgen bound.
//!
//! The randomized suite generates slant-exact immersions — graphs inside one
//! factor (invariant), products of circles pairing a factor-1 frequency with
//! a factor-2 frequency (any prescribed slant angle, in particular
//! anti-invariant), and totally geodesic mixed planes — spanning n ∈ {2,3,4}
//! and the four submanifold classes.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ambient::{FactorSpec, ProductSpaceForm, SpaceSpec};
use crate::error::{GeoError, Result};
use crate::immersion::ImmersionSpec;
use crate::metallic::{Branch, CurvSign, MetallicParams};

/// A named catalogue entry with its expected outcomes.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Expected equality/strictness outcomes, one clause per line.
    pub highlights: &'static [&'static str],
}

/// A catalogue case ready to evaluate: the immersion, representative
/// parameter points, optional distribution bases (tangent-frame
/// coordinates), and the analysis parameters that make sense for it.
#[derive(Debug, Clone)]
pub struct BuiltCase {
    pub name: &'static str,
    pub immersion: ImmersionSpec,
    pub points: Vec<Vec<f64>>,
    pub d1_basis: Option<Vec<DVector<f64>>>,
    pub d2_basis: Option<Vec<DVector<f64>>>,
    pub tuples: Vec<Vec<usize>>,
    pub k_values: Vec<usize>,
    pub u_values: Vec<f64>,
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "flat-invariant-plane",
        summary: "Totally geodesic 3-plane inside the flat factor of ℝ³ × ℝ²",
        highlights: &[
            "invariant (θ = 0); equality attained in all five bounds",
            "every equality-case pattern residual vanishes (≤ 1e−8)",
        ],
    },
    CatalogEntry {
        name: "mixed-slant-plane",
        summary: "Totally geodesic 2-plane mixing the factors of ℝ² × ℝ² along the diagonal",
        highlights: &[
            "proper slant with cos²θ = 1/6 at the golden structure (p, q) = (1, 1)",
            "equality in Wintgen, shape–Ricci, mean–scalar, and Casorati bounds",
        ],
    },
    CatalogEntry {
        name: "circle",
        summary: "Round circle of radius 5/4 in the flat factor of ℝ² × ℝ",
        highlights: &[
            "n = 1: τ = 0, ‖H‖² = 16/25, invariant direction",
            "mean–scalar bound degenerates to the trivial equality 0 = 0; Wintgen requires n ≥ 2",
        ],
    },
    CatalogEntry {
        name: "torus-in-flat",
        summary: "Product torus S¹(1) × S¹(4/5) inside the flat factor of ℝ⁴ × ℝ",
        highlights: &[
            "invariant, flat (τ = 0), nowhere umbilical",
            "strictly positive slack in every applicable bound",
        ],
    },
    CatalogEntry {
        name: "sphere-in-flat",
        summary: "Unit sphere S²(1) inside the flat factor of ℝ³ × ℝ",
        highlights: &[
            "equality in the Wintgen and mean–scalar bounds (umbilical pattern ≤ 1e−8)",
            "strict Casorati slack exactly 1/2 at u = 1 and 1/6 at u = 3",
        ],
    },
    CatalogEntry {
        name: "sphere-times-sphere-torus",
        summary: "Great torus S¹ × S¹ split across the factors of S²(1) × S²(1)",
        highlights: &[
            "factor-split and invariant, totally geodesic",
            "all bounds hold with strictly positive slack under the default reading",
        ],
    },
    CatalogEntry {
        name: "sphere-times-sphere-diagonal",
        summary: "Diagonal surface of S²(1) × S²(1), the factor-mixing stress case",
        highlights: &[
            "proper slant with cos²θ = 1/6 at the golden structure; totally geodesic",
            "Wintgen bound falsified: slack −3/10 (square-of-trace) and −1/2 (trace-of-square) — the ambient normal curvature of factor-mixing surfaces is not captured by the closed form",
            "mean–scalar, Casorati, and shape–Ricci bounds hold; equalities under the trace-of-square reading",
        ],
    },
];

/// The catalogue in stable order.
pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

/// Names of all built-in cases in stable order.
pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

fn golden_space(f1: FactorSpec, f2: FactorSpec) -> Result<ProductSpaceForm> {
    ProductSpaceForm::new(SpaceSpec {
        factor1: f1,
        factor2: f2,
        params: MetallicParams::golden(),
        branch: Branch::First,
        curv_sign: CurvSign::Plus,
    })
}

fn parse(
    space: ProductSpaceForm,
    n: usize,
    coords: &[&str],
    consts: &[(&str, f64)],
) -> Result<ImmersionSpec> {
    let constants: BTreeMap<String, f64> =
        consts.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    ImmersionSpec::parse(space, n, coords, constants)
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })
}

/// Builds a named catalogue case.
pub fn build(name: &str) -> Result<BuiltCase> {
    match name {
        "flat-invariant-plane" => Ok(BuiltCase {
            name: "flat-invariant-plane",
            immersion: parse(
                golden_space(FactorSpec::flat(3), FactorSpec::flat(2))?,
                3,
                &["u1", "u2", "u3", "0", "0"],
                &[],
            )?,
            points: vec![vec![0.0, 0.0, 0.0], vec![0.2, -0.4, 1.1], vec![-0.9, 0.3, 0.5]],
            d1_basis: None,
            d2_basis: None,
            tuples: vec![vec![2]],
            k_values: vec![2],
            u_values: vec![2.0, 8.0],
        }),
        "mixed-slant-plane" => Ok(BuiltCase {
            name: "mixed-slant-plane",
            immersion: parse(
                golden_space(FactorSpec::flat(2), FactorSpec::flat(2))?,
                2,
                &["u1", "u2", "u1", "u2"],
                &[],
            )?,
            points: vec![vec![0.0, 0.0], vec![1.3, -0.7]],
            d1_basis: None,
            d2_basis: None,
            tuples: vec![],
            k_values: vec![2],
            u_values: vec![1.0],
        }),
        "circle" => Ok(BuiltCase {
            name: "circle",
            immersion: parse(
                golden_space(FactorSpec::flat(2), FactorSpec::flat(1))?,
                1,
                &["r*cos(u1)", "r*sin(u1)", "0"],
                &[("r", 1.25)],
            )?,
            points: vec![vec![0.0], vec![0.8], vec![2.4]],
            d1_basis: None,
            d2_basis: None,
            tuples: vec![],
            k_values: vec![],
            u_values: vec![],
        }),
        "torus-in-flat" => Ok(BuiltCase {
            name: "torus-in-flat",
            immersion: parse(
                golden_space(FactorSpec::flat(4), FactorSpec::flat(1))?,
                2,
                &["cos(u1)", "sin(u1)", "b*cos(u2)", "b*sin(u2)", "0"],
                &[("b", 0.8)],
            )?,
            points: vec![vec![0.3, 1.1], vec![-1.2, 0.4]],
            d1_basis: None,
            d2_basis: None,
            tuples: vec![],
            k_values: vec![2],
            u_values: vec![1.0],
        }),
        "sphere-in-flat" => Ok(BuiltCase {
            name: "sphere-in-flat",
            immersion: parse(
                golden_space(FactorSpec::flat(3), FactorSpec::flat(1))?,
                2,
                &["cos(u1)*cos(u2)", "sin(u1)*cos(u2)", "sin(u2)", "0"],
                &[],
            )?,
            points: vec![vec![0.4, 0.3], vec![-0.8, 0.6]],
            d1_basis: None,
            d2_basis: None,
            tuples: vec![],
            k_values: vec![2],
            u_values: vec![1.0, 3.0],
        }),
        "sphere-times-sphere-torus" => Ok(BuiltCase {
            name: "sphere-times-sphere-torus",
            immersion: parse(
                golden_space(FactorSpec::sphere(2, 1.0), FactorSpec::sphere(2, 1.0))?,
                2,
                &["cos(u1)", "sin(u1)", "0", "cos(u2)", "sin(u2)", "0"],
                &[],
            )?,
            points: vec![vec![0.5, -0.4], vec![2.0, 1.2]],
            d1_basis: Some(vec![unit(2, 0)]),
            d2_basis: Some(vec![unit(2, 1)]),
            tuples: vec![],
            k_values: vec![2],
            u_values: vec![1.0],
        }),
        "sphere-times-sphere-diagonal" => Ok(BuiltCase {
            name: "sphere-times-sphere-diagonal",
            immersion: parse(
                golden_space(FactorSpec::sphere(2, 1.0), FactorSpec::sphere(2, 1.0))?,
                2,
                &[
                    "cos(u1)*cos(u2)",
                    "sin(u1)*cos(u2)",
                    "sin(u2)",
                    "cos(u1)*cos(u2)",
                    "sin(u1)*cos(u2)",
                    "sin(u2)",
                ],
                &[],
            )?,
            points: vec![vec![0.7, 0.2], vec![-0.3, 0.5]],
            d1_basis: None,
            d2_basis: None,
            tuples: vec![],
            k_values: vec![2],
            u_values: vec![1.0],
        }),
        other => Err(GeoError::Argument(format!(
            "unknown built-in case {other:?}; available: {}",
            names().join(", ")
        ))),
    }
}

// ---------------------------------------------------------------------------
// Randomized suite
// ---------------------------------------------------------------------------

/// One randomized (immersion, point) pair with the distribution bases that
/// exhibit its slant structure.
#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub label: String,
    pub immersion: ImmersionSpec,
    pub point: Vec<f64>,
    pub d1_basis: Option<Vec<DVector<f64>>>,
    pub d2_basis: Option<Vec<DVector<f64>>>,
}

/// Circle parameters: radius/frequency in a factor-1 coordinate pair and in
/// a factor-2 coordinate pair.  The tangential φ-component along the circle
/// is t = (σ a²w² + (p−σ) κ²b²)/(a²w² + κ²b²), so the circle is slant with
/// cos²θ = t²/(pt + q).
#[derive(Debug, Clone, Copy)]
struct Circle {
    a: f64,
    w: f64,
    b: f64,
    kappa: f64,
}

impl Circle {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        Circle {
            a: rng.gen_range(0.4..1.6),
            w: rng.gen_range(0.5..2.0),
            b: rng.gen_range(0.2..1.2),
            kappa: rng.gen_range(0.5..2.0),
        }
    }

    /// A circle with t = 0 (anti-invariant): balances the factor weights so
    /// σ a²w² + (p−σ) κ²b² = 0.
    fn anti_invariant(rng: &mut ChaCha8Rng, params: &MetallicParams) -> Self {
        let a = rng.gen_range(0.4..1.6);
        let w = rng.gen_range(0.5..2.0);
        let kappa = rng.gen_range(0.5..2.0);
        let sigma = params.sigma();
        let b = (sigma / (sigma - params.p())).sqrt() * a * w / kappa;
        Circle { a, w, b, kappa }
    }

    /// A circle confined to factor 1 (invariant, t = σ).
    fn invariant(rng: &mut ChaCha8Rng) -> Self {
        Circle {
            a: rng.gen_range(0.4..1.6),
            w: rng.gen_range(0.5..2.0),
            b: 0.0,
            kappa: 1.0,
        }
    }
}

/// Product-of-circles immersion: circle i occupies its own coordinate pair
/// in each flat factor.
fn torus(circles: &[Circle]) -> Result<ImmersionSpec> {
    let n = circles.len();
    let space = golden_space(FactorSpec::flat(2 * n), FactorSpec::flat(2 * n))?;
    let mut coords1 = Vec::new();
    let mut coords2 = Vec::new();
    let mut consts: Vec<(String, f64)> = Vec::new();
    for (i, c) in circles.iter().enumerate() {
        let u = format!("u{}", i + 1);
        coords1.push(format!("a{i}*cos(w{i}*{u})"));
        coords1.push(format!("a{i}*sin(w{i}*{u})"));
        if c.b == 0.0 {
            coords2.push("0".to_string());
            coords2.push("0".to_string());
        } else {
            coords2.push(format!("b{i}*cos(k{i}*{u})"));
            coords2.push(format!("b{i}*sin(k{i}*{u})"));
        }
        consts.push((format!("a{i}"), c.a));
        consts.push((format!("w{i}"), c.w));
        consts.push((format!("b{i}"), c.b));
        consts.push((format!("k{i}"), c.kappa));
    }
    let coords: Vec<String> = coords1.into_iter().chain(coords2).collect();
    let coord_refs: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
    ImmersionSpec::parse(space, n, &coord_refs, consts.into_iter().collect())
}

/// Totally geodesic n-plane whose i-th direction mixes the factors at angle
/// γᵢ: constant slant with t = σ cos²γ + (p−σ) sin²γ per direction.
fn mixed_plane(gammas: &[f64]) -> Result<ImmersionSpec> {
    let n = gammas.len();
    let space = golden_space(FactorSpec::flat(n), FactorSpec::flat(n))?;
    let mut coords = vec!["0".to_string(); 2 * n];
    let mut consts: Vec<(String, f64)> = Vec::new();
    for (i, g) in gammas.iter().enumerate() {
        coords[i] = format!("c{i}*u{}", i + 1);
        coords[n + i] = format!("s{i}*u{}", i + 1);
        consts.push((format!("c{i}"), g.cos()));
        consts.push((format!("s{i}"), g.sin()));
    }
    let coord_refs: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
    ImmersionSpec::parse(space, n, &coord_refs, consts.into_iter().collect())
}

/// Wavy graph inside factor 1 (invariant for any structure parameters).
fn invariant_graph(n: usize, amp: f64, phase: f64) -> Result<ImmersionSpec> {
    let space = golden_space(FactorSpec::flat(n + 1), FactorSpec::flat(1))?;
    let mut coords: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    let wave = match n {
        1 => "amp*sin(u1 + ph)".to_string(),
        _ => "amp*sin(u1 + ph)*cos(u2)".to_string(),
    };
    coords.push(wave);
    coords.push("0".to_string());
    let coord_refs: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
    let consts = [("amp".to_string(), amp), ("ph".to_string(), phase)];
    ImmersionSpec::parse(space, n, &coord_refs, consts.into_iter().collect())
}

/// Round n-sphere of radius r inside the flat factor (invariant, umbilical).
fn flat_sphere(n: usize, r: f64) -> Result<ImmersionSpec> {
    let space = golden_space(FactorSpec::flat(n + 1), FactorSpec::flat(1))?;
    let mut coords = spherical_coords(n, &format!("{r:.17}"));
    coords.push("0".to_string());
    let coord_refs: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
    ImmersionSpec::parse(space, n, &coord_refs, BTreeMap::new())
}

/// Great n-sphere inside the sphere factor of Sⁿ⁺¹(1) × ℝ (invariant,
/// totally geodesic, curved ambient).
fn great_sphere(n: usize) -> Result<ImmersionSpec> {
    let space = golden_space(FactorSpec::sphere(n + 1, 1.0), FactorSpec::flat(1))?;
    let mut coords = spherical_coords(n, "1");
    coords.push("0".to_string());
    coords.push("0".to_string());
    let coord_refs: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
    ImmersionSpec::parse(space, n, &coord_refs, BTreeMap::new())
}

/// Spherical coordinate chart of Sⁿ(r) ⊂ ℝⁿ⁺¹: x₀ = r·cos u₁·∏_{l≥2} cos u_l
/// and x_j = r·sin u_j·∏_{l>j} cos u_l.
fn spherical_coords(n: usize, r: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut parts = vec![r.to_string()];
        if j == 0 {
            parts.push("cos(u1)".to_string());
            for l in 2..=n {
                parts.push(format!("cos(u{l})"));
            }
        } else {
            parts.push(format!("sin(u{j})"));
            for l in (j + 1)..=n {
                parts.push(format!("cos(u{l})"));
            }
        }
        out.push(parts.join("*"));
    }
    out
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, safe: bool) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if safe && i > 0 {
                // Keep chart latitudes away from the poles.
                rng.gen_range(-1.0..1.0)
            } else {
                rng.gen_range(-3.0..3.0)
            }
        })
        .collect()
}

/// Generates `count` suite cases cycling through the families:
/// invariant graphs and umbilical spheres in flat ambients, invariant great
/// spheres in curved ambients, anti-invariant and proper-slant and bi-slant
/// circle products, and proper-slant/bi-slant mixed planes, with n ∈ {2,3,4}.
pub fn random_suite(seed: u64, count: usize) -> Result<Vec<SuiteCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = MetallicParams::golden();
    let mut cases = Vec::with_capacity(count);
    for i in 0..count {
        let n = 2 + i % 3;
        let family = i % 8;
        let case = match family {
            0 => {
                let im = invariant_graph(n, rng.gen_range(0.1..0.5), rng.gen_range(0.0..3.0))?;
                let point = random_point(&mut rng, n, false);
                SuiteCase {
                    label: format!("invariant-graph-n{n}-{i}"),
                    immersion: im,
                    point,
                    d1_basis: None,
                    d2_basis: None,
                }
            }
            1 => {
                let im = great_sphere(n)?;
                let point = random_point(&mut rng, n, true);
                SuiteCase {
                    label: format!("invariant-great-sphere-n{n}-{i}"),
                    immersion: im,
                    point,
                    d1_basis: None,
                    d2_basis: None,
                }
            }
            2 => {
                let circles: Vec<Circle> = (0..n)
                    .map(|_| Circle::anti_invariant(&mut rng, &params))
                    .collect();
                let im = torus(&circles)?;
                let point = random_point(&mut rng, n, false);
                SuiteCase {
                    label: format!("anti-invariant-torus-n{n}-{i}"),
                    immersion: im,
                    point,
                    d1_basis: None,
                    d2_basis: None,
                }
            }
            3 => {
                let shared = Circle::random(&mut rng);
                let circles = vec![shared; n];
                let im = torus(&circles)?;
                let point = random_point(&mut rng, n, false);
                SuiteCase {
                    label: format!("proper-slant-torus-n{n}-{i}"),
                    immersion: im,
                    point,
                    d1_basis: None,
                    d2_basis: None,
                }
            }
            4 => {
                let lead = Circle::invariant(&mut rng);
                let shared = Circle::random(&mut rng);
                let mut circles = vec![lead];
                circles.extend(std::iter::repeat_n(shared, n - 1));
                let im = torus(&circles)?;
                let point = random_point(&mut rng, n, false);
                SuiteCase {
                    label: format!("bi-slant-torus-n{n}-{i}"),
                    immersion: im,
                    point,
                    d1_basis: Some(vec![unit(n, 0)]),
                    d2_basis: Some((1..n).map(|j| unit(n, j)).collect()),
                }
            }
            5 => {
                let gamma = rng.gen_range(0.3..1.2);
                let im = mixed_plane(&vec![gamma; n])?;
                let point = random_point(&mut rng, n, false);
                SuiteCase {
                    label: format!("proper-slant-plane-n{n}-{i}"),
                    immersion: im,
                    point,
                    d1_basis: None,
                    d2_basis: None,
                }
            }
            6 => {
                let g1 = rng.gen_range(0.2..0.7);
                let g2 = rng.gen_range(0.9..1.4);
                let mut gammas = vec![g1];
                gammas.extend(std::iter::repeat_n(g2, n - 1));
                let im = mixed_plane(&gammas)?;
                let point = random_point(&mut rng, n, false);
                SuiteCase {
                    label: format!("bi-slant-plane-n{n}-{i}"),
                    immersion: im,
                    point,
                    d1_basis: Some(vec![unit(n, 0)]),
                    d2_basis: Some((1..n).map(|j| unit(n, j)).collect()),
                }
            }
            _ => {
                let im = flat_sphere(n, rng.gen_range(0.6..1.8))?;
                let point = random_point(&mut rng, n, true);
                SuiteCase {
                    label: format!("umbilical-sphere-n{n}-{i}"),
                    immersion: im,
                    point,
                    d1_basis: None,
                    d2_basis: None,
                }
            }
        };
        cases.push(case);
    }
    Ok(cases)
}
