//! Case configuration: JSON schema `metallic-geo/1`, field-path-aware
//! validation, grid expansion, and resolution of `builtin:NAME` cases.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use nalgebra::DVector;
use serde::Deserialize;

use metallic_geo::catalog;
use metallic_geo::inequalities::{TheoremId, TraceSquaredReading};
use metallic_geo::{ImmersionSpec, ProductSpaceForm, SpaceSpec};

pub const SCHEMA: &str = "metallic-geo/1";

/// Largest grid a single sweep may expand to.
const MAX_POINTS: usize = 100_000;

/// CLI-level failure, mapped to the exit-status contract by `main`.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or arguments (exit status 2).
    Config(String),
    /// I/O failure reading or writing files (exit status 2).
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub schema: String,
    pub space: SpaceSpec,
    pub immersion: ImmersionConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionConfig {
    pub n: usize,
    pub coords: Vec<String>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
}

/// Either per-parameter ranges (cartesian product, last axis fastest) or an
/// explicit point list.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub ranges: Vec<RangeSpec>,
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Explicit theorem selection; omitted = all applicable theorems.
    pub theorems: Option<Vec<TheoremId>>,
    #[serde(default)]
    pub tuples: Vec<Vec<usize>>,
    #[serde(default)]
    pub k_values: Vec<usize>,
    #[serde(default)]
    pub u_values: Vec<f64>,
    pub distributions: Option<DistributionConfig>,
}

/// Distribution bases in tangent-frame coordinates (one row per basis
/// vector).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub seed: u64,
    pub restarts: usize,
    /// Slack below −slack_tol is a falsification event.
    pub slack_tol: f64,
    /// |slack| ≤ eq_tol is an equality.
    pub eq_tol: f64,
    pub reading: TraceSquaredReading,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            seed: 42,
            restarts: 64,
            slack_tol: 1e-7,
            eq_tol: 1e-8,
            reading: TraceSquaredReading::default(),
        }
    }
}

/// Command-line overrides applied on top of the config file or builtin.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub tol: Option<f64>,
    pub theorems: Option<Vec<TheoremId>>,
}

/// A fully validated case ready to sweep.
pub struct ResolvedCase {
    pub name: String,
    pub immersion: ImmersionSpec,
    pub points: Vec<Vec<f64>>,
    pub d1_basis: Option<Vec<DVector<f64>>>,
    pub d2_basis: Option<Vec<DVector<f64>>>,
    pub theorems: Vec<TheoremId>,
    /// True when the theorem list was requested explicitly (config or
    /// --ineq); missing parameters are then errors instead of skips.
    pub explicit_theorems: bool,
    pub tuples: Vec<Vec<usize>>,
    pub k_values: Vec<usize>,
    pub u_values: Vec<f64>,
    pub seed: u64,
    pub restarts: usize,
    pub slack_tol: f64,
    pub eq_tol: f64,
    pub reading: TraceSquaredReading,
}

/// Parses a comma-separated theorem list (CLI `--ineq`).
pub fn parse_theorem_list(items: &[String]) -> Result<Vec<TheoremId>, CliError> {
    let mut out = Vec::new();
    for item in items {
        let name = item.trim();
        let id = TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == name)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "--ineq: unknown theorem {name:?}; expected one of {}",
                    TheoremId::ALL.map(|t| t.name()).join(", ")
                ))
            })?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("--ineq: empty theorem list".into()));
    }
    Ok(out)
}

/// Resolves `builtin:NAME` or a JSON config path into a runnable case.
pub fn resolve(source: &str, overrides: &Overrides) -> Result<ResolvedCase, CliError> {
    let mut case = if let Some(name) = source.strip_prefix("builtin:") {
        resolve_builtin(name)?
    } else {
        resolve_file(Path::new(source))?
    };
    if let Some(seed) = overrides.seed {
        case.seed = seed;
    }
    if let Some(restarts) = overrides.restarts {
        case.restarts = restarts;
    }
    if let Some(tol) = overrides.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::Config(format!(
                "--tol: tolerance must be positive, got {tol}"
            )));
        }
        case.slack_tol = tol;
    }
    if let Some(theorems) = &overrides.theorems {
        case.theorems = theorems.clone();
        case.explicit_theorems = true;
    }
    Ok(case)
}

fn resolve_builtin(name: &str) -> Result<ResolvedCase, CliError> {
    let built = catalog::build(name).map_err(|e| CliError::Config(format!("config: {e}")))?;
    let numerics = NumericsConfig::default();
    Ok(ResolvedCase {
        name: built.name.to_string(),
        immersion: built.immersion,
        points: built.points,
        d1_basis: built.d1_basis,
        d2_basis: built.d2_basis,
        theorems: TheoremId::ALL.to_vec(),
        explicit_theorems: false,
        tuples: built.tuples,
        k_values: built.k_values,
        u_values: built.u_values,
        seed: numerics.seed,
        restarts: numerics.restarts,
        slack_tol: numerics.slack_tol,
        eq_tol: numerics.eq_tol,
        reading: numerics.reading,
    })
}

fn resolve_file(path: &Path) -> Result<ResolvedCase, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let config: CaseConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    build_case(config, path.display().to_string())
}

fn build_case(config: CaseConfig, name: String) -> Result<ResolvedCase, CliError> {
    if config.schema != SCHEMA {
        return Err(CliError::Config(format!(
            "schema: expected {SCHEMA:?}, got {:?}",
            config.schema
        )));
    }
    let space = ProductSpaceForm::new(config.space)
        .map_err(|e| CliError::Config(format!("space: {e}")))?;
    let n = config.immersion.n;
    let immersion = ImmersionSpec::parse(
        space,
        n,
        &config.immersion.coords,
        config.immersion.constants,
    )
    .map_err(|e| CliError::Config(format!("immersion: {e}")))?;

    let points = expand_grid(&config.grid, n)?;

    let (d1_basis, d2_basis) = match &config.analysis.distributions {
        None => (None, None),
        Some(dist) => {
            let convert = |rows: &[Vec<f64>], field: &str| -> Result<Vec<DVector<f64>>, CliError> {
                rows.iter()
                    .enumerate()
                    .map(|(i, row)| {
                        if row.len() != n {
                            return Err(CliError::Config(format!(
                                "analysis.distributions.{field}[{i}]: expected {n} components \
                                 (tangent-frame coordinates), got {}",
                                row.len()
                            )));
                        }
                        Ok(DVector::from_column_slice(row))
                    })
                    .collect()
            };
            let d1 = convert(&dist.d1, "d1")?;
            let d2 = convert(&dist.d2, "d2")?;
            if d1.len() + d2.len() != n {
                return Err(CliError::Config(format!(
                    "analysis.distributions: d1 ({}) + d2 ({}) basis vectors must span n = {n}",
                    d1.len(),
                    d2.len()
                )));
            }
            (Some(d1), Some(d2))
        }
    };

    let explicit_theorems = config.analysis.theorems.is_some();
    let theorems = match config.analysis.theorems {
        Some(list) if list.is_empty() => {
            return Err(CliError::Config(
                "analysis.theorems: explicit list must not be empty".into(),
            ))
        }
        Some(list) => list,
        None => TheoremId::ALL.to_vec(),
    };

    let numerics = config.numerics;
    for (field, value) in [
        ("numerics.slack_tol", numerics.slack_tol),
        ("numerics.eq_tol", numerics.eq_tol),
    ] {
        if value.is_nan() || value <= 0.0 {
            return Err(CliError::Config(format!(
                "{field}: tolerance must be positive, got {value}"
            )));
        }
    }

    Ok(ResolvedCase {
        name,
        immersion,
        points,
        d1_basis,
        d2_basis,
        theorems,
        explicit_theorems,
        tuples: config.analysis.tuples,
        k_values: config.analysis.k_values,
        u_values: config.analysis.u_values,
        seed: numerics.seed,
        restarts: numerics.restarts,
        slack_tol: numerics.slack_tol,
        eq_tol: numerics.eq_tol,
        reading: numerics.reading,
    })
}

fn expand_grid(grid: &GridConfig, n: usize) -> Result<Vec<Vec<f64>>, CliError> {
    match (grid.ranges.is_empty(), grid.points.is_empty()) {
        (true, true) => Err(CliError::Config(
            "grid: provide either ranges or points".into(),
        )),
        (false, false) => Err(CliError::Config(
            "grid: ranges and points are mutually exclusive".into(),
        )),
        (true, false) => {
            for (i, p) in grid.points.iter().enumerate() {
                if p.len() != n {
                    return Err(CliError::Config(format!(
                        "grid.points[{i}]: expected {n} parameters, got {}",
                        p.len()
                    )));
                }
                if p.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::Config(format!(
                        "grid.points[{i}]: parameters must be finite"
                    )));
                }
            }
            Ok(grid.points.clone())
        }
        (false, true) => {
            if grid.ranges.len() != n {
                return Err(CliError::Config(format!(
                    "grid.ranges: expected {n} ranges (one per parameter), got {}",
                    grid.ranges.len()
                )));
            }
            let mut total: usize = 1;
            for (i, r) in grid.ranges.iter().enumerate() {
                if r.count == 0 {
                    return Err(CliError::Config(format!(
                        "grid.ranges[{i}].count: must be ≥ 1"
                    )));
                }
                if !(r.min.is_finite() && r.max.is_finite()) || r.min > r.max {
                    return Err(CliError::Config(format!(
                        "grid.ranges[{i}]: need finite min ≤ max"
                    )));
                }
                total = total.saturating_mul(r.count);
            }
            if total > MAX_POINTS {
                return Err(CliError::Config(format!(
                    "grid: {total} points exceed the sweep limit of {MAX_POINTS}"
                )));
            }
            let axes: Vec<Vec<f64>> = grid
                .ranges
                .iter()
                .map(|r| {
                    (0..r.count)
                        .map(|j| {
                            if r.count == 1 {
                                r.min
                            } else {
                                r.min + (r.max - r.min) * j as f64 / (r.count - 1) as f64
                            }
                        })
                        .collect()
                })
                .collect();
            let mut points = Vec::with_capacity(total);
            let mut index = vec![0usize; n];
            loop {
                points.push(index.iter().zip(&axes).map(|(&j, axis)| axis[j]).collect());
                // Odometer increment, last axis fastest.
                let mut axis = n;
                loop {
                    if axis == 0 {
                        return Ok(points);
                    }
                    axis -= 1;
                    index[axis] += 1;
                    if index[axis] < axes[axis].len() {
                        break;
                    }
                    index[axis] = 0;
                }
            }
        }
    }
}
