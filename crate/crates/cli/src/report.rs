//! JSON report model shared by every subcommand.
//!
//! Reports are emitted with `serde_json::to_string_pretty`, whose float
//! formatting is byte-deterministic, so identical inputs (same config, seed,
//! restarts) always produce identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;

use metallic_geo::inequalities::{DerivationCheck, InequalityResult, TheoremId};
use metallic_geo::CurvSign;

use crate::config::SCHEMA;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub interpretation: Interpretation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq_tol: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointReport>,
    /// Per theorem: the minimum slack over all evaluated points.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub worst_slacks: BTreeMap<String, f64>,
    pub falsifications: Vec<Falsification>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkipEntry>,
    pub failures: Vec<PointFailure>,
    /// Max assembly residual per interpretation pair across all points.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub derivation_summary: Vec<DerivationAggregate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracles: Option<OracleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub listing: Option<Vec<ListingEntry>>,
}

impl Report {
    pub fn new(command: &str, reading_label: &'static str) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            interpretation: Interpretation {
                trace_squared_reading: reading_label,
                curvature_sign: None,
                ddvv_bracket: "squared",
            },
            case: None,
            seed: None,
            restarts: None,
            slack_tol: None,
            eq_tol: None,
            points: Vec::new(),
            worst_slacks: BTreeMap::new(),
            falsifications: Vec::new(),
            skipped: Vec::new(),
            failures: Vec::new(),
            derivation_summary: Vec::new(),
            oracles: None,
            listing: None,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn emit(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

/// The conventions every number in the report depends on.
#[derive(Debug, Serialize)]
pub struct Interpretation {
    /// How tr²φ is read in the closed-form bounds.
    pub trace_squared_reading: &'static str,
    /// Sign of the φ-coefficient in the ambient curvature formula (fixed by
    /// the structure branch; absent for commands without a space).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_sign: Option<CurvSign>,
    /// The commutator bracket in the normal-scalar-curvature bound is the
    /// squared Frobenius reading ‖[A_r, A_s]‖².
    pub ddvv_bracket: &'static str,
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub params: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub theorems: Vec<TheoremReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub derivation: Vec<DerivationCheck>,
}

#[derive(Debug, Serialize)]
pub struct InvariantBlock {
    pub tau: f64,
    pub rho: f64,
    pub rho_perp: f64,
    pub mean_curvature_sq: f64,
    pub casorati: f64,
    pub d1: usize,
    pub d2: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub angle_deviation_1: f64,
    pub angle_deviation_2: f64,
    pub tr_t: f64,
    pub tr_t2: f64,
    pub tr_tp1: f64,
    pub tr_tp2: f64,
}

#[derive(Debug, Serialize)]
pub struct TheoremReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(flatten)]
    pub result: InequalityResult,
}

#[derive(Debug, Serialize)]
pub struct Falsification {
    pub point: usize,
    pub theorem: TheoremId,
    pub slack: f64,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct SkipEntry {
    pub theorem: TheoremId,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct PointFailure {
    pub point: usize,
    pub params: Vec<f64>,
    pub error: String,
}

#[derive(Debug, Serialize)]
pub struct DerivationAggregate {
    pub reading: &'static str,
    pub sign: CurvSign,
    pub matched_sign: bool,
    pub max_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub ddvv: DdvvOracleSummary,
    pub chen_lemma: ChenOracleSummary,
}

#[derive(Debug, Serialize)]
pub struct DdvvOracleSummary {
    pub samples: usize,
    pub worst_slack: f64,
    pub violations: usize,
    /// Constructed two-operator configurations that must reach equality.
    pub equality_hits: usize,
    pub max_equality_slack: f64,
}

#[derive(Debug, Serialize)]
pub struct ChenOracleSummary {
    pub samples: usize,
    pub worst_gap: f64,
    pub violations: usize,
    /// Constructed a₁ + a₂ = a₃ = … = a_n tuples that must reach equality.
    pub equality_hits: usize,
    pub max_equality_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct ListingEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub dimension: usize,
    pub points: usize,
    pub highlights: Vec<&'static str>,
}
