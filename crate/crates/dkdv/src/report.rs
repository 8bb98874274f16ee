//! Versioned JSON report envelope and the records it carries.
//!
//! Exact quantities are strings ("p/q" or integers); floating estimates are
//! decimal strings next to the tolerance they are good to.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_NAME: &str = "dkdv-report";
pub const SCHEMA_VERSION: u32 = 1;

/// The JSON schema every report validates against.
pub const SCHEMA_JSON: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema: String,
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub results: Results,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Results {
    Pattern(PatternRecord),
    Express(ExpressRecord),
    Estimate(EstimateRecord),
    Degrees(DegreeRecord),
    Lattice(LatticeRecord),
    Sweep(SweepRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub name: String,
    pub display: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub onset: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub backward_period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub backward_onset: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: i64,
    pub signature: String,
    pub codim: usize,
    pub depends_on: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRecord {
    pub q: usize,
    pub k: usize,
    pub a: String,
    pub b: String,
    pub classification: ClassificationRecord,
    pub forward: Vec<StepRecord>,
    pub backward: Vec<StepRecord>,
    pub truncation: i64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub decimal: String,
    pub lower: String,
    pub upper: String,
    pub tolerance: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclotomicRecord {
    pub n: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressRecord {
    pub q: usize,
    pub a: String,
    pub b: String,
    pub pattern: String,
    pub polynomial: String,
    /// Integer coefficients, highest degree first.
    pub coefficients: Vec<String>,
    pub root: RootRecord,
    pub cyclotomic_factors: Vec<CyclotomicRecord>,
    pub residual_factor: String,
    pub factorization: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRecord {
    pub constant: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub q: usize,
    pub a: String,
    pub b: String,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub lambda_hat: String,
    pub tolerance: String,
    pub fit_start: usize,
    pub fit_end: usize,
    pub residual: String,
    pub express_root: String,
    pub relative_error: String,
    pub quadratic_envelope: EnvelopeRecord,
    /// log₁₀ heights h_0, h_1, …
    pub heights: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truncated_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub q: usize,
    pub a: String,
    pub b: String,
    pub mode: String,
    pub seed: u64,
    /// Index of the first iterate listed, x_{first_index}.
    pub first_index: usize,
    pub degrees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepData {
    pub width: usize,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub m_min: i64,
    pub m_max: i64,
    pub n_min: i64,
    pub n_max: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkRecord {
    pub m: i64,
    pub n: i64,
    pub class: String,
    /// Order of the zero or pole; absent for an exact zero.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<u32>,
    pub initial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub step: usize,
    pub slot: usize,
    pub m: i64,
    pub n: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub first: SlotRecord,
    pub second: SlotRecord,
    pub case: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub params: ParamsRecord,
    pub anchor: [i64; 2],
    pub staircase: Vec<StepData>,
    pub window: WindowRecord,
    pub truncation: Option<i64>,
    pub marks: Vec<MarkRecord>,
    pub cases: Vec<CaseRecord>,
    pub ascii: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub q: usize,
    pub results: Results,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub target: String,
    pub entries: Vec<SweepEntry>,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The results section alone, as compared by the determinism check.
    pub fn results_json(&self) -> String {
        serde_json::to_string(&self.results).expect("results serialize")
    }
}
