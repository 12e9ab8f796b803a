//! Scenario file envelope and per-kind payloads. Schema-validated on
//! load: unknown fields are rejected everywhere.

use serde::Deserialize;
use valfield::{Ball, SeriesPolynomial, SubfieldDescription, TruncatedSeries};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: String,
    pub kind: String,
    pub payload: serde_json::Value,
    #[serde(default)]
    pub budgets: Budgets,
}

/// Search and sampling budgets; the `--budget` flag overrides `rounds`.
#[derive(Deserialize, Clone, Copy, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_witnesses")]
    pub witnesses: usize,
}

fn default_rounds() -> usize {
    32
}

fn default_samples() -> usize {
    200
}

fn default_witnesses() -> usize {
    500
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            rounds: default_rounds(),
            samples: default_samples(),
            witnesses: default_witnesses(),
        }
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CAxiomsPayload {
    #[serde(default)]
    pub samples: Vec<TruncatedSeries>,
    #[serde(default)]
    pub random: Option<RandomPool>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RandomPool {
    pub count: usize,
    pub rank: usize,
    #[serde(default = "default_pool_terms")]
    pub max_terms: usize,
}

fn default_pool_terms() -> usize {
    4
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DoagPayload {
    pub r: usize,
    pub s: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TracePayload {
    #[serde(rename = "K")]
    pub k: SubfieldDescription,
    pub balls: Vec<Ball>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyPayload {
    #[serde(rename = "K")]
    pub k: SubfieldDescription,
    pub targets: Vec<TruncatedSeries>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SeparatedPayload {
    #[serde(rename = "K")]
    pub k: SubfieldDescription,
    pub families: Vec<Vec<TruncatedSeries>>,
    /// Optional per-family expectations for CI gating.
    #[serde(default)]
    pub expect_separated: Option<Vec<bool>>,
    /// When set, also run the coarsening transfer at this convex level on
    /// every separated family.
    #[serde(default)]
    pub transfer_level: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InSearchPayload {
    #[serde(rename = "K")]
    pub k: SubfieldDescription,
    pub x: TruncatedSeries,
    pub y: Vec<TruncatedSeries>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CounterexamplePayload {
    pub n: usize,
    pub trunc_order: u64,
    pub depth: u64,
    #[serde(default)]
    pub schedule: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    pub max_subset_size: Option<usize>,
    #[serde(default)]
    pub ceiling_samples: Option<usize>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InequalityPayload {
    #[serde(rename = "K")]
    pub k: SubfieldDescription,
    pub nvars: usize,
    pub pairs: Vec<PolyPair>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyPair {
    pub p: SeriesPolynomial,
    pub q: SeriesPolynomial,
}
