//! Strict JSON configs for each subcommand. Unknown keys are rejected.

use serde::Deserialize;
use serde_json::Value;

use e2qes::model::PtClass;
use e2qes::qes::Sector;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SolveConfig {
    pub class: PtClass,
    /// Coefficient set in the nine-key `muJ`... form.
    pub coefficients: Value,
    pub lambda: Option<String>,
    pub tau: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SpectrumConfig {
    pub sector: Sector,
    pub n_hat: u32,
    pub zeta: f64,
    pub beta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ThreeLevelConfig {
    pub zeta: f64,
    pub beta: f64,
    pub lambda: String,
    /// Sample time for `wavefunctions`.
    #[serde(default)]
    pub t: f64,
    /// Sample times for `observables`.
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub theta0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ScalingConfig {
    pub g: f64,
    pub zetas: Vec<f64>,
    pub beta: f64,
    pub k_low: usize,
}
