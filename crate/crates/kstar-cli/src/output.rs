//! JSON shapes printed on stdout.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct SolveOutput {
    pub kstar: usize,
    pub lambda: f64,
    /// Confidence half-width C·lambda.
    pub bound: f64,
    /// Simplex weights in the order the beta entries were supplied
    /// (dataset row order when solved from --data).
    pub weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
}

#[derive(Debug, Serialize)]
pub struct OracleComparison {
    pub enumeration: OracleSide,
    pub gradient: OracleSide,
    /// Largest difference between the greedy solution and the enumeration
    /// oracle, over the objective and every weight coordinate.
    pub max_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleSide {
    pub objective: f64,
    pub weights: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
pub struct PredictOutput {
    pub method: String,
    pub prediction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kstar: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}
