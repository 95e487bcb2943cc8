//! Distance metrics and sorted distance profiles.
//!
//! Distances are computed by exhaustive scan over the dataset; no spatial
//! index is used. The profile keeps the permutation back to original row
//! indices so weights can be scattered back to dataset order.

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureVector, LabeledDataset};
use crate::error::{Error, Result};

/// Distance function between feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl MetricKind {
    fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            MetricKind::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            MetricKind::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            MetricKind::Chebyshev => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(MetricKind::Euclidean),
            "manhattan" | "l1" => Ok(MetricKind::Manhattan),
            "chebyshev" | "linf" => Ok(MetricKind::Chebyshev),
            other => Err(Error::InvalidParameter(format!(
                "unknown metric {other:?} (expected euclidean, manhattan, or chebyshev)"
            ))),
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Manhattan => "manhattan",
            MetricKind::Chebyshev => "chebyshev",
        };
        f.write_str(name)
    }
}

/// Metric distance between two vectors of equal dimension.
pub fn distance(a: &FeatureVector, b: &FeatureVector, metric: MetricKind) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(metric.eval(a.coords(), b.coords()))
}

/// Distances from a query to every dataset point, sorted nondecreasing.
///
/// `order[s]` is the original dataset index of the point at sorted position
/// `s`. Ties are broken by ascending original index (stable sort), so runs
/// are reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    distances: Vec<f64>,
    order: Vec<usize>,
}

impl DistanceProfile {
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

/// Exhaustive scan plus stable sort: O(nd + n log n).
pub fn profile(
    ds: &LabeledDataset,
    query: &FeatureVector,
    metric: MetricKind,
) -> Result<DistanceProfile> {
    if query.len() != ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: ds.dim(),
            got: query.len(),
        });
    }
    let mut pairs: Vec<(f64, usize)> = ds
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (metric.eval(p.coords(), query.coords()), i))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (distances, order) = pairs.into_iter().unzip();
    Ok(DistanceProfile { distances, order })
}
