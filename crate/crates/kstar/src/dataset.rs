//! Immutable feature vectors and labeled datasets.
//!
//! A [`LabeledDataset`] is the entire "model" of every estimator in this
//! crate: there is no training phase, queries are answered directly from the
//! stored points.

use crate::error::{Error, Result};

/// A point in R^d with all coordinates finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    coords: Vec<f64>,
}

impl FeatureVector {
    /// Validates that every coordinate is finite.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("feature vector has no coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("feature vector coordinate"));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

/// An immutable collection of points with real-valued labels.
///
/// Invariants enforced at construction: at least one row, equal point/label
/// counts, every point of dimension `dim`, all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    points: Vec<FeatureVector>,
    labels: Vec<f64>,
    dim: usize,
}

impl LabeledDataset {
    pub fn new(points: Vec<FeatureVector>, labels: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("dataset has no points"));
        }
        if points.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|y| !y.is_finite()) {
            return Err(Error::NonFinite("label"));
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
        }
        Ok(Self {
            points,
            labels,
            dim,
        })
    }

    /// Builds a dataset from raw coordinate rows.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        let points = rows
            .into_iter()
            .map(FeatureVector::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, labels)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[FeatureVector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &FeatureVector {
        &self.points[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    /// New dataset keeping only the given row indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::new(points, labels)
    }

    /// Rescales every feature to [0, 1] over the whole dataset.
    ///
    /// Constant features map to 0. Labels are left untouched.
    pub fn min_max_scaled(&self) -> Self {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in &self.points {
            for (j, &c) in p.coords().iter().enumerate() {
                lo[j] = lo[j].min(c);
                hi[j] = hi[j].max(c);
            }
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                let coords = p
                    .coords()
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        let span = hi[j] - lo[j];
                        if span > 0.0 {
                            (c - lo[j]) / span
                        } else {
                            0.0
                        }
                    })
                    .collect();
                FeatureVector { coords }
            })
            .collect();
        Self {
            points,
            labels: self.labels.clone(),
            dim: self.dim,
        }
    }
}
