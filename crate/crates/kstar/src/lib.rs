//! Locally optimal weighted nearest-neighbor estimation.
//!
//! Classic k-NN fixes one `k` for a whole dataset; this crate instead
//! chooses the neighbor count and the neighbor weights separately for every
//! query, by exactly minimizing an explicit bias-plus-variance surrogate
//! over the probability simplex:
//!
//! ```text
//! minimize  C·‖α‖₂ + L·Σᵢ αᵢ·d(xᵢ, x₀)    over the simplex Δₙ
//! ```
//!
//! The variance term `C·‖α‖₂` is a high-probability bound on the weighted
//! label noise, the bias term bounds function drift through the Lipschitz
//! constant `L`, and only the ratio `L/C` matters for the weights. The
//! optimum is found exactly — no iterative tolerance — in O(k*) time after
//! sorting distances, where `k*` is the number of neighbors that end up
//! with positive weight. The optimal objective value `C·λ` doubles as a
//! per-query confidence half-width.
//!
//! # Quick start
//!
//! ```
//! use kstar::{LabeledDataset, FeatureVector, NoiseModel, MetricKind};
//!
//! let ds = LabeledDataset::from_rows(
//!     vec![vec![0.1], vec![0.5], vec![2.0]],
//!     vec![1.0, 0.0, 7.0],
//! )?;
//! let query = FeatureVector::new(vec![0.0])?;
//! let noise = NoiseModel::from_ratio(1.0)?;
//!
//! let sol = kstar::predict(&ds, &query, &noise, MetricKind::Euclidean)?;
//! assert_eq!(sol.kstar, 2);               // third point is too far to matter
//! assert!(sol.weights[0] > sol.weights[1]); // closer points weigh more
//! assert!(sol.confidence_bound() > 0.0);
//! # Ok::<(), kstar::Error>(())
//! ```
//!
//! # Modules
//!
//! - [`metric`] — distance metrics and sorted distance profiles
//! - [`solver`] — the exact greedy solver and per-query confidence bounds
//! - [`oracle`] — slow independent reference solvers used to certify the fast path
//! - [`baselines`] — standard k-NN and Nadaraya-Watson estimators
//! - [`harness`] — CSV ingestion, CV grid search, benchmark reports

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod metric;
pub mod oracle;
pub mod solver;

pub use dataset::{FeatureVector, LabeledDataset};
pub use error::{Error, Result};
pub use metric::{distance, profile, DistanceProfile, MetricKind};
pub use solver::{predict, solve_kstar, BetaVector, KStarSolution, NoiseModel};
