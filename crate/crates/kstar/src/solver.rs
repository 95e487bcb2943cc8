//! Exact solver for the locally weighted estimation objective.
//!
//! For a query point the estimator minimizes `C·‖α‖₂ + L·Σ αᵢ d(xᵢ, x₀)`
//! over the probability simplex. After scaling distances into
//! `βᵢ = (L/C)·d(xᵢ, x₀)` the optimum has a closed form: weights decay
//! linearly with β until a cutoff `k*`, beyond which they are exactly zero.
//! The greedy loop below finds `k*` and the simplex multiplier `λ` in
//! O(k*) time after sorting, and the optimal objective value is `C·λ`,
//! which doubles as a (1−δ)-confidence half-width for the prediction.

use crate::dataset::{FeatureVector, LabeledDataset};
use crate::error::{Error, Result};
use crate::metric::{profile, DistanceProfile, MetricKind};

/// Noise and smoothness assumptions behind the confidence bound.
///
/// `b` bounds the label noise magnitude, `delta` is the allowed failure
/// probability, and `lipschitz` is the smoothness constant of the target
/// function. Only the ratio `lipschitz / noise_scale()` affects the weights;
/// the absolute scale returns in the confidence bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    b: f64,
    delta: f64,
    lipschitz: f64,
}

/// Defaults used when only the ratio L/C is supplied.
pub const DEFAULT_NOISE_BOUND: f64 = 1.0;
pub const DEFAULT_DELTA: f64 = 0.05;

impl NoiseModel {
    pub fn new(lipschitz: f64, b: f64, delta: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise bound b must be positive and finite, got {b}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz constant must be positive and finite, got {lipschitz}"
            )));
        }
        let model = Self { b, delta, lipschitz };
        if !model.noise_scale().is_finite() || !model.ratio().is_finite() {
            return Err(Error::InvalidParameter(
                "derived noise scale is not finite".into(),
            ));
        }
        Ok(model)
    }

    /// Model with the given L/C ratio and default `b = 1`, `delta = 0.05`.
    pub fn from_ratio(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ratio L/C must be positive and finite, got {ratio}"
            )));
        }
        let c = DEFAULT_NOISE_BOUND * (2.0 * (2.0 / DEFAULT_DELTA).ln()).sqrt();
        Self::new(ratio * c, DEFAULT_NOISE_BOUND, DEFAULT_DELTA)
    }

    pub fn noise_bound(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// High-probability noise scale `C = b·sqrt(2·ln(2/δ))`.
    pub fn noise_scale(&self) -> f64 {
        self.b * (2.0 * (2.0 / self.delta).ln()).sqrt()
    }

    /// The single free hyperparameter L/C.
    pub fn ratio(&self) -> f64 {
        self.lipschitz / self.noise_scale()
    }
}

/// Scaled sorted distances `βᵢ = (L/C)·d(x_(i), x₀)` plus the permutation
/// back to original dataset indices.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaVector {
    beta: Vec<f64>,
    order: Vec<usize>,
}

impl BetaVector {
    /// Sorts raw values (stable under ties) and records the permutation.
    pub fn from_unsorted(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("beta vector"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "beta entries must be finite and nonnegative".into(),
            ));
        }
        let mut pairs: Vec<(f64, usize)> = values.into_iter().zip(0..).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (beta, order) = pairs.into_iter().unzip();
        Ok(Self { beta, order })
    }

    /// Sorted entries, nondecreasing.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `order[s]` = original index of the s-th smallest entry.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

/// `βᵢ = ratio · dᵢ`; the profile's sort order is carried through unchanged.
pub fn scale_distances(profile: &DistanceProfile, noise: &NoiseModel) -> BetaVector {
    let ratio = noise.ratio();
    BetaVector {
        beta: profile.distances().iter().map(|d| ratio * d).collect(),
        order: profile.order().to_vec(),
    }
}

/// One evaluation of the closed-form multiplier for a prefix of size `k`:
/// `λ_k = (S + sqrt(k + S² − k·Q)) / k` with `S = Σβᵢ`, `Q = Σβᵢ²`.
///
/// Discriminants in `[−1e-9, 0)` are rounded up to zero; anything lower
/// signals corrupted state rather than rounding noise and is an error.
pub fn lambda_closed_form(beta_prefix_sum: f64, beta_prefix_sumsq: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("prefix size k must be >= 1".into()));
    }
    let kf = k as f64;
    let disc = kf + beta_prefix_sum * beta_prefix_sum - kf * beta_prefix_sumsq;
    if disc < -1e-9 {
        return Err(Error::NumericalInvariant(format!(
            "negative discriminant {disc} at k={k}"
        )));
    }
    Ok((beta_prefix_sum + disc.max(0.0).sqrt()) / kf)
}

/// Greedy cutoff search: adds neighbors in distance order, maintaining the
/// prefix sums incrementally, until `λ_k ≤ β_{k+1}` or every point is in.
///
/// Calls `step(λ_k)` once per iteration; returns `(k*, λ_{k*})`.
fn greedy_loop(beta: &[f64], mut step: impl FnMut(f64)) -> Result<(usize, f64)> {
    if beta.is_empty() {
        return Err(Error::EmptyInput("beta vector"));
    }
    let n = beta.len();
    let mut lambda = beta[0] + 1.0;
    let mut k = 0usize;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    while k < n && lambda > beta[k] {
        k += 1;
        let b = beta[k - 1];
        sum += b;
        sumsq += b * b;
        lambda = lambda_closed_form(sum, sumsq, k)?;
        step(lambda);
    }
    Ok((k, lambda))
}

/// Optimal neighbor count and multiplier for a sorted β vector.
pub fn solve_kstar(beta: &BetaVector) -> Result<(usize, f64)> {
    greedy_loop(beta.beta(), |_| {})
}

/// Record of one greedy run, mostly useful for diagnostics and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    /// λ_1, …, λ_{k*} in iteration order.
    pub lambdas: Vec<f64>,
    pub kstar: usize,
    pub lambda: f64,
}

impl SolveTrace {
    /// Number of loop iterations executed (equals `kstar`).
    pub fn iterations(&self) -> usize {
        self.lambdas.len()
    }
}

/// Same loop as [`solve_kstar`], keeping the whole λ trajectory.
pub fn solve_kstar_trace(beta: &BetaVector) -> Result<SolveTrace> {
    let mut lambdas = Vec::new();
    let (kstar, lambda) = greedy_loop(beta.beta(), |l| lambdas.push(l))?;
    Ok(SolveTrace {
        lambdas,
        kstar,
        lambda,
    })
}

/// Simplex weights `αᵢ ∝ (λ − βᵢ)·1{βᵢ < λ}`, scattered back to original
/// dataset indices. Positivity is gated by the strict inequality, so an
/// entry with `βᵢ = λ` exactly gets weight zero.
pub fn weights_from_lambda(beta: &BetaVector, lambda: f64) -> Result<Vec<f64>> {
    let mut total = 0.0;
    for &b in beta.beta() {
        if b < lambda {
            total += lambda - b;
        } else {
            break; // sorted: nothing further is below lambda
        }
    }
    if total <= 0.0 {
        return Err(Error::NumericalInvariant(format!(
            "no beta entry lies below lambda={lambda}"
        )));
    }
    let mut weights = vec![0.0; beta.len()];
    for (s, &b) in beta.beta().iter().enumerate() {
        if b < lambda {
            weights[beta.order()[s]] = (lambda - b) / total;
        } else {
            break;
        }
    }
    Ok(weights)
}

/// Full per-query solution: weights, cutoff, multiplier, and the bound.
#[derive(Debug, Clone, PartialEq)]
pub struct KStarSolution {
    /// Simplex weights over original dataset indices.
    pub weights: Vec<f64>,
    /// Number of strictly positive weights (the adaptive neighbor count).
    pub kstar: usize,
    /// Simplex multiplier at the optimum.
    pub lambda: f64,
    /// Optimal objective value `C·λ`.
    pub objective: f64,
    /// Weighted label estimate `Σ αᵢ yᵢ`.
    pub prediction: f64,
}

impl KStarSolution {
    /// Half-width of the (1−δ)-confidence interval: with probability at
    /// least 1−δ the true value lies within `C·λ` of the prediction.
    pub fn confidence_bound(&self) -> f64 {
        self.objective
    }
}

/// End-to-end adaptive estimate for one query:
/// profile → scale → greedy cutoff → weights → weighted label average.
pub fn predict(
    ds: &LabeledDataset,
    query: &FeatureVector,
    noise: &NoiseModel,
    metric: MetricKind,
) -> Result<KStarSolution> {
    let prof = profile(ds, query, metric)?;
    let beta = scale_distances(&prof, noise);
    let (kstar, lambda) = solve_kstar(&beta)?;
    let weights = weights_from_lambda(&beta, lambda)?;
    let prediction = weights
        .iter()
        .zip(ds.labels())
        .map(|(w, y)| w * y)
        .sum::<f64>();
    Ok(KStarSolution {
        weights,
        kstar,
        lambda,
        objective: noise.noise_scale() * lambda,
        prediction,
    })
}
