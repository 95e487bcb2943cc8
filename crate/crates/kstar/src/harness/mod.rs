//! Experimental protocol: 50/50 split, 5-fold cross-validation grid search,
//! test-half evaluation, and paired significance testing.
//!
//! Everything is seeded and deterministic: the same [`ExperimentSpec`]
//! always yields a byte-identical report. Grid values and test points are
//! evaluated in parallel, but aggregation is order-independent (fixed-order
//! sums), so parallelism does not perturb results.

mod csv;
mod report;

pub use csv::{load_csv, load_query_csv, LabelColumn};
pub use report::{CvReport, MethodReport};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{knn_predict, nw_predict, Kernel, KernelKind};
use crate::dataset::{FeatureVector, LabeledDataset};
use crate::error::{Error, Result};
use crate::metric::MetricKind;
use crate::solver::{self, NoiseModel};

/// Default CV grid for both the bandwidth σ and the ratio L/C.
pub const DEFAULT_REAL_GRID: [f64; 9] = [0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0];

/// Number of resamples used by the permutation significance test.
pub const SIGNIFICANCE_RESAMPLES: usize = 10_000;

/// The estimators the harness can benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    KStar,
    Knn,
    NadarayaWatson,
}

impl MethodKind {
    /// Stable identifier used in JSON output and on the command line.
    pub fn id(self) -> &'static str {
        match self {
            MethodKind::KStar => "kstar",
            MethodKind::Knn => "knn",
            MethodKind::NadarayaWatson => "nw",
        }
    }

    /// Human-readable name for the text table.
    pub fn display_name(self) -> &'static str {
        match self {
            MethodKind::KStar => "k*-NN",
            MethodKind::Knn => "standard k-NN",
            MethodKind::NadarayaWatson => "Nadaraya-Watson",
        }
    }
}

impl std::str::FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kstar" => Ok(MethodKind::KStar),
            "knn" => Ok(MethodKind::Knn),
            "nw" | "nadaraya-watson" => Ok(MethodKind::NadarayaWatson),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected kstar, knn, or nw)"
            ))),
        }
    }
}

/// A method with its hyperparameter fixed, ready to predict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedMethod {
    KStar { noise: NoiseModel },
    Knn { k: usize },
    Nw { kernel: Kernel },
}

impl FittedMethod {
    /// Prediction for one query, plus the adaptive neighbor count when the
    /// method has one.
    pub fn predict_one(
        &self,
        train: &LabeledDataset,
        query: &FeatureVector,
        metric: MetricKind,
    ) -> Result<(f64, Option<usize>)> {
        match self {
            FittedMethod::KStar { noise } => {
                let sol = solver::predict(train, query, noise, metric)?;
                Ok((sol.prediction, Some(sol.kstar)))
            }
            FittedMethod::Knn { k } => Ok((knn_predict(train, query, *k, metric)?, None)),
            FittedMethod::Nw { kernel } => Ok((nw_predict(train, query, *kernel, metric)?, None)),
        }
    }
}

/// Full description of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Name or path of the dataset, echoed into the report.
    pub dataset: String,
    pub metric: MetricKind,
    /// Kernel family used by the Nadaraya-Watson baseline.
    pub kernel: KernelKind,
    pub seed: u64,
    pub folds: usize,
    pub grid_k: Vec<usize>,
    pub grid_sigma: Vec<f64>,
    pub grid_ratio: Vec<f64>,
    /// Min-max scale each feature over the whole dataset before splitting.
    pub normalize: bool,
    pub methods: Vec<MethodKind>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            dataset: String::new(),
            metric: MetricKind::Euclidean,
            kernel: KernelKind::Gaussian,
            seed: 0,
            folds: 5,
            grid_k: (1..=10).collect(),
            grid_sigma: DEFAULT_REAL_GRID.to_vec(),
            grid_ratio: DEFAULT_REAL_GRID.to_vec(),
            normalize: false,
            methods: vec![
                MethodKind::Knn,
                MethodKind::NadarayaWatson,
                MethodKind::KStar,
            ],
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 folds, got {}",
                self.folds
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods selected".into()));
        }
        for m in &self.methods {
            let grid_ok = match m {
                MethodKind::KStar => {
                    !self.grid_ratio.is_empty()
                        && self.grid_ratio.iter().all(|r| *r > 0.0 && r.is_finite())
                }
                MethodKind::Knn => !self.grid_k.is_empty() && self.grid_k.iter().all(|k| *k >= 1),
                MethodKind::NadarayaWatson => {
                    !self.grid_sigma.is_empty()
                        && self.grid_sigma.iter().all(|s| *s > 0.0 && s.is_finite())
                }
            };
            if !grid_ok {
                return Err(Error::InvalidParameter(format!(
                    "grid for {} is empty or has non-positive values",
                    m.id()
                )));
            }
        }
        Ok(())
    }
}

/// Seeded 50/50 split: first ⌈n/2⌉ shuffled rows become the validation
/// half, the rest the test half.
pub fn split_half(ds: &LabeledDataset, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    if ds.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 rows to split".into(),
        ));
    }
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let cut = ds.len().div_ceil(2);
    Ok((ds.subset(&idx[..cut])?, ds.subset(&idx[cut..])?))
}

/// Disjoint cover of `0..n` by `folds` blocks: seeded shuffle, then
/// contiguous blocks with the remainder spread one per leading fold.
fn fold_partition(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let base = n / folds;
    let extra = n % folds;
    let mut parts = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        parts.push(idx[start..start + size].to_vec());
        start += size;
    }
    parts
}

/// Result of a grid search over one hyperparameter.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch<P> {
    pub best_param: P,
    pub best_error: f64,
    /// Mean absolute validation error per grid value, in grid order.
    pub errors: Vec<(P, f64)>,
}

/// K-fold cross-validation of a hyperparameter grid.
///
/// Each held-out point is predicted from the remaining folds; a grid
/// value's score is the mean absolute error pooled over all held-out
/// points. Ties on the score go to the smaller grid value.
pub fn cross_validate<P>(
    ds: &LabeledDataset,
    folds: usize,
    seed: u64,
    grid: &[P],
    make: impl Fn(P) -> Result<FittedMethod> + Sync,
    metric: MetricKind,
) -> Result<GridSearch<P>>
where
    P: Copy + PartialOrd + Send + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty hyperparameter grid".into()));
    }
    if folds < 2 || folds > ds.len() {
        return Err(Error::InvalidParameter(format!(
            "folds must lie in [2, {}], got {folds}",
            ds.len()
        )));
    }
    let parts = fold_partition(ds.len(), folds, seed);
    // per-fold training subsets, reused across every grid value
    let mut splits = Vec::with_capacity(folds);
    for f in 0..folds {
        let mut train_idx: Vec<usize> = (0..folds)
            .filter(|g| *g != f)
            .flat_map(|g| parts[g].iter().copied())
            .collect();
        train_idx.sort_unstable();
        if train_idx.is_empty() {
            return Err(Error::InvalidParameter(
                "a fold has an empty training set".into(),
            ));
        }
        splits.push((ds.subset(&train_idx)?, &parts[f]));
    }

    let errors: Vec<(P, f64)> = grid
        .par_iter()
        .map(|&p| -> Result<(P, f64)> {
            let method = make(p)?;
            let mut total = 0.0;
            let mut count = 0usize;
            for (train, held_out) in &splits {
                for &i in held_out.iter() {
                    let (pred, _) = method.predict_one(train, ds.point(i), metric)?;
                    total += (pred - ds.label(i)).abs();
                    count += 1;
                }
            }
            Ok((p, total / count as f64))
        })
        .collect::<Result<_>>()?;

    let mut best = errors[0];
    for &(p, e) in &errors[1..] {
        if e < best.1 || (e == best.1 && p < best.0) {
            best = (p, e);
        }
    }
    Ok(GridSearch {
        best_param: best.0,
        best_error: best.1,
        errors,
    })
}

/// Per-query absolute errors of one fitted method on a test set.
#[derive(Debug, Clone, PartialEq)]
pub struct TestEval {
    /// Absolute errors in test-row order.
    pub errors: Vec<f64>,
    pub mae: f64,
    /// Population standard deviation of the absolute errors.
    pub std: f64,
    /// Min/max adaptive neighbor count, when the method reports one.
    pub kstar_range: Option<(usize, usize)>,
}

/// Predicts every test point from the full training half.
pub fn evaluate_test(
    train: &LabeledDataset,
    test: &LabeledDataset,
    method: &FittedMethod,
    metric: MetricKind,
) -> Result<TestEval> {
    let outcomes: Vec<(f64, Option<usize>)> = (0..test.len())
        .into_par_iter()
        .map(|i| -> Result<(f64, Option<usize>)> {
            let (pred, kstar) = method.predict_one(train, test.point(i), metric)?;
            Ok(((pred - test.label(i)).abs(), kstar))
        })
        .collect::<Result<_>>()?;

    let errors: Vec<f64> = outcomes.iter().map(|(e, _)| *e).collect();
    let n = errors.len() as f64;
    let mae = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mae) * (e - mae)).sum::<f64>() / n;
    let kstar_range = outcomes
        .iter()
        .filter_map(|(_, k)| *k)
        .fold(None, |acc: Option<(usize, usize)>, k| match acc {
            None => Some((k, k)),
            Some((lo, hi)) => Some((lo.min(k), hi.max(k))),
        });
    Ok(TestEval {
        errors,
        mae,
        std: var.sqrt(),
        kstar_range,
    })
}

/// Two-sided paired sign-flip permutation test on per-query absolute-error
/// differences. Returns the add-one-smoothed p-value, so identical inputs
/// give exactly 1.0 and nothing ever reaches 0.
pub fn significance_test(errors_a: &[f64], errors_b: &[f64], seed: u64) -> Result<f64> {
    if errors_a.len() != errors_b.len() {
        return Err(Error::InvalidParameter(format!(
            "error lists differ in length: {} vs {}",
            errors_a.len(),
            errors_b.len()
        )));
    }
    if errors_a.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 paired errors".into(),
        ));
    }
    let diffs: Vec<f64> = errors_a
        .iter()
        .zip(errors_b)
        .map(|(a, b)| a - b)
        .collect();
    let n = diffs.len() as f64;
    let observed = (diffs.iter().sum::<f64>() / n).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0usize;
    for _ in 0..SIGNIFICANCE_RESAMPLES {
        let mut stat = 0.0;
        for &d in &diffs {
            if rng.random::<bool>() {
                stat += d;
            } else {
                stat -= d;
            }
        }
        if (stat / n).abs() >= observed {
            extreme += 1;
        }
    }
    Ok((1 + extreme) as f64 / (1 + SIGNIFICANCE_RESAMPLES) as f64)
}

fn grid_search_for(
    method: MethodKind,
    validation: &LabeledDataset,
    spec: &ExperimentSpec,
) -> Result<(f64, f64, FittedMethod)> {
    match method {
        MethodKind::KStar => {
            let search = cross_validate(
                validation,
                spec.folds,
                spec.seed,
                &spec.grid_ratio,
                |r| Ok(FittedMethod::KStar {
                    noise: NoiseModel::from_ratio(r)?,
                }),
                spec.metric,
            )?;
            Ok((
                search.best_param,
                search.best_error,
                FittedMethod::KStar {
                    noise: NoiseModel::from_ratio(search.best_param)?,
                },
            ))
        }
        MethodKind::Knn => {
            let search = cross_validate(
                validation,
                spec.folds,
                spec.seed,
                &spec.grid_k,
                |k| Ok(FittedMethod::Knn { k }),
                spec.metric,
            )?;
            Ok((
                search.best_param as f64,
                search.best_error,
                FittedMethod::Knn {
                    k: search.best_param,
                },
            ))
        }
        MethodKind::NadarayaWatson => {
            let search = cross_validate(
                validation,
                spec.folds,
                spec.seed,
                &spec.grid_sigma,
                |s| Ok(FittedMethod::Nw {
                    kernel: Kernel::new(spec.kernel, s)?,
                }),
                spec.metric,
            )?;
            Ok((
                search.best_param,
                search.best_error,
                FittedMethod::Nw {
                    kernel: Kernel::new(spec.kernel, search.best_param)?,
                },
            ))
        }
    }
}

/// Runs the whole protocol on one dataset: split, per-method grid search on
/// the validation half, evaluation on the test half, and paired
/// significance of every method against the best one.
pub fn run_experiment(ds: &LabeledDataset, spec: &ExperimentSpec) -> Result<CvReport> {
    spec.validate()?;
    let scaled;
    let ds = if spec.normalize {
        scaled = ds.min_max_scaled();
        &scaled
    } else {
        ds
    };
    let (validation, test) = split_half(ds, spec.seed)?;

    let mut evals = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let (best_param, validation_error, fitted) = grid_search_for(method, &validation, spec)?;
        let eval = evaluate_test(&validation, &test, &fitted, spec.metric)?;
        evals.push((method, best_param, validation_error, eval));
    }

    // index of the lowest test MAE; ties go to the earlier method
    let best_idx = evals
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.3.mae.total_cmp(&b.3.mae))
        .map(|(i, _)| i)
        .expect("at least one method");

    let mut methods = Vec::with_capacity(evals.len());
    for (i, (method, best_param, validation_error, eval)) in evals.iter().enumerate() {
        let p_value_vs_best = if i == best_idx {
            None
        } else {
            Some(significance_test(
                &eval.errors,
                &evals[best_idx].3.errors,
                spec.seed.wrapping_add(1 + i as u64),
            )?)
        };
        methods.push(MethodReport {
            method: method.id().to_string(),
            best_param: *best_param,
            validation_error: *validation_error,
            mae: eval.mae,
            std: eval.std,
            kstar_min: eval.kstar_range.map(|(lo, _)| lo),
            kstar_max: eval.kstar_range.map(|(_, hi)| hi),
            p_value_vs_best,
        });
    }

    Ok(CvReport {
        dataset: spec.dataset.clone(),
        seed: spec.seed,
        folds: spec.folds,
        metric: spec.metric,
        normalize: spec.normalize,
        validation_size: validation.len(),
        test_size: test.len(),
        methods,
    })
}
