//! Baseline estimators: standard k-NN and Nadaraya-Watson.

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureVector, LabeledDataset};
use crate::error::{Error, Result};
use crate::metric::{profile, MetricKind};

/// Kernel family for the Nadaraya-Watson estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[default]
    Gaussian,
    Epanechnikov,
    Triangular,
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(KernelKind::Gaussian),
            "epanechnikov" => Ok(KernelKind::Epanechnikov),
            "triangular" => Ok(KernelKind::Triangular),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel {other:?} (expected gaussian, epanechnikov, or triangular)"
            ))),
        }
    }
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            KernelKind::Gaussian => "gaussian",
            KernelKind::Epanechnikov => "epanechnikov",
            KernelKind::Triangular => "triangular",
        };
        f.write_str(name)
    }
}

/// A kernel with its bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub kind: KernelKind,
    pub sigma: f64,
}

impl Kernel {
    pub fn new(kind: KernelKind, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { kind, sigma })
    }
}

/// Kernel similarity at distance `r ≥ 0`.
///
/// Gaussian keeps its `1/σ` prefactor even though it cancels in the
/// Nadaraya-Watson ratio; the compact kernels vanish beyond `r = σ`.
pub fn kernel_value(kernel: Kernel, r: f64) -> f64 {
    let s = kernel.sigma;
    match kernel.kind {
        KernelKind::Gaussian => (-r * r / (2.0 * s * s)).exp() / s,
        KernelKind::Epanechnikov => {
            if r <= s {
                0.75 * (1.0 - r * r / (s * s))
            } else {
                0.0
            }
        }
        KernelKind::Triangular => {
            if r <= s {
                1.0 - r / s
            } else {
                0.0
            }
        }
    }
}

/// Unweighted mean of the labels of the k nearest points.
///
/// Distance ties are broken by ascending dataset index, matching the
/// profile's stable sort.
pub fn knn_predict(
    ds: &LabeledDataset,
    query: &FeatureVector,
    k: usize,
    metric: MetricKind,
) -> Result<f64> {
    if k == 0 || k > ds.len() {
        return Err(Error::InvalidParameter(format!(
            "k must lie in [1, {}], got {k}",
            ds.len()
        )));
    }
    let prof = profile(ds, query, metric)?;
    let sum: f64 = prof.order()[..k].iter().map(|&i| ds.label(i)).sum();
    Ok(sum / k as f64)
}

/// Kernel-weighted label average.
///
/// When every kernel weight is zero (compact kernels with all points
/// outside the bandwidth) the estimate falls back to the nearest
/// neighbor's label so grid searches always produce a prediction.
pub fn nw_predict(
    ds: &LabeledDataset,
    query: &FeatureVector,
    kernel: Kernel,
    metric: MetricKind,
) -> Result<f64> {
    let prof = profile(ds, query, metric)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (d, &i) in prof.distances().iter().zip(prof.order()) {
        let w = kernel_value(kernel, *d);
        num += w * ds.label(i);
        den += w;
    }
    if den > 0.0 {
        Ok(num / den)
    } else {
        Ok(ds.label(prof.order()[0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(coords: &[f64]) -> FeatureVector {
        FeatureVector::new(coords.to_vec()).unwrap()
    }

    fn kernel(kind: KernelKind, sigma: f64) -> Kernel {
        Kernel::new(kind, sigma).unwrap()
    }

    #[test]
    fn kernel_values_at_reference_points() {
        assert_eq!(kernel_value(kernel(KernelKind::Triangular, 2.0), 2.0), 0.0);
        assert_eq!(kernel_value(kernel(KernelKind::Epanechnikov, 1.5), 0.0), 0.75);
        assert_eq!(kernel_value(kernel(KernelKind::Gaussian, 1.0), 0.0), 1.0);
        // compact support
        assert_eq!(kernel_value(kernel(KernelKind::Triangular, 1.0), 1.5), 0.0);
        assert_eq!(kernel_value(kernel(KernelKind::Epanechnikov, 1.0), 1.5), 0.0);
        // triangular midpoint
        assert_eq!(kernel_value(kernel(KernelKind::Triangular, 2.0), 1.0), 0.5);
    }

    #[test]
    fn kernel_rejects_bad_sigma() {
        assert!(Kernel::new(KernelKind::Gaussian, 0.0).is_err());
        assert!(Kernel::new(KernelKind::Gaussian, f64::NAN).is_err());
    }

    #[test]
    fn knn_k_equals_n_is_label_mean() {
        let ds = LabeledDataset::from_rows(
            vec![vec![0.0], vec![1.0], vec![5.0], vec![-2.0]],
            vec![1.0, 2.0, 3.0, 6.0],
        )
        .unwrap();
        let p = knn_predict(&ds, &fv(&[0.3]), 4, MetricKind::Euclidean).unwrap();
        assert!((p - 3.0).abs() < 1e-15);
    }

    #[test]
    fn knn_k1_exact_match() {
        let ds =
            LabeledDataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]], vec![7.0, 8.0, 9.0])
                .unwrap();
        let p = knn_predict(&ds, &fv(&[1.0]), 1, MetricKind::Euclidean).unwrap();
        assert_eq!(p, 8.0);
    }

    #[test]
    fn knn_two_nearest_average() {
        let ds =
            LabeledDataset::from_rows(vec![vec![0.1], vec![-0.1], vec![9.0]], vec![0.0, 1.0, 50.0])
                .unwrap();
        let p = knn_predict(&ds, &fv(&[0.0]), 2, MetricKind::Euclidean).unwrap();
        assert_eq!(p, 0.5);
    }

    #[test]
    fn knn_rejects_k_out_of_range() {
        let ds = LabeledDataset::from_rows(vec![vec![0.0]], vec![1.0]).unwrap();
        assert!(knn_predict(&ds, &fv(&[0.0]), 0, MetricKind::Euclidean).is_err());
        assert!(knn_predict(&ds, &fv(&[0.0]), 2, MetricKind::Euclidean).is_err());
    }

    #[test]
    fn nw_single_point_returns_its_label() {
        let ds = LabeledDataset::from_rows(vec![vec![3.0]], vec![42.0]).unwrap();
        for kind in [
            KernelKind::Gaussian,
            KernelKind::Epanechnikov,
            KernelKind::Triangular,
        ] {
            let p = nw_predict(&ds, &fv(&[100.0]), kernel(kind, 0.5), MetricKind::Euclidean)
                .unwrap();
            assert_eq!(p, 42.0, "{kind}");
        }
    }

    #[test]
    fn nw_symmetric_pair_averages() {
        let ds =
            LabeledDataset::from_rows(vec![vec![-1.0], vec![1.0]], vec![0.0, 1.0]).unwrap();
        let p = nw_predict(
            &ds,
            &fv(&[0.0]),
            kernel(KernelKind::Gaussian, 0.7),
            MetricKind::Euclidean,
        )
        .unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nw_compact_kernel_fallback_is_nearest_label() {
        let ds = LabeledDataset::from_rows(
            vec![vec![10.0], vec![20.0], vec![30.0]],
            vec![5.0, 6.0, 7.0],
        )
        .unwrap();
        // all distances far beyond sigma
        for kind in [KernelKind::Epanechnikov, KernelKind::Triangular] {
            let p = nw_predict(&ds, &fv(&[0.0]), kernel(kind, 0.5), MetricKind::Euclidean)
                .unwrap();
            assert_eq!(p, 5.0, "{kind}");
        }
    }

    #[test]
    fn nw_huge_bandwidth_approaches_global_mean() {
        let ds = LabeledDataset::from_rows(
            vec![vec![0.1], vec![0.9], vec![0.4], vec![0.6]],
            vec![1.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let p = nw_predict(
            &ds,
            &fv(&[0.5]),
            kernel(KernelKind::Gaussian, 1e6),
            MetricKind::Euclidean,
        )
        .unwrap();
        assert!((p - 0.5).abs() < 1e-3);
    }

    #[test]
    fn predictions_stay_in_label_hull() {
        let ds = LabeledDataset::from_rows(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![-2.0, 4.0, 0.0, 1.0],
        )
        .unwrap();
        let q = fv(&[1.4]);
        for k in 1..=4 {
            let p = knn_predict(&ds, &q, k, MetricKind::Euclidean).unwrap();
            assert!((-2.0..=4.0).contains(&p));
        }
        for kind in [
            KernelKind::Gaussian,
            KernelKind::Epanechnikov,
            KernelKind::Triangular,
        ] {
            for sigma in [0.1, 1.0, 10.0] {
                let p = nw_predict(&ds, &q, kernel(kind, sigma), MetricKind::Euclidean).unwrap();
                assert!((-2.0..=4.0).contains(&p), "{kind} sigma={sigma}");
            }
        }
    }
}
