//! Benchmark report: JSON for machines, an aligned table for people.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::MethodKind;
use crate::metric::MetricKind;

/// Result of one method in a benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    /// "kstar", "knn", or "nw".
    pub method: String,
    /// Hyperparameter chosen by cross-validation (k, σ, or L/C).
    pub best_param: f64,
    /// Mean absolute error of the best grid value during cross-validation.
    pub validation_error: f64,
    /// Mean absolute error on the test half.
    pub mae: f64,
    /// Population standard deviation of the test absolute errors.
    pub std: f64,
    /// Smallest per-query neighbor count on the test half (k*-NN only).
    pub kstar_min: Option<usize>,
    /// Largest per-query neighbor count on the test half (k*-NN only).
    pub kstar_max: Option<usize>,
    /// Paired sign-flip permutation p-value against the best method;
    /// absent on the best method itself.
    pub p_value_vs_best: Option<f64>,
}

/// Full cross-validation benchmark report for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub dataset: String,
    pub seed: u64,
    pub folds: usize,
    pub metric: MetricKind,
    pub normalize: bool,
    pub validation_size: usize,
    pub test_size: usize,
    pub methods: Vec<MethodReport>,
}

impl CvReport {
    /// Compact single-line JSON with stable field order.
    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    fn param_label(m: &MethodReport) -> String {
        match m.method.as_str() {
            "knn" => format!("k={}", m.best_param as usize),
            "nw" => format!("sigma={}", m.best_param),
            "kstar" => format!("L/C={}", m.best_param),
            _ => format!("{}", m.best_param),
        }
    }

    /// Aligned text table, one row per method, mirroring the usual
    /// error/(std)/param/range-of-k presentation. The best row is marked
    /// with `*` when it is significantly better than the runner-up at the
    /// 0.05 level.
    pub fn to_table(&self) -> String {
        let best = self
            .methods
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.mae.total_cmp(&b.mae))
            .map(|(i, _)| i);
        // significance of the best row = p-value of the runner-up vs best
        let runner_up_p = self
            .methods
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != best)
            .min_by(|(_, a), (_, b)| a.mae.total_cmp(&b.mae))
            .and_then(|(_, m)| m.p_value_vs_best);
        let significant = runner_up_p.is_some_and(|p| p < 0.05);

        let mut rows: Vec<[String; 4]> = vec![[
            "method".into(),
            "error (std)".into(),
            "best param".into(),
            "range of k*".into(),
        ]];
        for (i, m) in self.methods.iter().enumerate() {
            let name = m
                .method
                .parse::<MethodKind>()
                .map(MethodKind::display_name)
                .unwrap_or(&m.method);
            let mark = if Some(i) == best && significant { "*" } else { "" };
            let range = match (m.kstar_min, m.kstar_max) {
                (Some(lo), Some(hi)) => format!("{lo}-{hi}"),
                _ => "-".into(),
            };
            rows.push([
                name.to_string(),
                format!("{:.4} ({:.4}){mark}", m.mae, m.std),
                Self::param_label(m),
                range,
            ]);
        }

        let mut widths = [0usize; 4];
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = format!(
            "dataset {} | seed {} | {} validation / {} test rows | {}-fold CV\n",
            self.dataset, self.seed, self.validation_size, self.test_size, self.folds
        );
        for row in &rows {
            let line = row
                .iter()
                .enumerate()
                .map(|(c, cell)| format!("{cell:<width$}", width = widths[c]))
                .collect::<Vec<_>>()
                .join("  ");
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> CvReport {
        CvReport {
            dataset: "toy.csv".into(),
            seed: 7,
            folds: 5,
            metric: MetricKind::Euclidean,
            normalize: false,
            validation_size: 50,
            test_size: 50,
            methods: vec![
                MethodReport {
                    method: "knn".into(),
                    best_param: 2.0,
                    validation_error: 0.21,
                    mae: 0.19,
                    std: 0.38,
                    kstar_min: None,
                    kstar_max: None,
                    p_value_vs_best: Some(0.03),
                },
                MethodReport {
                    method: "kstar".into(),
                    best_param: 0.5,
                    validation_error: 0.2,
                    mae: 0.17,
                    std: 0.31,
                    kstar_min: Some(1),
                    kstar_max: Some(5),
                    p_value_vs_best: None,
                },
            ],
        }
    }

    #[test]
    fn json_has_stable_field_names() {
        let json = sample_report().to_json_string().unwrap();
        for field in [
            "\"method\"",
            "\"best_param\"",
            "\"mae\"",
            "\"std\"",
            "\"kstar_min\"",
            "\"kstar_max\"",
            "\"p_value_vs_best\"",
            "\"validation_size\"",
            "\"test_size\"",
            "\"seed\"",
        ] {
            assert!(json.contains(field), "missing {field} in {json}");
        }
        let parsed: CvReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, sample_report());
    }

    #[test]
    fn table_lists_every_method_and_marks_significance() {
        let table = sample_report().to_table();
        assert!(table.contains("standard k-NN"));
        assert!(table.contains("k*-NN"));
        assert!(table.contains("1-5"));
        assert!(table.contains("0.1700 (0.3100)*"));
        assert!(table.contains("k=2"));
        assert!(table.contains("L/C=0.5"));
    }

    #[test]
    fn table_omits_mark_when_not_significant() {
        let mut report = sample_report();
        report.methods[0].p_value_vs_best = Some(0.2);
        let table = report.to_table();
        assert!(!table.contains(")*"));
        assert!(table.contains("0.1700 (0.3100)"));
    }
}
