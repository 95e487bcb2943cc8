//! Command-line front end: solve / predict / cv / benchmark.
//!
//! Machine-readable JSON goes to stdout, diagnostics and the human table to
//! stderr. Exit code 0 on success, 2 on usage or input errors.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kstar::baselines::{Kernel, KernelKind};
use kstar::harness::{
    self, ExperimentSpec, LabelColumn, MethodKind, DEFAULT_REAL_GRID,
};
use kstar::metric::MetricKind;
use kstar::oracle;
use kstar::solver::{self, BetaVector, NoiseModel};
use kstar::{FeatureVector, LabeledDataset};

use output::{OracleComparison, OracleSide, PredictOutput, SolveOutput};

#[derive(Parser)]
#[command(
    name = "kstar",
    version,
    about = "Locally optimal weighted nearest-neighbor estimation with adaptive per-query neighbor counts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one weight-optimization instance from a beta vector or a dataset + query
    Solve(SolveArgs),
    /// Predict a query's label with kstar, knn, or nw
    Predict(PredictArgs),
    /// Cross-validation benchmark, optionally restricted to chosen methods
    Cv(CvArgs),
    /// Full benchmark: 50/50 split, CV grid search, test errors for every method
    Benchmark(ExperimentArgs),
}

/// Noise assumptions: either the bare ratio L/C, or the full (L, b, delta).
#[derive(Args, Debug)]
struct NoiseArgs {
    /// Lipschitz-to-noise ratio L/C (the single tuning knob; default 1)
    #[arg(long, conflicts_with_all = ["lipschitz", "noise_bound", "delta"])]
    ratio: Option<f64>,

    /// Lipschitz constant L of the target function
    #[arg(long, requires = "noise_bound", requires = "delta")]
    lipschitz: Option<f64>,

    /// Bound b on the label noise magnitude
    #[arg(long, requires = "lipschitz")]
    noise_bound: Option<f64>,

    /// Confidence failure probability delta in (0, 1)
    #[arg(long, requires = "lipschitz")]
    delta: Option<f64>,
}

impl NoiseArgs {
    fn to_model(&self) -> kstar::Result<NoiseModel> {
        match (self.ratio, self.lipschitz, self.noise_bound, self.delta) {
            (Some(r), None, None, None) => NoiseModel::from_ratio(r),
            (None, Some(l), Some(b), Some(d)) => NoiseModel::new(l, b, d),
            (None, None, None, None) => NoiseModel::from_ratio(1.0),
            // clap's requires/conflicts rules make this unreachable
            _ => Err(kstar::Error::InvalidParameter(
                "give either --ratio or all of --lipschitz --noise-bound --delta".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct DataArgs {
    /// CSV dataset: comma-separated finite reals, one row per point
    #[arg(long)]
    data: PathBuf,

    /// Which column holds the label: "last" or a zero-based index
    #[arg(long, default_value = "last", value_parser = parse_label_column)]
    label_col: LabelColumn,

    /// Skip the first row of the CSV
    #[arg(long)]
    has_header: bool,
}

impl DataArgs {
    fn load(&self) -> kstar::Result<LabeledDataset> {
        harness::load_csv(&self.data, self.label_col, self.has_header)
    }
}

fn parse_label_column(s: &str) -> Result<LabelColumn, String> {
    if s.eq_ignore_ascii_case("last") {
        return Ok(LabelColumn::Last);
    }
    s.parse::<usize>()
        .map(LabelColumn::Index)
        .map_err(|_| format!("expected \"last\" or a column index, got {s:?}"))
}

#[derive(Args)]
struct SolveArgs {
    /// Scaled distances beta as a comma-separated list (sorted internally)
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["data", "query"])]
    beta: Option<Vec<f64>>,

    /// CSV dataset to compute beta from (with --query)
    #[arg(long, requires = "query")]
    data: Option<PathBuf>,

    /// Query point as comma-separated coordinates (with --data)
    #[arg(long, value_delimiter = ',', requires = "data")]
    query: Option<Vec<f64>>,

    /// Which column holds the label: "last" or a zero-based index
    #[arg(long, default_value = "last", value_parser = parse_label_column)]
    label_col: LabelColumn,

    /// Skip the first row of the CSV
    #[arg(long)]
    has_header: bool,

    #[arg(long, default_value_t = MetricKind::Euclidean)]
    metric: MetricKind,

    #[command(flatten)]
    noise: NoiseArgs,

    /// Also run both reference oracles and report the max deviation
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Query point as comma-separated coordinates
    #[arg(long, value_delimiter = ',', conflicts_with = "queries")]
    query: Option<Vec<f64>>,

    /// CSV of query points (feature columns only), one JSON object per row
    #[arg(long)]
    queries: Option<PathBuf>,

    /// Estimator: kstar, knn, or nw
    #[arg(long)]
    method: MethodKind,

    /// Neighbor count for knn
    #[arg(long)]
    k: Option<usize>,

    /// Kernel bandwidth for nw
    #[arg(long)]
    sigma: Option<f64>,

    /// Kernel family for nw
    #[arg(long, default_value_t = KernelKind::Gaussian)]
    kernel: KernelKind,

    #[arg(long, default_value_t = MetricKind::Euclidean)]
    metric: MetricKind,

    #[command(flatten)]
    noise: NoiseArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DataArgs,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = 5)]
    folds: usize,

    /// Grid of neighbor counts for knn
    #[arg(long, value_delimiter = ',')]
    grid_k: Option<Vec<usize>>,

    /// Grid of bandwidths for nw
    #[arg(long, value_delimiter = ',')]
    grid_sigma: Option<Vec<f64>>,

    /// Grid of L/C ratios for kstar
    #[arg(long, value_delimiter = ',')]
    grid_ratio: Option<Vec<f64>>,

    #[arg(long, default_value_t = MetricKind::Euclidean)]
    metric: MetricKind,

    /// Kernel family for the nw baseline
    #[arg(long, default_value_t = KernelKind::Gaussian)]
    kernel: KernelKind,

    /// Min-max scale each feature over the whole dataset before splitting
    #[arg(long)]
    normalize: bool,

    /// Also write the JSON report to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,

    /// Methods to evaluate (repeat or comma-separate); default all three
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<MethodKind>>,
}

impl ExperimentArgs {
    fn to_spec(&self, methods: Option<Vec<MethodKind>>) -> ExperimentSpec {
        let defaults = ExperimentSpec::default();
        ExperimentSpec {
            dataset: self.data.data.display().to_string(),
            metric: self.metric,
            kernel: self.kernel,
            seed: self.seed,
            folds: self.folds,
            grid_k: self.grid_k.clone().unwrap_or(defaults.grid_k),
            grid_sigma: self
                .grid_sigma
                .clone()
                .unwrap_or_else(|| DEFAULT_REAL_GRID.to_vec()),
            grid_ratio: self
                .grid_ratio
                .clone()
                .unwrap_or_else(|| DEFAULT_REAL_GRID.to_vec()),
            normalize: self.normalize,
            methods: methods.unwrap_or(defaults.methods),
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("KSTAR_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            _ => {
                eprintln!("warning: ignoring KSTAR_THREADS={threads:?} (want a positive integer)");
            }
        }
    }

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Cv(args) => cmd_experiment(args.experiment, args.method),
        Command::Benchmark(args) => cmd_experiment(args, None),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                // corrupted numerical state is a bug, not a usage problem
                kstar::Error::NumericalInvariant(_) => ExitCode::FAILURE,
                _ => ExitCode::from(2),
            }
        }
    }
}

/// PGD budget for `solve --oracle`; generous because the oracle is a
/// debugging aid, not a production path.
const ORACLE_PGD_STEPS: usize = 200_000;
const ORACLE_PGD_TOLERANCE: f64 = 1e-12;

fn cmd_solve(args: SolveArgs) -> kstar::Result<()> {
    let noise = args.noise.to_model()?;
    let beta = match (&args.beta, &args.data, &args.query) {
        (Some(values), None, None) => BetaVector::from_unsorted(values.clone())?,
        (None, Some(path), Some(query)) => {
            let ds = harness::load_csv(path, args.label_col, args.has_header)?;
            let q = FeatureVector::new(query.clone())?;
            let prof = kstar::profile(&ds, &q, args.metric)?;
            solver::scale_distances(&prof, &noise)
        }
        _ => {
            return Err(kstar::Error::InvalidParameter(
                "give either --beta or --data with --query".into(),
            ))
        }
    };

    let (kstar, lambda) = solver::solve_kstar(&beta)?;
    let weights = solver::weights_from_lambda(&beta, lambda)?;
    let bound = noise.noise_scale() * lambda;

    let oracle_out = if args.oracle {
        let enumeration = oracle::solve_by_enumeration(&beta);
        let gradient =
            oracle::solve_by_projected_gradient(&beta, ORACLE_PGD_STEPS, ORACLE_PGD_TOLERANCE);
        let weight_dev = weights
            .iter()
            .zip(&enumeration.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let max_deviation = (lambda - enumeration.objective).abs().max(weight_dev);
        Some(OracleComparison {
            enumeration: OracleSide {
                objective: enumeration.objective,
                weights: enumeration.weights,
                converged: enumeration.converged,
            },
            gradient: OracleSide {
                objective: gradient.objective,
                weights: gradient.weights,
                converged: gradient.converged,
            },
            max_deviation,
        })
    } else {
        None
    };

    let out = SolveOutput {
        kstar,
        lambda,
        bound,
        weights,
        oracle: oracle_out,
    };
    println!("{}", serde_json::to_string(&out).expect("serializable"));
    Ok(())
}

fn predict_one(
    args: &PredictArgs,
    ds: &LabeledDataset,
    noise: &NoiseModel,
    query: &FeatureVector,
) -> kstar::Result<PredictOutput> {
    match args.method {
        MethodKind::KStar => {
            let sol = solver::predict(ds, query, noise, args.metric)?;
            Ok(PredictOutput {
                method: "kstar".into(),
                prediction: sol.prediction,
                kstar: Some(sol.kstar),
                lambda: Some(sol.lambda),
                bound: Some(sol.confidence_bound()),
            })
        }
        MethodKind::Knn => {
            let k = args.k.ok_or_else(|| {
                kstar::Error::InvalidParameter("--method knn requires --k".into())
            })?;
            let prediction = kstar::baselines::knn_predict(ds, query, k, args.metric)?;
            Ok(PredictOutput {
                method: "knn".into(),
                prediction,
                kstar: None,
                lambda: None,
                bound: None,
            })
        }
        MethodKind::NadarayaWatson => {
            let sigma = args.sigma.ok_or_else(|| {
                kstar::Error::InvalidParameter("--method nw requires --sigma".into())
            })?;
            let kernel = Kernel::new(args.kernel, sigma)?;
            let prediction = kstar::baselines::nw_predict(ds, query, kernel, args.metric)?;
            Ok(PredictOutput {
                method: "nw".into(),
                prediction,
                kstar: None,
                lambda: None,
                bound: None,
            })
        }
    }
}

fn cmd_predict(args: PredictArgs) -> kstar::Result<()> {
    let ds = args.data.load()?;
    let noise = args.noise.to_model()?;
    match (&args.query, &args.queries) {
        (Some(coords), None) => {
            let q = FeatureVector::new(coords.clone())?;
            let out = predict_one(&args, &ds, &noise, &q)?;
            println!("{}", serde_json::to_string(&out).expect("serializable"));
        }
        (None, Some(path)) => {
            let queries = harness::load_query_csv(path, args.data.has_header)?;
            let outputs = queries
                .iter()
                .map(|q| predict_one(&args, &ds, &noise, q))
                .collect::<kstar::Result<Vec<_>>>()?;
            println!("{}", serde_json::to_string(&outputs).expect("serializable"));
        }
        _ => {
            return Err(kstar::Error::InvalidParameter(
                "give exactly one of --query or --queries".into(),
            ))
        }
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs, methods: Option<Vec<MethodKind>>) -> kstar::Result<()> {
    let ds = args.data.load()?;
    let spec = args.to_spec(methods);
    let report = harness::run_experiment(&ds, &spec)?;
    let json = report.to_json_string()?;
    eprint!("{}", report.to_table());
    println!("{json}");
    if let Some(path) = &args.out {
        std::fs::write(path, &json).map_err(|source| kstar::Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}
