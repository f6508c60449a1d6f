//! `tunesel`: batch front end for series and penalty-parameter selection.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "tunesel", version, about = "Tuning-parameter selection for series and l1-penalized regression")]
pub struct Cli {
    /// Print numbers with full precision instead of 6 significant digits.
    #[arg(long, global = true)]
    pub full_precision: bool,

    /// Worker threads for parallel sections (output does not depend on it).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least-squares series fit with a fixed number of terms.
    FitSeries(FitSeriesArgs),
    /// Choose the number of series terms.
    SelectK(SelectKArgs),
    /// Lasso or penalized logit at a fixed penalty.
    Lasso(LassoArgs),
    /// Choose the Lasso penalty.
    SelectLambda(SelectLambdaArgs),
    /// Run the series-selection Monte Carlo study.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Headed CSV file.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    /// Response column.
    #[arg(long, value_name = "COL")]
    pub y: String,
    /// Covariate columns (comma separated); defaults to all other columns.
    #[arg(long, value_name = "COLS", value_delimiter = ',')]
    pub x: Vec<String>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitSeriesArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Basis family: monomial or spline.
    #[arg(long, default_value = "monomial")]
    pub basis: String,
    /// Number of terms.
    #[arg(long)]
    pub k: usize,
    /// Also report the fit at these points (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub at: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SelectKArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// mallows, stein, lepski, validation, vfold, loo, penalized or aggregation.
    #[arg(long)]
    pub method: String,
    #[arg(long, default_value = "monomial")]
    pub basis: String,
    /// Largest candidate k, or `auto` for the cube-root rule.
    #[arg(long, default_value = "auto")]
    pub kmax: String,
    /// Pilot k for residuals, or `auto` for the cube-root rule.
    #[arg(long, default_value = "auto")]
    pub kbar: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Folds for vfold.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Training share for validation.
    #[arg(long, default_value_t = 2.0 / 3.0)]
    pub train_frac: f64,
    /// Evaluation point for lepski.
    #[arg(long, default_value_t = 0.5)]
    pub x0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Test level for lepski.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bootstrap draws for lepski.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    /// Noise variance for penalized selection.
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LassoArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub lambda: f64,
    /// Fit the penalized logit instead of least squares.
    #[arg(long)]
    pub logit: bool,
    /// Rescale covariates to unit root mean square.
    #[arg(long)]
    pub normalize_columns: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct SelectLambdaArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// brt, bcch, bootstrap, sure, cv, cluster-bcch, panel-bcch,
    /// quantile-pivotal or glm-bootstrap-cv.
    #[arg(long)]
    pub rule: String,
    /// Significance level, or `auto` for 0.1/log(max(p, n)).
    #[arg(long, default_value = "auto")]
    pub alpha: String,
    #[arg(long, default_value_t = 1.1)]
    pub c: f64,
    /// Noise scale for brt.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Noise variance for sure; estimated from the BCCH fit when absent.
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Bootstrap or simulation draws.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Quantile level for quantile-pivotal.
    #[arg(long, default_value_t = 0.5)]
    pub u: f64,
    /// Explicit penalty grid (comma separated); defaults to 100 geometric
    /// points from 1/n to n.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    #[arg(long, value_name = "COL")]
    pub cluster: Option<String>,
    #[arg(long, value_name = "COL")]
    pub unit: Option<String>,
    #[arg(long, value_name = "COL")]
    pub time: Option<String>,
    #[arg(long)]
    pub normalize_columns: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Run the full study design (both n, both functions, all methods, both bases).
    #[arg(long)]
    pub table1: bool,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV report path; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Aligned text table path.
    #[arg(long, value_name = "PATH")]
    pub table_out: Option<PathBuf>,
    /// Sample sizes (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Regression functions: expexp, sin.
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<String>,
    /// Methods: mallows, lepski, cv, aggregation.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Bases: monomial, spline.
    #[arg(long, value_delimiter = ',')]
    pub bases: Vec<String>,
    /// `ceil` for the rounded-up cube root, `below` for the largest integer under it.
    #[arg(long, default_value = "ceil")]
    pub kmax_rule: String,
    /// Bootstrap draws for the Lepski method.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    /// Score the fold-average CV predictor instead of the full refit.
    #[arg(long)]
    pub cv_fold_average: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tunesel: {e}");
            ExitCode::from(1)
        }
    }
}
