use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("non-numeric cell at ({row},{col})")]
    NonNumericCell { row: usize, col: usize },
    #[error("table has no data rows")]
    EmptyTable,
    #[error("length mismatch: {what} has {got} rows, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("missing {0} labels")]
    MissingLabels(&'static str),
    #[error("incomplete panel: {0}")]
    IncompletePanel(String),
    #[error("within transform needs at least two time periods")]
    SingleTimePeriod,
    #[error("point {x} lies outside the basis domain [0, 1]")]
    OutsideDomain { x: f64 },
    #[error("design with k = {k} terms is rank deficient")]
    RankDeficient { k: usize },
    #[error("series methods take exactly one covariate, found {0}")]
    NotScalarCovariate(usize),
    #[error("leverage of observation {i} equals one at k = {k}")]
    UnitLeverage { k: usize, i: usize },
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("fold too small: {rows} rows cannot support {k} terms")]
    FoldTooSmall { rows: usize, k: usize },
    #[error("invalid fold count V = {v} for n = {n}")]
    InvalidFolds { v: usize, n: usize },
    #[error("degenerate variance estimate for the pair (k = {k}, k' = {k_prime})")]
    DegenerateVariance { k: usize, k_prime: usize },
    #[error("residual variance estimate is zero")]
    ZeroVariance,
    #[error("solver stopped after {iterations} iterations with KKT gap {kkt_gap:e}")]
    NotConverged { iterations: usize, kkt_gap: f64 },
    #[error("response must be binary (0/1); row {row} holds {value}")]
    NonBinaryResponse { row: usize, value: f64 },
    #[error("alpha = {0} must lie in (0, 1)")]
    InvalidAlpha(f64),
    #[error("degenerate penalty: {0}")]
    DegenerateLambda(String),
    #[error("clustered rule needs at least two clusters")]
    SingleCluster,
    #[error("no grid value produced a usable fit")]
    AllFitsFailed,
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
