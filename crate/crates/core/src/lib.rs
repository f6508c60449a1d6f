//! Tuning-parameter selection for nonparametric series regression and for
//! ℓ1-penalized (Lasso and logit) estimation.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`). The `*64` aliases below fix the scalar to `f64`,
//! which is what the command-line tool and the Monte Carlo harness use.

pub mod basis;
pub mod dataset;
pub mod error;
pub mod lasso;
pub mod linalg;
pub mod mc;
pub mod random;
pub mod report;
pub mod scalar;
pub mod select_lambda;
pub mod select_series;
pub mod series;

pub use basis::{design_matrix, eval_basis, BasisFamily, BasisSpec};
pub use dataset::{load_table, read_table, save_table, write_table, Dataset, Labels, TableSchema};
pub use error::{Error, Result};
pub use lasso::{lasso_fit, logit_penalized_fit, LassoFit, SolverConfig};
pub use linalg::Matrix;
pub use scalar::Real;
pub use select_lambda::LambdaResult;
pub use select_series::{SelectorKind, SelectorResult};
pub use series::{error_metric, error_metrics, fit_series, hetero_trace, EvalGrid, Metric, Predictor, SeriesFit};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type Matrix64 = Matrix<f64>;
pub type SeriesFit64 = SeriesFit<f64>;
pub type SelectorResult64 = SelectorResult<f64>;
pub type LassoFit64 = LassoFit<f64>;
pub type LassoFit32 = LassoFit<f32>;
pub type LambdaResult64 = LambdaResult<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
