//! Logistic regression fitted three ways (cross-validated lasso, stepwise AIC
//! with maximum likelihood, and lasso selection with a maximum-likelihood
//! refit), plus the simulation and repeated-split harness that compares their
//! discrimination on held-out data.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! simulation generator, harness and CSV ingestion work in `f64`. Concrete
//! aliases for both precisions are exported below.

// comparisons are negated so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod ingest;
pub mod lasso;
pub mod linalg;
pub mod metrics;
pub mod mle;
pub mod model;
pub mod scalar;
pub mod seeds;
pub mod simgen;
pub mod selection;
pub mod tuning;

pub use error::{Error, Result};
pub use harness::{
    run_application, run_grid, run_replication, split_train_test, AggregateResult, ApplicationSpec, Arm, PipelineConfig,
    ReplicationResult, RunOptions, RunOutcome,
};
pub use ingest::{load_csv, write_csv, ColumnRef, IngestReport, IngestSpec};
pub use lasso::{fit_lasso_path, fit_lasso_path_on_grid, lambda_max, soft_threshold, LambdaPath, PathConfig};
pub use metrics::{auc, gini, ScoredOutcomes};
pub use mle::{fit_mle, IrlsConfig, MleStatus};
pub use model::{log_likelihood, log_likelihood_gradient, predict_mu, probability, sigmoid, Dataset, FittedModel, Method};
pub use scalar::Scalar;
pub use selection::{fit_lassoml, fit_stepml, refit_support, Direction, StartModel, StepwiseConfig};
pub use simgen::{gen_dataset, full_grid, Calibration, ScenarioConfig, TruthSpec};
pub use tuning::{choose_lambda_cv, fit_lasso_cv, make_folds, CvResult};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type FittedModel64 = FittedModel<f64>;
pub type FittedModel32 = FittedModel<f32>;
pub type LambdaPath64 = LambdaPath<f64>;
pub type LambdaPath32 = LambdaPath<f32>;
pub type IrlsConfig64 = IrlsConfig<f64>;
pub type PathConfig64 = PathConfig<f64>;
pub type StepwiseConfig64 = StepwiseConfig<f64>;
pub type CvResult64 = CvResult<f64>;
