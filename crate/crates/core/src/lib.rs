//! Generalized principal variables analysis (PVA).
//!
//! PVA selects a subset of `q` variables that explains as much of the
//! variance of the remaining variables as possible, by minimizing the trace
//! of the conditional covariance of the omitted variables given the chosen
//! ones. This crate generalizes the classical Pearson-based procedure to
//! rank and latent-Gaussian correlation families, which behave far better
//! on non-Gaussian and ordinal data.
//!
//! The crate is organized in four layers:
//!
//! - [`corr`] — correlation-matrix estimation (Pearson, Spearman, Gaussian
//!   copula, polychoric/polyserial) plus positive-definite repair.
//! - [`select`] — conditional covariances, the greedy and exhaustive
//!   variable-selection algorithms, and relative explanatory efficiency.
//! - [`sim`] — a seeded Monte Carlo harness: random correlation matrices,
//!   latent samplers (Gaussian / Student-t / generalized Laplace),
//!   monotone transformation suites, and scenario aggregation.
//! - [`data`] — CSV/JSON ingestion of real datasets, variable-kind
//!   inference, and result writers.

pub mod corr;
pub mod data;
pub mod error;
pub mod select;
pub mod sim;
pub mod stats;

pub use crate::corr::{
    bvn_cdf, copula_scores, gaussian_copula_corr, mixed_corr, pearson_corr, polychoric_pair,
    polyserial_pair, ranks_average_ties, repair_pd, spearman_corr, ContingencyTable,
    CorrelationFamily, CorrelationMatrix, PairEstimate, VariableKind, DEFAULT_PD_FLOOR,
};
pub use crate::data::{infer_schema, load_csv, Dataset, Schema, SchemaSource};
pub use crate::error::{Error, Result};
pub use crate::select::{
    cond_cov_single, cond_cov_subset, exhaustive_select, greedy_select, ree, LatentFamily,
    SelectionResult,
};
pub use crate::sim::{
    ecdf_scaled, figure_scenarios, proportion_ideal, run_scenario, sample_latent,
    sample_wishart_corr, transform_continuous, transform_ordinal, MethodSummary, Scenario,
    ScenarioResult, TidyRecord, TransformKind, TransformTargets,
};
