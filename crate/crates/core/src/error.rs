//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by estimation, selection, simulation, and I/O.
///
/// Column-indexed variants carry zero-based positions; callers that know
/// column names (the CLI, the data layer) render them with names attached.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("need at least {min} observations, got {got}")]
    TooFewObservations { min: usize, got: usize },

    #[error("column {column} is constant (zero variance)")]
    ConstantColumn { column: usize },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("degenerate ordinal column {column}: fewer than 2 observed levels")]
    DegenerateOrdinal { column: usize },

    #[error("correlation must lie strictly inside (-1, 1), got {rho}")]
    InvalidRho { rho: f64 },

    #[error("integration limit must be a number or an infinity sentinel, got NaN")]
    InvalidLimit,

    #[error("matrix is not symmetric (max asymmetry {max_dev:e})")]
    NotSymmetric { max_dev: f64 },

    #[error("matrix diagonal entry {index} is {value}, expected 1")]
    NotUnitDiagonal { index: usize, value: f64 },

    #[error("off-diagonal entry ({row},{col}) is {value}, outside [-1, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("positive-definite repair did not converge")]
    RepairFailed,

    #[error("Cholesky factorization failed; repair the matrix first")]
    CholeskyFailed,

    #[error("degenerate pivot: variable {index} has conditional variance {value:e}")]
    DegeneratePivot { index: usize, value: f64 },

    #[error("conditioning block is numerically singular (condition estimate {cond:e})")]
    SingularBlock { cond: f64 },

    #[error("selection size q={q} out of range for p={p}")]
    InvalidSelectionSize { q: usize, p: usize },

    #[error("subset index {index} out of range for p={p}")]
    IndexOutOfRange { index: usize, p: usize },

    #[error("subset contains duplicate index {index}")]
    DuplicateIndex { index: usize },

    #[error("subsets must have equal size, got {left} and {right}")]
    SubsetSizeMismatch { left: usize, right: usize },

    #[error("{combinations:e} subsets of size {q} exceed the exhaustive-search guard of 1e6; use greedy_select")]
    ExhaustiveGuard { q: usize, combinations: f64 },

    #[error("student-t family requires nu > 1, got {nu}")]
    InvalidStudentT { nu: f64 },

    #[error("laplace family requires r > 0.5, got {r}")]
    InvalidLaplace { r: f64 },

    #[error("scenario requires q < p, got q={q}, p={p}")]
    InvalidScenario { q: usize, p: usize },

    #[error("polychoric method requires the ordinal transform")]
    PolychoricNotAdmissible,

    #[error("{excluded} of {total} replicates excluded, above the 5% ceiling")]
    ExclusionCeiling { excluded: usize, total: usize },

    #[error("missing cell at row {row}, column {column}; imputation is out of scope, complete the data first")]
    MissingCell { row: usize, column: String },

    #[error("non-numeric cell {value:?} at row {row}, column {column}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("duplicate column name {name:?}")]
    DuplicateName { name: String },

    #[error("column {column} declared ordinal but contains non-integer value {value}")]
    OrdinalNotInteger { column: String, value: f64 },

    #[error("column {column} declared Ordinal({declared}) but {observed} distinct levels observed")]
    OrdinalLevelsExceeded {
        column: String,
        declared: usize,
        observed: usize,
    },

    #[error("ordinal kind requires at least 2 levels, got {levels}")]
    InvalidLevels { levels: usize },

    #[error("schema has {schema} entries but data has {data} columns")]
    SchemaLengthMismatch { schema: usize, data: usize },

    #[error("schema file does not cover column {name:?}")]
    SchemaMissingColumn { name: String },

    #[error("schema file names unknown column {name:?}")]
    SchemaUnknownColumn { name: String },

    #[error("unknown variable kind {value:?}; expected continuous or ordinal[:levels]")]
    UnknownKind { value: String },

    #[error("unknown correlation method {value:?}")]
    UnknownMethod { value: String },

    #[error("{path}: {cause}")]
    Io { path: String, cause: std::io::Error },

    #[error("{path}: {cause}")]
    Csv { path: String, cause: csv::Error },

    #[error("{path}: {cause}")]
    Json { path: String, cause: serde_json::Error },
}
