use std::path::PathBuf;

use thiserror::Error;

use crate::transform::FamilyKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("y = {y} is outside the domain of the {family} family")]
    YOutOfDomain { family: FamilyKind, y: f64 },
    #[error("theta = {theta} is outside the parameter domain [{lo}, {hi}]")]
    ThetaOutOfDomain { theta: f64, lo: f64, hi: f64 },
    #[error("z = {z} is outside the range of the {family} transform at theta = {theta}")]
    OutOfRange {
        family: FamilyKind,
        theta: f64,
        z: f64,
    },
    #[error("{family} transform overflowed at theta = {theta}, y = {y}")]
    Overflow {
        family: FamilyKind,
        theta: f64,
        y: f64,
    },
    #[error("invalid parameter domain [{lo}, {hi}]")]
    InvalidDomain { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LassoError {
    #[error("non-finite value in lasso input")]
    NonFinite,
    #[error("dimension mismatch: X has {rows} rows but y has length {len}")]
    DimensionMismatch { rows: usize, len: usize },
    #[error("lasso needs at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("invalid lasso configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Lasso(#[from] LassoError),
    #[error("degenerate model at theta = {theta}: residual variance {sigma2:e}")]
    DegenerateModel { theta: f64, sigma2: f64 },
    #[error("variance component must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("empty data")]
    EmptyData,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("estimation infeasible: {0}")]
    EstimationInfeasible(String),
    #[error("bootstrap unstable: {failed} of {total} replicates failed")]
    BootstrapUnstable { failed: usize, total: usize },
    #[error("test statistic undefined: bootstrap variance is zero or missing")]
    DegenerateTest,
    #[error("score is numerically flat at theta_hat (slope {0:e})")]
    FlatScore(f64),
    #[error("matrix error: {0}")]
    Matrix(String),
    #[error("signal variance is zero; cannot calibrate noise to the requested SNR")]
    ZeroSignal,
    #[error("data-generating process infeasible: {redraws} redraws for {n} rows")]
    DgpInfeasible { redraws: usize, n: usize },
    #[error("study failed: {failed} of {reps} replications failed")]
    StudyFailed { failed: usize, reps: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("non-numeric value {value:?} at row {row}, column {column:?}")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
