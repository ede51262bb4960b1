use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("quantile level must lie in (0, 1), got {0}")]
    InvalidQuantileLevel(f64),

    #[error("no analytic hazard floor for an empirical distribution")]
    NoHazardFloor,

    #[error("hazard rate undefined: {0}")]
    HazardUndefined(String),

    #[error("IHR check failed: {0}")]
    IhrCheckFailed(String),

    #[error("rank underflow: floor({n} * (1 - {tau})) = 0")]
    RankUnderflow { n: usize, tau: f64 },

    #[error("rank {k} out of range for a sample of size {n}: {reason}")]
    RankOutOfRange {
        k: usize,
        n: usize,
        reason: &'static str,
    },

    #[error("empty sample")]
    EmptySample,

    #[error("left tail undefined at k=1")]
    LeftTailUndefinedAtRankOne,

    #[error("n below 4/(1-tau): n={n}, required at least {required:.3}")]
    SampleSizeTooSmall { n: usize, required: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-unique optimal set: {0}")]
    NonUniqueOptimalSet(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("budget too small for {policy}: N={budget}, {reason}")]
    BudgetTooSmall {
        policy: String,
        budget: usize,
        reason: String,
    },

    #[error("run {run} failed: {source}")]
    RunFailed {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cell policy={policy}, budget={budget} failed: {source}")]
    CellFailed {
        policy: String,
        budget: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Data {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user configuration rather than a runtime failure.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidDistribution(_)
                | Error::InvalidQuantileLevel(_)
                | Error::InvalidEnvironment(_)
                | Error::NonUniqueOptimalSet(_)
                | Error::BudgetTooSmall { .. }
                | Error::Data { .. }
                | Error::InvalidParameter(_)
        )
    }
}
