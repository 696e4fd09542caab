use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration or schedule cannot be realized.
    #[error("configuration error: {0}")]
    Config(String),

    /// A root finder failed to meet its tolerance.
    #[error("numeric failure in {what}: bracket [{lo:e}, {hi:e}], residual {residual:e}")]
    Numeric {
        what: &'static str,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    /// A confidence interval needs an arm that was never pulled.
    #[error("undefined interval: {0}")]
    UndefinedInterval(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 1,
            Error::Domain(_) | Error::Numeric { .. } | Error::UndefinedInterval(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}
