use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value {value} outside the tabulated interval [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    /// The nonlinearity (or one of its derivatives) is not defined at the point.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration failed at s = {at}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("shooting overflow: trajectory with parameter {parameter} left the admissible range at r = {r}")]
    ShootingOverflow { parameter: f64, r: f64 },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("no certified exponent found below the scan ceiling {ceiling}")]
    NotFound { ceiling: f64 },

    #[error("malformed data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Integration { .. }
                | Error::ShootingOverflow { .. }
                | Error::NonConvergence(_)
                | Error::NotFound { .. }
        )
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
