use thiserror::Error;

/// Errors produced anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Quadrature refinement stopped before reaching its tolerance.
    #[error("quadrature did not converge: {msg} (best estimate {best_re:e}{best_im:+e}i)")]
    Accuracy { msg: String, best_re: f64, best_im: f64 },

    /// A Gaussian-state invariant failed while integrating.
    #[error("integration failed at t = {t}: {msg}")]
    Integration { t: f64, msg: String },

    /// A Gaussian state fails a physical constraint.
    #[error("state invariant violated: {0}")]
    Invariant(String),

    /// A fit could not be carried out reliably.
    #[error("unstable fit: {0}")]
    Fit(String),

    /// Syntax error in a scenario file.
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A scenario parses but violates a precondition.
    #[error("invalid config: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the user's configuration rather than the run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Validation(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
