use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The data cannot support the computation (e.g. zero pooled variance).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("solver did not converge: {0}")]
    Convergence(String),

    /// Malformed input text. `line` is 1-based; 0 when not attributable to a line.
    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by the caller's input rather than a numerical failure.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Convergence(_))
    }
}

pub(crate) fn check_probability_open(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must lie in (0, 1), got {p}")))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "alpha must lie in (0, 0.5), got {alpha}"
        )))
    }
}
