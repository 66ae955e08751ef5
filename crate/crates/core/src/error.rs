use thiserror::Error;

pub type Result<T, E = ParaccError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ParaccError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("instance too large: n={n} exceeds limit {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("zero volume on one side of the cut")]
    ZeroVolume,

    #[error("quotient undefined: {0}")]
    Undefined(String),

    #[error("LP solve did not converge; its lower bound is not a certificate")]
    NotConverged,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ParaccError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        ParaccError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-parseable tag used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            ParaccError::InvalidParameter { .. } => "invalid-parameter",
            ParaccError::InvalidGraph(_) => "invalid-graph",
            ParaccError::Parse { .. } => "parse",
            ParaccError::SizeLimit { .. } => "size-limit",
            ParaccError::ZeroVolume => "zero-volume",
            ParaccError::Undefined(_) => "undefined",
            ParaccError::NotConverged => "not-converged",
            ParaccError::Io(_) => "io",
            ParaccError::Csv(_) => "csv",
            ParaccError::Json(_) => "json",
        }
    }
}

pub(crate) fn check_unit_interval(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(ParaccError::param(name, format!("{v} is outside [0, 1]")));
    }
    Ok(())
}

pub(crate) fn check_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(ParaccError::param(name, format!("{v} must be finite and >= 0")));
    }
    Ok(())
}
