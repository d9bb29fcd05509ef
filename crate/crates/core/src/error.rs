use thiserror::Error;

/// Errors raised by the gibbslab library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("not a probability vector: {0}")]
    InvalidDistribution(String),

    #[error("no hypothesis carries positive prior mass")]
    ZeroPriorMass,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("density condition ({condition}) violated between levels s = {s} and t = {t}")]
    DensityCondition { condition: &'static str, s: f64, t: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {p} is not in [0, 1]")))
    }
}

/// `delta` must lie in (0, 1].
pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta = {delta} is not in (0, 1]")))
    }
}

/// Validates a probability vector: non-negative entries summing to one within `tol`.
pub(crate) fn check_distribution(name: &str, probs: &[f64], tol: f64) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution(format!("{name} is empty")));
    }
    if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{name}[{i}] = {p} is negative or not finite"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution(format!(
            "{name} sums to {total}, expected 1"
        )));
    }
    Ok(())
}
