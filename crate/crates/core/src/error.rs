use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{operation} is not available for {scheme} modulation")]
    Unsupported {
        operation: &'static str,
        scheme: &'static str,
    },

    #[error("spectrum is not integrable: {0}")]
    Divergent(String),

    #[error("quadrature did not converge: value {value}, estimated error {estimate:e}")]
    Quadrature { value: f64, estimate: f64 },

    #[error("time step {requested} is too coarse, use a step of at most {recommended}")]
    StepTooCoarse { requested: f64, recommended: f64 },

    #[error("no parameter point satisfies the validity condition ({} points evaluated)", .validity_map.len())]
    Infeasible {
        /// Every evaluated parameter point with its `R·t_c` value.
        validity_map: Vec<(Vec<f64>, f64)>,
    },

    #[error("configuration mismatch: {0}")]
    Mismatch(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub(crate) fn ensure_finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::input(alloc::format!("{what} must be finite, got {x}")))
    }
}
