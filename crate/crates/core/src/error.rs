use thiserror::Error;

/// Errors raised by evifuse operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("subset {bits:#b} does not belong to a frame of size {size}")]
    SubsetOutOfFrame { bits: u32, size: usize },

    #[error("mass functions are defined on different frames")]
    FrameMismatch,

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("parameter `{name}` = {value} is outside [0, 1]")]
    OutOfUnitInterval { name: &'static str, value: f64 },

    #[error("mass function is dogmatic (m(Ω) = 0)")]
    Dogmatic,

    #[error("total conflict: m(∅) = {conflict}")]
    TotalConflict { conflict: f64 },

    #[error("non-positive canonical weight {0}")]
    NonPositiveWeight(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("invalid clustering request: {0}")]
    InvalidClusterCount(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval { name, value })
    }
}
