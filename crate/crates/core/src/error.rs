use thiserror::Error;

/// Errors raised by the numerical and symbolic layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sigma direction is not a unit vector (|e| = {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("length scale must be positive and finite, got {0}")]
    InvalidLength(f64),

    #[error("momentum configuration is empty")]
    EmptyConfig,

    #[error("non-finite momentum component at index {index}")]
    NonFiniteMomentum { index: usize },

    #[error("varieties need at least two momenta, got n = {0}")]
    TooFewMomenta(usize),

    #[error("all momenta vanish; no direction to classify")]
    ZeroDirection,

    #[error("configurations have mismatched sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("numerical differentiation failed: {0}")]
    Differentiation(String),

    #[error("decay fit underflow: every tail sample is below 1e-300")]
    DecayUnderflow,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point label {0} appears in both operands")]
    RepeatedLabel(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("expansion guard exceeded: {0}")]
    Guard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
