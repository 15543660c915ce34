use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operands live over different coefficient rings or variable layouts")]
    RingMismatch,
    #[error("operands carry different truncation ledgers")]
    TruncationMismatch,
    #[error("non-unit leading part: {0}")]
    NonUnit(String),
    #[error("divergent exponential: argument has a nonzero constant term")]
    DivergentExponential,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pairing matrix is singular")]
    SingularPairing,
    #[error("leading term is not invertible at order {0}")]
    SingularLeadingTerm(String),
    #[error("filtration did not converge after {iterations} iterations (is the basis linearly independent?)")]
    NonConvergent { iterations: usize },
    #[error("quantum product along direction {direction} depends on z at {location}; raise the caps")]
    ZDependence { direction: String, location: String },
    #[error("insufficient truncation caps: need Q-degree >= {q_degree} and deformation degree >= {def_degree}")]
    InsufficientCaps { q_degree: u32, def_degree: u32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
