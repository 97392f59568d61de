use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("singular curve (discriminant zero)")]
    SingularCurve,
    #[error("bad reduction at p = {0}")]
    BadPrime(u64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("no eigenform with the given eigenvalues")]
    NoEigenform,
    #[error("eigenvalues cut out a space of dimension {0}, not a line")]
    AmbiguousEigenform(usize),
    #[error("no local factor of the Hecke algebra matches the curve")]
    NoMatchingFactor,
    #[error("polynomial is reducible over Q")]
    ReduciblePolynomial,
    #[error("2 is not totally ramified in the cubic field")]
    NotTotallyRamified,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("conductor {conductor} is inconsistent with the curve: {reason}")]
    ConductorMismatch { conductor: u64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
