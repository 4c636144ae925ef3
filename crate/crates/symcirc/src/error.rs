//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial is not irreducible over F_{0}")]
    NotIrreducible(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field too small: need {needed} distinct elements, have {have}")]
    FieldTooSmall { needed: u64, have: u64 },
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("resultant requires both degrees >= 1")]
    DegreeZero,
    #[error("value is not a root of the polynomial")]
    NotARoot,
    #[error("singular root: the required derivative vanishes")]
    SingularRoot,
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("polynomial is not symmetric{0}")]
    NotSymmetric(String),
    #[error("inconsistent linear system in symmetric decomposition")]
    InconsistentSystem,
    #[error("missing assignment for input `{0}`")]
    MissingInput(String),
    #[error("plugged circuits have mismatching input signatures")]
    SignatureMismatch,
    #[error("parse error at {at}: {msg}")]
    ParseError { at: String, msg: String },
    #[error("syntactic degree {actual} exceeds declared bound {bound}")]
    DegreeBoundExceeded { bound: usize, actual: usize },
    #[error("denominator vanishes at the truncation origin")]
    DenominatorVanishesAtOrigin,
    #[error("multiplicity split invalid: characteristic divides e")]
    BadMultiplicity,
    #[error("shared roots: {0}")]
    SharedRoots(String),
    #[error("all test circuits evaluated to zero")]
    AllTestsZero,
    #[error("nonzero remainder in exact division (internal consistency failure)")]
    NonzeroRemainder,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("random shift failed after {0} attempts")]
    ShiftFailed(usize),
}
