use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over F_p")]
    ReducibleModulus,
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("trace has non-constant coordinates (modulus/Frobenius inconsistency)")]
    TraceNotRational,
    #[error("Artin-Hasse coefficient e_{n} is not {p}-integral")]
    NonIntegralCoefficient { p: u64, n: usize },
    #[error("precision exhausted: {0}")]
    SaturatedPrecision(String),
    #[error("coefficient ({i},{j}): exponent {j} is a positive multiple of p")]
    ForbiddenExponent { i: u32, j: u64 },
    #[error("level {i}: degree {d} is divisible by p")]
    DegreeDivisibleByP { i: u32, d: u64 },
    #[error("level 0 has no term of positive degree")]
    EmptyLevelZero,
    #[error("coefficient ({i},{j}) lies outside the region j <= delta*p^i")]
    OutsideX { i: u32, j: u64 },
    #[error("coefficient ({i},{j}) is zero")]
    ZeroCoefficient { i: u32, j: u64 },
    #[error("coefficient ({i},{j}): {msg}")]
    BadCoefficient { i: u32, j: u64, msg: String },
    #[error("Euler product does not terminate at degree {0}")]
    DegreeMismatch(usize),
    #[error("saturated valuation at index {0} could change the Newton polygon")]
    PrecisionHole(i64),
    #[error("empty slope multiset")]
    EmptySlopes,
    #[error("specs differ on the relevant coefficient set at {0:?}")]
    RelevantSetMismatch(Vec<(u32, u64)>),
    #[error("specs are not comparable: {0}")]
    Incomparable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("computation too large: {0}")]
    TooLarge(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SaturatedPrecision(_) | Error::PrecisionHole(_) => 3,
            Error::TraceNotRational
            | Error::NonIntegralCoefficient { .. }
            | Error::DegreeMismatch(_) => 1,
            _ => 2,
        }
    }

    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::ReducibleModulus => "ReducibleModulus",
            Error::BadModulus(_) => "BadModulus",
            Error::TraceNotRational => "TraceNotRational",
            Error::NonIntegralCoefficient { .. } => "NonIntegralCoefficient",
            Error::SaturatedPrecision(_) => "SaturatedPrecision",
            Error::ForbiddenExponent { .. } => "ForbiddenExponent",
            Error::DegreeDivisibleByP { .. } => "DegreeDivisibleByP",
            Error::EmptyLevelZero => "EmptyLevelZero",
            Error::OutsideX { .. } => "OutsideX",
            Error::ZeroCoefficient { .. } => "ZeroCoefficient",
            Error::BadCoefficient { .. } => "BadCoefficient",
            Error::DegreeMismatch(_) => "DegreeMismatch",
            Error::PrecisionHole(_) => "PrecisionHole",
            Error::EmptySlopes => "EmptySlopes",
            Error::RelevantSetMismatch(_) => "RelevantSetMismatch",
            Error::Incomparable(_) => "Incomparable",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::TooLarge(_) => "TooLarge",
        }
    }

    /// Coefficient location, when the error refers to one.
    pub fn location(&self) -> Option<(u32, u64)> {
        match self {
            Error::ForbiddenExponent { i, j }
            | Error::OutsideX { i, j }
            | Error::ZeroCoefficient { i, j }
            | Error::BadCoefficient { i, j, .. } => Some((*i, *j)),
            Error::DegreeDivisibleByP { i, d } => Some((*i, *d)),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
