use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("no built-in modulus for GF({p}^{k})")]
    NoModulusAvailable { p: u32, k: u32 },
    #[error("field of order {0} exceeds the supported size")]
    FieldTooLarge(u64),
    #[error("modulus {0:?} is not a monic irreducible polynomial of the requested degree")]
    BadModulus(Vec<u32>),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field of order {0} has no primitive cube root of unity")]
    NoOrder3Roots(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("index out of range: {0}")]
    BadIndex(String),
    #[error("m = {0} is below the minimum for this family")]
    TooSmall(usize),
    #[error("bad sub-packetization length {0}")]
    BadLength(usize),
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("constant must be nonzero")]
    ZeroConstant,
    #[error("field of order {q} is too small for m = {m}")]
    FieldTooSmall { q: u32, m: usize },
    #[error("characteristic {0} is not supported by this construction")]
    BadCharacteristic(u32),
    #[error("no valid h in GF({0})")]
    NoValidH(u32),
    #[error("lambda families infeasible in GF({q}) for m = {m}")]
    Infeasible { q: u32, m: usize },
    #[error("constructed set failed verification: {0}")]
    VerificationFailed(String),
    #[error("unsupported number of parities r = {0}")]
    UnsupportedR(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bad node subset: {0}")]
    BadSubset(String),
    #[error("interference cancellation failed for node {0}: repair subspace is not invariant")]
    InterferenceSolveFailed(usize),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
