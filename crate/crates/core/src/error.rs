use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field order {q} exceeds the configured bound {bound}")]
    OrderTooLarge { q: u64, bound: u64 },
    #[error("element {value} is not in F_{q}")]
    ElementOutOfRange { value: u64, q: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands live over different fields")]
    FieldMismatch,
    /// An exhaustive enumeration would exceed its cap. The instance is too large
    /// for an exact answer.
    #[error("{what} needs {needed} objects, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("the zero subspace is not allowed here")]
    ZeroSubspace,
    #[error("empty profile family")]
    EmptyFamily,
    /// A deterministic bound that is a theorem failed to hold. Always a bug.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn cap(what: &'static str, needed: u128, cap: u128) -> Self {
        Error::CapExceeded { what, needed, cap }
    }
}
