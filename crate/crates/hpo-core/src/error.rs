use alloc::string::String;
use core::fmt;

/// Errors raised by lattice, algebra, Fock and histories operations.
#[derive(Debug, Clone, PartialEq)]
pub enum HpoError {
    /// Two objects live on different lattices or mode spaces.
    DimensionMismatch(String),
    /// A stated precondition does not hold (e.g. non-unitary matrix,
    /// complex-valued averaging function, non-projector slot).
    Precondition(String),
    /// A spectral-calculus domain violation (square root of a negative
    /// eigenvalue, inversion of a singular operator).
    Domain(String),
    /// A requested feature is deliberately not supported (tilted
    /// foliations, open-boundary derivatives).
    Unsupported(String),
    /// A Fock-space request exceeds the truncation or the dense ceiling.
    Capacity(String),
}

impl fmt::Display for HpoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HpoError::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            HpoError::Precondition(m) => write!(f, "precondition violated: {m}"),
            HpoError::Domain(m) => write!(f, "domain error: {m}"),
            HpoError::Unsupported(m) => write!(f, "unsupported: {m}"),
            HpoError::Capacity(m) => write!(f, "capacity exceeded: {m}"),
        }
    }
}

impl core::error::Error for HpoError {}
