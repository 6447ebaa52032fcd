use thiserror::Error;

/// Crate-wide error type.
///
/// Exact arithmetic either succeeds or fails loudly; there is no silent
/// rounding anywhere, so most variants indicate a violated precondition or
/// an exhausted precision/enumeration budget.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("precision exhausted: {0}")]
    PrecisionLoss(String),

    #[error("invalid ring parameters: {0}")]
    BadRing(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration guard exceeded: {0} (limit {1})")]
    EnumerationGuard(u128, u128),

    #[error("imprimitive character: conductor {conductor} < modulus {modulus}")]
    ImprimitiveCharacter { conductor: u64, modulus: u64 },

    #[error("provider axiom violated: {0}")]
    AxiomViolation(String),

    #[error("factorization infeasible (implementation bug): {0}")]
    Infeasible(String),

    #[error("unsupported coset datum: {0}")]
    UnsupportedCoset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
