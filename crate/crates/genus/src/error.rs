use num_bigint::BigInt;
use thiserror::Error;

/// Errors surfaced by the library.
///
/// Variants are grouped by recoverability: `SearchExhausted` and
/// `GenerationFailed` are Las Vegas failures (retry with fresh randomness),
/// while `ChildSymbolInvalid`, `NonIntegralAssembly` and `Internal` signal
/// a broken invariant and are never expected on valid inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value is not a square modulo p^k")]
    NotASquare,
    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,
    #[error("factorization does not multiply back to the claimed value")]
    BadFactorization,
    #[error("randomized search exhausted its retry budget: {0}")]
    SearchExhausted(String),
    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vector is not primitive modulo p")]
    NotPrimitive,
    #[error("quadratic form is singular")]
    SingularForm,
    #[error("block scale reaches the working precision; symbol would be ambiguous")]
    ScaleOverflow,
    #[error("determinant has a composite cofactor {0} that could not be factored; supply a factorization hint")]
    FactorizationNeeded(BigInt),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("target is not representable: {0}")]
    NotRepresentable(String),
    #[error("representation case tag does not match the local form: {0}")]
    CaseMismatch(String),
    #[error("derived child symbol failed validation: {0}")]
    ChildSymbolInvalid(String),
    #[error("no modular equivalence transform found: {0}")]
    EquivalenceNotFound(String),
    #[error("assembled form is not integral")]
    NonIntegralAssembly,
    #[error("generation failed after {0} attempts; rerun with a different seed or more retries")]
    GenerationFailed(u32),
    #[error("brute-force search space too large")]
    SearchSpaceTooLarge,
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
