use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Matrix/vector shape violations (non-square determinant input, length
    /// mismatches, ragged rows).
    #[error("shape error: {0}")]
    Shape(String),

    /// Empty input, input of deficient affine dimension, or an operation on
    /// a polytope that does not meet its dimension precondition.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Ambient dimension outside the supported range.
    #[error("unsupported dimension {0}; supported range is 1..=6")]
    UnsupportedDimension(usize),

    /// Operation requires a reflexive polytope.
    #[error("polytope is not reflexive: {0}")]
    NotReflexive(String),

    /// PL function mode incompatible with the requested filtration direction.
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    /// No unipotent root exists; the induced filtrations are trivial.
    #[error("no unipotent root")]
    NoUnipotentRoot,

    /// Automorphism structure outside the supported normalization
    /// (e.g. several unipotent roots).
    #[error("unsupported automorphism structure: {0}")]
    UnsupportedAutomorphismStructure(String),

    /// Derivation data does not define a valid nilpotent commuting action.
    #[error("invalid unipotent action: {0}")]
    InvalidUAction(String),

    /// Monomial does not lie in the claimed section space.
    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),

    /// Precondition violation on user-supplied data (e.g. degree mismatch).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Text or file parsing failure (bad rational syntax, decimals, ...).
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal cross-check failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
