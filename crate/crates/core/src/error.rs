// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two vectors (or a vector and an alphabet) disagree on length.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown letter `{letter}` at position {pos}")]
    UnknownLetter { letter: char, pos: usize },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    /// A base that was required to be independent is not.
    #[error("base is not linearly independent")]
    DependentBase,

    /// A base that was required to be dependent is independent.
    #[error("base is already independent")]
    IndependentBase,

    #[error("point must be nonzero")]
    ZeroPoint,

    #[error("semilinear set is ambiguous; disambiguate it first")]
    Ambiguous,

    #[error("term is not compatible with the target linear set")]
    Incompatible,

    #[error("recursion depth limit {0} exceeded")]
    DepthExceeded(usize),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("malformed JSON: {0}")]
    Json(String),
}
