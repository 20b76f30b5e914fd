use alloc::string::String;

/// Errors for malformed inputs and violated construction constraints.
///
/// Decoding failures are not errors; see [`crate::gabidulin::DecodeFailure`]
/// and [`crate::brd::BrdFailure`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("code locators are linearly dependent over the base field")]
    DependentLocators,
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
    #[error("vector is not a codeword")]
    NotACodeword,
    #[error("matrix is not of full rank")]
    RankDeficient,
    #[error("inconsistent decoded window at block {0}")]
    InconsistentWindow(usize),
    #[error("malformed received shot: {0}")]
    MalformedShot(String),
    #[error("arithmetic overflow")]
    Overflow,
}

pub type Result<T> = core::result::Result<T, Error>;
