use thiserror::Error;

/// Errors raised by code construction, enumeration and the stat-mech mapping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("row space of the sub-basis is not contained in the full basis")]
    NotSubspace,

    #[error("X check row {row_x} anticommutes with Z check row {row_z}")]
    CommutationViolation { row_x: usize, row_z: usize },

    #[error("{what} = {actual} exceeds the enumeration bound {limit}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sector distribution carries fields {found}, expected {expected}")]
    ModeMismatch { expected: String, found: String },

    #[error("probability {0} gives an infinite coupling")]
    InfiniteCoupling(f64),

    #[error("code encodes no logical qubits")]
    NoLogicalQubits,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by hitting an enumeration cap rather than bad input.
    pub fn is_bound_exceeded(&self) -> bool {
        matches!(self, Error::TooLarge { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
