use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("overlapping supports at index {0}")]
    OverlappingSupports(usize),

    #[error("value {value} out of range for k={k} (signed={signed})")]
    ValueOutOfRange { value: i32, k: u32, signed: bool },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty set or sequence where a nonempty one is required")]
    Empty,

    #[error("not a block sequence: {0}")]
    NotBlock(String),

    #[error("function is not representable over the given set block sequence: {0}")]
    NotRepresentable(String),

    #[error("zero function has no type decomposition")]
    ZeroFunction,

    #[error("oracle domain mismatch: expected {expected}, got {got}")]
    DomainMismatch { expected: String, got: String },

    #[error("color {0} outside 1..={1}")]
    ColorOutOfRange(u32, u64),

    #[error("oracle table has no entry for element {0}")]
    MissingTableEntry(String),

    #[error("decomposition failure: {0}")]
    Decomposition(String),

    #[error("search budget exceeded")]
    BudgetExceeded,

    #[error("value exceeds the digit guard ({0} decimal digits)")]
    TooLarge(usize),

    #[error("arity mismatch: E_{q} takes {expected} argument(s), got {got}")]
    Arity { q: u32, expected: usize, got: usize },

    #[error("bound strategy failure: {0}")]
    Strategy(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
