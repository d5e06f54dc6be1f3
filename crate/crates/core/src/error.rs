use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("entry ({row}, {col}) has a pole at t = {value}")]
    Pole { row: usize, col: usize, value: String },

    /// Parameters violate a module-existence or reducibility criterion.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("cell (m = {m}, n = {n}) lies outside the truncation window")]
    OutOfWindow { m: i64, n: i64 },

    #[error("action leaves the truncation window: {0}")]
    WindowOverflow(String),

    #[error("window too small: {0}")]
    InsufficientWindow(String),

    /// A kernel dimension contradicting a uniqueness statement.
    #[error("kernel dimension anomaly: expected {expected}, found {found} ({context})")]
    KernelDimension { expected: usize, found: usize, context: String },

    #[error("invalid Shapovalov generator: {0}")]
    InvalidGenerator(String),

    #[error("no catalogued twist for {0}")]
    Uncatalogued(String),

    #[error("{sub} is not a subpartition of {whole}")]
    NotSubpartition { sub: String, whole: String },

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("unknown verification suite {0:?}")]
    UnknownSuite(String),
}
