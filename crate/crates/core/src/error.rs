use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("table has no goal columns")]
    NoGoals,

    #[error("table has no independent columns")]
    NoIndependent,

    #[error("insufficient rows")]
    InsufficientRows,

    #[error("degenerate table")]
    DegenerateTable,

    #[error("unlabeled row in ranking (row {0})")]
    UnlabeledRow(usize),

    #[error("empty class")]
    EmptyClass,

    #[error("budget exceeds table ({budget} > {rows} rows)")]
    BudgetExceedsTable { budget: usize, rows: usize },

    #[error("budget too small for population (need at least {needed}, got {budget})")]
    BudgetTooSmall { budget: usize, needed: usize },

    #[error("label budget exhausted")]
    BudgetExhausted,

    #[error("undefined MRE (actual = 0)")]
    UndefinedMre,

    #[error("degenerate baseline")]
    DegenerateBaseline,

    #[error("empty input")]
    EmptyInput,

    #[error("requested {requested} rows but the grid holds only {available}")]
    TooManyRows { requested: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }
}
