use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row {row} does not exist ({rows} rows)")]
    BadRow { row: usize, rows: usize },
    #[error("column {col} does not exist")]
    BadColumn { col: usize },
    #[error("lower bound {lower} exceeds upper bound {upper}")]
    BadBounds { lower: f64, upper: f64 },
    #[error("numerical breakdown: {0}")]
    Numerical(String),
    #[error("iteration limit of {0} pivots reached")]
    IterationLimit(usize),
    #[error("LP backend `{0}` is not available in this build")]
    BackendUnavailable(String),
}
