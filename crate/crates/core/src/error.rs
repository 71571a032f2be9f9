use thiserror::Error;

use crate::lp::LpStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("domain error at line {line}: {msg}")]
    Domain { line: usize, msg: String },

    #[error("dimension error at line {line}: expected {expected} columns, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate window at z = {z0}: {in_window} sample(s) with nonzero kernel weight")]
    DegenerateWindow { z0: f64, in_window: usize },

    #[error("zero total kernel weight")]
    ZeroWeight,

    #[error("linear program for column {column} ended with status {status:?}")]
    Lp { column: usize, status: LpStatus },

    #[error("CLIME failed on columns {0:?}")]
    Clime(Vec<(usize, String)>),

    #[error("column {column} violates its feasibility certificate by {excess:e}")]
    Certificate { column: usize, excess: f64 },

    #[error("zero variance estimate; no decision")]
    ZeroVariance,

    #[error("{degenerate} degenerate bootstrap draws exceed the limit of {limit}")]
    TooManyDegenerate { degenerate: usize, limit: usize },

    #[error("graph complement is empty; nothing to test")]
    EmptyComplement,

    #[error("lasso did not converge after {iterations} sweeps (max KKT violation {gap:e})")]
    LassoNotConverged { iterations: usize, gap: f64 },

    #[error("scaffold exhausted: need {needed} fresh edges, only {available} available")]
    ScaffoldExhausted { needed: usize, available: usize },

    #[error("true edge set is empty at z = {z}; TPR undefined")]
    DegenerateTruth { z: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
