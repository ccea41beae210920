use thiserror::Error;

use crate::alternatives::LpError;
use crate::expr::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: String, expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ground set is not polyhedral (ball atom present)")]
    NonPolyhedral,
    #[error("point {point:?} is not in the set ({context})")]
    NotInSet { context: String, point: Vec<f64> },
    #[error("point {point:?} is infeasible: {reason}")]
    Infeasible { point: Vec<f64>, reason: String },
    #[error("vector norm {norm:e} is below the zero-gradient threshold")]
    ZeroVector { norm: f64 },
    #[error("inconsistent dichotomy: {0}")]
    InconsistentDichotomy(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no Lagrange multiplier satisfies the KKT system at {point:?}")]
    NoMultiplier { point: Vec<f64> },
    #[error("double-primed variants need an open ground set around the anchor")]
    NotOpenGroundSet,
    #[error("feasible grid is empty")]
    EmptyGrid,
    #[error("anchor {point:?} is not a solution: f = {value}, oracle minimum = {min}")]
    NotASolution { point: Vec<f64>, value: f64, min: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(context: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { context: context.into(), expected, found }
    }
}
