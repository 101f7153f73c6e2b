use thiserror::Error;

use crate::Vector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coefficient a = {a} is infeasible (requires a {} {a_min})", if *open { ">" } else { ">=" })]
    InfeasibleCoefficient { a: f64, a_min: f64, open: bool },

    #[error("point lies outside the domain, the subdifferential is empty")]
    EmptySubdifferential,

    #[error("regularized objective is unbounded below")]
    Unbounded,

    #[error("inner solver stopped at residual {residual:e} above tolerance")]
    SolverTolerance { best: Vector, residual: f64 },

    #[error("matrix is not symmetric (max deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schedule infeasible at step {step}: {detail}")]
    ScheduleInfeasible { step: usize, detail: String },

    #[error("schedule degenerate: {0}")]
    ScheduleDegenerate(String),

    #[error("degenerate forward-backward step {step}: regularization weight {weight} <= 0")]
    DegenerateStep { step: usize, weight: f64 },

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("theorem violation at step {step}: {detail}")]
    TheoremViolation { step: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
