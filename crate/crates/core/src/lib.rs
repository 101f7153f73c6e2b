//! Proximal methods for functions that are convex with respect to quadratic
//! elementary functions.
//!
//! The atom of the crate is the elementary function
//!
//! ```text
//! phi(x) = -a ||x||^2 + <u, x> + c
//! ```
//!
//! with a free sign on the curvature coefficient `a`. A function is
//! abstract-convex when it is the pointwise supremum of such minorants, and
//! its abstract subdifferential at `x` collects the `(a, u)` pairs that touch
//! it there from below. Weakly convex, smooth (Lipschitz gradient) and
//! indicator functions of closed sets all fit.
//!
//! Layout:
//!
//! * [`phi`]: elementary functions, the duality map `J_gamma` and its inverse.
//! * [`sets`]: balls, boxes and halfspaces with exact projections.
//! * [`oracle`]: subgradient oracles for the supported function classes.
//! * [`prox`]: the abstract proximal operator.
//! * [`algorithms`]: proximal point, forward-backward and projected
//!   subgradient iterations with their coefficient schedules.
//! * [`diagnostics`]: Fejér and objective-limit reports over finished runs.
//! * [`reference`]: brute-force oracles (grid argmin, Jacobi eigenvalues,
//!   finite differences, subgradient sampling) used as ground truth.
//! * [`experiments`]: config parsing, the built-in experiments and CSV output.

pub mod algorithms;
pub mod diagnostics;
mod error;
pub mod experiments;
pub mod oracle;
pub mod phi;
pub mod prox;
pub mod reference;
pub mod sets;

pub use error::{Error, Result};

/// Dense vector in `R^n`.
pub type Vector = nalgebra::DVector<f64>;
/// Dense square matrix.
pub type Matrix = nalgebra::DMatrix<f64>;

pub use algorithms::{
    run_fb, run_ppa, run_psg, Algorithm, AlphaRule, IterationRecord, RunOptions, RunResult, Schedule, ScheduleKind,
    StopReason, Terminal,
};
pub use oracle::{FeasibleRange, OracleFn, OracleKind};
pub use phi::{PhiElement, SetValued};
pub use prox::{CriticalityVerdict, InnerSolver, ProxRequest};
pub use sets::SetDescriptor;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn is_finite_vec(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}
