//! Recovery solvers for the low-rank plus sparse observation model
//! `y = A(L + M) + eps` with `rank(L) <= k` and `||M||_0 <= s`:
//!
//! - [`sparcs_solve`]: greedy active-set expansion with restricted
//!   least-squares inner solves;
//! - [`alps_solve`]: momentum-accelerated projected gradient (Matrix ALPS).
//!
//! Both stop when the relative Frobenius change of the estimate drops below
//! the tolerance, or at the iteration cap. Runs are deterministic for a fixed
//! configuration and seed.

mod alps;
mod config;
mod restricted;
mod sparcs;
mod state;
mod trace;

use lrps_core::CoreError;
use lrps_ops::OpsError;
use thiserror::Error;

pub use alps::alps_solve;
pub use config::{GroundTruth, ProblemSpec, RankProjector, SolverConfig};
pub use restricted::{restricted_least_squares, step_size, CgConfig, CgOutcome, Restriction};
pub use sparcs::sparcs_solve;
pub use state::SolverState;
pub use trace::{SolverTrace, TraceRecord};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("numerical failure at iteration {iteration}: {message}")]
    NumericalFailure { iteration: usize, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Ops(#[from] OpsError),
}
