//! Convergence-analysis tooling for the recovery solvers: empirical
//! restricted-isometry estimation (Monte-Carlo lower bounds), contraction
//! matrices for the momentum iteration with spectral-radius stability
//! verdicts, and coupled error-recursion envelopes with noise floors.

mod contraction;
mod eigen;
mod recursion;
mod report;
mod rip;

use thiserror::Error;

pub use contraction::{momentum_contraction, ContractionMatrices};
pub use eigen::{eigenvalues, spectral_radius};
pub use recursion::{
    noise_floor, simulate_recursion, RecursionConstants, RecursionEnvelope, Verdict,
};
pub use report::AnalysisReport;
pub use rip::{estimate_cross_rip, estimate_rank_rip, estimate_sparse_rip, RipProfile};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "eigensolver failed to converge on a {size}x{size} matrix after {iterations} iterations"
    )]
    EigenNonConvergence { size: usize, iterations: usize },

    #[error("recursion has no fixed point: spectral radius {radius} >= 1")]
    NoFixedPoint { radius: f64 },

    #[error(transparent)]
    Core(#[from] lrps_core::CoreError),

    #[error(transparent)]
    Ops(#[from] lrps_ops::OpsError),
}
