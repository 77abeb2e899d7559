//! Problem and solver configuration types.

use lrps_core::{DenseMatrix, Scalar};
use lrps_ops::{MeasurementOperator, ObservationVector};

use crate::SolverError;

/// A recovery problem: operator, observations and the model budgets.
///
/// Budgets are oracle model sizes: the solvers never adapt them. A budget of
/// zero disables the corresponding phase (pure completion runs with
/// `sparsity_budget = 0`, pure sparse recovery with `rank_budget = 0`).
#[derive(Debug, Clone)]
pub struct ProblemSpec<T> {
    pub operator: MeasurementOperator<T>,
    pub observations: ObservationVector<T>,
    pub rank_budget: usize,
    pub sparsity_budget: usize,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        let (m, n) = self.operator.input_shape();
        if self.observations.len() != self.operator.output_dim() {
            return Err(SolverError::InvalidProblem(format!(
                "observation length {} does not match operator output {}",
                self.observations.len(),
                self.operator.output_dim()
            )));
        }
        if self.rank_budget > m.min(n) {
            return Err(SolverError::InvalidProblem(format!(
                "rank budget {} exceeds min dimension {}",
                self.rank_budget,
                m.min(n)
            )));
        }
        if self.sparsity_budget > m * n {
            return Err(SolverError::InvalidProblem(format!(
                "sparsity budget {} exceeds ambient size {}",
                self.sparsity_budget,
                m * n
            )));
        }
        if self.rank_budget == 0 && self.sparsity_budget == 0 {
            return Err(SolverError::InvalidProblem(
                "at least one of the budgets must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Low-rank projection backend used inside the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankProjector {
    /// Truncated SVD (Jacobi), deterministic.
    Exact,
    /// Randomized range finder; per-iteration seeds derive from `seed`.
    Randomized {
        seed: u64,
        oversample: usize,
        power_iters: usize,
    },
}

impl RankProjector {
    pub fn randomized(seed: u64) -> Self {
        Self::Randomized {
            seed,
            oversample: lrps_core::DEFAULT_OVERSAMPLE,
            power_iters: lrps_core::DEFAULT_POWER_ITERS,
        }
    }
}

/// Shared solver knobs; defaults follow the benchmark setup (`eta = 1e-4`,
/// momentum 1/4, 700-iteration cap).
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig<T> {
    /// Relative-change stopping tolerance (eta).
    pub tolerance: T,
    pub max_iterations: usize,
    /// Constant momentum (tau); used by Matrix ALPS only.
    pub momentum: T,
    pub cg_tolerance: T,
    pub cg_max_iters: usize,
    pub rank_projector: RankProjector,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: T::from_f64(1e-4),
            max_iterations: 700,
            momentum: T::from_f64(0.25),
            cg_tolerance: T::from_f64(1e-8),
            cg_max_iters: 200,
            rank_projector: RankProjector::Exact,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tolerance > T::zero()) {
            return Err(SolverError::InvalidProblem(
                "tolerance must be positive".into(),
            ));
        }
        if !(self.momentum >= T::zero() && self.momentum < T::one()) {
            return Err(SolverError::InvalidProblem(
                "momentum must lie in [0, 1)".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::InvalidProblem(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Known ground-truth components, used only for error logging in traces.
#[derive(Debug, Clone, Copy)]
pub struct GroundTruth<'a, T> {
    pub low_rank: &'a DenseMatrix<T>,
    pub sparse: &'a DenseMatrix<T>,
}
