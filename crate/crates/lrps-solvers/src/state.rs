//! Final solver state.

use lrps_core::{DenseMatrix, Scalar, SubspaceBasis, SupportSet};

use crate::config::ProblemSpec;
use crate::SolverError;

/// Terminal iterate of a solver run, with the model sets that produced it.
#[derive(Debug, Clone)]
pub struct SolverState<T> {
    pub low_rank: DenseMatrix<T>,
    pub sparse: DenseMatrix<T>,
    /// `low_rank + sparse`, the recovered estimate.
    pub estimate: DenseMatrix<T>,
    pub low_rank_basis: SubspaceBasis<T>,
    pub sparse_support: SupportSet,
    /// Iterations actually executed.
    pub iterations: usize,
    /// False when the run stopped at the iteration cap instead of the
    /// tolerance.
    pub converged: bool,
}

impl<T: Scalar> SolverState<T> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        low_rank: DenseMatrix<T>,
        sparse: DenseMatrix<T>,
        estimate: DenseMatrix<T>,
        low_rank_basis: SubspaceBasis<T>,
        sparse_support: SupportSet,
        iterations: usize,
        converged: bool,
        problem: &ProblemSpec<T>,
    ) -> Result<Self, SolverError> {
        // Feasibility is structural: both projections enforce the budgets.
        debug_assert!(low_rank_basis.rank() <= problem.rank_budget);
        debug_assert!(sparse_support.len() <= problem.sparsity_budget);
        let state = Self {
            low_rank,
            sparse,
            estimate,
            low_rank_basis,
            sparse_support,
            iterations,
            converged,
        };
        if !state.estimate.is_finite() {
            return Err(SolverError::NumericalFailure {
                iteration: iterations,
                message: "final estimate contains non-finite entries".into(),
            });
        }
        Ok(state)
    }
}
