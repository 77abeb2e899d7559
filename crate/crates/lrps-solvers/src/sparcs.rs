//! SpaRCS: greedy recovery with restricted least-squares inner solves.
//!
//! Each iteration expands the active subspace with the best rank-k directions
//! of the gradient and the active support with its top-s entries, solves the
//! data-fit least squares restricted to each expanded set (holding the other
//! component fixed), and re-projects onto the budget.

use std::time::Instant;

use lrps_core::{project_sparse_s, DenseMatrix, Scalar, SubspaceBasis, SupportSet};

use crate::config::{GroundTruth, ProblemSpec, SolverConfig};
use crate::restricted::{
    project_rank, project_rank_in_subspace, subspace_ls_coefficients, support_ls_values, CgConfig,
};
use crate::state::SolverState;
use crate::trace::{SolverTrace, TraceRecord};
use crate::SolverError;

/// Runs SpaRCS until the relative change drops below the tolerance or the
/// iteration cap is reached.
pub fn sparcs_solve<T: Scalar>(
    problem: &ProblemSpec<T>,
    config: &SolverConfig<T>,
    truth: Option<GroundTruth<'_, T>>,
) -> Result<(SolverState<T>, SolverTrace<T>), SolverError> {
    problem.validate()?;
    config.validate()?;
    let (m, n) = problem.operator.input_shape();
    let op = &problem.operator;
    let y = &problem.observations;
    let k = problem.rank_budget;
    let s = problem.sparsity_budget;
    let cg = CgConfig {
        tolerance: config.cg_tolerance,
        max_iters: config.cg_max_iters,
    };

    let mut low_rank = DenseMatrix::<T>::zeros(m, n);
    let mut sparse = DenseMatrix::<T>::zeros(m, n);
    let mut estimate = DenseMatrix::<T>::zeros(m, n);
    let mut low_rank_basis = SubspaceBasis::empty(m);
    let mut sparse_support = SupportSet::empty(m, n);

    let mut trace = SolverTrace::new();
    let mut converged = false;
    let mut iterations = 0;

    for i in 0..config.max_iterations {
        let started = Instant::now();
        let mut warnings: Vec<String> = Vec::new();

        let grad = op.gradient(y, &estimate)?;
        if !grad.is_finite() {
            return Err(SolverError::NumericalFailure {
                iteration: i,
                message: "gradient contains non-finite entries".into(),
            });
        }

        // Low-rank phase: expand the active subspace and re-fit.
        let mut new_low_rank = low_rank.clone();
        let mut new_low_rank_basis = low_rank_basis.clone();
        if k > 0 {
            let (_, grad_directions) = project_rank(&grad, k, &config.rank_projector, i)?;
            let active = grad_directions.union(&low_rank_basis)?;
            if !active.is_empty() {
                let (coeffs, outcome) =
                    subspace_ls_coefficients(op, y, &active, &sparse, Some(&low_rank), &cg)?;
                if let Some(w) = outcome.warning {
                    warnings.push(format!("low-rank {w}"));
                }
                let (projected, basis) = project_rank_in_subspace(&active, &coeffs, k)?;
                new_low_rank = projected;
                new_low_rank_basis = basis;
            }
        }

        // Sparse phase: expand the active support and re-fit, holding the
        // previous low-rank component fixed.
        let mut new_sparse = sparse.clone();
        let mut new_sparse_support = sparse_support.clone();
        if s > 0 {
            let (_, grad_support) = project_sparse_s(&grad, s)?;
            let active = grad_support.union(&sparse_support)?;
            let (values, outcome) =
                support_ls_values(op, y, &active, &low_rank, Some(&sparse), &cg)?;
            if let Some(w) = outcome.warning {
                warnings.push(format!("sparse {w}"));
            }
            let (thresholded, support) = project_sparse_s(&active.scatter(&values), s)?;
            new_sparse = thresholded;
            new_sparse_support = support;
        }

        let new_estimate = new_low_rank.add(&new_sparse);
        if !new_estimate.is_finite() {
            return Err(SolverError::NumericalFailure {
                iteration: i,
                message: "estimate contains non-finite entries".into(),
            });
        }

        let change = new_estimate.sub(&estimate).frobenius_norm();
        let scale = new_estimate.frobenius_norm();
        let relative_change = if scale > T::zero() {
            change / scale
        } else if change > T::zero() {
            T::infinity()
        } else {
            T::zero()
        };
        let residual_norm = op.residual(y, &new_estimate)?.norm();

        low_rank = new_low_rank;
        sparse = new_sparse;
        estimate = new_estimate;
        low_rank_basis = new_low_rank_basis;
        sparse_support = new_sparse_support;
        iterations = i + 1;

        trace.push(TraceRecord {
            iteration: iterations,
            residual_norm,
            relative_change,
            step_low_rank: None,
            step_sparse: None,
            error_low_rank: truth.map(|t| low_rank.sub(t.low_rank).frobenius_norm()),
            error_sparse: truth.map(|t| sparse.sub(t.sparse).frobenius_norm()),
            millis: started.elapsed().as_secs_f64() * 1e3,
            warning: if warnings.is_empty() {
                None
            } else {
                Some(warnings.join("; "))
            },
        });

        if relative_change <= config.tolerance {
            converged = true;
            break;
        }
    }

    let state = SolverState::new(
        low_rank,
        sparse,
        estimate,
        low_rank_basis,
        sparse_support,
        iterations,
        converged,
        problem,
    )?;
    Ok((state, trace))
}
