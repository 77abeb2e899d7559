//! Matrix ALPS: momentum-accelerated projected gradient over the nonconvex
//! rank-k plus s-sparse constraint sets.
//!
//! Each iteration takes one exact line-search gradient step restricted to the
//! expanded low-rank subspace, re-projects, and extrapolates with constant
//! momentum; the sparse phase mirrors this on the expanded support using the
//! gradient at the refreshed intermediate point. With momentum zero the
//! iteration degenerates to memoryless projected gradient descent.

use std::time::Instant;

use lrps_core::{project_sparse_s, DenseMatrix, Scalar, SubspaceBasis, SupportSet};

use crate::config::{GroundTruth, ProblemSpec, SolverConfig};
use crate::restricted::{project_rank, project_rank_in_subspace, step_size, Restriction};
use crate::state::SolverState;
use crate::trace::{SolverTrace, TraceRecord};
use crate::SolverError;

/// Runs the Matrix ALPS instance with constant momentum.
pub fn alps_solve<T: Scalar>(
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
    let tau = config.momentum;
    let half = T::from_f64(0.5);

    let mut low_rank = DenseMatrix::<T>::zeros(m, n);
    let mut sparse = DenseMatrix::<T>::zeros(m, n);
    let mut estimate = DenseMatrix::<T>::zeros(m, n);

    let mut low_rank_basis = SubspaceBasis::empty(m);
    let mut prev_low_rank_basis = SubspaceBasis::empty(m);
    let mut sparse_support = SupportSet::empty(m, n);

    // Momentum carriers: Q^L, Q^M and their sum Q.
    let mut q_low = DenseMatrix::<T>::zeros(m, n);
    let mut q_sparse = DenseMatrix::<T>::zeros(m, n);

    let mut trace = SolverTrace::new();
    let mut converged = false;
    let mut iterations = 0;

    for i in 0..config.max_iterations {
        let started = Instant::now();

        let q_total = q_low.add(&q_sparse);
        let grad = op.gradient(y, &q_total)?;
        if !grad.is_finite() {
            return Err(SolverError::NumericalFailure {
                iteration: i,
                message: "gradient contains non-finite entries".into(),
            });
        }

        // Low-rank phase.
        let mut new_low_rank = low_rank.clone();
        let mut new_low_rank_basis = low_rank_basis.clone();
        let mut mu_low = None;
        if k > 0 {
            let (_, grad_directions) = project_rank(&grad, k, &config.rank_projector, i)?;
            let active = grad_directions.union(&low_rank_basis)?;
            let mu = step_size(op, &grad, Restriction::Subspace(&active))?;
            mu_low = Some(mu);
            let mut target = q_low.clone();
            if mu != T::zero() {
                let restricted_grad = active.project(&grad)?;
                target.axpy(-(mu * half), &restricted_grad);
            }
            // The gradient step stays in span(active) but Q^L also carries
            // the previous iterate's directions, so project in that union.
            let carrier = active.union(&prev_low_rank_basis)?;
            if carrier.is_empty() {
                new_low_rank = DenseMatrix::zeros(m, n);
                new_low_rank_basis = SubspaceBasis::empty(m);
            } else {
                let coeffs = carrier.coefficients(&target);
                let (projected, basis) = project_rank_in_subspace(&carrier, &coeffs, k)?;
                new_low_rank = projected;
                new_low_rank_basis = basis;
            }
        }
        let new_q_low = {
            let mut q = new_low_rank.clone();
            q.axpy(tau, &new_low_rank.sub(&low_rank));
            q
        };

        // Intermediate point with the refreshed low-rank carrier.
        let q_mid = new_q_low.add(&q_sparse);

        // Sparse phase at the refreshed point.
        let mut new_sparse = sparse.clone();
        let mut new_sparse_support = sparse_support.clone();
        let mut mu_sparse = None;
        if s > 0 {
            let grad_mid = op.gradient(y, &q_mid)?;
            let (_, grad_support) = project_sparse_s(&grad_mid, s)?;
            let active = grad_support.union(&sparse_support)?;
            let mu = step_size(op, &grad_mid, Restriction::Support(&active))?;
            mu_sparse = Some(mu);
            let mut values = active.gather(&q_sparse);
            let grad_values = active.gather(&grad_mid);
            for (v, g) in values.iter_mut().zip(&grad_values) {
                *v -= mu * half * *g;
            }
            let (thresholded, support) = project_sparse_s(&active.scatter(&values), s)?;
            new_sparse = thresholded;
            new_sparse_support = support;
        }
        let new_q_sparse = {
            let mut q = new_sparse.clone();
            q.axpy(tau, &new_sparse.sub(&sparse));
            q
        };

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
        prev_low_rank_basis = std::mem::replace(&mut low_rank_basis, new_low_rank_basis);
        sparse = new_sparse;
        estimate = new_estimate;
        q_low = new_q_low;
        q_sparse = new_q_sparse;
        sparse_support = new_sparse_support;
        iterations = i + 1;

        trace.push(TraceRecord {
            iteration: iterations,
            residual_norm,
            relative_change,
            step_low_rank: mu_low,
            step_sparse: mu_sparse,
            error_low_rank: truth.map(|t| low_rank.sub(t.low_rank).frobenius_norm()),
            error_sparse: truth.map(|t| sparse.sub(t.sparse).frobenius_norm()),
            millis: started.elapsed().as_secs_f64() * 1e3,
            warning: None,
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
