//! Restricted gradients, step sizes and least-squares subproblems.
//!
//! Both solvers work on a restriction of the ambient space: either a low-rank
//! column subspace (given by an orthonormal basis) or a sparse index support.
//! The least-squares subproblems are solved by conjugate gradient on the
//! normal equations in restriction coordinates.

use lrps_core::{derive_seed, DenseMatrix, Scalar, SubspaceBasis, SupportSet};
use lrps_ops::{MeasurementOperator, ObservationVector};

use crate::config::RankProjector;
use crate::SolverError;

/// A restriction of the search space.
#[derive(Debug, Clone, Copy)]
pub enum Restriction<'a, T> {
    Subspace(&'a SubspaceBasis<T>),
    Support(&'a SupportSet),
}

impl<T: Scalar> Restriction<'_, T> {
    pub fn is_empty(&self) -> bool {
        match self {
            Restriction::Subspace(b) => b.is_empty(),
            Restriction::Support(s) => s.is_empty(),
        }
    }

    /// Projects `m` onto the restriction.
    pub fn project(&self, m: &DenseMatrix<T>) -> Result<DenseMatrix<T>, SolverError> {
        match self {
            Restriction::Subspace(b) => Ok(b.project(m)?),
            Restriction::Support(s) => Ok(lrps_core::restrict_to_support(m, s)?),
        }
    }
}

/// Conjugate-gradient knobs for the restricted least-squares solves.
#[derive(Debug, Clone, Copy)]
pub struct CgConfig<T> {
    pub tolerance: T,
    pub max_iters: usize,
}

/// Outcome metadata of one CG solve.
#[derive(Debug, Clone, Default)]
pub struct CgOutcome {
    pub iterations: usize,
    pub warning: Option<String>,
}

/// Exact line-search step size along the restricted gradient:
/// `mu = ||g||_F^2 / ||A g||_2^2` for `g` the projection of `grad` onto the
/// restriction. Returns 0 when the restricted gradient vanishes (or when
/// `A g = 0`, where the objective is flat along `g`).
pub fn step_size<T: Scalar>(
    op: &MeasurementOperator<T>,
    grad: &DenseMatrix<T>,
    restriction: Restriction<'_, T>,
) -> Result<T, SolverError> {
    if restriction.is_empty() {
        return Ok(T::zero());
    }
    let g = restriction.project(grad)?;
    let g_sq = g.norm_sq();
    if g_sq == T::zero() {
        return Ok(T::zero());
    }
    let ag = op.apply(&g)?;
    let ag_sq = lrps_core::dot(ag.as_slice(), ag.as_slice());
    if ag_sq == T::zero() {
        return Ok(T::zero());
    }
    Ok(g_sq / ag_sq)
}

/// Minimizes `||y - A(V + fixed_part)||_2^2` over `V` in the restriction,
/// returning the minimizer in the ambient space.
pub fn restricted_least_squares<T: Scalar>(
    op: &MeasurementOperator<T>,
    y: &ObservationVector<T>,
    restriction: Restriction<'_, T>,
    fixed_part: &DenseMatrix<T>,
    cg: &CgConfig<T>,
) -> Result<(DenseMatrix<T>, CgOutcome), SolverError> {
    if restriction.is_empty() {
        return Err(SolverError::InvalidProblem(
            "restricted least squares needs a nonempty restriction".into(),
        ));
    }
    match restriction {
        Restriction::Subspace(basis) => {
            let (coeffs, outcome) = subspace_ls_coefficients(op, y, basis, fixed_part, None, cg)?;
            Ok((basis.expand(&coeffs), outcome))
        }
        Restriction::Support(support) => {
            let (values, outcome) = support_ls_values(op, y, support, fixed_part, None, cg)?;
            Ok((support.scatter(&values), outcome))
        }
    }
}

/// Subspace-restricted least squares, returning basis coordinates
/// (`rank x cols`) so callers can post-process without leaving the subspace.
/// `warm_start` (an ambient-space guess, typically the previous iterate)
/// seeds the CG; late solver iterations then only need a small correction.
pub(crate) fn subspace_ls_coefficients<T: Scalar>(
    op: &MeasurementOperator<T>,
    y: &ObservationVector<T>,
    basis: &SubspaceBasis<T>,
    fixed_part: &DenseMatrix<T>,
    warm_start: Option<&DenseMatrix<T>>,
    cg: &CgConfig<T>,
) -> Result<(DenseMatrix<T>, CgOutcome), SolverError> {
    let cols = fixed_part.cols();
    let rank = basis.rank();
    let target = op.residual(y, fixed_part)?;

    // rhs = B^T A^* target, flattened row-major.
    let rhs = basis.coefficients(&op.adjoint(&target)?);
    let normal = |w: &[T]| -> Result<Vec<T>, SolverError> {
        let coeffs = DenseMatrix::from_vec(rank, cols, w.to_vec())?;
        let applied = op.apply(&basis.expand(&coeffs))?;
        let back = basis.coefficients(&op.adjoint(&applied)?);
        Ok(back.into_data())
    };
    let x0 = warm_start.map(|w| basis.coefficients(w).into_data());
    let (solution, outcome) = cg_normal_equations(&normal, rhs.data(), x0, cg)?;
    Ok((DenseMatrix::from_vec(rank, cols, solution)?, outcome))
}

/// Support-restricted least squares, returning the values on the support.
pub(crate) fn support_ls_values<T: Scalar>(
    op: &MeasurementOperator<T>,
    y: &ObservationVector<T>,
    support: &SupportSet,
    fixed_part: &DenseMatrix<T>,
    warm_start: Option<&DenseMatrix<T>>,
    cg: &CgConfig<T>,
) -> Result<(Vec<T>, CgOutcome), SolverError> {
    let target = op.residual(y, fixed_part)?;
    let rhs = support.gather(&op.adjoint(&target)?);
    let normal = |v: &[T]| -> Result<Vec<T>, SolverError> {
        let applied = op.apply(&support.scatter(v))?;
        Ok(support.gather(&op.adjoint(&applied)?))
    };
    let x0 = warm_start.map(|w| support.gather(w));
    cg_normal_equations(&normal, &rhs, x0, cg)
}

/// Plain CG on the (symmetric positive semidefinite) normal operator.
/// Terminates when the normal-equation residual drops below
/// `tolerance * ||rhs||`; on stagnation the best iterate seen is returned
/// together with a warning.
fn cg_normal_equations<T: Scalar>(
    normal: &dyn Fn(&[T]) -> Result<Vec<T>, SolverError>,
    rhs: &[T],
    x0: Option<Vec<T>>,
    cg: &CgConfig<T>,
) -> Result<(Vec<T>, CgOutcome), SolverError> {
    let n = rhs.len();
    let rhs_norm = lrps_core::dot(rhs, rhs).sqrt();
    if rhs_norm == T::zero() {
        return Ok((vec![T::zero(); n], CgOutcome::default()));
    }
    let target = cg.tolerance * rhs_norm;

    let (mut x, mut r) = match x0 {
        Some(x0) => {
            let nx0 = normal(&x0)?;
            let r: Vec<T> = rhs.iter().zip(&nx0).map(|(&b, &a)| b - a).collect();
            (x0, r)
        }
        None => (vec![T::zero(); n], rhs.to_vec()),
    };
    let mut p = r.clone();
    let mut rr = lrps_core::dot(&r, &r);
    let mut best = x.clone();
    let mut best_res = rr.sqrt();
    let mut outcome = CgOutcome::default();
    if best_res <= target {
        return Ok((x, outcome));
    }

    for iter in 0..cg.max_iters {
        let q = normal(&p)?;
        let pq = lrps_core::dot(&p, &q);
        if !(pq > T::zero()) {
            outcome.warning = Some(format!(
                "cg: curvature {pq:e} not positive at iteration {iter}; returning best iterate"
            ));
            outcome.iterations = iter;
            return Ok((best, outcome));
        }
        let alpha = rr / pq;
        for ((xi, pi), (ri, qi)) in x.iter_mut().zip(&p).zip(r.iter_mut().zip(&q)) {
            *xi += alpha * *pi;
            *ri -= alpha * *qi;
        }
        let rr_new = lrps_core::dot(&r, &r);
        let res = rr_new.sqrt();
        if res < best_res {
            best_res = res;
            best.copy_from_slice(&x);
        }
        outcome.iterations = iter + 1;
        if res <= target {
            return Ok((x, outcome));
        }
        let beta = rr_new / rr;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    outcome.warning = Some(format!(
        "cg: stagnated after {} iterations (residual {:e} of target {:e}); returning best iterate",
        cg.max_iters,
        best_res.to_f64(),
        target.to_f64()
    ));
    Ok((best, outcome))
}

/// Best rank-k projection honoring the configured projector backend.
/// Randomized projections derive a fresh per-iteration seed so repeated runs
/// are reproducible.
pub(crate) fn project_rank<T: Scalar>(
    m: &DenseMatrix<T>,
    k: usize,
    projector: &RankProjector,
    iteration: usize,
) -> Result<(DenseMatrix<T>, SubspaceBasis<T>), SolverError> {
    match projector {
        RankProjector::Exact => Ok(lrps_core::project_rank_k(m, k)?),
        RankProjector::Randomized {
            seed,
            oversample,
            power_iters,
        } => {
            let max_rank = m.rows().min(m.cols());
            let oversample = (*oversample).min(max_rank.saturating_sub(k));
            Ok(lrps_core::randomized_rank_k(
                m,
                k,
                oversample,
                *power_iters,
                derive_seed(*seed, &[iteration as u64]),
            )?)
        }
    }
}

/// Best rank-k projection of a matrix given by coordinates in an orthonormal
/// basis: computes the small SVD in coordinate space and lifts the result.
/// Returns the projected matrix and the basis of its top-k column space.
pub(crate) fn project_rank_in_subspace<T: Scalar>(
    basis: &SubspaceBasis<T>,
    coeffs: &DenseMatrix<T>,
    k: usize,
) -> Result<(DenseMatrix<T>, SubspaceBasis<T>), SolverError> {
    let (truncated_coeffs, coeff_basis) = lrps_core::project_rank_k(coeffs, k.min(coeffs.rows()))?;
    let approx = basis.expand(&truncated_coeffs);
    let lifted = match coeff_basis.to_matrix() {
        Some(cb) => {
            let cols = basis.expand(&cb);
            SubspaceBasis::from_orthonormal_matrix(&cols)?
        }
        None => SubspaceBasis::empty(basis.ambient_rows()),
    };
    Ok((approx, lifted))
}
