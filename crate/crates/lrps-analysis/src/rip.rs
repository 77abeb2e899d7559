//! Empirical restricted-isometry estimation.
//!
//! Exact RIP constants are combinatorially hard, so these estimators report
//! Monte-Carlo LOWER bounds: the worst deviation observed over seeded random
//! test matrices from the model set. A large estimate certifies a violation;
//! a small one is evidence, not a certificate.
//!
//! Each estimator evaluates a halving chain of model orders (`s, s/2, ..., 1`)
//! with per-trial seeds derived by counter. Because every lower-order test
//! matrix also belongs to the higher-order model set, this keeps estimates
//! nondecreasing in the model order by construction.

use lrps_core::{
    chacha_rng, derive_seed, gaussian_matrix, gaussian_vec, sample_without_replacement, thin_qr_q,
    DenseMatrix, Scalar, SupportSet,
};
use lrps_ops::MeasurementOperator;

use crate::AnalysisError;

/// Named empirical RIP constants at the orders the stability analysis uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipProfile<T> {
    pub delta_rank_3k: T,
    pub delta_rank_4k: T,
    pub delta_sparse_3s: T,
    pub delta_sparse_4s: T,
    /// Cross constant over rank-3k matrices restricted to 3s-sparse supports.
    pub delta_joint_3k_3s: T,
    /// Cross constant over rank-3k matrices restricted to 4s-sparse supports.
    pub delta_joint_3k_4s: T,
}

impl<T: Scalar> RipProfile<T> {
    /// Builds a profile from explicit constants, checking each lies in [0, 1)
    /// and enforcing monotone consistency between the 3- and 4-order values.
    pub fn new(
        delta_rank_3k: T,
        delta_rank_4k: T,
        delta_sparse_3s: T,
        delta_sparse_4s: T,
        delta_joint_3k_3s: T,
        delta_joint_3k_4s: T,
    ) -> Result<Self, AnalysisError> {
        let all = [
            delta_rank_3k,
            delta_rank_4k,
            delta_sparse_3s,
            delta_sparse_4s,
            delta_joint_3k_3s,
            delta_joint_3k_4s,
        ];
        for d in all {
            if !(d >= T::zero() && d < T::one()) {
                return Err(AnalysisError::InvalidArgument(format!(
                    "RIP constant {d} outside [0, 1)"
                )));
            }
        }
        Ok(Self {
            delta_rank_3k,
            delta_rank_4k: delta_rank_4k.max(delta_rank_3k),
            delta_sparse_3s,
            delta_sparse_4s: delta_sparse_4s.max(delta_sparse_3s),
            delta_joint_3k_3s,
            delta_joint_3k_4s: delta_joint_3k_4s.max(delta_joint_3k_3s),
        })
    }

    /// Conservative profile from one 4-order constant per family, substituting
    /// the (monotone) 4-order values for the 3-order ones and one joint value
    /// for both cross constants.
    pub fn from_order4(
        delta_rank_4k: T,
        delta_sparse_4s: T,
        delta_joint: T,
    ) -> Result<Self, AnalysisError> {
        Self::new(
            delta_rank_4k,
            delta_rank_4k,
            delta_sparse_4s,
            delta_sparse_4s,
            delta_joint,
            delta_joint,
        )
    }

    /// Estimates every constant empirically for the given operator and model
    /// orders `k`, `s`; deterministic for a fixed seed.
    pub fn estimate(
        op: &MeasurementOperator<T>,
        k: usize,
        s: usize,
        trials: usize,
        seed: u64,
    ) -> Result<Self, AnalysisError> {
        let rank3 = estimate_rank_rip(op, 3 * k, trials, derive_seed(seed, &[1]))?;
        let rank4 = estimate_rank_rip(op, 4 * k, trials, derive_seed(seed, &[1]))?;
        let sparse3 = estimate_sparse_rip(op, 3 * s, trials, derive_seed(seed, &[2]))?;
        let sparse4 = estimate_sparse_rip(op, 4 * s, trials, derive_seed(seed, &[2]))?;
        let joint33 = estimate_cross_rip(op, 3 * s, 3 * k, trials, derive_seed(seed, &[3]))?;
        let joint34 = estimate_cross_rip(op, 4 * s, 3 * k, trials, derive_seed(seed, &[3]))?;
        Self::new(
            rank3,
            rank4,
            sparse3,
            sparse4,
            joint33.min(almost_one()),
            joint34.min(almost_one()),
        )
    }
}

fn almost_one<T: Scalar>() -> T {
    T::one() - T::epsilon()
}

fn halving_chain(order: usize) -> Vec<usize> {
    let mut chain = Vec::new();
    let mut o = order;
    while o >= 1 {
        chain.push(o);
        o /= 2;
    }
    chain
}

/// Deviation `| ||A x||_2 - 1 |` for a unit-Frobenius test matrix, the
/// symmetric isometry-defect form.
fn deviation<T: Scalar>(
    op: &MeasurementOperator<T>,
    x: &DenseMatrix<T>,
) -> Result<T, AnalysisError> {
    let y = op.apply(x)?;
    let energy = lrps_core::dot(y.as_slice(), y.as_slice());
    Ok((energy.sqrt() - T::one()).abs())
}

/// Monte-Carlo lower bound on the rank-RIP constant `delta_k`: the worst
/// isometry defect of `A` over seeded random unit-Frobenius matrices of rank
/// at most `k`. Clamped to [0, 1]; a value of 1 flags a violation.
pub fn estimate_rank_rip<T: Scalar>(
    op: &MeasurementOperator<T>,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<T, AnalysisError> {
    let (m, n) = op.input_shape();
    if k == 0 || k > m.min(n) {
        return Err(AnalysisError::InvalidArgument(format!(
            "rank order {k} outside 1..={}",
            m.min(n)
        )));
    }
    if trials == 0 {
        return Err(AnalysisError::InvalidArgument("trials must be >= 1".into()));
    }
    let mut worst = T::zero();
    for order in halving_chain(k) {
        for trial in 0..trials {
            let mut rng = chacha_rng(derive_seed(seed, &[order as u64, trial as u64]));
            let left = gaussian_matrix::<T>(m, order, &mut rng);
            let right = gaussian_matrix::<T>(n, order, &mut rng);
            let mut x = left.mul_tr(&right);
            let norm = x.frobenius_norm();
            if norm == T::zero() {
                continue;
            }
            x.scale_in_place(T::one() / norm);
            worst = worst.max(deviation(op, &x)?);
        }
    }
    Ok(worst.min(T::one()))
}

/// Monte-Carlo lower bound on the sparse-RIP constant `delta_s`, over seeded
/// random unit-Frobenius matrices with at most `s` nonzeros (uniform nested
/// supports, Gaussian values).
pub fn estimate_sparse_rip<T: Scalar>(
    op: &MeasurementOperator<T>,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<T, AnalysisError> {
    let (m, n) = op.input_shape();
    if s == 0 || s > m * n {
        return Err(AnalysisError::InvalidArgument(format!(
            "sparsity order {s} outside 1..={}",
            m * n
        )));
    }
    if trials == 0 {
        return Err(AnalysisError::InvalidArgument("trials must be >= 1".into()));
    }
    let mut worst = T::zero();
    for order in halving_chain(s) {
        for trial in 0..trials {
            let mut rng = chacha_rng(derive_seed(seed, &[order as u64, trial as u64]));
            let linear = sample_without_replacement(m * n, order, &mut rng);
            let values = gaussian_vec::<T>(order, &mut rng);
            let norm = lrps_core::dot(&values, &values).sqrt();
            if norm == T::zero() {
                continue;
            }
            let mut x = DenseMatrix::zeros(m, n);
            for (&idx, &v) in linear.iter().zip(&values) {
                x.set(idx / n, idx % n, v / norm);
            }
            worst = worst.max(deviation(op, &x)?);
        }
    }
    Ok(worst.min(T::one()))
}

/// Monte-Carlo lower bound on the cross constant: the worst ratio
/// `||(A^* A L)_F||_F / ||L||_F` over random unit-Frobenius rank-k matrices
/// `L` (orthonormal factors) and independent supports `F` of size `s`.
///
/// Supports are nested per trial, so for a fixed seed the estimate is
/// nondecreasing in `s`. The ratio is reported raw, without inferring any
/// absolute constant.
pub fn estimate_cross_rip<T: Scalar>(
    op: &MeasurementOperator<T>,
    s: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<T, AnalysisError> {
    let (m, n) = op.input_shape();
    if k == 0 || k > m.min(n) {
        return Err(AnalysisError::InvalidArgument(format!(
            "rank order {k} outside 1..={}",
            m.min(n)
        )));
    }
    if s == 0 || s > m * n {
        return Err(AnalysisError::InvalidArgument(format!(
            "support size {s} outside 1..={}",
            m * n
        )));
    }
    if trials == 0 {
        return Err(AnalysisError::InvalidArgument("trials must be >= 1".into()));
    }
    let mut worst = T::zero();
    for trial in 0..trials {
        let mut rng = chacha_rng(derive_seed(seed, &[trial as u64]));
        // Haar-like factors: orthonormalized Gaussian blocks with a random
        // unit spectrum, so ||L||_F = 1.
        let left = thin_qr_q(&gaussian_matrix::<T>(m, k, &mut rng));
        let right = thin_qr_q(&gaussian_matrix::<T>(n, k, &mut rng));
        let mut spectrum: Vec<T> = gaussian_vec::<T>(k, &mut rng)
            .into_iter()
            .map(|v| v.abs())
            .collect();
        let norm = lrps_core::dot(&spectrum, &spectrum).sqrt();
        if norm == T::zero() {
            continue;
        }
        for v in &mut spectrum {
            *v /= norm;
        }
        let mut scaled = left.clone();
        for j in 0..k {
            for i in 0..m {
                scaled.set(i, j, left.get(i, j) * spectrum[j]);
            }
        }
        let low_rank = scaled.mul_tr(&right);

        // Nested support: the first `s` indices of a per-trial permutation.
        let mut perm_rng = chacha_rng(derive_seed(seed, &[trial as u64, u64::MAX]));
        let linear = sample_without_replacement(m * n, s, &mut perm_rng);
        let entries: Vec<(usize, usize)> = linear.iter().map(|&i| (i / n, i % n)).collect();
        let support = SupportSet::new(m, n, entries)?;

        let pushed = op.adjoint(&op.apply(&low_rank)?)?;
        let restricted = lrps_core::restrict_to_support(&pushed, &support)?;
        worst = worst.max(restricted.frobenius_norm() / low_rank.frobenius_norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_operator_has_zero_rank_defect() {
        let op = MeasurementOperator::<f64>::identity(6, 6);
        for k in [1, 2, 3] {
            let d = estimate_rank_rip(&op, k, 20, 5).unwrap();
            assert!(d < 1e-12, "k={k}: {d}");
        }
    }

    #[test]
    fn identity_operator_has_zero_sparse_defect() {
        let op = MeasurementOperator::<f64>::identity(5, 7);
        let d = estimate_sparse_rip(&op, 10, 20, 5).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn scaled_identity_flags_violation() {
        // 2x identity: ||Ax|| = 2 for every unit x, so the defect clamps to 1.
        let coeffs = DenseMatrix::<f64>::identity(9).scale(2.0);
        let op = MeasurementOperator::from_dense_coefficients(3, 3, coeffs).unwrap();
        let d = estimate_rank_rip(&op, 2, 10, 1).unwrap();
        assert_eq!(d, 1.0);
        let d = estimate_sparse_rip(&op, 4, 10, 1).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn nested_chain_makes_estimates_monotone() {
        let op = MeasurementOperator::<f64>::gaussian(6, 6, 30, 9).unwrap();
        let d1 = estimate_rank_rip(&op, 1, 30, 77).unwrap();
        let d2 = estimate_rank_rip(&op, 2, 30, 77).unwrap();
        let d4 = estimate_rank_rip(&op, 4, 30, 77).unwrap();
        assert!(d1 <= d2 && d2 <= d4, "{d1} {d2} {d4}");

        let s1 = estimate_sparse_rip(&op, 5, 30, 78).unwrap();
        let s2 = estimate_sparse_rip(&op, 10, 30, 78).unwrap();
        assert!(s1 <= s2, "{s1} {s2}");
    }

    #[test]
    fn cross_rip_rejects_rank_zero() {
        let op = MeasurementOperator::<f64>::identity(4, 4);
        assert!(estimate_cross_rip(&op, 4, 0, 10, 3).is_err());
    }

    #[test]
    fn profile_enforces_order_monotonicity() {
        let p = RipProfile::new(0.2, 0.1, 0.05, 0.04, 0.1, 0.05).unwrap();
        assert_eq!(p.delta_rank_4k, 0.2);
        assert_eq!(p.delta_sparse_4s, 0.05);
        assert_eq!(p.delta_joint_3k_4s, 0.1);
        assert!(RipProfile::new(1.0, 0.1, 0.0, 0.0, 0.0, 0.0).is_err());
    }
}
