//! Contraction matrices for the momentum iteration.
//!
//! The coupled per-iteration error bounds of the accelerated solver assemble
//! into a 2x2 matrix `Delta = [[alpha, beta], [zeta, gamma]]` built from RIP
//! constants, and the momentum recursion lifts it to the 4x4 companion form
//! `DeltaHat = [[(1+tau) Delta, tau Delta], [I, 0]]`. Spectral radius below
//! one certifies convergence of the error envelope.

use lrps_core::{DenseMatrix, Scalar};

use crate::eigen::spectral_radius;
use crate::rip::RipProfile;
use crate::AnalysisError;

/// The 2x2 error-coupling matrix and its 4x4 momentum companion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionMatrices<T> {
    /// Row-major 2x2 entries `[[alpha, beta], [zeta, gamma]]`.
    pub delta: [[T; 2]; 2],
    pub momentum: T,
}

/// Assembles the contraction matrices from a RIP profile and momentum.
///
/// The closed forms are
/// `alpha = 4 d3k/(1-d3k) + (2 d4k/(1-d3k)) (2 d3k + 2 d4k)`,
/// `beta  = 2 d_{3k+3s}/(1-d3k)`,
/// `gamma = 2 (d4s + d3s)/(1-d3s)`,
/// `zeta  = 2 d_{3k+4s}/(1-d3s)`.
pub fn momentum_contraction<T: Scalar>(
    rip: &RipProfile<T>,
    momentum: T,
) -> Result<ContractionMatrices<T>, AnalysisError> {
    for d in [
        rip.delta_rank_3k,
        rip.delta_rank_4k,
        rip.delta_sparse_3s,
        rip.delta_sparse_4s,
        rip.delta_joint_3k_3s,
        rip.delta_joint_3k_4s,
    ] {
        if !(d >= T::zero() && d < T::one()) {
            return Err(AnalysisError::InvalidArgument(format!(
                "RIP constant {d} outside [0, 1)"
            )));
        }
    }
    if !(momentum >= T::zero() && momentum < T::one()) {
        return Err(AnalysisError::InvalidArgument(format!(
            "momentum {momentum} outside [0, 1)"
        )));
    }
    let one = T::one();
    let two = T::from_f64(2.0);
    let four = T::from_f64(4.0);
    let d3k = rip.delta_rank_3k;
    let d4k = rip.delta_rank_4k;
    let d3s = rip.delta_sparse_3s;
    let d4s = rip.delta_sparse_4s;

    let alpha = four * d3k / (one - d3k) + (two * d4k / (one - d3k)) * (two * d3k + two * d4k);
    let beta = two * rip.delta_joint_3k_3s / (one - d3k);
    let gamma = two * (d4s + d3s) / (one - d3s);
    let zeta = two * rip.delta_joint_3k_4s / (one - d3s);

    Ok(ContractionMatrices {
        delta: [[alpha, beta], [zeta, gamma]],
        momentum,
    })
}

impl<T: Scalar> ContractionMatrices<T> {
    /// The 4x4 companion matrix `[[(1+tau) Delta, tau Delta], [I, 0]]`.
    pub fn companion(&self) -> DenseMatrix<T> {
        let t = self.momentum;
        let one_plus = T::one() + t;
        let d = &self.delta;
        let mut m = DenseMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, one_plus * d[i][j]);
                m.set(i, j + 2, t * d[i][j]);
            }
            m.set(i + 2, i, T::one());
        }
        m
    }

    /// Eigenvalues of the 2x2 block (always real: the off-diagonal entries
    /// are nonnegative, so the discriminant is nonnegative).
    pub fn block_eigenvalues(&self) -> [T; 2] {
        let [[a, b], [c, d]] = self.delta;
        let half = T::from_f64(0.5);
        let tr = a + d;
        let disc = ((a - d) * (a - d) + T::from_f64(4.0) * b * c).max(T::zero());
        let root = disc.sqrt();
        [(tr + root) * half, (tr - root) * half]
    }

    /// Spectral radius of the companion matrix via the exact reduction: every
    /// eigenvalue `d` of the 2x2 block contributes the roots of
    /// `lambda^2 - (1+tau) d lambda - tau d = 0`.
    pub fn spectral_radius_reduced(&self) -> T {
        let t = self.momentum;
        let one_plus = T::one() + t;
        let half = T::from_f64(0.5);
        let mut worst = T::zero();
        for d in self.block_eigenvalues() {
            let b = one_plus * d;
            let c = t * d;
            let disc = b * b + T::from_f64(4.0) * c;
            if disc >= T::zero() {
                let root = disc.sqrt();
                let l1 = (b + root) * half;
                let l2 = (b - root) * half;
                worst = worst.max(l1.abs()).max(l2.abs());
            } else {
                // Complex pair; the product of the roots is -c.
                worst = worst.max(c.abs().sqrt());
            }
        }
        worst
    }

    /// Spectral radius via the generic dense eigensolver (cross-check path).
    pub fn spectral_radius_generic(&self) -> Result<T, AnalysisError> {
        spectral_radius(&self.companion())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_regime() -> ContractionMatrices<f64> {
        let rip = RipProfile::from_order4(0.09f64, 0.095, 0.095).unwrap();
        momentum_contraction(&rip, 0.25).unwrap()
    }

    #[test]
    fn zero_rip_gives_zero_contraction() {
        let rip = RipProfile::from_order4(0.0f64, 0.0, 0.0).unwrap();
        let c = momentum_contraction(&rip, 0.25).unwrap();
        assert_eq!(c.delta, [[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(c.spectral_radius_reduced(), 0.0);
        // Companion is [[0,0],[I,0]]: nilpotent, radius 0.
        let rho = c.spectral_radius_generic().unwrap();
        assert!(rho.abs() < 1e-12);
    }

    #[test]
    fn entries_match_hand_expanded_arithmetic() {
        // First pin: the reference stability regime.
        let c = reference_regime();
        let d3k: f64 = 0.09;
        let d4k = 0.09f64;
        let d3s = 0.095f64;
        let d4s = 0.095f64;
        let joint = 0.095f64;
        let alpha = 4.0 * d3k / (1.0 - d3k) + (2.0 * d4k / (1.0 - d3k)) * (2.0 * d3k + 2.0 * d4k);
        let beta = 2.0 * joint / (1.0 - d3k);
        let gamma = 2.0 * (d4s + d3s) / (1.0 - d3s);
        let zeta = 2.0 * joint / (1.0 - d3s);
        assert!((c.delta[0][0] - alpha).abs() < 1e-15);
        assert!((c.delta[0][1] - beta).abs() < 1e-15);
        assert!((c.delta[1][1] - gamma).abs() < 1e-15);
        assert!((c.delta[1][0] - zeta).abs() < 1e-15);

        // Second pin at a different profile.
        let rip = RipProfile::new(0.02f64, 0.04, 0.01, 0.03, 0.05, 0.06).unwrap();
        let c2 = momentum_contraction(&rip, 0.5).unwrap();
        let a2 = 4.0f64 * 0.02 / 0.98 + (2.0 * 0.04 / 0.98) * (2.0 * 0.02 + 2.0 * 0.04);
        let b2 = 2.0f64 * 0.05 / 0.98;
        let g2 = 2.0f64 * (0.03 + 0.01) / 0.99;
        let z2 = 2.0f64 * 0.06 / 0.99;
        assert!((c2.delta[0][0] - a2).abs() < 1e-15);
        assert!((c2.delta[0][1] - b2).abs() < 1e-15);
        assert!((c2.delta[1][1] - g2).abs() < 1e-15);
        assert!((c2.delta[1][0] - z2).abs() < 1e-15);
    }

    #[test]
    fn reference_regime_is_stable_with_radius_near_098() {
        let c = reference_regime();
        let rho = c.spectral_radius_reduced();
        assert!(rho < 1.0, "rho = {rho}");
        assert!((0.9..1.0).contains(&rho), "rho = {rho}");
    }

    #[test]
    fn reduced_and_generic_radius_agree() {
        let c = reference_regime();
        let generic = c.spectral_radius_generic().unwrap();
        let reduced = c.spectral_radius_reduced();
        assert!(
            (generic - reduced).abs() <= 1e-10,
            "generic {generic} vs reduced {reduced}"
        );
    }

    #[test]
    fn rejects_rip_at_one() {
        let rip = RipProfile::from_order4(0.09f64, 0.095, 0.095).unwrap();
        let mut bad = rip;
        bad.delta_rank_3k = 1.0;
        assert!(momentum_contraction(&bad, 0.25).is_err());
    }
}
