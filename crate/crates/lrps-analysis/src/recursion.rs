//! Error-recursion envelopes: trajectory simulation and noise floors.

use lrps_core::{DenseMatrix, Scalar};

use crate::eigen::spectral_radius;
use crate::AnalysisError;

/// Verdict of a recursion envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converges,
    Diverges,
}

/// Simulated envelope `w(i) = M^i w(0)` together with the stability verdict.
#[derive(Debug, Clone)]
pub struct RecursionEnvelope<T> {
    /// `iters + 1` states, starting at `w(0)`.
    pub trajectory: Vec<Vec<T>>,
    pub spectral_radius: T,
    pub verdict: Verdict,
}

/// Iterates `w(i+1) = matrix * w(i)` from a nonnegative start; the verdict is
/// `Converges` exactly when the spectral radius is below one.
pub fn simulate_recursion<T: Scalar>(
    matrix: &DenseMatrix<T>,
    w0: &[T],
    iters: usize,
) -> Result<RecursionEnvelope<T>, AnalysisError> {
    let n = matrix.rows();
    if matrix.cols() != n {
        return Err(AnalysisError::InvalidArgument(
            "recursion matrix must be square".into(),
        ));
    }
    if w0.len() != n {
        return Err(AnalysisError::InvalidArgument(format!(
            "state length {} does not match matrix size {n}",
            w0.len()
        )));
    }
    if w0.iter().any(|&v| v < T::zero()) {
        return Err(AnalysisError::InvalidArgument(
            "initial state must be nonnegative".into(),
        ));
    }
    let rho = spectral_radius(matrix)?;
    let mut trajectory = Vec::with_capacity(iters + 1);
    trajectory.push(w0.to_vec());
    let mut state = w0.to_vec();
    for _ in 0..iters {
        state = matrix.mul_vec(&state);
        trajectory.push(state.clone());
    }
    Ok(RecursionEnvelope {
        trajectory,
        spectral_radius: rho,
        verdict: if rho < T::one() {
            Verdict::Converges
        } else {
            Verdict::Diverges
        },
    })
}

/// Contraction and noise-amplification constants of the greedy solver's
/// coupled error recursion
/// `e_L(i+1) <= r_ll e_L(i) + r_lm e_M(i) + g_l ||eps||`,
/// `e_M(i+1) <= r_ml e_L(i) + r_mm e_M(i) + g_m ||eps||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionConstants<T> {
    pub r_ll: T,
    pub r_lm: T,
    pub r_ml: T,
    pub r_mm: T,
    pub g_l: T,
    pub g_m: T,
}

impl<T: Scalar> RecursionConstants<T> {
    /// Reference constants for this solver family's coupled error recursion.
    pub fn reference() -> Self {
        Self {
            r_ll: T::from_f64(0.1605),
            r_lm: T::from_f64(0.3376),
            r_ml: T::from_f64(0.3431),
            r_mm: T::from_f64(0.1414),
            g_l: T::from_f64(4.36),
            g_m: T::from_f64(4.45),
        }
    }

    /// The 2x2 contraction matrix of the recursion.
    pub fn matrix(&self) -> DenseMatrix<T> {
        DenseMatrix::from_rows(&[&[self.r_ll, self.r_lm], &[self.r_ml, self.r_mm]])
    }

    pub fn spectral_radius(&self) -> Result<T, AnalysisError> {
        spectral_radius(&self.matrix())
    }
}

/// Steady-state error envelope of the noisy recursion: the fixed point
/// `(I - R)^{-1} (g_l, g_m)^T ||eps||`. Requires the contraction matrix to
/// have spectral radius below one.
pub fn noise_floor<T: Scalar>(
    constants: &RecursionConstants<T>,
    noise_norm: T,
) -> Result<[T; 2], AnalysisError> {
    if noise_norm < T::zero() {
        return Err(AnalysisError::InvalidArgument(
            "noise norm must be nonnegative".into(),
        ));
    }
    let rho = constants.spectral_radius()?;
    if !(rho < T::one()) {
        return Err(AnalysisError::NoFixedPoint {
            radius: rho.to_f64(),
        });
    }
    // Cramer solve of (I - R) f = g * ||eps||.
    let a = T::one() - constants.r_ll;
    let b = -constants.r_lm;
    let c = -constants.r_ml;
    let d = T::one() - constants.r_mm;
    let det = a * d - b * c;
    let rhs_l = constants.g_l * noise_norm;
    let rhs_m = constants.g_m * noise_norm;
    Ok([(d * rhs_l - b * rhs_m) / det, (a * rhs_m - c * rhs_l) / det])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_reaches_zero_in_one_step() {
        let m = DenseMatrix::<f64>::zeros(4, 4);
        let env = simulate_recursion(&m, &[1.0, 1.0, 1.0, 1.0], 1).unwrap();
        assert_eq!(env.verdict, Verdict::Converges);
        assert!(env.trajectory[1].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reference_constants_are_contractive() {
        let c = RecursionConstants::<f64>::reference();
        let rho = c.spectral_radius().unwrap();
        assert!(rho < 1.0, "rho = {rho}");
    }

    #[test]
    fn noise_floor_is_zero_without_noise() {
        let c = RecursionConstants::<f64>::reference();
        assert_eq!(noise_floor(&c, 0.0).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn noise_floor_is_homogeneous_of_degree_one() {
        let c = RecursionConstants::<f64>::reference();
        let f1 = noise_floor(&c, 1.0).unwrap();
        let f2 = noise_floor(&c, 2.0).unwrap();
        assert!((f2[0] - 2.0 * f1[0]).abs() < 1e-12);
        assert!((f2[1] - 2.0 * f1[1]).abs() < 1e-12);
    }

    #[test]
    fn expanding_recursion_has_no_fixed_point() {
        let c = RecursionConstants {
            r_ll: 1.2f64,
            r_lm: 0.0,
            r_ml: 0.0,
            r_mm: 0.5,
            g_l: 1.0,
            g_m: 1.0,
        };
        assert!(matches!(
            noise_floor(&c, 1.0),
            Err(AnalysisError::NoFixedPoint { .. })
        ));
    }

    #[test]
    fn negative_start_is_rejected() {
        let m = DenseMatrix::<f64>::identity(2);
        assert!(simulate_recursion(&m, &[1.0, -1.0], 3).is_err());
    }
}
