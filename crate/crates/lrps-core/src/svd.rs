//! One-sided Jacobi singular value decomposition.
//!
//! The working matrix is held column-major and pairs of columns are rotated
//! until mutually orthogonal; singular values are the final column norms.
//! Jacobi is slower than bidiagonalization but accurate to the last digits
//! and easy to validate, which is the priority at desk scale (min dimension
//! up to a few hundred).

use crate::error::CoreError;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Thin SVD `m = U * diag(s) * V^T` with `r = min(rows, cols)` columns.
#[derive(Debug, Clone)]
pub struct SvdFactors<T> {
    /// `rows x r`, orthonormal columns.
    pub left_vectors: DenseMatrix<T>,
    /// Length `r`, nonincreasing, nonnegative.
    pub singular_values: Vec<T>,
    /// `cols x r`, orthonormal columns.
    pub right_vectors: DenseMatrix<T>,
}

impl<T: Scalar> SvdFactors<T> {
    /// Reassembles `U * diag(s) * V^T`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let r = self.singular_values.len();
        let mut scaled = self.left_vectors.clone();
        for i in 0..scaled.rows() {
            for j in 0..r {
                let v = scaled.get(i, j) * self.singular_values[j];
                scaled.set(i, j, v);
            }
        }
        scaled.mul_tr(&self.right_vectors)
    }

    /// Truncation `U_k * diag(s_k) * V_k^T` of the top `k` triplets.
    pub fn truncate(&self, k: usize) -> DenseMatrix<T> {
        let (m, n) = (self.left_vectors.rows(), self.right_vectors.rows());
        let k = k.min(self.singular_values.len());
        let mut out = DenseMatrix::zeros(m, n);
        for j in 0..k {
            let s = self.singular_values[j];
            if s == T::zero() {
                break;
            }
            for i in 0..m {
                let ui = self.left_vectors.get(i, j) * s;
                if ui == T::zero() {
                    continue;
                }
                for c in 0..n {
                    let v = out.get(i, c) + ui * self.right_vectors.get(c, j);
                    out.set(i, c, v);
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 64;

/// Full thin SVD by one-sided Jacobi.
///
/// `tol` bounds the final normalized column cross-correlation; the
/// reconstruction error satisfies `||U S V^T - m||_F <= tol * ||m||_F`
/// (in practice it is at rounding level as soon as the sweep converges).
pub fn svd<T: Scalar>(m: &DenseMatrix<T>, tol: T) -> Result<SvdFactors<T>, CoreError> {
    if let Some((r, c)) = m
        .data()
        .iter()
        .position(|x| !x.is_finite())
        .map(|p| (p / m.cols(), p % m.cols()))
    {
        return Err(CoreError::NonFinite { row: r, col: c });
    }
    if m.rows() >= m.cols() {
        jacobi_tall(m, tol, false)
    } else {
        jacobi_tall(&m.transpose(), tol, true)
    }
}

/// One-sided Jacobi on a tall matrix (`rows >= cols`); `swapped` flips the
/// U/V roles on output when the input was transposed.
fn jacobi_tall<T: Scalar>(
    a: &DenseMatrix<T>,
    tol: T,
    swapped: bool,
) -> Result<SvdFactors<T>, CoreError> {
    let (m, n) = a.shape();
    debug_assert!(m >= n);

    // Column-major working copies of A and the accumulated rotations V.
    let mut work = vec![T::zero(); m * n];
    for i in 0..m {
        for j in 0..n {
            work[j * m + i] = a.get(i, j);
        }
    }
    let mut v = vec![T::zero(); n * n];
    for j in 0..n {
        v[j * n + j] = T::one();
    }

    let threshold = tol.max(T::epsilon() * T::from_f64(8.0));
    let tiny = T::min_positive_value();
    let mut converged = false;
    let mut worst = T::zero();
    // A pair's cross-correlation only changes when one of its columns is
    // rotated, so pairs of columns untouched since their last check can be
    // skipped without recomputing the dot product.
    let mut touched = vec![true; n];

    for _sweep in 0..MAX_SWEEPS {
        // Refresh cached squared norms once per sweep to avoid drift.
        let mut norms: Vec<T> = (0..n)
            .map(|j| crate::matrix::dot(&work[j * m..(j + 1) * m], &work[j * m..(j + 1) * m]))
            .collect();
        let checked = std::mem::replace(&mut touched, vec![false; n]);

        worst = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                if !checked[p] && !checked[q] && !touched[p] && !touched[q] {
                    continue;
                }
                let (head, tail) = work.split_at_mut(q * m);
                let col_p = &mut head[p * m..(p + 1) * m];
                let col_q = &mut tail[..m];

                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= tiny && beta <= tiny {
                    continue;
                }
                let gamma = crate::matrix::dot(col_p, col_q);
                let scale = (alpha * beta).sqrt();
                let ratio = if scale > tiny {
                    gamma.abs() / scale
                } else {
                    T::zero()
                };
                worst = worst.max(ratio);
                if ratio <= threshold {
                    continue;
                }
                touched[p] = true;
                touched[q] = true;

                // Jacobi rotation zeroing the (p, q) Gram entry.
                let zeta = (beta - alpha) / (T::from_f64(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;

                for i in 0..m {
                    let xp = col_p[i];
                    let xq = col_q[i];
                    col_p[i] = c * xp - s * xq;
                    col_q[i] = s * xp + c * xq;
                }
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;

                let (vhead, vtail) = v.split_at_mut(q * n);
                let vp = &mut vhead[p * n..(p + 1) * n];
                let vq = &mut vtail[..n];
                for i in 0..n {
                    let xp = vp[i];
                    let xq = vq[i];
                    vp[i] = c * xp - s * xq;
                    vq[i] = s * xp + c * xq;
                }
            }
        }
        if worst <= threshold {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CoreError::SvdNonConvergence {
            sweeps: MAX_SWEEPS,
            residual: worst.to_f64(),
        });
    }

    // Singular values are the column norms; sort them nonincreasing.
    let mut sigma: Vec<T> = (0..n)
        .map(|j| crate::matrix::dot(&work[j * m..(j + 1) * m], &work[j * m..(j + 1) * m]).sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).expect("finite norms"));
    sigma = order.iter().map(|&j| sigma[j]).collect();

    let mut u = DenseMatrix::zeros(m, n);
    let mut right = DenseMatrix::zeros(n, n);
    let zero_cut = sigma[0] * T::epsilon() * T::from_usize(m.max(n));
    let mut zero_cols = Vec::new();
    for (out_j, &src_j) in order.iter().enumerate() {
        if sigma[out_j] > zero_cut && sigma[out_j] > T::zero() {
            let inv = T::one() / sigma[out_j];
            for i in 0..m {
                u.set(i, out_j, work[src_j * m + i] * inv);
            }
        } else {
            zero_cols.push(out_j);
        }
        for i in 0..n {
            right.set(i, out_j, v[src_j * n + i]);
        }
    }
    complete_orthonormal(&mut u, &zero_cols);

    if swapped {
        Ok(SvdFactors {
            left_vectors: right,
            singular_values: sigma,
            right_vectors: u,
        })
    } else {
        Ok(SvdFactors {
            left_vectors: u,
            singular_values: sigma,
            right_vectors: right,
        })
    }
}

/// Fills the listed zero columns with vectors orthonormal to every other
/// column, so rank-deficient inputs still yield orthonormal factors.
///
/// The coordinate axis with the least mass inside the current span (smallest
/// squared row norm of `u`) is the best candidate: its orthogonalized
/// residual has squared norm `1 - row_norm^2`, which is maximal.
fn complete_orthonormal<T: Scalar>(u: &mut DenseMatrix<T>, zero_cols: &[usize]) {
    let (m, n) = u.shape();
    if zero_cols.is_empty() {
        return;
    }
    let mut row_sq: Vec<T> = (0..m)
        .map(|i| (0..n).map(|j| u.get(i, j) * u.get(i, j)).sum())
        .collect();
    let mut candidate = vec![T::zero(); m];
    for &col in zero_cols {
        let mut best = 0usize;
        for (i, &rs) in row_sq.iter().enumerate() {
            if rs < row_sq[best] {
                best = i;
            }
        }
        for (i, c) in candidate.iter_mut().enumerate() {
            *c = if i == best { T::one() } else { T::zero() };
        }
        // Two Gram-Schmidt passes keep the result orthogonal to working
        // precision even when the candidate is nearly dependent.
        for _ in 0..2 {
            for j in 0..n {
                if j == col {
                    continue;
                }
                let mut proj = T::zero();
                for (i, &c) in candidate.iter().enumerate() {
                    proj += u.get(i, j) * c;
                }
                if proj == T::zero() {
                    continue;
                }
                for (i, c) in candidate.iter_mut().enumerate() {
                    *c -= proj * u.get(i, j);
                }
            }
        }
        let norm = crate::matrix::dot(&candidate, &candidate).sqrt();
        debug_assert!(
            norm > T::epsilon().sqrt(),
            "orthonormal completion degenerate for m >= n"
        );
        let inv = T::one() / norm;
        for (i, &c) in candidate.iter().enumerate() {
            let v = c * inv;
            u.set(i, col, v);
            row_sq[i] += v * v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let m = DenseMatrix::<f64>::identity(3);
        let f = svd(&m, 1e-12).unwrap();
        for &s in &f.singular_values {
            assert_close(s, 1.0, 1e-12);
        }
    }

    #[test]
    fn diagonal_matrix_is_its_own_svd() {
        let m = DenseMatrix::from_diag(&[3.0, 2.0, 1.0]);
        let f = svd(&m, 1e-12).unwrap();
        assert_close(f.singular_values[0], 3.0, 1e-12);
        assert_close(f.singular_values[1], 2.0, 1e-12);
        assert_close(f.singular_values[2], 1.0, 1e-12);
        // Axis-aligned singular vectors up to sign.
        for j in 0..3 {
            assert_close(f.left_vectors.get(j, j).abs(), 1.0, 1e-12);
            assert_close(f.right_vectors.get(j, j).abs(), 1.0, 1e-12);
        }
    }

    #[test]
    fn wide_matrix_round_trips() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let f = svd(&m, 1e-12).unwrap();
        let err = f.reconstruct().sub(&m).frobenius_norm();
        assert!(err <= 1e-12 * m.frobenius_norm());
    }

    #[test]
    fn zero_matrix_yields_orthonormal_factors() {
        let m = DenseMatrix::<f64>::zeros(4, 2);
        let f = svd(&m, 1e-12).unwrap();
        assert_eq!(f.singular_values, vec![0.0, 0.0]);
        let gram = f.left_vectors.tr_mul(&f.left_vectors);
        let eye = DenseMatrix::identity(2);
        assert!(gram.sub(&eye).frobenius_norm() < 1e-10);
    }

    #[test]
    fn rejects_non_finite_input() {
        let m = DenseMatrix::from_vec(2, 2, vec![1.0, f64::INFINITY, 0.0, 1.0]).unwrap();
        assert!(matches!(
            svd(&m, 1e-12),
            Err(CoreError::NonFinite { row: 0, col: 1 })
        ));
    }
}
