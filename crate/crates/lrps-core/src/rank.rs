//! Best rank-k projection, exact and randomized.

use crate::error::CoreError;
use crate::matrix::DenseMatrix;
use crate::random::{chacha_rng, gaussian_matrix};
use crate::scalar::Scalar;
use crate::subspace::{thin_qr_q, SubspaceBasis};
use crate::svd::{svd, SvdFactors};

/// Sweep tolerance used for projections backed by the full SVD.
const PROJECTION_SVD_TOL: f64 = 1e-13;

/// Default oversampling for the randomized range finder.
pub const DEFAULT_OVERSAMPLE: usize = 5;

/// Default power (subspace) iterations for the randomized range finder.
pub const DEFAULT_POWER_ITERS: usize = 2;

/// Best rank-k approximation by truncated SVD, together with the orthonormal
/// basis of its column space (the top-k left singular vectors).
///
/// When the input has numerical rank below `k`, the basis carries only the
/// directions with nonzero singular value, so its rank may be less than `k`.
pub fn project_rank_k<T: Scalar>(
    m: &DenseMatrix<T>,
    k: usize,
) -> Result<(DenseMatrix<T>, SubspaceBasis<T>), CoreError> {
    let max_rank = m.rows().min(m.cols());
    if k == 0 || k > max_rank {
        return Err(CoreError::InvalidArgument(format!(
            "rank {k} outside 1..={max_rank}"
        )));
    }
    let factors = svd(m, T::from_f64(PROJECTION_SVD_TOL))?;
    Ok(truncate_with_basis(&factors, k, m.shape()))
}

/// Shared truncation path: assembles `U_k S_k V_k^T` and the basis of the
/// retained left singular vectors.
pub(crate) fn truncate_with_basis<T: Scalar>(
    factors: &SvdFactors<T>,
    k: usize,
    shape: (usize, usize),
) -> (DenseMatrix<T>, SubspaceBasis<T>) {
    let approx = factors.truncate(k);
    let kept = effective_rank(&factors.singular_values, k);
    let basis = if kept == 0 {
        SubspaceBasis::empty(shape.0)
    } else {
        SubspaceBasis::from_matrix_columns(&factors.left_vectors, kept)
    };
    (approx, basis)
}

/// Number of leading singular values (up to `k`) that count as nonzero.
fn effective_rank<T: Scalar>(sigma: &[T], k: usize) -> usize {
    if sigma.is_empty() {
        return 0;
    }
    let cut = sigma[0] * T::from_f64(1e-12);
    sigma
        .iter()
        .take(k)
        .take_while(|&&s| s > cut && s > T::zero())
        .count()
}

/// Rank-k approximation via a Gaussian randomized range finder with power
/// iterations (Halko-style), deterministic for a fixed `seed`.
pub fn randomized_rank_k<T: Scalar>(
    m: &DenseMatrix<T>,
    k: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<(DenseMatrix<T>, SubspaceBasis<T>), CoreError> {
    let max_rank = m.rows().min(m.cols());
    if k == 0 || k > max_rank {
        return Err(CoreError::InvalidArgument(format!(
            "rank {k} outside 1..={max_rank}"
        )));
    }
    if k + oversample > max_rank {
        return Err(CoreError::InvalidArgument(format!(
            "k + oversample = {} exceeds min dimension {max_rank}",
            k + oversample
        )));
    }
    let sketch_cols = k + oversample;
    let mut rng = chacha_rng(seed);
    let sketch = gaussian_matrix::<T>(m.cols(), sketch_cols, &mut rng);

    let mut q = thin_qr_q(&m.mul(&sketch));
    for _ in 0..power_iters {
        let z = thin_qr_q(&m.tr_mul(&q));
        q = thin_qr_q(&m.mul(&z));
    }

    // Small SVD of B = Q^T m, then lift the left factor back through Q.
    let b = q.tr_mul(m);
    let small = svd(&b, T::from_f64(PROJECTION_SVD_TOL))?;
    let kept = effective_rank(&small.singular_values, k);
    let mut approx = DenseMatrix::zeros(m.rows(), m.cols());
    let mut basis_cols = DenseMatrix::zeros(m.rows(), kept.max(1));
    for j in 0..kept {
        let mut u_col = vec![T::zero(); m.rows()];
        for i in 0..m.rows() {
            let mut acc = T::zero();
            for l in 0..q.cols() {
                acc += q.get(i, l) * small.left_vectors.get(l, j);
            }
            u_col[i] = acc;
        }
        let s = small.singular_values[j];
        for i in 0..m.rows() {
            basis_cols.set(i, j, u_col[i]);
            let scaled = u_col[i] * s;
            if scaled == T::zero() {
                continue;
            }
            for c in 0..m.cols() {
                let v = approx.get(i, c) + scaled * small.right_vectors.get(c, j);
                approx.set(i, c, v);
            }
        }
    }
    let basis = if kept == 0 {
        SubspaceBasis::empty(m.rows())
    } else {
        SubspaceBasis::from_matrix_columns(&basis_cols, kept)
    };
    Ok((approx, basis))
}
