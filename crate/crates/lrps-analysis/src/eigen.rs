//! Eigenvalues of small dense real matrices via Hessenberg reduction and the
//! shifted QR iteration, for spectral-radius queries on stability matrices.

use lrps_core::{DenseMatrix, Scalar};

use crate::AnalysisError;

/// Maximum QR iterations per eigenvalue before giving up.
const MAX_ITERS_PER_EIGENVALUE: usize = 40;

/// Eigenvalues of a square real matrix as `(re, im)` pairs, in no particular
/// order. Complex eigenvalues come in conjugate pairs.
pub fn eigenvalues<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<(T, T)>, AnalysisError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(AnalysisError::InvalidArgument(format!(
            "matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(AnalysisError::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    if n == 1 {
        return Ok(vec![(a.get(0, 0), T::zero())]);
    }
    let mut h = hessenberg(a);
    Ok(hqr(&mut h, n)?)
}

/// Largest eigenvalue modulus of a square real matrix.
pub fn spectral_radius<T: Scalar>(a: &DenseMatrix<T>) -> Result<T, AnalysisError> {
    let eigs = eigenvalues(a)?;
    Ok(eigs
        .into_iter()
        .map(|(re, im)| (re * re + im * im).sqrt())
        .fold(T::zero(), T::max))
}

/// Householder reduction to upper Hessenberg form (returned row-major).
fn hessenberg<T: Scalar>(a: &DenseMatrix<T>) -> Vec<Vec<T>> {
    let n = a.rows();
    let mut h: Vec<Vec<T>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for k in 0..n.saturating_sub(2) {
        // Build the reflector annihilating column k below row k+1.
        let mut norm_sq = T::zero();
        for row in h.iter().take(n).skip(k + 1) {
            norm_sq += row[k] * row[k];
        }
        let norm = norm_sq.sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = h[k + 1][k];
        let beta = if alpha >= T::zero() { -norm } else { norm };
        let v0 = alpha - beta;
        let mut v = vec![T::zero(); n];
        v[k + 1] = v0;
        for i in (k + 2)..n {
            v[i] = h[i][k];
        }
        let vtv = v0 * v0
            + h.iter()
                .take(n)
                .skip(k + 2)
                .map(|row| row[k] * row[k])
                .sum::<T>();
        if vtv == T::zero() {
            continue;
        }
        let two = T::from_f64(2.0);
        // H <- P H P with P = I - 2 v v^T / (v^T v).
        for j in 0..n {
            let mut dot = T::zero();
            for i in (k + 1)..n {
                dot += v[i] * h[i][j];
            }
            let f = two * dot / vtv;
            for i in (k + 1)..n {
                h[i][j] -= f * v[i];
            }
        }
        for row in h.iter_mut().take(n) {
            let mut dot = T::zero();
            for (i, &vi) in v.iter().enumerate().take(n).skip(k + 1) {
                dot += row[i] * vi;
            }
            let f = two * dot / vtv;
            for (i, &vi) in v.iter().enumerate().take(n).skip(k + 1) {
                row[i] -= f * vi;
            }
        }
    }
    h
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
/// Follows the classical dense-algebra formulation.
fn hqr<T: Scalar>(h: &mut [Vec<T>], n: usize) -> Result<Vec<(T, T)>, AnalysisError> {
    let mut eigs = Vec::with_capacity(n);
    let mut anorm = T::zero();
    for (i, row) in h.iter().enumerate().take(n) {
        for j in i.saturating_sub(1)..n {
            anorm += row[j].abs();
        }
    }
    if anorm == T::zero() {
        return Ok(vec![(T::zero(), T::zero()); n]);
    }
    let eps = T::epsilon();
    let mut nn = n;
    let mut t = T::zero();
    let mut its_total = 0usize;
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            // Look for a negligible subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                let s = h[l - 2][l - 2].abs() + h[l - 1][l - 1].abs();
                let s = if s == T::zero() { anorm } else { s };
                if h[l - 1][l - 2].abs() <= eps * s {
                    h[l - 1][l - 2] = T::zero();
                    break;
                }
                l -= 1;
            }
            let x = h[nn - 1][nn - 1];
            if l == nn {
                eigs.push((x + t, T::zero()));
                nn -= 1;
                break;
            }
            let y = h[nn - 2][nn - 2];
            let w = h[nn - 1][nn - 2] * h[nn - 2][nn - 1];
            if l == nn - 1 {
                let p = (y - x) * T::from_f64(0.5);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x = x + t;
                if q >= T::zero() {
                    let z = p + p.signum() * z;
                    eigs.push((x + z, T::zero()));
                    if z != T::zero() {
                        eigs.push((x - w / z, T::zero()));
                    } else {
                        eigs.push((x, T::zero()));
                    }
                } else {
                    eigs.push((x + p, z));
                    eigs.push((x + p, -z));
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITERS_PER_EIGENVALUE {
                return Err(AnalysisError::EigenNonConvergence {
                    size: n,
                    iterations: its_total,
                });
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its % 10 == 0 && its > 0 {
                // Exceptional shift.
                t += x;
                for i in 0..nn {
                    h[i][i] -= x;
                }
                let s = h[nn - 1][nn - 2].abs() + h[nn - 2][nn - 3].abs();
                x = T::from_f64(0.75) * s;
                y = x;
                w = T::from_f64(-0.4375) * s * s;
            }
            its += 1;
            its_total += 1;

            // Find two consecutive small subdiagonals.
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = h[m - 1][m - 1];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[m][m - 1] + h[m - 1][m];
                q = h[m][m] - z - rr - ss;
                r = h[m + 1][m];
                let scale = p.abs() + q.abs() + r.abs();
                p /= scale;
                q /= scale;
                r /= scale;
                if m == l {
                    break;
                }
                let u = h[m - 1][m - 2].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[m - 2][m - 2].abs() + h[m - 1][m - 1].abs() + h[m][m].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 1)..=(nn - 1) {
                h[i][i - 2] = T::zero();
                if i > m + 1 {
                    h[i][i - 3] = T::zero();
                }
            }
            // Double QR step on rows/columns m-1 .. nn-1 (0-based).
            for k in (m - 1)..=(nn - 2) {
                if k != m - 1 {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if k != nn - 2 {
                        h[k + 2][k - 1]
                    } else {
                        T::zero()
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x == T::zero() {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                let s = (p * p + q * q + r * r).sqrt() * p.signum();
                if s == T::zero() {
                    continue;
                }
                if k == m - 1 {
                    if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                } else {
                    h[k][k - 1] = -s * x;
                }
                p += s;
                let px = p / s;
                let qy = q / s;
                let rz = r / s;
                let qp = q / p;
                let rp = r / p;
                for j in k..nn {
                    let mut pp = h[k][j] + qp * h[k + 1][j];
                    if k != nn - 2 {
                        pp += rp * h[k + 2][j];
                        h[k + 2][j] -= pp * rz;
                    }
                    h[k + 1][j] -= pp * qy;
                    h[k][j] -= pp * px;
                }
                let mmin = if nn < k + 4 { nn } else { k + 4 };
                for row in h.iter_mut().take(mmin).skip(l.saturating_sub(1)) {
                    let mut pp = px * row[k] + qy * row[k + 1];
                    if k != nn - 2 {
                        pp += rz * row[k + 2];
                        row[k + 2] -= pp * rp;
                    }
                    row[k + 1] -= pp * qp;
                    row[k] -= pp;
                }
            }
        }
        if nn == 0 {
            break;
        }
    }
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eigenvalues_are_the_diagonal() {
        let m = DenseMatrix::from_diag(&[0.3f64, -0.7, 2.0]);
        let rho = spectral_radius(&m).unwrap();
        assert!((rho - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identity_radius_is_one() {
        let m = DenseMatrix::<f64>::identity(2);
        assert!((spectral_radius(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_mixed_signs() {
        let m = DenseMatrix::from_diag(&[0.3f64, -0.7]);
        assert!((spectral_radius(&m).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn rotation_matrix_has_unit_complex_pair() {
        let (c, s) = (0.6f64, 0.8f64);
        let m = DenseMatrix::from_rows(&[&[c, -s], &[s, c]]);
        let eigs = eigenvalues(&m).unwrap();
        assert_eq!(eigs.len(), 2);
        for (re, im) in eigs {
            assert!((re - c).abs() < 1e-12);
            assert!((im.abs() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn upper_triangular_eigenvalues() {
        let m = DenseMatrix::from_rows(&[
            &[1.0f64, 5.0, -3.0, 2.0],
            &[0.0, -2.0, 4.0, 1.0],
            &[0.0, 0.0, 0.5, 7.0],
            &[0.0, 0.0, 0.0, 3.0],
        ]);
        let mut mods: Vec<f64> = eigenvalues(&m)
            .unwrap()
            .iter()
            .map(|(re, im)| (re * re + im * im).sqrt())
            .collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [0.5, 1.0, 2.0, 3.0];
        for (got, want) in mods.iter().zip(expected) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn companion_matrix_of_known_polynomial() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m =
            DenseMatrix::from_rows(&[&[6.0f64, -11.0, 6.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let rho = spectral_radius(&m).unwrap();
        assert!((rho - 3.0).abs() < 1e-9, "rho = {rho}");
    }

    #[test]
    fn rejects_non_square_input() {
        let m = DenseMatrix::<f64>::zeros(2, 3);
        assert!(spectral_radius(&m).is_err());
    }
}
