//! Orthonormal column-space bases.
//!
//! A subspace of matrices spanned by rank-1 atoms is represented by an
//! orthonormal basis `B` of its column space; the projection of `X` onto the
//! subspace is then `B B^T X`. Bases are stored column-major so individual
//! basis vectors are contiguous.

use crate::error::CoreError;
use crate::matrix::{dot, DenseMatrix};
use crate::scalar::Scalar;

/// Residual norm below which a vector counts as dependent on the span
/// (floored at a small multiple of the element epsilon so the same code
/// works in single precision).
fn dependence_tol<T: Scalar>() -> T {
    T::from_f64(1e-10).max(T::epsilon() * T::from_f64(64.0))
}

/// Orthonormality slack accepted by the checked constructor.
fn orthonormality_tol<T: Scalar>() -> T {
    T::from_f64(1e-10).max(T::epsilon() * T::from_f64(64.0))
}

/// An orthonormal basis of a column subspace of `R^ambient_rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis<T> {
    ambient_rows: usize,
    /// Column-major storage; `data.len() = ambient_rows * rank`.
    data: Vec<T>,
}

impl<T: Scalar> SubspaceBasis<T> {
    /// The rank-0 basis (projects everything to zero).
    pub fn empty(ambient_rows: usize) -> Self {
        assert!(ambient_rows > 0);
        Self {
            ambient_rows,
            data: Vec::new(),
        }
    }

    /// Builds a basis from column-major vector data, verifying orthonormality.
    pub fn from_columns(ambient_rows: usize, data: Vec<T>) -> Result<Self, CoreError> {
        if ambient_rows == 0 || data.len() % ambient_rows != 0 {
            return Err(CoreError::InvalidArgument(
                "column data length must be a multiple of ambient_rows".into(),
            ));
        }
        let basis = Self { ambient_rows, data };
        if basis.rank() > ambient_rows {
            return Err(CoreError::InvalidArgument(format!(
                "rank {} exceeds ambient dimension {}",
                basis.rank(),
                ambient_rows
            )));
        }
        let tol = orthonormality_tol::<T>();
        for p in 0..basis.rank() {
            for q in p..basis.rank() {
                let g = dot(basis.col(p), basis.col(q));
                let expected = if p == q { T::one() } else { T::zero() };
                if (g - expected).abs() > tol {
                    return Err(CoreError::InvalidArgument(format!(
                        "columns {p} and {q} are not orthonormal (gram entry {g})"
                    )));
                }
            }
        }
        Ok(basis)
    }

    /// Builds a basis from the columns of `m`, verifying orthonormality.
    pub fn from_orthonormal_matrix(m: &DenseMatrix<T>) -> Result<Self, CoreError> {
        let unchecked = Self::from_matrix_columns(m, m.cols());
        Self::from_columns(unchecked.ambient_rows, unchecked.data)
    }

    /// Takes the leading `count` columns of `m` as the basis, without an
    /// orthonormality check; callers must supply orthonormal columns.
    pub(crate) fn from_matrix_columns(m: &DenseMatrix<T>, count: usize) -> Self {
        assert!(count <= m.cols());
        let rows = m.rows();
        let mut data = vec![T::zero(); rows * count];
        for j in 0..count {
            for i in 0..rows {
                data[j * rows + i] = m.get(i, j);
            }
        }
        Self {
            ambient_rows: rows,
            data,
        }
    }

    #[inline]
    pub fn ambient_rows(&self) -> usize {
        self.ambient_rows
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.data.len() / self.ambient_rows
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.ambient_rows..(j + 1) * self.ambient_rows]
    }

    /// Basis as an `ambient_rows x rank` matrix; `None` for the empty basis.
    pub fn to_matrix(&self) -> Option<DenseMatrix<T>> {
        if self.is_empty() {
            return None;
        }
        let mut m = DenseMatrix::zeros(self.ambient_rows, self.rank());
        for j in 0..self.rank() {
            for (i, &v) in self.col(j).iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Some(m)
    }

    /// The projector matrix `B B^T` (mainly for tests and diagnostics).
    pub fn projector(&self) -> DenseMatrix<T> {
        match self.to_matrix() {
            Some(b) => b.mul_tr(&b),
            None => DenseMatrix::zeros(self.ambient_rows, self.ambient_rows),
        }
    }

    /// Orthonormal basis spanning `span(self) + span(other)`.
    ///
    /// Columns of `other` that are numerically dependent on the accumulated
    /// span (residual norm below 1e-10) are dropped.
    pub fn union(&self, other: &Self) -> Result<Self, CoreError> {
        if self.ambient_rows != other.ambient_rows {
            return Err(CoreError::ShapeMismatch {
                expected: (self.ambient_rows, 0),
                got: (other.ambient_rows, 0),
            });
        }
        let mut out = self.clone();
        let mut v = vec![T::zero(); self.ambient_rows];
        for j in 0..other.rank() {
            v.copy_from_slice(other.col(j));
            out.absorb(&mut v);
        }
        Ok(out)
    }

    /// Appends `v` after orthogonalizing it against the current columns;
    /// drops it when dependent. `v` is clobbered.
    fn absorb(&mut self, v: &mut [T]) {
        let tol = dependence_tol::<T>();
        // Two Gram-Schmidt passes ("twice is enough") for orthogonality.
        for _ in 0..2 {
            for j in 0..self.rank() {
                let b = &self.data[j * self.ambient_rows..(j + 1) * self.ambient_rows];
                let proj = dot(b, v);
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let norm = dot(v, v).sqrt();
        if norm >= tol {
            let inv = T::one() / norm;
            self.data.extend(v.iter().map(|&x| x * inv));
        }
    }

    /// Orthogonal projection `B B^T m` of every column of `m`.
    pub fn project(&self, m: &DenseMatrix<T>) -> Result<DenseMatrix<T>, CoreError> {
        if m.rows() != self.ambient_rows {
            return Err(CoreError::ShapeMismatch {
                expected: (self.ambient_rows, m.cols()),
                got: m.shape(),
            });
        }
        let n = m.cols();
        let r = self.rank();
        let mut out = DenseMatrix::zeros(m.rows(), n);
        if r == 0 {
            return Ok(out);
        }
        let coeffs = self.coefficients(m);
        for l in 0..r {
            let b = self.col(l);
            let w_row = &coeffs.row(l).to_vec();
            for (i, &bi) in b.iter().enumerate() {
                if bi == T::zero() {
                    continue;
                }
                let out_row = &mut out.data_mut()[i * n..(i + 1) * n];
                for (o, &w) in out_row.iter_mut().zip(w_row) {
                    *o += bi * w;
                }
            }
        }
        Ok(out)
    }

    /// Coordinates `B^T m` of `m` in this basis (`rank x cols`).
    pub fn coefficients(&self, m: &DenseMatrix<T>) -> DenseMatrix<T> {
        assert_eq!(m.rows(), self.ambient_rows, "ambient dimension mismatch");
        let n = m.cols();
        let r = self.rank();
        assert!(r > 0, "empty basis has no coordinates");
        let mut w = DenseMatrix::zeros(r, n);
        for i in 0..self.ambient_rows {
            let m_row = m.row(i);
            for l in 0..r {
                let b = self.col(l)[i];
                if b == T::zero() {
                    continue;
                }
                let w_row = &mut w.data_mut()[l * n..(l + 1) * n];
                for (o, &x) in w_row.iter_mut().zip(m_row) {
                    *o += b * x;
                }
            }
        }
        w
    }

    /// Expansion `B w` of basis coordinates back into the ambient space.
    pub fn expand(&self, coeffs: &DenseMatrix<T>) -> DenseMatrix<T> {
        assert_eq!(coeffs.rows(), self.rank(), "coefficient rank mismatch");
        let n = coeffs.cols();
        let mut out = DenseMatrix::zeros(self.ambient_rows, n);
        for l in 0..self.rank() {
            let b = self.col(l);
            for (i, &bi) in b.iter().enumerate() {
                if bi == T::zero() {
                    continue;
                }
                let out_row = &mut out.data_mut()[i * n..(i + 1) * n];
                for (o, &w) in out_row.iter_mut().zip(coeffs.row(l)) {
                    *o += bi * w;
                }
            }
        }
        out
    }
}

/// Thin Householder QR: returns `Q` with orthonormal columns such that
/// `span(Q) ⊇ range(m)` (`m` is `rows x cols`, `rows >= cols` required).
pub fn thin_qr_q<T: Scalar>(m: &DenseMatrix<T>) -> DenseMatrix<T> {
    let (rows, cols) = m.shape();
    assert!(rows >= cols, "thin QR requires rows >= cols");
    // Column-major working copy.
    let mut a = vec![T::zero(); rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            a[j * rows + i] = m.get(i, j);
        }
    }
    // Householder vectors overwrite the lower triangle; tau per column.
    let mut tau = vec![T::zero(); cols];
    for k in 0..cols {
        let (alpha, norm) = {
            let col = &a[k * rows..(k + 1) * rows];
            (col[k], dot(&col[k..], &col[k..]).sqrt())
        };
        if norm == T::zero() {
            tau[k] = T::zero();
            continue;
        }
        let beta = if alpha >= T::zero() { -norm } else { norm };
        let v0 = alpha - beta;
        tau[k] = -v0 / beta;
        {
            let col = &mut a[k * rows..(k + 1) * rows];
            let inv = T::one() / v0;
            for x in col[k + 1..].iter_mut() {
                *x *= inv;
            }
            col[k] = beta;
        }
        // Apply the reflector to the remaining columns.
        for j in (k + 1)..cols {
            let mut s;
            {
                let (vc, cc) = {
                    let (head, tail) = a.split_at_mut(j * rows);
                    (&head[k * rows..(k + 1) * rows], &mut tail[..rows])
                };
                s = cc[k];
                for i in (k + 1)..rows {
                    s += vc[i] * cc[i];
                }
                s *= tau[k];
                cc[k] -= s;
                for i in (k + 1)..rows {
                    cc[i] -= s * vc[i];
                }
            }
            let _ = &mut s;
        }
    }
    // Form Q by applying reflectors to the leading columns of the identity.
    let mut q = vec![T::zero(); rows * cols];
    for j in 0..cols {
        q[j * rows + j] = T::one();
    }
    for k in (0..cols).rev() {
        if tau[k] == T::zero() {
            continue;
        }
        for j in 0..cols {
            let (vc, qc) = {
                let v = &a[k * rows..(k + 1) * rows];
                let qj = &mut q[j * rows..(j + 1) * rows];
                (v, qj)
            };
            let mut s = qc[k];
            for i in (k + 1)..rows {
                s += vc[i] * qc[i];
            }
            s *= tau[k];
            qc[k] -= s;
            for i in (k + 1)..rows {
                qc[i] -= s * vc[i];
            }
        }
    }
    let mut out = DenseMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            out.set(i, j, q[j * rows + i]);
        }
    }
    out
}
