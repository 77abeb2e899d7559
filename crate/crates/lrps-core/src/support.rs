//! Sparse support sets and hard thresholding.

use crate::error::CoreError;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// A sorted, duplicate-free set of (row, col) indices within a fixed shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize)>,
}

impl SupportSet {
    /// Builds a support set; entries are sorted lexicographically and
    /// de-duplicated, out-of-range indices are rejected.
    pub fn new(
        rows: usize,
        cols: usize,
        mut entries: Vec<(usize, usize)>,
    ) -> Result<Self, CoreError> {
        if rows == 0 || cols == 0 {
            return Err(CoreError::InvalidArgument(
                "ambient shape must be positive".into(),
            ));
        }
        for &(r, c) in &entries {
            if r >= rows || c >= cols {
                return Err(CoreError::InvalidArgument(format!(
                    "index ({r}, {c}) outside ambient shape {rows}x{cols}"
                )));
            }
        }
        entries.sort_unstable();
        entries.dedup();
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let entries = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .collect();
        Self {
            rows,
            cols,
            entries,
        }
    }

    #[inline]
    pub fn ambient_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.entries.binary_search(&(row, col)).is_ok()
    }

    /// Set union; shapes must agree.
    pub fn union(&self, other: &Self) -> Result<Self, CoreError> {
        if self.ambient_shape() != other.ambient_shape() {
            return Err(CoreError::ShapeMismatch {
                expected: self.ambient_shape(),
                got: other.ambient_shape(),
            });
        }
        let mut merged = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            match self.entries[i].cmp(&other.entries[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(self.entries[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(other.entries[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    merged.push(self.entries[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&self.entries[i..]);
        merged.extend_from_slice(&other.entries[j..]);
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: merged,
        })
    }

    /// Values of `m` at the support indices, in support order.
    pub fn gather<T: Scalar>(&self, m: &DenseMatrix<T>) -> Vec<T> {
        assert_eq!(m.shape(), self.ambient_shape(), "ambient shape mismatch");
        self.entries.iter().map(|&(r, c)| m.get(r, c)).collect()
    }

    /// Builds the matrix with `values` at the support indices, zero elsewhere.
    pub fn scatter<T: Scalar>(&self, values: &[T]) -> DenseMatrix<T> {
        assert_eq!(values.len(), self.len(), "value count mismatch");
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for (&(r, c), &v) in self.entries.iter().zip(values) {
            out.set(r, c, v);
        }
        out
    }
}

/// Zeroes every entry of `m` outside the support; entries on the support are
/// preserved exactly.
pub fn restrict_to_support<T: Scalar>(
    m: &DenseMatrix<T>,
    support: &SupportSet,
) -> Result<DenseMatrix<T>, CoreError> {
    if m.shape() != support.ambient_shape() {
        return Err(CoreError::ShapeMismatch {
            expected: support.ambient_shape(),
            got: m.shape(),
        });
    }
    let mut out = DenseMatrix::zeros(m.rows(), m.cols());
    for (r, c) in support.iter() {
        out.set(r, c, m.get(r, c));
    }
    Ok(out)
}

/// Best s-sparse approximation: keeps the `s` entries of largest magnitude
/// (ties broken by lexicographic index order) and zeroes the rest.
///
/// The returned support always has exactly `s` entries; when the input has
/// fewer than `s` nonzeros it is padded with the lexicographically first
/// remaining indices, whose retained values are zero.
pub fn project_sparse_s<T: Scalar>(
    m: &DenseMatrix<T>,
    s: usize,
) -> Result<(DenseMatrix<T>, SupportSet), CoreError> {
    let (rows, cols) = m.shape();
    if s == 0 || s > rows * cols {
        return Err(CoreError::InvalidArgument(format!(
            "sparsity level {s} outside 1..={}",
            rows * cols
        )));
    }
    let mut order: Vec<u32> = (0..(rows * cols) as u32).collect();
    let data = m.data();
    order.sort_unstable_by(|&a, &b| {
        let ma = data[a as usize].abs();
        let mb = data[b as usize].abs();
        mb.partial_cmp(&ma)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut entries = Vec::with_capacity(s);
    let mut out = DenseMatrix::zeros(rows, cols);
    for &idx in order.iter().take(s) {
        let (r, c) = (idx as usize / cols, idx as usize % cols);
        out.set(r, c, m.get(r, c));
        entries.push((r, c));
    }
    entries.sort_unstable();
    Ok((
        out,
        SupportSet {
            rows,
            cols,
            entries,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_largest_magnitudes() {
        let m = DenseMatrix::from_rows(&[&[5.0, -7.0], &[1.0, 0.0]]);
        let (thresholded, support) = project_sparse_s(&m, 2).unwrap();
        assert_eq!(support.entries(), &[(0, 0), (0, 1)]);
        assert_eq!(thresholded.get(0, 0), 5.0);
        assert_eq!(thresholded.get(0, 1), -7.0);
        assert_eq!(thresholded.get(1, 0), 0.0);
    }

    #[test]
    fn zero_matrix_pads_lexicographically() {
        let m = DenseMatrix::<f64>::zeros(2, 3);
        let (out, support) = project_sparse_s(&m, 3).unwrap();
        assert_eq!(out.frobenius_norm(), 0.0);
        assert_eq!(support.entries(), &[(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn sparsity_bounds_are_enforced() {
        let m = DenseMatrix::<f64>::zeros(2, 2);
        assert!(project_sparse_s(&m, 0).is_err());
        assert!(project_sparse_s(&m, 5).is_err());
    }

    #[test]
    fn restriction_full_and_empty() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let full = restrict_to_support(&m, &SupportSet::full(2, 2)).unwrap();
        assert_eq!(full, m);
        let none = restrict_to_support(&m, &SupportSet::empty(2, 2)).unwrap();
        assert_eq!(none.frobenius_norm(), 0.0);
    }

    #[test]
    fn union_merges_sorted_unique() {
        let a = SupportSet::new(3, 3, vec![(0, 1), (2, 2)]).unwrap();
        let b = SupportSet::new(3, 3, vec![(2, 2), (1, 0)]).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.entries(), &[(0, 1), (1, 0), (2, 2)]);
    }

    #[test]
    fn out_of_range_entry_rejected() {
        assert!(SupportSet::new(2, 2, vec![(2, 0)]).is_err());
    }
}
