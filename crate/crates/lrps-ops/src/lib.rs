//! Linear measurement operators `A: R^{m x n} -> R^p` with adjoints.
//!
//! Three concrete families cover the recovery experiments:
//! - `identity`: complete observations, `p = m * n` (the RPCA setting);
//! - `mask`: entry subsampling on a sorted index set Ω (matrix completion);
//! - `gaussian`: dense i.i.d. `N(0, 1/p)` ensemble, the generic operator with
//!   good restricted-isometry behavior.
//!
//! Operators are immutable after construction; `apply`/`adjoint` are pure.

use std::io::{BufRead, Write};

use lrps_core::{
    chacha_rng, gaussian_matrix, sample_without_replacement, CoreError, DenseMatrix, Scalar,
    SupportSet,
};
use thiserror::Error;

/// Default cap on `p * m * n` for the dense Gaussian ensemble (one f64 per
/// coefficient; 2^24 entries is 128 MiB).
pub const DEFAULT_GAUSSIAN_ENTRY_CAP: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum OpsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: operator expects {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("observation length mismatch: operator produces {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "gaussian operator of {entries} coefficients exceeds the cap of {cap}; \
         refusing to allocate"
    )]
    MemoryGuard { entries: usize, cap: usize },

    #[error("malformed mask csv at line {line}: {message}")]
    MalformedMask { line: usize, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A vector of observations `y in R^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> ObservationVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self, OpsError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(OpsError::InvalidArgument(format!(
                "non-finite observation at index {i}"
            )));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }

    pub fn norm(&self) -> T {
        lrps_core::dot(&self.values, &self.values).sqrt()
    }

    /// Elementwise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// `self + alpha * other`.
    pub fn axpy(&mut self, alpha: T, other: &Self) {
        assert_eq!(self.len(), other.len());
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }
}

impl<T: Scalar> From<Vec<T>> for ObservationVector<T> {
    fn from(values: Vec<T>) -> Self {
        Self { values }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind<T> {
    Identity,
    Mask {
        omega: SupportSet,
    },
    /// Dense coefficient operator; `seed` is present when the coefficients
    /// were drawn as the seeded Gaussian ensemble (the serializable case).
    Gaussian {
        coeffs: DenseMatrix<T>,
        seed: Option<u64>,
    },
}

/// Tag identifying the operator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    Identity,
    Mask,
    Gaussian,
}

/// A linear measurement operator with known ambient dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator<T> {
    rows: usize,
    cols: usize,
    output_dim: usize,
    kind: Kind<T>,
}

impl<T: Scalar> MeasurementOperator<T> {
    /// Complete-observation operator (row-major vectorization).
    pub fn identity(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        Self {
            rows,
            cols,
            output_dim: rows * cols,
            kind: Kind::Identity,
        }
    }

    /// Entry-subsampling operator on the given index set.
    pub fn mask(omega: SupportSet) -> Self {
        let (rows, cols) = omega.ambient_shape();
        Self {
            rows,
            cols,
            output_dim: omega.len(),
            kind: Kind::Mask { omega },
        }
    }

    /// Dense Gaussian ensemble with variance `1/p` per coefficient, so that
    /// `E ||A X||^2 = ||X||_F^2`. Deterministic for a fixed seed.
    pub fn gaussian(rows: usize, cols: usize, p: usize, seed: u64) -> Result<Self, OpsError> {
        Self::gaussian_capped(rows, cols, p, seed, DEFAULT_GAUSSIAN_ENTRY_CAP)
    }

    /// As [`MeasurementOperator::gaussian`] with an explicit memory cap on
    /// `p * rows * cols` coefficients.
    pub fn gaussian_capped(
        rows: usize,
        cols: usize,
        p: usize,
        seed: u64,
        cap: usize,
    ) -> Result<Self, OpsError> {
        if rows == 0 || cols == 0 || p == 0 {
            return Err(OpsError::InvalidArgument(
                "gaussian operator dimensions must be positive".into(),
            ));
        }
        let entries = p
            .checked_mul(rows * cols)
            .ok_or_else(|| OpsError::InvalidArgument("coefficient count overflow".into()))?;
        if entries > cap {
            return Err(OpsError::MemoryGuard { entries, cap });
        }
        let mut rng = chacha_rng(seed);
        let mut coeffs = gaussian_matrix::<T>(p, rows * cols, &mut rng);
        let scale = T::one() / T::from_usize(p).sqrt();
        coeffs.scale_in_place(scale);
        Ok(Self {
            rows,
            cols,
            output_dim: p,
            kind: Kind::Gaussian {
                coeffs,
                seed: Some(seed),
            },
        })
    }

    /// Dense operator from an explicit `p x (rows*cols)` coefficient matrix
    /// acting on the row-major vectorization. Such operators are not
    /// serializable by seed; they exist for custom ensembles and testing.
    pub fn from_dense_coefficients(
        rows: usize,
        cols: usize,
        coeffs: DenseMatrix<T>,
    ) -> Result<Self, OpsError> {
        if rows == 0 || cols == 0 {
            return Err(OpsError::InvalidArgument(
                "ambient dimensions must be positive".into(),
            ));
        }
        if coeffs.cols() != rows * cols {
            return Err(OpsError::InvalidArgument(format!(
                "coefficient matrix has {} columns, ambient needs {}",
                coeffs.cols(),
                rows * cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            output_dim: coeffs.rows(),
            kind: Kind::Gaussian { coeffs, seed: None },
        })
    }

    /// Uniform mask over `round(fraction * m * n)` entries, sampled without
    /// replacement; deterministic for a fixed seed.
    pub fn uniform_mask(
        rows: usize,
        cols: usize,
        fraction: f64,
        seed: u64,
    ) -> Result<Self, OpsError> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(OpsError::InvalidArgument(format!(
                "fraction must lie in (0, 1], got {fraction}"
            )));
        }
        let total = rows * cols;
        let p = ((fraction * total as f64).round() as usize).clamp(1, total);
        let mut rng = chacha_rng(seed);
        let linear = sample_without_replacement(total, p, &mut rng);
        let entries: Vec<(usize, usize)> = linear.iter().map(|&i| (i / cols, i % cols)).collect();
        let omega = SupportSet::new(rows, cols, entries)?;
        Ok(Self::mask(omega))
    }

    #[inline]
    pub fn input_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn tag(&self) -> OperatorTag {
        match self.kind {
            Kind::Identity => OperatorTag::Identity,
            Kind::Mask { .. } => OperatorTag::Mask,
            Kind::Gaussian { .. } => OperatorTag::Gaussian,
        }
    }

    /// Observed index set for mask operators.
    pub fn omega(&self) -> Option<&SupportSet> {
        match &self.kind {
            Kind::Mask { omega } => Some(omega),
            _ => None,
        }
    }

    /// Construction seed for seeded gaussian operators; such an operator is
    /// fully described by `(shape, p, seed)`. `None` for explicit-coefficient
    /// operators.
    pub fn gaussian_seed(&self) -> Option<u64> {
        match &self.kind {
            Kind::Gaussian { seed, .. } => *seed,
            _ => None,
        }
    }

    /// Rough flop count of one `apply`, for fair timing reports.
    pub fn application_cost(&self) -> usize {
        match &self.kind {
            Kind::Identity => self.rows * self.cols,
            Kind::Mask { omega } => omega.len(),
            Kind::Gaussian { .. } => 2 * self.output_dim * self.rows * self.cols,
        }
    }

    fn check_input(&self, x: &DenseMatrix<T>) -> Result<(), OpsError> {
        if x.shape() != (self.rows, self.cols) {
            return Err(OpsError::ShapeMismatch {
                expected: (self.rows, self.cols),
                got: x.shape(),
            });
        }
        Ok(())
    }

    fn check_output(&self, y: &ObservationVector<T>) -> Result<(), OpsError> {
        if y.len() != self.output_dim {
            return Err(OpsError::LengthMismatch {
                expected: self.output_dim,
                got: y.len(),
            });
        }
        Ok(())
    }

    /// Forward map `A x`.
    pub fn apply(&self, x: &DenseMatrix<T>) -> Result<ObservationVector<T>, OpsError> {
        self.check_input(x)?;
        let values = match &self.kind {
            Kind::Identity => x.data().to_vec(),
            Kind::Mask { omega } => omega.gather(x),
            Kind::Gaussian { coeffs, .. } => coeffs.mul_vec(x.data()),
        };
        Ok(ObservationVector { values })
    }

    /// Adjoint map `A^* y`, satisfying `<A x, y> = <x, A^* y>`.
    pub fn adjoint(&self, y: &ObservationVector<T>) -> Result<DenseMatrix<T>, OpsError> {
        self.check_output(y)?;
        let out = match &self.kind {
            Kind::Identity => DenseMatrix::from_vec(self.rows, self.cols, y.values.clone())?,
            Kind::Mask { omega } => omega.scatter(&y.values),
            Kind::Gaussian { coeffs, .. } => {
                DenseMatrix::from_vec(self.rows, self.cols, coeffs.tr_mul_vec(&y.values))?
            }
        };
        Ok(out)
    }

    /// Residual `y - A x`.
    pub fn residual(
        &self,
        y: &ObservationVector<T>,
        x: &DenseMatrix<T>,
    ) -> Result<ObservationVector<T>, OpsError> {
        self.check_output(y)?;
        let ax = self.apply(x)?;
        Ok(y.sub(&ax))
    }

    /// Gradient of the data error `f(x) = ||y - A x||_2^2`:
    /// `-2 A^* (y - A x)`.
    pub fn gradient(
        &self,
        y: &ObservationVector<T>,
        x: &DenseMatrix<T>,
    ) -> Result<DenseMatrix<T>, OpsError> {
        let r = self.residual(y, x)?;
        let mut g = self.adjoint(&r)?;
        g.scale_in_place(-T::from_f64(2.0));
        Ok(g)
    }
}

/// Writes a mask operator's index set as `row,col` CSV lines.
pub fn write_mask_csv<T: Scalar>(
    op: &MeasurementOperator<T>,
    out: &mut impl Write,
) -> Result<(), OpsError> {
    let omega = op
        .omega()
        .ok_or_else(|| OpsError::InvalidArgument("operator is not a mask".into()))?;
    for (r, c) in omega.iter() {
        writeln!(out, "{r},{c}")?;
    }
    Ok(())
}

/// Reads a `row,col` CSV index set and builds the mask operator.
pub fn read_mask_csv<T: Scalar>(
    rows: usize,
    cols: usize,
    input: &mut impl BufRead,
) -> Result<MeasurementOperator<T>, OpsError> {
    let mut entries = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split(',');
        let parse = |s: Option<&str>| -> Result<usize, OpsError> {
            s.ok_or_else(|| OpsError::MalformedMask {
                line: lineno + 1,
                message: "expected `row,col`".into(),
            })?
            .trim()
            .parse()
            .map_err(|e| OpsError::MalformedMask {
                line: lineno + 1,
                message: format!("{e}"),
            })
        };
        let r = parse(parts.next())?;
        let c = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(OpsError::MalformedMask {
                line: lineno + 1,
                message: "trailing fields".into(),
            });
        }
        entries.push((r, c));
    }
    let omega = SupportSet::new(rows, cols, entries)?;
    Ok(MeasurementOperator::mask(omega))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs<T: Scalar>(v: Vec<T>) -> ObservationVector<T> {
        ObservationVector::new(v).unwrap()
    }

    #[test]
    fn identity_vectorizes_row_major() {
        let op = MeasurementOperator::<f64>::identity(2, 2);
        let x = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(op.apply(&x).unwrap().as_slice(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn mask_gathers_in_sorted_order() {
        let omega = SupportSet::new(2, 2, vec![(1, 1), (0, 0)]).unwrap();
        let op = MeasurementOperator::<f64>::mask(omega);
        let x = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(op.apply(&x).unwrap().as_slice(), &[1.0, 4.0]);
    }

    #[test]
    fn mask_adjoint_scatters() {
        let omega = SupportSet::new(2, 2, vec![(0, 1)]).unwrap();
        let op = MeasurementOperator::<f64>::mask(omega);
        let back = op.adjoint(&obs(vec![7.0])).unwrap();
        assert_eq!(back.data(), &[0.0, 7.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_adjoint_inverts_vectorization() {
        let op = MeasurementOperator::<f64>::identity(2, 3);
        let y = obs(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let back = op.adjoint(&y).unwrap();
        assert_eq!(back.row(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn gradient_is_zero_at_the_truth() {
        let op = MeasurementOperator::<f64>::identity(2, 2);
        let x = DenseMatrix::from_rows(&[&[1.0, -2.0], &[0.5, 3.0]]);
        let y = op.apply(&x).unwrap();
        let g = op.gradient(&y, &x).unwrap();
        assert_eq!(g.frobenius_norm(), 0.0);
    }

    #[test]
    fn gradient_at_zero_is_minus_two_unvec_y() {
        let op = MeasurementOperator::<f64>::identity(2, 2);
        let y = obs(vec![1.0, 2.0, 3.0, 4.0]);
        let x = DenseMatrix::zeros(2, 2);
        let g = op.gradient(&y, &x).unwrap();
        assert_eq!(g.data(), &[-2.0, -4.0, -6.0, -8.0]);
    }

    #[test]
    fn uniform_mask_size_and_determinism() {
        let full = MeasurementOperator::<f64>::uniform_mask(4, 5, 1.0, 3).unwrap();
        assert_eq!(full.output_dim(), 20);

        let a = MeasurementOperator::<f64>::uniform_mask(200, 400, 0.3, 11).unwrap();
        assert_eq!(a.output_dim(), 24_000);
        let b = MeasurementOperator::<f64>::uniform_mask(200, 400, 0.3, 11).unwrap();
        assert_eq!(a.omega().unwrap(), b.omega().unwrap());
    }

    #[test]
    fn gaussian_is_deterministic_and_guarded() {
        let a = MeasurementOperator::<f64>::gaussian(4, 5, 12, 7).unwrap();
        let b = MeasurementOperator::<f64>::gaussian(4, 5, 12, 7).unwrap();
        let x = DenseMatrix::from_fn(4, 5, |i, j| (i + 2 * j) as f64);
        assert_eq!(a.apply(&x).unwrap(), b.apply(&x).unwrap());

        let guarded = MeasurementOperator::<f64>::gaussian_capped(100, 100, 1000, 7, 1 << 20);
        assert!(matches!(guarded, Err(OpsError::MemoryGuard { .. })));
    }

    #[test]
    fn shape_errors_are_reported() {
        let op = MeasurementOperator::<f64>::identity(2, 2);
        let wrong = DenseMatrix::<f64>::zeros(3, 2);
        assert!(matches!(
            op.apply(&wrong),
            Err(OpsError::ShapeMismatch { .. })
        ));
        let y = obs(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            op.adjoint(&y),
            Err(OpsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn mask_csv_round_trips() {
        let op = MeasurementOperator::<f64>::uniform_mask(5, 7, 0.4, 13).unwrap();
        let mut buf = Vec::new();
        write_mask_csv(&op, &mut buf).unwrap();
        let restored = read_mask_csv::<f64>(5, 7, &mut buf.as_slice()).unwrap();
        assert_eq!(op.omega().unwrap(), restored.omega().unwrap());
    }

    #[test]
    fn malformed_mask_csv_names_the_line() {
        let text = b"0,1\n2;3\n";
        let err = read_mask_csv::<f64>(5, 5, &mut text.as_slice()).unwrap_err();
        match err {
            OpsError::MalformedMask { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }
}
