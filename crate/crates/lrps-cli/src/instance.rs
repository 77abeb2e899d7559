//! Synthetic problem generation.

use lrps_core::{
    chacha_rng, derive_seed, gaussian_matrix, gaussian_vec, sample_without_replacement, MatrixF64,
};
use lrps_ops::{MeasurementOperator, ObservationVector};

use crate::CliError;

/// How the planted signal is observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationModel {
    /// Uniform entry mask observing `round(fraction * m * n)` entries.
    Mask { fraction: f64 },
    /// Dense Gaussian ensemble with `p` measurements.
    Gaussian { p: usize },
    /// Complete observations.
    Identity,
}

/// Default ratio of gross sparse-entry magnitude to the low-rank entry scale.
pub const DEFAULT_GROSS_SCALE: f64 = 10.0;

/// A planted recovery instance: ground truth, operator, observations.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub low_rank: MatrixF64,
    pub sparse: MatrixF64,
    pub operator: MeasurementOperator<f64>,
    pub observations: ObservationVector<f64>,
    pub noise_norm: f64,
    pub seed: u64,
}

impl SyntheticInstance {
    pub fn signal(&self) -> MatrixF64 {
        self.low_rank.add(&self.sparse)
    }

    /// FNV-1a hash over the observations and dimensions; used to confirm that
    /// every solver in a benchmark rep saw the identical instance.
    pub fn content_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        let (m, n) = self.operator.input_shape();
        eat(&(m as u64).to_le_bytes());
        eat(&(n as u64).to_le_bytes());
        eat(&(self.observations.len() as u64).to_le_bytes());
        for v in self.observations.as_slice() {
            eat(&v.to_le_bytes());
        }
        h
    }
}

/// Plants a rank-k plus s-sparse signal and observes it through the chosen
/// model. Fully deterministic for a fixed seed.
///
/// The low-rank part is an outer product of Gaussian factors; sparse entries
/// sit on a uniform support with magnitudes about `gross_scale` times the
/// largest low-rank entry. The combined signal is normalized to unit
/// Frobenius norm (the low-rank part alone when `s == 0`), and the noise is
/// uniform on the sphere of radius `noise_norm`.
pub fn generate_instance(
    rows: usize,
    cols: usize,
    rank: usize,
    sparsity: usize,
    model: ObservationModel,
    noise_norm: f64,
    gross_scale: f64,
    seed: u64,
) -> Result<SyntheticInstance, CliError> {
    if rank > rows.min(cols) {
        return Err(CliError::argument(format!(
            "rank {rank} exceeds min dimension {}",
            rows.min(cols)
        )));
    }
    if sparsity > rows * cols {
        return Err(CliError::argument(format!(
            "sparsity {sparsity} exceeds ambient size {}",
            rows * cols
        )));
    }
    if rank == 0 && sparsity == 0 {
        return Err(CliError::argument("rank and sparsity cannot both be zero"));
    }
    if noise_norm < 0.0 {
        return Err(CliError::argument("noise_norm must be nonnegative"));
    }

    let mut low_rank = if rank > 0 {
        let mut rng = chacha_rng(derive_seed(seed, &[1]));
        let left = gaussian_matrix::<f64>(rows, rank, &mut rng);
        let right = gaussian_matrix::<f64>(cols, rank, &mut rng);
        left.mul_tr(&right)
    } else {
        MatrixF64::zeros(rows, cols)
    };

    let mut sparse = MatrixF64::zeros(rows, cols);
    if sparsity > 0 {
        let mut rng = chacha_rng(derive_seed(seed, &[2]));
        let linear = sample_without_replacement(rows * cols, sparsity, &mut rng);
        let magnitude = if rank > 0 {
            gross_scale * low_rank.max_abs()
        } else {
            1.0
        };
        for &idx in &linear {
            let v: f64 = lrps_core::Scalar::standard_normal(&mut rng);
            sparse.set(idx / cols, idx % cols, magnitude * v);
        }
    }

    // Normalize the combined signal to unit energy.
    let norm = low_rank.add(&sparse).frobenius_norm();
    if norm == 0.0 {
        return Err(CliError::argument("degenerate zero signal"));
    }
    low_rank.scale_in_place(1.0 / norm);
    sparse.scale_in_place(1.0 / norm);

    let operator = match model {
        ObservationModel::Mask { fraction } => {
            MeasurementOperator::uniform_mask(rows, cols, fraction, derive_seed(seed, &[3]))?
        }
        ObservationModel::Gaussian { p } => {
            MeasurementOperator::gaussian(rows, cols, p, derive_seed(seed, &[3]))?
        }
        ObservationModel::Identity => MeasurementOperator::identity(rows, cols),
    };

    let mut observations = operator.apply(&low_rank.add(&sparse))?;
    if noise_norm > 0.0 {
        let mut rng = chacha_rng(derive_seed(seed, &[4]));
        let mut noise = gaussian_vec::<f64>(observations.len(), &mut rng);
        let norm = lrps_core::dot(&noise, &noise).sqrt();
        if norm > 0.0 {
            for v in &mut noise {
                *v *= noise_norm / norm;
            }
        }
        observations.axpy(1.0, &ObservationVector::from(noise));
    }

    Ok(SyntheticInstance {
        low_rank,
        sparse,
        operator,
        observations,
        noise_norm,
        seed,
    })
}
