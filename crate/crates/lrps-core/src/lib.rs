//! Dense linear algebra kernels for low-rank plus sparse matrix recovery:
//! one-sided Jacobi SVD, best rank-k and best s-sparse projections, subspace
//! and support set algebra, and a randomized low-rank approximation.
//!
//! All kernels are pure functions of their inputs and generic over the
//! floating-point scalar (see [`Scalar`]); concrete aliases for the common
//! instantiations live at the crate root.

mod error;
mod matrix;
mod random;
mod rank;
mod scalar;
mod subspace;
mod support;
mod svd;

pub use error::CoreError;
pub use matrix::{dot, DenseMatrix};
pub use random::{
    chacha_rng, derive_seed, gaussian_matrix, gaussian_vec, sample_without_replacement,
};
pub use rank::{project_rank_k, randomized_rank_k, DEFAULT_OVERSAMPLE, DEFAULT_POWER_ITERS};
pub use scalar::Scalar;
pub use subspace::{thin_qr_q, SubspaceBasis};
pub use support::{project_sparse_s, restrict_to_support, SupportSet};
pub use svd::{svd, SvdFactors};

/// `f64` dense matrix, the default instantiation throughout the workspace.
pub type MatrixF64 = DenseMatrix<f64>;
/// `f32` dense matrix.
pub type MatrixF32 = DenseMatrix<f32>;
/// `f64` subspace basis.
pub type BasisF64 = SubspaceBasis<f64>;
/// `f32` subspace basis.
pub type BasisF32 = SubspaceBasis<f32>;
/// `f64` SVD factors.
pub type SvdF64 = SvdFactors<f64>;
/// `f32` SVD factors.
pub type SvdF32 = SvdFactors<f32>;
