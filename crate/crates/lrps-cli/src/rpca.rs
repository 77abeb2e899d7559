//! Robust PCA: sparse plus low-rank decomposition of a complete data matrix.

use std::time::Instant;

use lrps_core::MatrixF64;
use lrps_ops::{MeasurementOperator, OperatorTag};
use lrps_solvers::{ProblemSpec, SolverConfig, SolverState};

use crate::bench::SolverKind;
use crate::CliError;

/// Result of an RPCA decomposition.
#[derive(Debug, Clone)]
pub struct RpcaOutcome {
    pub low_rank: MatrixF64,
    pub sparse: MatrixF64,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
    /// `||Y - L - M||_F / ||Y||_F`
    pub residual: f64,
}

/// Decomposes a fully observed matrix `Y` into a rank-k plus s-sparse pair.
/// For image stacks, each frame is one column of `Y`.
pub fn run_rpca(
    data: &MatrixF64,
    rank: usize,
    sparsity: usize,
    solver: SolverKind,
    config: &SolverConfig<f64>,
) -> Result<RpcaOutcome, CliError> {
    let (m, n) = data.shape();
    let operator = MeasurementOperator::identity(m, n);
    run_rpca_with_operator(data, operator, rank, sparsity, solver, config)
}

/// RPCA entry point that checks the operator really is the identity; partial
/// observations belong to `solve`, not this command.
pub fn run_rpca_with_operator(
    data: &MatrixF64,
    operator: MeasurementOperator<f64>,
    rank: usize,
    sparsity: usize,
    solver: SolverKind,
    config: &SolverConfig<f64>,
) -> Result<RpcaOutcome, CliError> {
    if operator.tag() != OperatorTag::Identity {
        return Err(CliError::argument(
            "rpca requires complete data (identity operator)",
        ));
    }
    if operator.input_shape() != data.shape() {
        return Err(CliError::argument("operator shape does not match data"));
    }
    let observations = operator.apply(data)?;
    let problem = ProblemSpec {
        operator,
        observations,
        rank_budget: rank,
        sparsity_budget: sparsity,
    };
    let started = Instant::now();
    let (state, _trace): (SolverState<f64>, _) = solver
        .run(&problem, config, None)
        .map_err(CliError::Solver)?;
    let seconds = started.elapsed().as_secs_f64();
    let residual = data.sub(&state.estimate).frobenius_norm() / data.frobenius_norm().max(1e-300);
    Ok(RpcaOutcome {
        low_rank: state.low_rank,
        sparse: state.sparse,
        iterations: state.iterations,
        converged: state.converged,
        seconds,
        residual,
    })
}
