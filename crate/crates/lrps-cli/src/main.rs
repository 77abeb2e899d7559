//! `lrps`: generate, solve, benchmark and analyze low-rank plus sparse
//! recovery problems.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lrps_analysis::{momentum_contraction, simulate_recursion, AnalysisReport, RipProfile};
use lrps_cli::bench::{run_benchmark, BenchRow, SolverKind};
use lrps_cli::instance::{generate_instance, ObservationModel, DEFAULT_GROSS_SCALE};
use lrps_cli::io::write_matrix;
use lrps_cli::persist::{load_instance, save_instance};
use lrps_cli::rpca::run_rpca;
use lrps_cli::CliError;
use lrps_solvers::{GroundTruth, ProblemSpec, RankProjector, SolverConfig};

#[derive(Parser)]
#[command(
    name = "lrps",
    about = "Low-rank plus sparse matrix recovery from incomplete measurements",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Master seed for all randomness.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Relative-change stopping tolerance.
    #[arg(long, global = true, default_value_t = 1e-4)]
    eta: f64,

    /// Iteration cap for the solvers.
    #[arg(long, global = true, default_value_t = 700)]
    max_iters: usize,

    /// Momentum for the accelerated solver.
    #[arg(long, global = true, default_value_t = 0.25)]
    tau: f64,

    /// Low-rank projector backend: `exact` or `randomized`.
    #[arg(long, global = true, default_value = "exact")]
    projector: String,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

impl GlobalOpts {
    fn solver_config(&self) -> Result<SolverConfig<f64>, CliError> {
        let rank_projector = match self.projector.to_ascii_lowercase().as_str() {
            "exact" => RankProjector::Exact,
            "randomized" => RankProjector::randomized(self.seed ^ 0x5eed),
            other => {
                return Err(CliError::argument(format!(
                    "unknown projector `{other}` (expected exact|randomized)"
                )))
            }
        };
        Ok(SolverConfig {
            tolerance: self.eta,
            max_iterations: self.max_iters,
            momentum: self.tau,
            rank_projector,
            ..SolverConfig::default()
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance into a directory.
    Generate {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Rank budget of the planted low-rank part (0 disables it).
        #[arg(long)]
        rank: usize,
        /// Sparsity budget of the planted sparse part (0 disables it).
        #[arg(long, default_value_t = 0)]
        sparsity: usize,
        /// Observation model: `mask:<fraction>`, `gaussian:<p>`, `identity`.
        #[arg(long, default_value = "mask:0.3")]
        model: String,
        /// Euclidean norm of the additive observation noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Sparse magnitudes relative to the largest low-rank entry.
        #[arg(long, default_value_t = DEFAULT_GROSS_SCALE)]
        gross_scale: f64,
    },

    /// Solve an instance directory produced by `generate`.
    Solve {
        /// Instance directory.
        #[arg(long)]
        instance: PathBuf,
        /// Solver: `sparcs` or `alps`.
        #[arg(long, default_value = "alps")]
        solver: String,
        /// Rank budget (defaults to the planted rank when present).
        #[arg(long)]
        rank: Option<usize>,
        /// Sparsity budget (defaults to the planted sparsity).
        #[arg(long)]
        sparsity: Option<usize>,
    },

    /// Run the matrix-completion benchmark over seeded repetitions.
    Bench {
        /// Configurations `MxN:kK[:sS][:nNOISE][:fFRACTION]`, `;`-separated.
        #[arg(long, default_value = "200x400:k5:n0;200x400:k5:n1e-2")]
        rows: String,
        /// Comma-separated solvers to compare.
        #[arg(long, default_value = "sparcs,alps")]
        solvers: String,
        /// Monte-Carlo repetitions per configuration.
        #[arg(long, default_value_t = 11)]
        reps: usize,
        /// Write zero in the seconds columns so repeated runs are
        /// byte-identical.
        #[arg(long, default_value_t = false)]
        redact_timing: bool,
    },

    /// Sparse plus low-rank decomposition of a complete data matrix.
    Rpca {
        /// Input matrix file (`.csv` or `.bin`); omit to use a synthetic one.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Synthetic fallback dimensions, `ROWSxCOLS`.
        #[arg(long, default_value = "100x100")]
        synthetic: String,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        sparsity: usize,
        #[arg(long, default_value = "alps")]
        solver: String,
        /// Sparse magnitude scale of the synthetic fallback. The alternating
        /// iteration recovers planted decompositions reliably up to a few
        /// times the low-rank entry scale.
        #[arg(long, default_value_t = 3.0)]
        gross_scale: f64,
    },

    /// Stability analysis: contraction matrices and RIP estimation.
    Analyze {
        /// Rank-family RIP constant at order 4k.
        #[arg(long, default_value_t = 0.09)]
        delta_rank: f64,
        /// Sparse-family RIP constant at order 4s.
        #[arg(long, default_value_t = 0.095)]
        delta_sparse: f64,
        /// Joint (cross) RIP constant.
        #[arg(long, default_value_t = 0.095)]
        delta_joint: f64,
        /// Also estimate the constants empirically on a seeded operator:
        /// `gaussian:<p>`, `mask:<fraction>` or `identity`.
        #[arg(long)]
        estimate_op: Option<String>,
        #[arg(long, default_value_t = 20)]
        rows: usize,
        #[arg(long, default_value_t = 20)]
        cols: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 5)]
        sparsity: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn parse_model(text: &str) -> Result<ObservationModel, CliError> {
    let lower = text.trim().to_ascii_lowercase();
    if lower == "identity" {
        return Ok(ObservationModel::Identity);
    }
    if let Some(frac) = lower.strip_prefix("mask:") {
        let fraction: f64 = frac
            .parse()
            .map_err(|e| CliError::argument(format!("mask fraction: {e}")))?;
        return Ok(ObservationModel::Mask { fraction });
    }
    if let Some(p) = lower.strip_prefix("gaussian:") {
        let p: usize = p
            .parse()
            .map_err(|e| CliError::argument(format!("gaussian p: {e}")))?;
        return Ok(ObservationModel::Gaussian { p });
    }
    Err(CliError::argument(format!(
        "unknown model `{text}` (expected mask:<f>, gaussian:<p>, identity)"
    )))
}

fn parse_shape(text: &str) -> Result<(usize, usize), CliError> {
    let (r, c) = text
        .split_once('x')
        .ok_or_else(|| CliError::argument(format!("expected ROWSxCOLS, got `{text}`")))?;
    Ok((
        r.trim()
            .parse()
            .map_err(|e| CliError::argument(format!("rows: {e}")))?,
        c.trim()
            .parse()
            .map_err(|e| CliError::argument(format!("cols: {e}")))?,
    ))
}

/// Parses one bench row `MxN:kK[:sS][:nNOISE][:fFRACTION]`.
fn parse_bench_row(text: &str) -> Result<BenchRow, CliError> {
    let mut parts = text.trim().split(':');
    let shape = parts
        .next()
        .ok_or_else(|| CliError::argument("empty bench row"))?;
    let (rows, cols) = parse_shape(shape)?;
    let mut rank = None;
    let mut sparsity = 0usize;
    let mut noise = 0.0f64;
    let mut fraction = 0.3f64;
    for field in parts {
        let field = field.trim();
        if let Some(v) = field.strip_prefix('k') {
            rank = Some(
                v.parse()
                    .map_err(|e| CliError::argument(format!("rank: {e}")))?,
            );
        } else if let Some(v) = field.strip_prefix('s') {
            sparsity = v
                .parse()
                .map_err(|e| CliError::argument(format!("sparsity: {e}")))?;
        } else if let Some(v) = field.strip_prefix('n') {
            noise = v
                .parse()
                .map_err(|e| CliError::argument(format!("noise: {e}")))?;
        } else if let Some(v) = field.strip_prefix('f') {
            fraction = v
                .parse()
                .map_err(|e| CliError::argument(format!("fraction: {e}")))?;
        } else {
            return Err(CliError::argument(format!("unknown bench field `{field}`")));
        }
    }
    Ok(BenchRow {
        rows,
        cols,
        rank: rank.ok_or_else(|| CliError::argument("bench row needs a kK field"))?,
        sparsity,
        noise_norm: noise,
        model: ObservationModel::Mask { fraction },
    })
}

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let global = cli.global.clone();
    let config = global.solver_config()?;
    match cli.command {
        Command::Generate {
            rows,
            cols,
            rank,
            sparsity,
            model,
            noise,
            gross_scale,
        } => {
            let model = parse_model(&model)?;
            let inst = generate_instance(
                rows,
                cols,
                rank,
                sparsity,
                model,
                noise,
                gross_scale,
                global.seed,
            )?;
            ensure_out(&global.out)?;
            save_instance(&global.out, &inst)?;
            println!(
                "generated {rows}x{cols} instance (rank {rank}, sparsity {sparsity}, p {}) in {}",
                inst.operator.output_dim(),
                global.out.display()
            );
            Ok(())
        }

        Command::Solve {
            instance,
            solver,
            rank,
            sparsity,
        } => {
            let solver = SolverKind::parse(&solver)?;
            let inst = load_instance(&instance)?;
            let rank_budget = rank.unwrap_or_else(|| planted_rank(&inst.low_rank));
            let sparsity_budget = sparsity.unwrap_or_else(|| count_nonzeros(&inst.sparse));
            let problem = ProblemSpec {
                operator: inst.operator.clone(),
                observations: inst.observations.clone(),
                rank_budget,
                sparsity_budget,
            };
            let truth = GroundTruth {
                low_rank: &inst.low_rank,
                sparse: &inst.sparse,
            };
            let (state, trace) = solver.run(&problem, &config, Some(truth))?;
            ensure_out(&global.out)?;
            write_matrix(&global.out.join("L_hat.bin"), &state.low_rank)?;
            write_matrix(&global.out.join("M_hat.bin"), &state.sparse)?;
            let trace_file = fs::File::create(global.out.join("trace.csv"))
                .map_err(|e| CliError::io(&global.out, e))?;
            trace
                .write_csv(&mut BufWriter::new(trace_file))
                .map_err(|e| CliError::io(&global.out, e))?;
            let signal = inst.signal();
            let rel_err = state.estimate.sub(&signal).frobenius_norm() / signal.frobenius_norm();
            println!(
                "{} finished: iterations {} (converged {}), relative error {rel_err:.6e}",
                solver.name(),
                state.iterations,
                state.converged
            );
            Ok(())
        }

        Command::Bench {
            rows,
            solvers,
            reps,
            redact_timing,
        } => {
            let rows: Vec<BenchRow> = rows
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(parse_bench_row)
                .collect::<Result<_, _>>()?;
            let solvers: Vec<SolverKind> = solvers
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(SolverKind::parse)
                .collect::<Result<_, _>>()?;
            let report = run_benchmark(&rows, &solvers, reps, global.seed, &config)?;
            ensure_out(&global.out)?;
            let report_file = fs::File::create(global.out.join("report.csv"))
                .map_err(|e| CliError::io(&global.out, e))?;
            report
                .write_report_csv(&mut BufWriter::new(report_file), redact_timing)
                .map_err(|e| CliError::io(&global.out, e))?;
            let runs_file = fs::File::create(global.out.join("runs.csv"))
                .map_err(|e| CliError::io(&global.out, e))?;
            report
                .write_runs_csv(&mut BufWriter::new(runs_file), redact_timing)
                .map_err(|e| CliError::io(&global.out, e))?;
            for row in &report.rows {
                println!(
                    "{} {}: median iters {:.1}, median rel err {:.3e}, failures {}",
                    row.config, row.solver, row.median_iters, row.median_rel_err, row.failures
                );
            }
            Ok(())
        }

        Command::Rpca {
            input,
            synthetic,
            rank,
            sparsity,
            solver,
            gross_scale,
        } => {
            let solver = SolverKind::parse(&solver)?;
            let data = match input {
                Some(path) => lrps_cli::io::read_matrix(&path)?,
                None => {
                    let (r, c) = parse_shape(&synthetic)?;
                    generate_instance(
                        r,
                        c,
                        rank,
                        sparsity,
                        ObservationModel::Identity,
                        0.0,
                        gross_scale,
                        global.seed,
                    )?
                    .signal()
                }
            };
            let outcome = run_rpca(&data, rank, sparsity, solver, &config)?;
            ensure_out(&global.out)?;
            write_matrix(&global.out.join("L_hat.bin"), &outcome.low_rank)?;
            write_matrix(&global.out.join("M_hat.bin"), &outcome.sparse)?;
            println!(
                "rpca ({}) finished: iterations {} (converged {}), residual {:.3e}, {:.2}s",
                solver.name(),
                outcome.iterations,
                outcome.converged,
                outcome.residual,
                outcome.seconds
            );
            Ok(())
        }

        Command::Analyze {
            delta_rank,
            delta_sparse,
            delta_joint,
            estimate_op,
            rows,
            cols,
            rank,
            sparsity,
            trials,
        } => {
            let profile = match &estimate_op {
                Some(descriptor) => {
                    let model = parse_model(descriptor)?;
                    let op = match model {
                        ObservationModel::Mask { fraction } => {
                            lrps_ops::MeasurementOperator::uniform_mask(
                                rows,
                                cols,
                                fraction,
                                global.seed,
                            )?
                        }
                        ObservationModel::Gaussian { p } => {
                            lrps_ops::MeasurementOperator::gaussian(rows, cols, p, global.seed)?
                        }
                        ObservationModel::Identity => {
                            lrps_ops::MeasurementOperator::identity(rows, cols)
                        }
                    };
                    RipProfile::estimate(&op, rank, sparsity, trials, global.seed)?
                }
                None => RipProfile::from_order4(delta_rank, delta_sparse, delta_joint)?,
            };
            let contraction = momentum_contraction(&profile, global.tau)?;
            let rho = contraction.spectral_radius_reduced();
            let generic = contraction.spectral_radius_generic()?;
            let envelope =
                simulate_recursion(&contraction.companion(), &[1.0, 1.0, 1.0, 1.0], 500)?;

            let mut report = AnalysisReport::new(rho);
            report.push("delta_rank_3k", profile.delta_rank_3k);
            report.push("delta_rank_4k", profile.delta_rank_4k);
            report.push("delta_sparse_3s", profile.delta_sparse_3s);
            report.push("delta_sparse_4s", profile.delta_sparse_4s);
            report.push("delta_joint_3k_3s", profile.delta_joint_3k_3s);
            report.push("delta_joint_3k_4s", profile.delta_joint_3k_4s);
            report.push("contraction_alpha", contraction.delta[0][0]);
            report.push("contraction_beta", contraction.delta[0][1]);
            report.push("contraction_zeta", contraction.delta[1][0]);
            report.push("contraction_gamma", contraction.delta[1][1]);
            report.push("momentum", global.tau);
            report.push("spectral_radius_generic", generic);
            let last = envelope.trajectory.last().expect("nonempty trajectory");
            report.push(
                "envelope_final_max",
                last.iter().fold(0.0f64, |a, &b| a.max(b)),
            );

            ensure_out(&global.out)?;
            let file = fs::File::create(global.out.join("analysis.csv"))
                .map_err(|e| CliError::io(&global.out, e))?;
            report
                .write_csv(&mut BufWriter::new(file))
                .map_err(|e| CliError::io(&global.out, e))?;
            println!("{}", report.verdict_line());
            Ok(())
        }
    }
}

fn planted_rank(m: &lrps_core::MatrixF64) -> usize {
    match lrps_core::svd(m, 1e-12) {
        Ok(f) => {
            let cut = f.singular_values.first().copied().unwrap_or(0.0) * 1e-9;
            f.singular_values.iter().filter(|&&s| s > cut).count()
        }
        Err(_) => 0,
    }
}

fn count_nonzeros(m: &lrps_core::MatrixF64) -> usize {
    m.data().iter().filter(|&&v| v != 0.0).count()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
