//! Benchmark orchestration: repeated seeded runs, medians, report CSVs.

use std::io::Write;
use std::time::Instant;

use lrps_core::derive_seed;
use lrps_solvers::{
    alps_solve, sparcs_solve, GroundTruth, ProblemSpec, SolverConfig, SolverState, SolverTrace,
};

use crate::instance::{
    generate_instance, ObservationModel, SyntheticInstance, DEFAULT_GROSS_SCALE,
};
use crate::CliError;

/// Solver selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Sparcs,
    Alps,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Sparcs => "sparcs",
            SolverKind::Alps => "alps",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sparcs" => Ok(SolverKind::Sparcs),
            "alps" | "matrix-alps" | "matrixalps" => Ok(SolverKind::Alps),
            other => Err(CliError::argument(format!("unknown solver `{other}`"))),
        }
    }

    pub fn run(
        &self,
        problem: &ProblemSpec<f64>,
        config: &SolverConfig<f64>,
        truth: Option<GroundTruth<'_, f64>>,
    ) -> Result<(SolverState<f64>, SolverTrace<f64>), lrps_solvers::SolverError> {
        match self {
            SolverKind::Sparcs => sparcs_solve(problem, config, truth),
            SolverKind::Alps => alps_solve(problem, config, truth),
        }
    }
}

/// One benchmark configuration: a completion/recovery problem shape.
#[derive(Debug, Clone, Copy)]
pub struct BenchRow {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub sparsity: usize,
    pub noise_norm: f64,
    pub model: ObservationModel,
}

impl BenchRow {
    pub fn label(&self) -> String {
        let model = match self.model {
            ObservationModel::Mask { fraction } => format!("mask{fraction}"),
            ObservationModel::Gaussian { p } => format!("gauss{p}"),
            ObservationModel::Identity => "identity".to_string(),
        };
        format!(
            "{}x{}-k{}-s{}-n{:.0e}-{model}",
            self.rows, self.cols, self.rank, self.sparsity, self.noise_norm
        )
    }
}

/// Outcome of one (config, solver, rep) run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: String,
    pub solver: &'static str,
    pub rep: usize,
    pub iterations: usize,
    pub relative_error: f64,
    pub seconds: f64,
    pub converged: bool,
    pub instance_hash: u64,
    pub failed: bool,
}

/// Aggregated per-(config, solver) medians.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub config: String,
    pub solver: &'static str,
    pub median_iters: f64,
    pub median_rel_err: f64,
    pub median_secs: f64,
    pub reps: usize,
    pub failures: usize,
}

/// A full benchmark report plus the per-run details behind it.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub runs: Vec<RunRecord>,
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite metric"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Runs every solver on identical instances (common per-rep seeds) for each
/// configuration and aggregates medians over the completed runs.
pub fn run_benchmark(
    rows: &[BenchRow],
    solvers: &[SolverKind],
    reps: usize,
    master_seed: u64,
    config: &SolverConfig<f64>,
) -> Result<ExperimentReport, CliError> {
    if reps == 0 {
        return Err(CliError::argument("reps must be >= 1"));
    }
    if solvers.is_empty() {
        return Err(CliError::argument("at least one solver required"));
    }
    let mut runs = Vec::new();
    let mut report_rows = Vec::new();

    for (config_idx, row) in rows.iter().enumerate() {
        let mut per_solver: Vec<(SolverKind, Vec<RunRecord>)> =
            solvers.iter().map(|s| (*s, Vec::new())).collect();

        for rep in 0..reps {
            let inst_seed = derive_seed(master_seed, &[config_idx as u64, rep as u64]);
            let instance = generate_instance(
                row.rows,
                row.cols,
                row.rank,
                row.sparsity,
                row.model,
                row.noise_norm,
                DEFAULT_GROSS_SCALE,
                inst_seed,
            )?;
            let hash = instance.content_hash();

            for (solver, records) in per_solver.iter_mut() {
                records.push(run_one(row, *solver, rep, &instance, hash, config));
            }
        }

        for (solver, records) in per_solver {
            let completed: Vec<&RunRecord> = records.iter().filter(|r| !r.failed).collect();
            let failures = records.len() - completed.len();
            let mut iters: Vec<f64> = completed.iter().map(|r| r.iterations as f64).collect();
            let mut errs: Vec<f64> = completed.iter().map(|r| r.relative_error).collect();
            let mut secs: Vec<f64> = completed.iter().map(|r| r.seconds).collect();
            report_rows.push(ReportRow {
                config: row.label(),
                solver: solver.name(),
                median_iters: median(&mut iters),
                median_rel_err: median(&mut errs),
                median_secs: median(&mut secs),
                reps,
                failures,
            });
            runs.extend(records);
        }
    }
    Ok(ExperimentReport {
        rows: report_rows,
        runs,
    })
}

/// Recovery metric used everywhere: `||estimate - truth||_F / ||truth||_F`.
pub fn relative_error(estimate: &lrps_core::MatrixF64, truth: &lrps_core::MatrixF64) -> f64 {
    estimate.sub(truth).frobenius_norm() / truth.frobenius_norm()
}

fn run_one(
    row: &BenchRow,
    solver: SolverKind,
    rep: usize,
    instance: &SyntheticInstance,
    hash: u64,
    config: &SolverConfig<f64>,
) -> RunRecord {
    let problem = ProblemSpec {
        operator: instance.operator.clone(),
        observations: instance.observations.clone(),
        rank_budget: row.rank,
        sparsity_budget: row.sparsity,
    };
    let truth = GroundTruth {
        low_rank: &instance.low_rank,
        sparse: &instance.sparse,
    };
    let signal = instance.signal();
    let started = Instant::now();
    match solver.run(&problem, config, Some(truth)) {
        Ok((state, _trace)) => {
            let err = relative_error(&state.estimate, &signal);
            RunRecord {
                config: row.label(),
                solver: solver.name(),
                rep,
                iterations: state.iterations,
                relative_error: err,
                seconds: started.elapsed().as_secs_f64(),
                converged: state.converged,
                instance_hash: hash,
                failed: false,
            }
        }
        Err(_) => RunRecord {
            config: row.label(),
            solver: solver.name(),
            rep,
            iterations: 0,
            relative_error: f64::NAN,
            seconds: started.elapsed().as_secs_f64(),
            converged: false,
            instance_hash: hash,
            failed: true,
        },
    }
}

impl ExperimentReport {
    /// Report CSV with the fixed header
    /// `config,solver,median_iters,median_rel_err,median_secs,reps,failures`.
    /// With `redact_timing` the seconds column is written as zero so the file
    /// is byte-identical across repeated runs with the same seed.
    pub fn write_report_csv(
        &self,
        out: &mut impl Write,
        redact_timing: bool,
    ) -> std::io::Result<()> {
        writeln!(
            out,
            "config,solver,median_iters,median_rel_err,median_secs,reps,failures"
        )?;
        for r in &self.rows {
            let secs = if redact_timing { 0.0 } else { r.median_secs };
            writeln!(
                out,
                "{},{},{:.1},{:.6e},{:.6},{},{}",
                r.config, r.solver, r.median_iters, r.median_rel_err, secs, r.reps, r.failures
            )?;
        }
        Ok(())
    }

    /// Per-run detail CSV with header
    /// `config,solver,rep,iters,rel_err,secs,converged,instance_hash`.
    pub fn write_runs_csv(&self, out: &mut impl Write, redact_timing: bool) -> std::io::Result<()> {
        writeln!(
            out,
            "config,solver,rep,iters,rel_err,secs,converged,instance_hash"
        )?;
        for r in &self.runs {
            let secs = if redact_timing { 0.0 } else { r.seconds };
            writeln!(
                out,
                "{},{},{},{},{:.6e},{:.6},{},{:016x}",
                r.config,
                r.solver,
                r.rep,
                r.iterations,
                r.relative_error,
                secs,
                r.converged,
                r.instance_hash
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_handles_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn relative_error_matches_hand_computed_2x2() {
        use lrps_core::MatrixF64;
        // truth [[3,0],[4,0]] has Frobenius norm 5; the estimate differs by
        // [[0,0],[4,0]], so the relative error is 4/5.
        let truth = MatrixF64::from_rows(&[&[3.0, 0.0], &[4.0, 0.0]]);
        let estimate = MatrixF64::from_rows(&[&[3.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(relative_error(&estimate, &truth), 0.8);
        assert_eq!(relative_error(&truth, &truth), 0.0);
    }

    #[test]
    fn common_random_numbers_within_a_rep() {
        let rows = [BenchRow {
            rows: 16,
            cols: 12,
            rank: 1,
            sparsity: 0,
            noise_norm: 0.0,
            model: ObservationModel::Mask { fraction: 0.6 },
        }];
        let report = run_benchmark(
            &rows,
            &[SolverKind::Alps, SolverKind::Sparcs],
            2,
            42,
            &SolverConfig::default(),
        )
        .unwrap();
        for rep in 0..2 {
            let hashes: Vec<u64> = report
                .runs
                .iter()
                .filter(|r| r.rep == rep)
                .map(|r| r.instance_hash)
                .collect();
            assert_eq!(hashes.len(), 2);
            assert_eq!(hashes[0], hashes[1], "solvers saw different instances");
        }
    }

    #[test]
    fn report_csv_fixed_schema_and_redaction() {
        let rows = [BenchRow {
            rows: 10,
            cols: 10,
            rank: 1,
            sparsity: 0,
            noise_norm: 0.0,
            model: ObservationModel::Identity,
        }];
        let report =
            run_benchmark(&rows, &[SolverKind::Alps], 1, 7, &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        report.write_report_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text
            .starts_with("config,solver,median_iters,median_rel_err,median_secs,reps,failures\n"));
        assert!(text.contains(",0.000000,"), "timing not redacted: {text}");
    }
}
