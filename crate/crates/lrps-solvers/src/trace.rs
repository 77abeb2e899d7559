//! Per-iteration solver diagnostics.

use std::io::Write;

use lrps_core::Scalar;

/// One iteration record. Step sizes are absent for SpaRCS (it has none) and
/// the true errors are absent when no ground truth was supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<T> {
    pub iteration: usize,
    /// `||y - A X_i||_2`
    pub residual_norm: T,
    /// `||X_i - X_{i-1}||_F / ||X_i||_F`
    pub relative_change: T,
    pub step_low_rank: Option<T>,
    pub step_sparse: Option<T>,
    pub error_low_rank: Option<T>,
    pub error_sparse: Option<T>,
    /// Wall-clock milliseconds for the iteration (excluded from determinism
    /// comparisons).
    pub millis: f64,
    pub warning: Option<String>,
}

/// Ordered iteration records of one solver run.
#[derive(Debug, Clone, Default)]
pub struct SolverTrace<T> {
    records: Vec<TraceRecord<T>>,
}

impl<T: Scalar> SolverTrace<T> {
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: TraceRecord<T>) {
        if let Some(last) = self.records.last() {
            assert!(
                record.iteration > last.iteration,
                "iteration indices must be strictly increasing"
            );
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord<T>> {
        self.records.last()
    }

    pub fn warnings(&self) -> impl Iterator<Item = (usize, &str)> {
        self.records
            .iter()
            .filter_map(|r| r.warning.as_deref().map(|w| (r.iteration, w)))
    }

    /// Equality of everything the iteration computes deterministically
    /// (wall-clock timing excluded).
    pub fn numeric_eq(&self, other: &Self) -> bool {
        self.records.len() == other.records.len()
            && self.records.iter().zip(&other.records).all(|(a, b)| {
                a.iteration == b.iteration
                    && a.residual_norm == b.residual_norm
                    && a.relative_change == b.relative_change
                    && a.step_low_rank == b.step_low_rank
                    && a.step_sparse == b.step_sparse
                    && a.error_low_rank == b.error_low_rank
                    && a.error_sparse == b.error_sparse
                    && a.warning == b.warning
            })
    }

    /// Serializes as CSV with the fixed header
    /// `iter,residual,rel_change,mu_L,mu_M,err_L,err_M,millis`; optional
    /// columns are left empty when absent.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "iter,residual,rel_change,mu_L,mu_M,err_L,err_M,millis")?;
        let fmt = |v: Option<T>| {
            v.map(|x| format!("{:.17e}", x.to_f64()))
                .unwrap_or_default()
        };
        for r in &self.records {
            writeln!(
                out,
                "{},{:.17e},{:.17e},{},{},{},{},{:.3}",
                r.iteration,
                r.residual_norm.to_f64(),
                r.relative_change.to_f64(),
                fmt(r.step_low_rank),
                fmt(r.step_sparse),
                fmt(r.error_low_rank),
                fmt(r.error_sparse),
                r.millis
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iter: usize) -> TraceRecord<f64> {
        TraceRecord {
            iteration: iter,
            residual_norm: 1.0,
            relative_change: 0.5,
            step_low_rank: Some(1.0),
            step_sparse: None,
            error_low_rank: None,
            error_sparse: None,
            millis: 3.25,
            warning: None,
        }
    }

    #[test]
    #[should_panic(expected = "strictly increasing")]
    fn rejects_non_increasing_iterations() {
        let mut t = SolverTrace::new();
        t.push(record(1));
        t.push(record(1));
    }

    #[test]
    fn csv_has_fixed_header_and_empty_optionals() {
        let mut t = SolverTrace::new();
        t.push(record(1));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iter,residual,rel_change,mu_L,mu_M,err_L,err_M,millis"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("1,"));
        assert!(row.contains(",,")); // empty optional columns
    }

    #[test]
    fn numeric_eq_ignores_wall_clock() {
        let mut a = SolverTrace::new();
        a.push(record(1));
        let mut b = SolverTrace::new();
        let mut r = record(1);
        r.millis = 99.0;
        b.push(r);
        assert!(a.numeric_eq(&b));
    }
}
