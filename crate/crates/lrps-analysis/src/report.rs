//! Analysis report emission: `quantity,value` CSV plus a verdict line.

use std::io::Write;

use lrps_core::Scalar;

use crate::recursion::Verdict;

/// Named scalar quantities plus a stability verdict, ready for emission.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    entries: Vec<(String, f64)>,
    radius: f64,
    verdict: Verdict,
}

impl AnalysisReport {
    pub fn new<T: Scalar>(radius: T) -> Self {
        let radius = radius.to_f64();
        Self {
            entries: Vec::new(),
            radius,
            verdict: if radius < 1.0 {
                Verdict::Converges
            } else {
                Verdict::Diverges
            },
        }
    }

    pub fn push<T: Scalar>(&mut self, quantity: &str, value: T) {
        self.entries.push((quantity.to_string(), value.to_f64()));
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    /// One human-readable line: `STABLE rho=<r>` or `UNSTABLE rho=<r>`.
    pub fn verdict_line(&self) -> String {
        match self.verdict {
            Verdict::Converges => format!("STABLE rho={:.12}", self.radius),
            Verdict::Diverges => format!("UNSTABLE rho={:.12}", self.radius),
        }
    }

    /// CSV body with header `quantity,value`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "quantity,value")?;
        for (name, value) in &self.entries {
            writeln!(out, "{name},{value:.17e}")?;
        }
        writeln!(out, "spectral_radius,{:.17e}", self.radius)?;
        Ok(())
    }
}
