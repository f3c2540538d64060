//! Reports: serialized with every number rounded to 12 significant digits so
//! that identical runs give byte-identical JSON.

use std::fmt::Write as _;

use qbroadcast::sdp::SdpCertificate;
use serde::{Serialize, Serializer};

use crate::statefile::StateFile;

/// A number rounded to 12 significant digits on output; non-finite values
/// serialize as the strings `"inf"`, `"-inf"` and `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_nan() {
            s.serialize_str("nan")
        } else if x.is_infinite() {
            s.serialize_str(if x > 0.0 { "inf" } else { "-inf" })
        } else {
            // fold −0 into 0
            s.serialize_f64(round12(x) + 0.0)
        }
    }
}

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let x = round12(self.0) + 0.0;
        if self.0.is_finite() && x != 0.0 && !(1e-4..1e6).contains(&x.abs()) {
            write!(f, "{x:e}")
        } else if self.0.is_finite() {
            write!(f, "{x}")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub label: Option<String>,
    pub dims: Vec<usize>,
    pub sha256: String,
}

impl InputInfo {
    pub fn of(file: &StateFile) -> Self {
        Self {
            label: file.label.clone(),
            dims: file.dims.clone(),
            sha256: file.digest(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: Num,
    /// Accuracy the value is certified to, when it comes from an iterative solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Num>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: Num,
    /// Human-readable pass condition, e.g. `"< 1e-9"`.
    pub condition: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverDiagnostics {
    pub name: String,
    pub status: String,
    pub stalled: bool,
    pub iterations: usize,
    pub primal_residual: Num,
    pub dual_residual: Num,
    pub gap: Num,
    pub primal_value: Num,
    pub dual_value: Num,
}

impl SolverDiagnostics {
    pub fn of(name: &str, c: &SdpCertificate) -> Self {
        Self {
            name: name.into(),
            status: format!("{:?}", c.status).to_lowercase(),
            stalled: c.stalled,
            iterations: c.iterations,
            primal_residual: Num(c.residuals.primal),
            dual_residual: Num(c.residuals.dual),
            gap: Num(c.residuals.gap),
            primal_value: Num(c.primal_value),
            dual_value: Num(c.dual_value),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: &'static str,
    pub inputs: Vec<InputInfo>,
    pub seed: u64,
    pub tolerance: Num,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
    pub solver: Vec<SolverDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(command: &str, seed: u64, tolerance: f64) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            inputs: Vec::new(),
            seed,
            tolerance: Num(tolerance),
            quantities: Vec::new(),
            checks: Vec::new(),
            solver: Vec::new(),
            wall_time_s: None,
        }
    }

    pub fn quantity(&mut self, name: &str, value: f64) {
        self.quantities.push(Quantity {
            name: name.into(),
            value: Num(value),
            tolerance: None,
        });
    }

    pub fn certified(&mut self, name: &str, value: f64, tolerance: f64) {
        self.quantities.push(Quantity {
            name: name.into(),
            value: Num(value),
            tolerance: Some(Num(tolerance)),
        });
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, measured: f64, condition: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            measured: Num(measured),
            condition: condition.into(),
        });
    }

    pub fn solver(&mut self, name: &str, c: &SdpCertificate) {
        self.solver.push(SolverDiagnostics::of(name, c));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} (seed {}, tolerance {})",
            self.command, self.seed, self.tolerance
        );
        for i in &self.inputs {
            let label = i.label.as_deref().unwrap_or("-");
            let _ = writeln!(out, "input   {label}  dims {:?}  sha256 {}", i.dims, &i.sha256[..16]);
        }
        let width = self.quantities.iter().map(|q| q.name.len()).max().unwrap_or(0);
        for q in &self.quantities {
            let tol = q.tolerance.map(|t| format!("  (± {t})")).unwrap_or_default();
            let _ = writeln!(out, "  {:<width$}  {}{tol}", q.name, q.value);
        }
        for s in &self.solver {
            let _ = writeln!(
                out,
                "  sdp {}: {} in {} iterations, residuals primal {:.2e} dual {:.2e} gap {:.2e}",
                s.name, s.status, s.iterations, s.primal_residual.0, s.dual_residual.0, s.gap.0
            );
        }
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "  [{mark}] {}  measured {} (want {})",
                c.name, c.measured, c.condition
            );
        }
        if !self.checks.is_empty() {
            let _ = writeln!(
                out,
                "{} of {} checks passed",
                self.checks.len() - self.failures(),
                self.checks.len()
            );
        }
        if let Some(t) = self.wall_time_s {
            let _ = writeln!(out, "wall time {t:.3} s");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.123_456_789_012_345), 0.123_456_789_012);
        assert_eq!(round12(1.0 - 1e-15), 1.0);
        assert_eq!(serde_json::to_string(&Num(f64::INFINITY)).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&Num(-0.0)).unwrap(), "0.0");
    }
}
