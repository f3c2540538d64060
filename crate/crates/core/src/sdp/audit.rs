//! Feasibility audit of a solution, recomputed on the complex problem and
//! sharing nothing with the solver beyond the returned numbers.

use super::ipm::{Residuals, SdpSolution, SdpStatus};
use super::problem::SdpProblem;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditReport {
    /// Most negative eigenvalue over the primal blocks (0 if all are PSD).
    pub primal_min_eigenvalue: f64,
    /// Largest recomputed `|Σ_k Tr(A_k X_k) − b|`, relative to `1 + |b|`.
    pub constraint_residual: f64,
    /// Most negative eigenvalue of the dual slack `Σ y_i A_i − C`, relative to
    /// `1 + ‖C‖`.
    pub dual_slack_min_eigenvalue: f64,
    /// `|Σ Tr(C_k X_k) − primal_value|`.
    pub objective_drift: f64,
    /// `dual_value − primal_value`; nonnegative up to solver tolerance.
    pub gap: f64,
}

impl AuditReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.primal_min_eigenvalue >= -tol
            && self.constraint_residual <= tol
            && self.dual_slack_min_eigenvalue >= -tol
            && self.objective_drift <= tol
            && self.gap >= -tol
    }
}

pub fn audit(p: &SdpProblem, sol: &SdpSolution) -> AuditReport {
    let mut primal_min = 0.0f64;
    for x in &sol.primal_blocks {
        let ev = hermitian_eig(&x.hermitian_part())
            .map(|e| e.min_eigenvalue())
            .unwrap_or(f64::NEG_INFINITY);
        primal_min = primal_min.min(ev);
    }
    let mut residual = 0.0f64;
    for (i, con) in p.constraints().iter().enumerate() {
        let lhs = p.constraint_value(i, &sol.primal_blocks);
        residual = residual.max((lhs - con.rhs).abs() / (1.0 + con.rhs.abs()));
    }
    let mut slack: Vec<ComplexMatrix> = p.objective().iter().map(|c| c.to_dense().scale_real(-1.0)).collect();
    for (con, &y) in p.constraints().iter().zip(&sol.dual_vector) {
        if y != 0.0 {
            for (k, a) in &con.terms {
                slack[*k].add_scaled(crate::Complex64::new(y, 0.0), &a.to_dense());
            }
        }
    }
    let c_norm = p
        .objective()
        .iter()
        .map(|c| c.to_dense().frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt();
    let mut dual_min = 0.0f64;
    for z in &slack {
        let ev = hermitian_eig(&z.hermitian_part())
            .map(|e| e.min_eigenvalue())
            .unwrap_or(f64::NEG_INFINITY);
        dual_min = dual_min.min(ev / (1.0 + c_norm));
    }
    AuditReport {
        primal_min_eigenvalue: primal_min,
        constraint_residual: residual,
        dual_slack_min_eigenvalue: dual_min,
        objective_drift: (p.objective_value(&sol.primal_blocks) - sol.primal_value).abs(),
        gap: sol.dual_value - sol.primal_value,
    }
}

/// Solver diagnostics of one solve together with its audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpCertificate {
    pub status: SdpStatus,
    pub stalled: bool,
    pub iterations: usize,
    pub residuals: Residuals,
    pub primal_value: f64,
    pub dual_value: f64,
    pub audit: AuditReport,
}

impl SdpCertificate {
    pub fn new(p: &SdpProblem, sol: &SdpSolution) -> Self {
        Self {
            status: sol.status,
            stalled: sol.stalled,
            iterations: sol.iterations,
            residuals: sol.residuals,
            primal_value: sol.primal_value,
            dual_value: sol.dual_value,
            audit: audit(p, sol),
        }
    }

    /// Errors unless the solve reached the optimal status.
    pub fn require_optimal(&self, what: &str) -> Result<()> {
        if self.status == SdpStatus::Optimal {
            return Ok(());
        }
        Err(Error::SdpFailure(format!(
            "{what}: status {:?} after {} iterations (primal {:.2e}, dual {:.2e}, gap {:.2e})",
            self.status, self.iterations, self.residuals.primal, self.residuals.dual, self.residuals.gap
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, rng_from_seed};
    use crate::sdp::{fidelity_sdp, solve, SdpOptions, SigmaExpr};

    #[test]
    fn optimal_fidelity_solution_passes() {
        let mut rng = rng_from_seed(6);
        let rho = random_state(&[3], &mut rng);
        let sigma = random_state(&[3], &mut rng);
        let mut p = SdpProblem::new();
        fidelity_sdp(&mut p, rho.matrix(), SigmaExpr::Fixed(sigma.matrix())).unwrap();
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        let rep = audit(&p, &sol);
        assert!(rep.passes(1e-6), "{rep:?}");
        assert!(rep.objective_drift < 1e-9);
    }

    #[test]
    fn tampered_solution_fails() {
        let mut rng = rng_from_seed(7);
        let rho = random_state(&[2], &mut rng);
        let mut p = SdpProblem::new();
        fidelity_sdp(&mut p, rho.matrix(), SigmaExpr::Fixed(rho.matrix())).unwrap();
        let mut sol = solve(&p, &SdpOptions::default()).unwrap();
        sol.primal_blocks[0] = sol.primal_blocks[0].scale_real(2.0);
        assert!(!audit(&p, &sol).passes(1e-6));
    }
}
