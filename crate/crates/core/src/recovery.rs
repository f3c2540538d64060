//! Petz recovery map, optimal recovery channels by SDP, and the
//! recoverability bounds `F ≥ 2^{−I(A:C|B)/2}` and
//! `F(ρ, (R∘Γ)ρ) ≥ 2^{−(S(ρ‖σ) − S(Γρ‖Γσ))/2}`.

use num_complex::Complex64;

use crate::broadcast::{add_tp_constraints, compress_a};
use crate::error::{Error, Result};
use crate::linalg::{inv_sqrt_psd, sqrt_psd, support_projector, trace_norm, ComplexMatrix};
use crate::measures::{conditional_mutual_information, fidelity, relative_entropy, support_residual, SUPPORT_TOL};
use crate::objects::{apply_choi_local, assemble_choi, Channel, DensityMatrix};
use crate::sdp::{fidelity_sdp, solve, LinearImage, SdpCertificate, SdpOptions, SdpProblem, SigmaExpr};

/// `R(τ) = σ^{1/2} Γ†[(Γσ)^{−1/2} τ (Γσ)^{−1/2}] σ^{1/2} + Tr((I − Π)τ) σ`,
/// where `Π` projects onto `supp Γσ`; the second term routes inputs outside
/// the support to `σ` and makes `R` trace preserving everywhere.
pub fn petz_map(sigma: &DensityMatrix, gamma: &Channel) -> Result<Channel> {
    if sigma.dims() != gamma.in_dims() {
        return Err(Error::DimensionMismatch {
            expected: gamma.in_dim(),
            found: sigma.dim(),
        });
    }
    let image = gamma.apply(sigma)?;
    let g = inv_sqrt_psd(image.matrix())?;
    let pi = support_projector(image.matrix())?;
    let s = sqrt_psd(sigma.matrix())?;
    let d = gamma.out_dim();
    let mut blocks = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let unit = ComplexMatrix::unit(d, d, i, j);
            let inner = gamma.apply_dual_kraus(&g.matmul(&unit).matmul(&g));
            let mut out = s.matmul(&inner).matmul(&s);
            let outside = if i == j { 1.0 } else { 0.0 } - pi[(j, i)].re;
            let outside_im = -pi[(j, i)].im;
            out.add_scaled(Complex64::new(outside, outside_im), sigma.matrix());
            blocks.push(out);
        }
    }
    let choi = assemble_choi(d, &blocks);
    Channel::from_choi_with_tolerance(
        gamma.out_dims().to_vec(),
        sigma.dims().to_vec(),
        choi.hermitian_part(),
        1e-8,
    )
}

fn check_tripartite(rho: &DensityMatrix) -> Result<(usize, usize, usize)> {
    match rho.dims() {
        &[a, b, c] => Ok((a, b, c)),
        dims => Err(Error::InvalidSubsystems(format!(
            "expected a tripartite state A⊗B⊗C, got dims {dims:?}"
        ))),
    }
}

#[derive(Debug, Clone)]
pub struct PetzRecovery {
    /// `F(ρ_ABC, (id_A ⊗ R)ρ_AB)`.
    pub fidelity: f64,
    /// The map `R: B → BC`, built from `ρ_BC` alone.
    pub map: Channel,
    /// `‖(R ∘ Tr_C)ρ_BC − ρ_BC‖₁`.
    pub sigma_residual: f64,
}

/// The transpose-channel recovery `R_{B→BC}` (Petz map of `Tr_C` at `ρ_BC`)
/// applied to B of `ρ_AB`.
pub fn petz_recovery_fidelity(rho: &DensityMatrix) -> Result<PetzRecovery> {
    let (_, db, dc) = check_tripartite(rho)?;
    let rho_bc = rho.reduced(&[1, 2])?;
    let trace_c = Channel::partial_trace(vec![db, dc], &[0])?;
    let map = petz_map(&rho_bc, &trace_c)?;
    let recovered_bc = map.apply(&trace_c.apply(&rho_bc)?)?;
    let sigma_residual = trace_norm(&(recovered_bc.matrix() - rho_bc.matrix()));
    let rho_ab = rho.reduced(&[0, 1])?;
    let out = map.apply_on_subsystem(&rho_ab, 1)?;
    Ok(PetzRecovery {
        fidelity: fidelity(rho, &out)?,
        map,
        sigma_residual,
    })
}

#[derive(Debug, Clone)]
pub struct OptimalRecovery {
    /// Certified SDP optimum, clamped to `[0, 1]`.
    pub fidelity: f64,
    pub dual_bound: f64,
    /// An optimal `R: B → BC`.
    pub map: Channel,
    /// Closed-form fidelity reached by `map`.
    pub achieved: f64,
    pub certificate: SdpCertificate,
}

/// Maximizes `F(ρ_ABC, (id_A ⊗ R)ρ_AB)` over channels `R: B → BC`.
pub fn optimal_recovery_fidelity(rho: &DensityMatrix, opts: &SdpOptions) -> Result<OptimalRecovery> {
    let (_, db, dc) = check_tripartite(rho)?;
    // restricting A to supp ρ_A leaves every fidelity unchanged
    let rc = compress_a(rho)?;
    let da = rc.dims()[0];
    let rho_ab = rc.reduced(&[0, 1])?;
    let n = db * db * dc;
    let mut p = SdpProblem::new();
    let j = p.add_block(n);
    add_tp_constraints(&mut p, j, db, db * dc);
    let image = LinearImage::from_fn(n, |x| Ok(apply_choi_local(x, db, db * dc, rho_ab.matrix(), da, 1)))?;
    fidelity_sdp(&mut p, rc.matrix(), SigmaExpr::Affine { var: j, image: &image })?;
    let sol = solve(&p, opts)?;
    let certificate = SdpCertificate::new(&p, &sol);
    certificate.require_optimal("recovery fidelity SDP")?;
    let map = Channel::from_choi_projected(vec![db], vec![db, dc], &sol.primal_blocks[j])?;
    let out = map.apply_on_subsystem(&rho.reduced(&[0, 1])?, 1)?;
    Ok(OptimalRecovery {
        fidelity: sol.primal_value.clamp(0.0, 1.0),
        dual_bound: sol.dual_value,
        achieved: fidelity(rho, &out)?,
        map,
        certificate,
    })
}

#[derive(Debug, Clone)]
pub struct RecoveryReport {
    /// `I(A:C|B)` in bits.
    pub cmi: f64,
    pub petz_fidelity: f64,
    pub optimal_fidelity: f64,
    /// `2^{−cmi/2}`.
    pub bound: f64,
    /// Petz fixed-point residual `‖(R ∘ Tr_C)ρ_BC − ρ_BC‖₁`.
    pub sigma_recovery_residual: f64,
    pub petz: PetzRecovery,
    pub optimal: OptimalRecovery,
}

impl RecoveryReport {
    pub fn bound_holds(&self, tol: f64) -> bool {
        self.optimal_fidelity >= self.bound - tol
    }
}

pub fn recovery_report(rho: &DensityMatrix, opts: &SdpOptions) -> Result<RecoveryReport> {
    check_tripartite(rho)?;
    let cmi = conditional_mutual_information(rho, &[0], &[2], &[1])?;
    let petz = petz_recovery_fidelity(rho)?;
    let optimal = optimal_recovery_fidelity(rho, opts)?;
    Ok(RecoveryReport {
        cmi,
        petz_fidelity: petz.fidelity,
        optimal_fidelity: optimal.fidelity,
        bound: 2f64.powf(-cmi / 2.0),
        sigma_recovery_residual: petz.sigma_residual,
        petz,
        optimal,
    })
}

#[derive(Debug, Clone)]
pub struct RelativeEntropyRecovery {
    /// `S(ρ‖σ) − S(Γρ‖Γσ)` in bits.
    pub drop: f64,
    /// `2^{−drop/2}`.
    pub bound: f64,
    /// `F(ρ, (R_P ∘ Γ)ρ)` for the Petz map `R_P` of `(σ, Γ)`.
    pub petz_fidelity: f64,
    pub petz_meets_bound: bool,
    /// Best `F(ρ, (R ∘ Γ)ρ)` over channels with `(R ∘ Γ)σ = σ`.
    pub optimal_fidelity: f64,
    pub optimal_meets_bound: bool,
    pub certificate: SdpCertificate,
}

/// Tolerance on the bound comparisons.
const BOUND_TOL: f64 = 1e-6;

pub fn relative_entropy_recovery_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    gamma: &Channel,
    opts: &SdpOptions,
) -> Result<RelativeEntropyRecovery> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: rho.dim(),
        });
    }
    let res = support_residual(rho.matrix(), sigma.matrix())?;
    if res >= SUPPORT_TOL {
        return Err(Error::SupportViolation(res));
    }
    let g_rho = gamma.apply(rho)?;
    let g_sigma = gamma.apply(sigma)?;
    let before = relative_entropy(rho, sigma)?;
    let after = relative_entropy(&g_rho, &g_sigma)?;
    let drop = (before.value() - after.value()).max(0.0);
    let bound = 2f64.powf(-drop / 2.0);

    let petz = petz_map(sigma, gamma)?;
    let petz_fidelity = fidelity(rho, &petz.apply(&g_rho)?)?;

    let (d_out, d_in) = (gamma.out_dim(), gamma.in_dim());
    let n = d_out * d_in;
    let mut p = SdpProblem::new();
    let j = p.add_block(n);
    add_tp_constraints(&mut p, j, d_out, d_in);
    let on_sigma = LinearImage::from_fn(n, |x| Ok(apply_choi_local(x, d_out, d_in, g_sigma.matrix(), 1, 1)))?;
    p.constrain_image(j, &on_sigma, sigma.matrix());
    let on_rho = LinearImage::from_fn(n, |x| Ok(apply_choi_local(x, d_out, d_in, g_rho.matrix(), 1, 1)))?;
    fidelity_sdp(&mut p, rho.matrix(), SigmaExpr::Affine { var: j, image: &on_rho })?;
    let sol = solve(&p, opts)?;
    let certificate = SdpCertificate::new(&p, &sol);
    certificate.require_optimal("relative-entropy recovery SDP")?;
    let optimal_fidelity = sol.primal_value.clamp(0.0, 1.0);
    Ok(RelativeEntropyRecovery {
        drop,
        bound,
        petz_fidelity,
        petz_meets_bound: petz_fidelity >= bound - BOUND_TOL,
        optimal_fidelity,
        optimal_meets_bound: optimal_fidelity >= bound - BOUND_TOL,
        certificate,
    })
}
