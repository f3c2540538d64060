//! `F^EB(ρ_AB) = max F(ρ_AB, (id_A ⊗ Λ)ρ_AB)` over entanglement-breaking
//! channels `Λ: B → B`.
//!
//! Upper side: the Choi matrix is relaxed to PPT, which is exact for qubits.
//! Lower side: explicit measure-prepare channels, alternating between
//! optimizing the preparations for a fixed POVM and the POVM for fixed
//! preparations, starting from the IC-POVM.

use num_complex::Complex64;

use super::fmax::add_tp_constraints;
use super::{check_bipartite, compress_a, DEFAULT_MAX_DIM_B};
use crate::error::{Error, Result};
use crate::frames::build_ic_povm;
use crate::linalg::ComplexMatrix;
use crate::measures::fidelity;
use crate::objects::{apply_choi_local, entanglement_breaking, Channel, DensityMatrix, Povm};
use crate::sdp::{
    fidelity_sdp, solve, LinearImage, SdpCertificate, SdpOptions, SdpProblem, SigmaExpr, SparseHermitian,
};

#[derive(Debug, Clone)]
pub struct FebResult {
    /// PPT-relaxation optimum, clamped to `[0, 1]`; equals `F^EB` when
    /// `eb_exact`, and upper-bounds it otherwise.
    pub value: f64,
    pub dual_bound: f64,
    /// True when PPT channels are exactly the entanglement-breaking ones
    /// (`d_B = 2`).
    pub eb_exact: bool,
    /// Fidelity of the best explicit measure-prepare channel found.
    pub lower_bound: f64,
    pub lower_bound_channel: Channel,
    pub certificate: SdpCertificate,
}

pub fn f_eb(rho: &DensityMatrix) -> Result<FebResult> {
    f_eb_with(rho, &SdpOptions::default(), DEFAULT_MAX_DIM_B, 20)
}

pub fn f_eb_with(rho: &DensityMatrix, opts: &SdpOptions, max_dim_b: usize, rounds: usize) -> Result<FebResult> {
    let (_, db) = check_bipartite(rho)?;
    if db > max_dim_b {
        return Err(Error::TooLarge(format!("d_B = {db} exceeds the limit {max_dim_b}")));
    }
    let rc = compress_a(rho)?;
    let da = rc.dims()[0];
    let n = db * db;
    let mut p = SdpProblem::new();
    let j = p.add_block(n);
    let pt = p.add_block(n);
    add_tp_constraints(&mut p, j, db, db);
    let transpose = LinearImage::from_fn(n, |x| x.partial_transpose(&[db, db], &[1]))?;
    p.affine_submatrix(pt, 0, j, &transpose);
    let image = LinearImage::from_fn(n, |x| Ok(apply_choi_local(x, db, db, rc.matrix(), da, 1)))?;
    fidelity_sdp(&mut p, rc.matrix(), SigmaExpr::Affine { var: j, image: &image })?;
    let sol = solve(&p, opts)?;
    let certificate = SdpCertificate::new(&p, &sol);
    certificate.require_optimal("entanglement-breaking fidelity SDP")?;
    let (lower_bound, lower_bound_channel) = measure_prepare_lower_bound(rho, opts, rounds)?;
    Ok(FebResult {
        value: sol.primal_value.clamp(0.0, 1.0),
        dual_bound: sol.dual_value,
        eb_exact: db == 2,
        lower_bound,
        lower_bound_channel,
        certificate,
    })
}

/// `ω_k(M) = Tr_B((I ⊗ M) ρ)` as a matrix on A.
fn conditional(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (da, _) = check_bipartite(rho)?;
    ComplexMatrix::identity(da)
        .kron(m)
        .matmul(rho.matrix())
        .partial_trace(rho.dims(), &[0])
}

fn eb_fidelity(rho: &DensityMatrix, povm: &Povm, preps: &[DensityMatrix]) -> Result<(f64, Channel)> {
    let ch = entanglement_breaking(povm, preps)?;
    let out = ch.apply_on_subsystem(rho, 1)?;
    Ok((fidelity(rho, &out)?, ch))
}

/// Weight of the maximally mixed state mixed into fixed preparations, which
/// keeps the POVM step strictly feasible.
const PREP_MIXING: f64 = 1e-7;

/// Best fidelity over explicit measure-prepare channels with `d_B²` outcomes.
/// Every reported value is the closed-form fidelity of an actual
/// entanglement-breaking channel, hence a lower bound on `F^EB`.
pub fn measure_prepare_lower_bound(rho: &DensityMatrix, opts: &SdpOptions, rounds: usize) -> Result<(f64, Channel)> {
    let rc = compress_a(rho)?;
    let (da, db) = check_bipartite(&rc)?;
    let mut povm = build_ic_povm(db)?.povm().clone();
    let k = povm.len();
    let mixed = DensityMatrix::maximally_mixed(vec![db]);
    let mut preps = vec![mixed.clone(); k];
    let (mut best, mut best_ch) = eb_fidelity(rho, &povm, &preps)?;
    for _ in 0..rounds.max(1) {
        let before = best;
        // preparations for a fixed POVM
        let omegas: Vec<ComplexMatrix> = povm
            .elements()
            .iter()
            .map(|m| conditional(&rc, m))
            .collect::<Result<_>>()?;
        let mut p = SdpProblem::new();
        let blocks: Vec<usize> = (0..k).map(|_| p.add_block(db)).collect();
        for &b in &blocks {
            let mut tr = SparseHermitian::new(db);
            for i in 0..db {
                tr.add(i, i, Complex64::new(1.0, 0.0));
            }
            p.add_constraint(vec![(b, tr)], 1.0);
        }
        let images: Vec<LinearImage> = omegas
            .iter()
            .map(|w| LinearImage::from_fn(db, |tau| Ok(w.kron(tau))))
            .collect::<Result<_>>()?;
        let out = p.add_block(rc.dim());
        let terms: Vec<(usize, &LinearImage)> = blocks.iter().copied().zip(images.iter()).collect();
        p.affine_sum(out, 0, &terms);
        let fix = LinearImage::from_fn(rc.dim(), |x| Ok(x.clone()))?;
        fidelity_sdp(&mut p, rc.matrix(), SigmaExpr::Affine { var: out, image: &fix })?;
        let sol = solve(&p, opts)?;
        if sol.is_optimal() {
            let new_preps: Result<Vec<DensityMatrix>> = blocks
                .iter()
                .map(|&b| DensityMatrix::project_to_nearest_state(vec![db], &sol.primal_blocks[b]))
                .collect();
            if let Ok(np) = new_preps {
                let (f, ch) = eb_fidelity(rho, &povm, &np)?;
                preps = np;
                if f > best {
                    best = f;
                    best_ch = ch;
                }
            }
        }

        // POVM for fixed (slightly mixed) preparations
        let taus: Vec<ComplexMatrix> = preps
            .iter()
            .map(|t| &t.matrix().scale_real(1.0 - PREP_MIXING) + &mixed.matrix().scale_real(PREP_MIXING))
            .collect();
        let mut p = SdpProblem::new();
        let blocks: Vec<usize> = (0..k).map(|_| p.add_block(db)).collect();
        for a in 0..db {
            for b in a..db {
                let re: Vec<_> = blocks
                    .iter()
                    .map(|&m| (m, SparseHermitian::re_entry(db, a, b)))
                    .collect();
                p.add_constraint(re, if a == b { 1.0 } else { 0.0 });
                if a != b {
                    let im: Vec<_> = blocks
                        .iter()
                        .map(|&m| (m, SparseHermitian::im_entry(db, a, b)))
                        .collect();
                    p.add_constraint(im, 0.0);
                }
            }
        }
        let images: Vec<LinearImage> = taus
            .iter()
            .map(|t| LinearImage::from_fn(db, |m| Ok(conditional(&rc, m)?.kron(t))))
            .collect::<Result<_>>()?;
        let out = p.add_block(da * db);
        let terms: Vec<(usize, &LinearImage)> = blocks.iter().copied().zip(images.iter()).collect();
        p.affine_sum(out, 0, &terms);
        fidelity_sdp(&mut p, rc.matrix(), SigmaExpr::Affine { var: out, image: &fix })?;
        let sol = solve(&p, opts)?;
        if sol.is_optimal() {
            if let Some(np) = repair_povm(&sol.primal_blocks[..k]) {
                let (f, ch) = eb_fidelity(rho, &np, &preps)?;
                povm = np;
                if f > best {
                    best = f;
                    best_ch = ch;
                }
            }
        }
        if best - before < 1e-10 {
            break;
        }
    }
    Ok((best, best_ch))
}

/// Clips negative dust and renormalizes `Σ M_k = I` exactly.
fn repair_povm(elements: &[ComplexMatrix]) -> Option<Povm> {
    let d = elements[0].rows();
    let clipped: Vec<ComplexMatrix> = elements
        .iter()
        .map(|m| {
            let eig = crate::linalg::hermitian_eig(&m.hermitian_part()).ok()?;
            Some(eig.reconstruct_with(|l| l.max(0.0)))
        })
        .collect::<Option<_>>()?;
    let mut sum = ComplexMatrix::zeros(d, d);
    for m in &clipped {
        sum += m;
    }
    let s = crate::linalg::inv_sqrt_psd(&sum).ok()?;
    let fixed = clipped
        .iter()
        .map(|m| s.matmul(m).matmul(&s).hermitian_part())
        .collect();
    Povm::new_with_tolerance(fixed, 1e-9).ok()
}
