//! `F^max(ρ_AB) = max F(ρ_AB, Tr_{B₁}(id_A ⊗ Λ)ρ_AB)` over channels
//! `Λ: B → B₁B₂` invariant under the swap of the two outputs.

use num_complex::Complex64;

use super::{check_bipartite, compress_a, DEFAULT_MAX_DIM_B};
use crate::error::{Error, Result};
use crate::measures::fidelity;
use crate::objects::{apply_choi_local, Channel, DensityMatrix};
use crate::sdp::{
    fidelity_sdp, solve, LinearImage, SdpCertificate, SdpOptions, SdpProblem, SigmaExpr, SparseHermitian,
};

#[derive(Debug, Clone)]
pub struct FmaxResult {
    /// Certified SDP optimum (primal value), clamped to `[0, 1]`.
    pub value: f64,
    /// Dual objective, an upper bound up to solver tolerance.
    pub dual_bound: f64,
    /// Closed-form fidelity reached by `channel`.
    pub achieved: f64,
    /// Optimal broadcast channel `B → B₁B₂`.
    pub channel: Channel,
    pub certificate: SdpCertificate,
}

/// Adds `Tr_out J = I_in` on the Choi block `block` (side `d_in·d_out`).
pub(crate) fn add_tp_constraints(p: &mut SdpProblem, block: usize, d_in: usize, d_out: usize) {
    let n = d_in * d_out;
    for i in 0..d_in {
        for k in i..d_in {
            let mut re = SparseHermitian::new(n);
            let mut im = SparseHermitian::new(n);
            for o in 0..d_out {
                let (x, y) = (i * d_out + o, k * d_out + o);
                let v = if x == y { 1.0 } else { 0.5 };
                re.add(x, y, Complex64::new(v, 0.0));
                if x != y {
                    im.add(x, y, Complex64::new(0.0, 0.5));
                }
            }
            p.add_constraint(vec![(block, re)], if i == k { 1.0 } else { 0.0 });
            if i != k {
                p.add_constraint(vec![(block, im)], 0.0);
            }
        }
    }
}

/// `J = (I ⊗ S) J (I ⊗ S)` on the Choi of `B → B₁B₂`, entry by entry.
fn add_swap_constraints(p: &mut SdpProblem, block: usize, d: usize) {
    let n = d * d * d;
    let pi = |x: usize| {
        let (b, b1, b2) = (x / (d * d), (x / d) % d, x % d);
        b * d * d + b2 * d + b1
    };
    for x in 0..n {
        for y in x..n {
            let (px, py) = (pi(x), pi(y));
            let (u, v, flipped) = if px <= py { (px, py, false) } else { (py, px, true) };
            if (u, v) == (x, y) {
                // fixed by the swap: the constraint is vacuous or says Im = 0
                continue;
            }
            if (u, v) < (x, y) {
                continue;
            }
            let mut re = SparseHermitian::re_entry(n, x, y);
            for &(i, j, c) in SparseHermitian::re_entry(n, u, v).entries() {
                re.add(i, j, -c);
            }
            p.add_constraint(vec![(block, re)], 0.0);
            if x != y {
                let sign = if flipped { 1.0 } else { -1.0 };
                let mut im = SparseHermitian::im_entry(n, x, y);
                if u != v {
                    for &(i, j, c) in SparseHermitian::im_entry(n, u, v).entries() {
                        im.add(i, j, c * sign);
                    }
                }
                p.add_constraint(vec![(block, im)], 0.0);
            }
        }
    }
    // entries mapped to their own conjugate: (πx, πy) = (y, x)
    for x in 0..n {
        for y in x + 1..n {
            if pi(x) == y && pi(y) == x {
                p.add_constraint(vec![(block, SparseHermitian::im_entry(n, x, y))], 0.0);
            }
        }
    }
}

pub fn f_max_broadcast(rho: &DensityMatrix) -> Result<FmaxResult> {
    f_max_broadcast_with(rho, &SdpOptions::default(), DEFAULT_MAX_DIM_B)
}

pub fn f_max_broadcast_with(rho: &DensityMatrix, opts: &SdpOptions, max_dim_b: usize) -> Result<FmaxResult> {
    let (_, db) = check_bipartite(rho)?;
    if db > max_dim_b {
        return Err(Error::TooLarge(format!("d_B = {db} exceeds the limit {max_dim_b}")));
    }
    let rc = compress_a(rho)?;
    let da = rc.dims()[0];
    let n = db * db * db;
    let mut p = SdpProblem::new();
    let j = p.add_block(n);
    add_tp_constraints(&mut p, j, db, db * db);
    add_swap_constraints(&mut p, j, db);
    let image = LinearImage::from_fn(n, |x| {
        apply_choi_local(x, db, db * db, rc.matrix(), da, 1).partial_trace(&[da, db, db], &[0, 2])
    })?;
    fidelity_sdp(&mut p, rc.matrix(), SigmaExpr::Affine { var: j, image: &image })?;
    let sol = solve(&p, opts)?;
    let certificate = SdpCertificate::new(&p, &sol);
    certificate.require_optimal("broadcast fidelity SDP")?;
    let channel = Channel::from_choi_projected(vec![db], vec![db, db], &sol.primal_blocks[j])?;
    let (_, achieved) = broadcast_fidelities(rho, &channel)?;
    Ok(FmaxResult {
        value: sol.primal_value.clamp(0.0, 1.0),
        dual_bound: sol.dual_value,
        achieved,
        channel,
        certificate,
    })
}

/// `(F(ρ, ρ̃_{AB₁}), F(ρ, ρ̃_{AB₂}))` for a channel `B → B₁B₂` applied to B.
pub fn broadcast_fidelities(rho: &DensityMatrix, ch: &Channel) -> Result<(f64, f64)> {
    let out = ch.apply_on_subsystem(rho, 1)?;
    Ok((
        fidelity(rho, &out.reduced(&[0, 1])?)?,
        fidelity(rho, &out.reduced(&[0, 2])?)?,
    ))
}

/// Averages a channel `B → B₁B₂` with its output-swapped version.
pub fn symmetrize_broadcast_channel(ch: &Channel) -> Result<Channel> {
    let d = ch.in_dim();
    if ch.out_dims() != [d, d] {
        return Err(Error::InvalidSubsystems(format!(
            "expected a channel {d} -> [{d}, {d}], got {:?}",
            ch.out_dims()
        )));
    }
    let swapped = ch.choi().permute_subsystems(&[d, d, d], &[0, 2, 1])?;
    let avg = (ch.choi() + &swapped).scale_real(0.5);
    Channel::from_choi_with_tolerance(vec![d], vec![d, d], avg, 1e-9)
}
