//! Approximate broadcasting of the B side of a bipartite state: the optimal
//! symmetric broadcast fidelity `F^max`, the entanglement-breaking fidelity
//! `F^EB`, quantum discord, and the average mutual-information loss.

mod discord;
mod eb;
mod fmax;
mod loss;
mod report;

pub use discord::{discord, discord_with, DiscordOptions, DiscordResult};
pub use eb::{f_eb, f_eb_with, measure_prepare_lower_bound, FebResult};
pub(crate) use fmax::add_tp_constraints;
pub use fmax::{broadcast_fidelities, f_max_broadcast, f_max_broadcast_with, symmetrize_broadcast_channel, FmaxResult};
pub use loss::{average_mi_loss, computational_prep, measurement_copy_broadcaster};
pub use report::{broadcast_report, BroadcastOptions, BroadcastReport};

use crate::error::{Error, Result};
use crate::linalg::{psd_eig, ComplexMatrix};
use crate::objects::DensityMatrix;

/// Largest `d_B` accepted by the broadcast SDPs by default.
pub const DEFAULT_MAX_DIM_B: usize = 4;

pub(crate) fn check_bipartite(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.dims() {
        &[a, b] => Ok((a, b)),
        dims => Err(Error::InvalidSubsystems(format!(
            "expected a bipartite state, got dims {dims:?}"
        ))),
    }
}

/// Restricts the first factor A to the support of `ρ_A`: returns `(P† ⊗ I) ρ (P ⊗ I)` with `P`
/// an isometry onto `supp ρ_A`. Fidelities with any state whose A marginal is
/// `ρ_A` are unchanged, and the compressed problem keeps a strictly feasible
/// interior.
pub(crate) fn compress_a(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let da = dims[0];
    let rest: usize = dims[1..].iter().product();
    let ra = rho.reduced(&[0])?;
    let eig = psd_eig(ra.matrix())?;
    let r = eig.rank();
    if r == da {
        return Ok(rho.clone());
    }
    let p = ComplexMatrix::from_fn(da, r, |i, k| eig.eigenvectors[(i, k)]);
    let lift = p.kron(&ComplexMatrix::identity(rest));
    let m = lift.adjoint().matmul(rho.matrix()).matmul(&lift);
    let mut new_dims = dims.to_vec();
    new_dims[0] = r;
    DensityMatrix::new_with_tolerance(new_dims, m.hermitian_part(), 1e-9)
}

/// `−2 log₂ F`, or `+∞` at `F = 0`.
pub fn discord_bound(f: f64) -> f64 {
    if f <= 0.0 {
        f64::INFINITY
    } else {
        -2.0 * f.log2()
    }
}
