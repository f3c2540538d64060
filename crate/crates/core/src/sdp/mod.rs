//! Dense semidefinite programming over Hermitian blocks.

mod audit;
mod embed;
mod fidelity;
mod ipm;
mod problem;
mod sdpa;

pub use audit::{audit, AuditReport, SdpCertificate};
pub use embed::{embed_matrix, extract};
pub use fidelity::{fidelity_sdp, fidelity_via_sdp, psd_factor, FidelityFragment, SigmaExpr};
pub use ipm::{solve, Residuals, SdpOptions, SdpSolution, SdpStatus};
pub use problem::{Constraint, LinearImage, SdpProblem, SparseHermitian};
pub use sdpa::write_sdpa;
