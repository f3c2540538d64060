//! Dense complex linear algebra: tensor products, partial traces, Hermitian
//! eigendecomposition and spectral functions.

mod eig;
mod matrix;

pub use eig::{
    hermitian_eig, inv_sqrt_psd, log2_psd, matrix_function_on_support, orthonormality_error, orthonormalize_columns,
    psd_eig, singular_values, sqrt_psd, support_projector, trace_norm, HermitianEig, HERMITIAN_TOL, PSD_TOL,
    SUPPORT_CUTOFF,
};
pub(crate) use matrix::normalized_subset;
pub use matrix::{kron, kron_all, kron_vec, partial_trace, ComplexMatrix, I, ONE, ZERO};
