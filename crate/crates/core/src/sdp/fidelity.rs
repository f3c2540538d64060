//! Fidelity as an SDP:
//! `F(ρ, σ) = max ½(Tr X + Tr X†)` subject to `[[ρ, X], [X†, σ]] ⪰ 0`.
//!
//! With `ρ = L L†` (`L` of size `d × r`, `r = rank ρ`) every feasible `X`
//! factors as `L K`, and the constraint becomes `[[I_r, K], [K†, σ]] ⪰ 0`
//! with objective `Re Tr(L K)`. This keeps the PSD block at side `r + d`
//! and its interior nonempty even for rank-deficient `ρ`. A fixed `σ = M M†`
//! is factored the same way.

use super::ipm::{solve, SdpOptions, SdpSolution, SdpStatus};
use super::problem::{LinearImage, SdpProblem, SparseHermitian};
use crate::error::{Error, Result};
use crate::linalg::{psd_eig, ComplexMatrix};
use crate::objects::DensityMatrix;

/// The second argument of the fidelity.
#[derive(Debug, Clone, Copy)]
pub enum SigmaExpr<'a> {
    Fixed(&'a ComplexMatrix),
    /// `σ = image(X_var)` for a variable block `var` of the problem.
    Affine {
        var: usize,
        image: &'a LinearImage,
    },
}

/// Location of the fidelity block inside a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FidelityFragment {
    pub block: usize,
    /// Rank of `ρ`, i.e. the side of the leading identity sub-block.
    pub rank: usize,
}

/// Returns `L` with `m = L L†`, one column per eigenvalue above the support
/// cutoff.
pub fn psd_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = psd_eig(m)?;
    let r = eig.rank();
    let d = m.rows();
    Ok(ComplexMatrix::from_fn(d, r, |i, k| {
        eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt()
    }))
}

/// Upper entries `(i, r + j)` with value `conj(T_ji)/2`, so that
/// `Tr(C Y) = Re Tr(T K)` where `K` is the off-diagonal block of `Y`.
fn pairing_objective(n: usize, r: usize, t: &ComplexMatrix) -> SparseHermitian {
    let mut c = SparseHermitian::new(n);
    for i in 0..t.cols() {
        for j in 0..t.rows() {
            c.add(i, r + j, t[(j, i)].conj() * 0.5);
        }
    }
    c
}

/// Adds a block to `p` whose contribution to the objective is at most
/// `F(ρ, σ)`, with equality at the optimum over that block.
pub fn fidelity_sdp(p: &mut SdpProblem, rho: &ComplexMatrix, sigma: SigmaExpr<'_>) -> Result<FidelityFragment> {
    if !rho.is_square() {
        return Err(Error::NotSquare(rho.rows(), rho.cols()));
    }
    let d = rho.rows();
    let l = psd_factor(rho)?;
    let r = l.cols();
    if r == 0 {
        return Err(Error::InvalidTrace(0.0));
    }
    match sigma {
        SigmaExpr::Fixed(s) => {
            if s.shape() != (d, d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.rows(),
                });
            }
            let m = psd_factor(s)?;
            let q = m.cols().max(1);
            let n = r + q;
            let block = p.add_block(n);
            p.fix_submatrix(block, 0, &ComplexMatrix::identity(r));
            p.fix_submatrix(block, r, &ComplexMatrix::identity(q));
            if m.cols() > 0 {
                let t = m.adjoint().matmul(&l);
                p.add_objective(block, &pairing_objective(n, r, &t));
            }
            Ok(FidelityFragment { block, rank: r })
        }
        SigmaExpr::Affine { var, image } => {
            if image.n_out != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: image.n_out,
                });
            }
            let n = r + d;
            let block = p.add_block(n);
            p.fix_submatrix(block, 0, &ComplexMatrix::identity(r));
            p.affine_submatrix(block, r, var, image);
            p.add_objective(block, &pairing_objective(n, r, &l));
            Ok(FidelityFragment { block, rank: r })
        }
    }
}

/// `F(ρ, σ)` computed by solving the fidelity SDP with `σ` fixed.
pub fn fidelity_via_sdp(rho: &DensityMatrix, sigma: &DensityMatrix, opts: &SdpOptions) -> Result<(f64, SdpSolution)> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let mut p = SdpProblem::new();
    fidelity_sdp(&mut p, rho.matrix(), SigmaExpr::Fixed(sigma.matrix()))?;
    let sol = solve(&p, opts)?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::SdpFailure(format!(
            "fidelity SDP ended with status {:?} (residual {:.2e})",
            sol.status,
            sol.residuals.max()
        )));
    }
    Ok((sol.primal_value, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::fidelity;
    use crate::objects::PureState;
    use crate::random::{random_density, random_state, rng_from_seed};

    #[test]
    fn equal_states_give_one() {
        let mut rng = rng_from_seed(3);
        let rho = random_state(&[2], &mut rng);
        let (f, _) = fidelity_via_sdp(&rho, &rho, &SdpOptions::default()).unwrap();
        assert!((f - 1.0).abs() < 1e-6);
    }

    #[test]
    fn orthogonal_pure_states_give_zero() {
        let a = PureState::basis(vec![2], 0).to_density();
        let b = PureState::basis(vec![2], 1).to_density();
        let (f, _) = fidelity_via_sdp(&a, &b, &SdpOptions::default()).unwrap();
        assert!(f.abs() < 1e-6);
    }

    #[test]
    fn matches_closed_form_on_random_qubit_pairs() {
        let mut rng = rng_from_seed(4);
        for k in 0..20 {
            let rank = 1 + k % 2;
            let rho = random_density(&[2], rank, &mut rng);
            let sigma = random_state(&[2], &mut rng);
            let (f, sol) = fidelity_via_sdp(&rho, &sigma, &SdpOptions::default()).unwrap();
            let exact = fidelity(&rho, &sigma).unwrap();
            assert!((f - exact).abs() < 1e-6, "pair {k}: {f} vs {exact}");
            assert!(sol.residuals.max() < 1e-7);
            assert!(sol.primal_value <= sol.dual_value + 1e-6);
        }
    }

    #[test]
    fn affine_sigma_with_fixed_variable_matches() {
        // σ = X_var with X_var pinned to a fixed state
        let mut rng = rng_from_seed(5);
        let rho = random_state(&[3], &mut rng);
        let sigma = random_state(&[3], &mut rng);
        let mut p = SdpProblem::new();
        let var = p.add_block(3);
        p.fix_submatrix(var, 0, sigma.matrix());
        let image = LinearImage::from_fn(3, |x| Ok(x.clone())).unwrap();
        fidelity_sdp(&mut p, rho.matrix(), SigmaExpr::Affine { var, image: &image }).unwrap();
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.primal_value - fidelity(&rho, &sigma).unwrap()).abs() < 1e-6);
    }
}
