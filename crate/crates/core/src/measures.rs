//! Entropies, relative entropy, fidelity and (conditional) mutual information.
//! All logarithms are base 2.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, log2_psd, sqrt_psd, support_projector, trace_norm, ComplexMatrix};
use crate::objects::DensityMatrix;

/// Values in `[-DUST, 0)` are rounded to zero; anything below is an error.
pub const DUST: f64 = 1e-9;

/// Residual trace above which `supp ρ ⊄ supp σ`.
pub const SUPPORT_TOL: f64 = 1e-9;

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The value, with `+∞` as `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

pub(crate) fn clamp_dust(x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -DUST {
        Ok(0.0)
    } else {
        Err(Error::NegativeQuantity(x))
    }
}

/// Entropy of a spectrum, ignoring eigenvalues at or below the support cutoff.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    let max = eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = 1e-12 * max;
    -eigenvalues
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| l * l.log2())
        .sum::<f64>()
}

/// Shannon entropy of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

fn matrix_entropy(m: &ComplexMatrix) -> f64 {
    let eig = hermitian_eig(m).expect("density matrices are Hermitian");
    spectrum_entropy(&eig.eigenvalues).max(0.0)
}

/// Von Neumann entropy `S(ρ) = -Tr ρ log₂ ρ`.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    matrix_entropy(rho.matrix())
}

/// Entropy of the marginal on `sys` (0 for the empty set).
pub fn subsystem_entropy(rho: &DensityMatrix, sys: &[usize]) -> Result<f64> {
    if sys.is_empty() {
        return Ok(0.0);
    }
    Ok(matrix_entropy(&rho.matrix().partial_trace(rho.dims(), sys)?))
}

fn same_shape(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(())
}

/// `Tr((I-Π_σ) ρ (I-Π_σ))`, the weight of `ρ` outside the support of `σ`.
pub fn support_residual(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let pi = support_projector(sigma)?;
    let q = &ComplexMatrix::identity(sigma.rows()) - &pi;
    Ok(q.matmul(rho).matmul(&q).trace().re)
}

/// `S(ρ‖σ) = Tr ρ log₂ ρ − Tr ρ log₂ σ`, or `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
    same_shape(rho, sigma)?;
    if support_residual(rho.matrix(), sigma.matrix())? > SUPPORT_TOL {
        return Ok(ExtendedReal::Infinite);
    }
    let a = rho.matrix().trace_product(&log2_psd(rho.matrix())?).re;
    let b = rho.matrix().trace_product(&log2_psd(sigma.matrix())?).re;
    Ok(ExtendedReal::Finite(clamp_dust(a - b)?))
}

/// Uhlmann fidelity `‖√ρ √σ‖₁` (not squared).
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_shape(rho, sigma)?;
    fidelity_matrices(rho.matrix(), sigma.matrix())
}

pub(crate) fn fidelity_matrices(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let prod = sqrt_psd(rho)?.matmul(&sqrt_psd(sigma)?);
    Ok(trace_norm(&prod))
}

/// `I(A:B) = S(A) + S(B) − S(AB)`; factors outside `a ∪ b` are traced out.
pub fn mutual_information(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    check_disjoint(rho, &[a, b])?;
    let ab = union(&[a, b]);
    let v = subsystem_entropy(rho, a)? + subsystem_entropy(rho, b)? - subsystem_entropy(rho, &ab)?;
    clamp_dust(v)
}

/// `I(A:C|B) = S(AB) + S(BC) − S(ABC) − S(B)`.
pub fn conditional_mutual_information(rho: &DensityMatrix, a: &[usize], c: &[usize], b: &[usize]) -> Result<f64> {
    check_disjoint(rho, &[a, b, c])?;
    let v = subsystem_entropy(rho, &union(&[a, b]))? + subsystem_entropy(rho, &union(&[b, c]))?
        - subsystem_entropy(rho, &union(&[a, b, c]))?
        - subsystem_entropy(rho, b)?;
    clamp_dust(v)
}

fn union(parts: &[&[usize]]) -> Vec<usize> {
    let mut v: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    v.sort_unstable();
    v
}

fn check_disjoint(rho: &DensityMatrix, parts: &[&[usize]]) -> Result<()> {
    let n = rho.dims().len();
    let mut seen = vec![false; n];
    for p in parts {
        if p.is_empty() {
            return Err(Error::InvalidSubsystems("empty part".into()));
        }
        for &k in p.iter() {
            if k >= n || seen[k] {
                return Err(Error::InvalidSubsystems(format!("parts {parts:?} for {n} factors")));
            }
            seen[k] = true;
        }
    }
    Ok(())
}
