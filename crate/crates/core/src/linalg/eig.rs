//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! spectral matrix functions built on it.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Inputs further than this (max entry) from Hermitian are rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues at or below `SUPPORT_CUTOFF * λ_max` count as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Eigenvalues below `-PSD_TOL * max(1, λ_max)` make an operator non-positive.
pub const PSD_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// `m = V · diag(λ) · V†` with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| {
            let mut acc = ZERO;
            for k in 0..n {
                if fl[k] != 0.0 {
                    acc += v[(r, k)] * v[(c, k)].conj() * fl[k];
                }
            }
            acc
        })
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Absolute threshold below which an eigenvalue is outside the support.
    pub fn support_threshold(&self) -> f64 {
        SUPPORT_CUTOFF * self.max_eigenvalue().max(0.0)
    }

    /// Number of eigenvalues strictly above the support cutoff.
    pub fn rank(&self) -> usize {
        let t = self.support_threshold();
        self.eigenvalues.iter().filter(|&&l| l > t).count()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.col(k)
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let herr = m.hermiticity_error();
    if herr > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(herr));
    }
    Ok(jacobi(m.hermitian_part()))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: ComplexMatrix) -> HermitianEig {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= 1e-16 * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let eigenvalues = order.iter().map(|&(l, _)| l).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c].1)]);
    HermitianEig {
        eigenvalues,
        eigenvectors,
    }
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if g < 1e-300 || g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let u00 = Complex64::new(c, 0.0);
    let u01 = Complex64::new(s, 0.0);
    let u10 = -phase.conj() * s;
    let u11 = phase.conj() * c;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u00 + akq * u10;
        a[(k, q)] = akp * u01 + akq * u11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
        a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u00 + vkq * u10;
        v[(k, q)] = vkp * u01 + vkq * u11;
    }
}

/// Applies `f` to the eigenvalues above the support cutoff and maps the rest
/// to zero.
pub fn matrix_function_on_support(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = psd_eig(m)?;
    let t = eig.support_threshold();
    Ok(eig.reconstruct_with(|l| if l > t { f(l) } else { 0.0 }))
}

/// Eigendecomposition with a positivity check.
pub fn psd_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let eig = hermitian_eig(m)?;
    let min = eig.min_eigenvalue();
    if min < -PSD_TOL * eig.max_eigenvalue().max(1.0) {
        return Err(Error::NotPositive(min));
    }
    Ok(eig)
}

pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function_on_support(m, f64::sqrt)
}

/// Inverse square root on the support (pseudo-inverse convention).
pub fn inv_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function_on_support(m, |x| 1.0 / x.sqrt())
}

pub fn log2_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function_on_support(m, f64::log2)
}

/// Orthogonal projector onto the support.
pub fn support_projector(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function_on_support(m, |_| 1.0)
}

/// Sum of singular values.
///
/// Hermitian input uses `Σ|λ|`; otherwise the eigenvalues `±s_i` of the
/// Hermitian dilation `[[0, M], [M†, 0]]` are used, which avoids squaring small
/// singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && m.hermiticity_error() <= 1e-14 * m.max_abs().max(1e-300) {
        return jacobi(m.hermitian_part()).eigenvalues.iter().map(|l| l.abs()).sum();
    }
    singular_values(m).iter().sum()
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut h = ComplexMatrix::zeros(r + c, r + c);
    h.set_block(0, r, m);
    h.set_block(r, 0, &m.adjoint());
    let eig = jacobi(h);
    eig.eigenvalues.iter().take(r.min(c)).map(|&l| l.max(0.0)).collect()
}

/// Orthonormalizes the columns (modified Gram–Schmidt, two passes). Columns
/// that become numerically dependent are dropped.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for c in 0..m.cols() {
        let mut v = m.col(c);
        let n0: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-10 * n0.max(1e-300) {
            basis.push(v.iter().map(|z| z / n).collect());
        }
    }
    let mut out = ComplexMatrix::zeros(m.rows(), basis.len());
    for (k, b) in basis.iter().enumerate() {
        out.set_col(k, b);
    }
    out
}

/// Deviation of `V†V` from the identity (max entry).
pub fn orthonormality_error(v: &ComplexMatrix) -> f64 {
    v.adjoint().matmul(v).max_abs_diff(&ComplexMatrix::identity(v.cols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{I, ONE};

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let g = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
        g.hermitian_part()
    }

    #[test]
    fn diagonal_and_pauli_spectra() {
        let e = hermitian_eig(&ComplexMatrix::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        assert!(e.eigenvectors.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eig(&x).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        for (n, seed) in [(2, 1), (5, 2), (16, 3), (33, 4)] {
            let h = random_hermitian(n, seed);
            let e = hermitian_eig(&h).unwrap();
            assert!(e.reconstruct().max_abs_diff(&h) < 1e-10, "n={n}");
            assert!(orthonormality_error(&e.eigenvectors) < 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![ONE, I], vec![I, ONE]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn support_functions() {
        let m = ComplexMatrix::diag(&[4.0, 0.0]);
        assert!(sqrt_psd(&m).unwrap().max_abs_diff(&ComplexMatrix::diag(&[2.0, 0.0])) < 1e-15);
        assert!(
            inv_sqrt_psd(&m)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.0]))
                < 1e-15
        );

        let rho = ComplexMatrix::diag(&[0.75, 0.25]);
        let val = rho.trace_product(&log2_psd(&rho).unwrap()).re;
        let oracle = 0.75 * 0.75f64.log2() + 0.25 * 0.25f64.log2();
        assert!((val - oracle).abs() < 1e-14);
        assert!((val + 0.811278).abs() < 1e-6);
    }

    #[test]
    fn identity_function_gives_support_projector() {
        let v = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let p = ComplexMatrix::projector(&v).scale_real(0.3);
        let proj = matrix_function_on_support(&p, |_| 1.0).unwrap();
        assert!(proj.max_abs_diff(&ComplexMatrix::projector(&v)) < 1e-14);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = ComplexMatrix::diag(&[1.0, -1e-3]);
        assert!(matches!(sqrt_psd(&m), Err(Error::NotPositive(_))));
    }

    #[test]
    fn trace_norm_cases() {
        assert!((trace_norm(&ComplexMatrix::identity(2)) - 2.0).abs() < 1e-15);
        let rho = ComplexMatrix::from_real_rows(&[&[0.6, 0.2], &[0.2, 0.4]]);
        assert!((trace_norm(&rho) - 1.0).abs() < 1e-14);
        let h = random_hermitian(6, 9);
        let e = hermitian_eig(&h).unwrap();
        let oracle: f64 = e.eigenvalues.iter().map(|l| l.abs()).sum();
        assert!((trace_norm(&h) - oracle).abs() < 1e-12);
        // non-Hermitian: rank-one |0⟩⟨1| has singular value 1
        assert!((trace_norm(&ComplexMatrix::unit(2, 2, 0, 1)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let q = orthonormalize_columns(&m);
        assert_eq!(q.cols(), 2);
        assert!(orthonormality_error(&q) < 1e-15);
    }
}
