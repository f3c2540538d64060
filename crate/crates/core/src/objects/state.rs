use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron_vec, ComplexMatrix, PSD_TOL};

/// Default tolerance for state validation (Hermiticity, positivity, trace).
pub const STATE_TOL: f64 = 1e-10;

/// Positive unit-trace Hermitian operator on `⊗_k C^{dims[k]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        Self::new_with_tolerance(dims, matrix, STATE_TOL)
    }

    /// Validates Hermiticity, trace and positivity to `tol`; the stored
    /// matrix is the Hermitian part of the input.
    pub fn new_with_tolerance(dims: Vec<usize>, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        check_dims(&dims, &matrix)?;
        let herr = matrix.hermiticity_error();
        if herr > tol {
            return Err(Error::NotHermitian(herr));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidTrace(tr));
        }
        let eig = hermitian_eig(&matrix)?;
        if eig.min_eigenvalue() < -tol.max(PSD_TOL) {
            return Err(Error::NotPositive(eig.min_eigenvalue()));
        }
        Ok(Self { dims, matrix })
    }

    /// Hermitian part, negative eigenvalues clipped to zero, trace renormalized.
    pub fn project_to_nearest_state(dims: Vec<usize>, matrix: &ComplexMatrix) -> Result<Self> {
        check_dims(&dims, matrix)?;
        let eig = hermitian_eig(&matrix.hermitian_part())?;
        let clipped = eig.reconstruct_with(|l| l.max(0.0));
        let tr = clipped.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidTrace(tr));
        }
        Ok(Self {
            dims,
            matrix: clipped.scale_real(1.0 / tr).hermitian_part(),
        })
    }

    pub(crate) fn from_trusted(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self {
            dims,
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let m = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        Self { dims, matrix: m }
    }

    /// Computational basis state `|k⟩⟨k|`.
    pub fn basis(dims: Vec<usize>, k: usize) -> Self {
        let d: usize = dims.iter().product();
        Self {
            dims,
            matrix: ComplexMatrix::unit(d, d, k, k),
        }
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(dims: Vec<usize>, probs: &[f64]) -> Result<Self> {
        Self::new(dims, ComplexMatrix::diag(probs))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Marginal on the kept subsystems (ascending order).
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        let m = self.matrix.partial_trace(&self.dims, keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self::from_trusted(dims, m))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Reorders subsystems: new factor `k` is old factor `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let m = self.matrix.permute_subsystems(&self.dims, perm)?;
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        Ok(Self::from_trusted(dims, m))
    }

    /// Conjugation by a unitary (or isometry) `u`, with new dims.
    pub fn conjugate(&self, u: &ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if u.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.cols(),
            });
        }
        let m = u.matmul(&self.matrix).matmul(&u.adjoint());
        Self::new_with_tolerance(dims, m, 1e-8)
    }

    /// Convex combination `Σ w_k ρ_k`.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::LengthMismatch(weights.len(), states.len()));
        }
        let dims = states[0].dims.clone();
        let mut m = ComplexMatrix::zeros(states[0].dim(), states[0].dim());
        for (w, s) in weights.iter().zip(states) {
            if s.dims != dims {
                return Err(Error::InvalidSubsystems(format!("{:?} vs {:?}", s.dims, dims)));
            }
            m.add_scaled(Complex64::new(*w, 0.0), &s.matrix);
        }
        Self::new(dims, m)
    }
}

fn check_dims(dims: &[usize], matrix: &ComplexMatrix) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::NotSquare(matrix.rows(), matrix.cols()));
    }
    let d: usize = dims.iter().product();
    if d != matrix.rows() || dims.contains(&0) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: matrix.rows(),
        });
    }
    Ok(())
}

/// Unit vector on `⊗_k C^{dims[k]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if d != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(dims, amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dims: Vec<usize>, k: usize) -> Self {
        let d: usize = dims.iter().product();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); d];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { dims, amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: ComplexMatrix::projector(&self.amplitudes),
        }
    }
}
