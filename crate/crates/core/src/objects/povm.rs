use num_complex::Complex64;

use super::state::{DensityMatrix, STATE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, orthonormality_error, ComplexMatrix};

/// Finite list of positive operators on one system summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new_with_tolerance(elements, STATE_TOL)
    }

    pub fn new_with_tolerance(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let d = elements.first().map(|e| e.rows()).ok_or(Error::LengthMismatch(0, 1))?;
        let mut sum = ComplexMatrix::zeros(d, d);
        let mut checked = Vec::with_capacity(elements.len());
        for e in elements {
            if e.shape() != (d, d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.rows(),
                });
            }
            let herr = e.hermiticity_error();
            if herr > tol {
                return Err(Error::NotHermitian(herr));
            }
            let e = e.hermitian_part();
            let min = hermitian_eig(&e)?.min_eigenvalue();
            if min < -tol {
                return Err(Error::NotPositive(min));
            }
            sum += &e;
            checked.push(e);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > tol {
            return Err(Error::IncompletePovm(dev));
        }
        Ok(Self { elements: checked })
    }

    /// Rank-one projective measurement onto the columns of an orthonormal basis.
    pub fn from_basis(basis: &ComplexMatrix) -> Result<Self> {
        let err = orthonormality_error(basis);
        if err > STATE_TOL || basis.rows() != basis.cols() {
            return Err(Error::NotOrthonormal(err));
        }
        Self::new(
            (0..basis.cols())
                .map(|k| ComplexMatrix::projector(&basis.col(k)))
                .collect(),
        )
    }

    pub fn computational(d: usize) -> Self {
        Self {
            elements: (0..d).map(|k| ComplexMatrix::unit(d, d, k, k)).collect(),
        }
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// Born probabilities `Tr(M_i σ)`.
    pub fn probabilities(&self, sigma: &DensityMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|m| m.trace_product(sigma.matrix()).re)
            .collect()
    }

    /// Hilbert–Schmidt Gram matrix `G_ij = Tr(M_i M_j)`.
    pub fn gram(&self) -> ComplexMatrix {
        let k = self.len();
        ComplexMatrix::from_fn(k, k, |i, j| {
            Complex64::new(self.elements[i].trace_product(&self.elements[j]).re, 0.0)
        })
    }
}
