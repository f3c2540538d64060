//! Minimal informationally complete POVMs, their dual frames, and the
//! decomposition `ρ_AB = Σ_i p_i F_i ⊗ ρ_i` with conditional states `ρ_i`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inv_sqrt_psd, ComplexMatrix, ONE, ZERO};
use crate::objects::{DensityMatrix, Povm, Side};
use crate::random::{random_povm, rng_from_seed};

/// Gram condition number above which a candidate frame is rejected.
pub const MAX_CONDITION: f64 = 1e6;

/// A POVM with `d²` linearly independent elements and its dual frame `F_i`,
/// so that `X = Σ_i Tr(E_i X) F_i` for every operator `X`.
#[derive(Debug, Clone)]
pub struct InformationallyCompletePovm {
    povm: Povm,
    dual: Vec<ComplexMatrix>,
    condition_number: f64,
}

impl InformationallyCompletePovm {
    /// Builds the dual frame from the Hilbert–Schmidt Gram matrix.
    pub fn from_povm(povm: Povm) -> Result<Self> {
        let d = povm.dim();
        if povm.len() != d * d {
            return Err(Error::LengthMismatch(povm.len(), d * d));
        }
        let gram = povm.gram();
        let eig = hermitian_eig(&gram)?;
        let min = eig.min_eigenvalue();
        let condition_number = if min > 0.0 {
            eig.max_eigenvalue() / min
        } else {
            f64::INFINITY
        };
        let coef = gram.solve(&ComplexMatrix::identity(d * d))?;
        let dual = (0..d * d)
            .map(|i| {
                let mut f = ComplexMatrix::zeros(d, d);
                for (j, e) in povm.elements().iter().enumerate() {
                    f.add_scaled(Complex64::new(coef[(i, j)].re, 0.0), e);
                }
                f.hermitian_part()
            })
            .collect();
        Ok(Self {
            povm,
            dual,
            condition_number,
        })
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn dual(&self) -> &[ComplexMatrix] {
        &self.dual
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    /// `Σ_i Tr(E_i X) F_i`.
    pub fn reconstruct(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (e, f) in self.povm.elements().iter().zip(&self.dual) {
            out.add_scaled(e.trace_product(x), f);
        }
        out
    }
}

fn pauli() -> [ComplexMatrix; 3] {
    let i = Complex64::new(0.0, 1.0);
    [
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::from_rows(&[vec![ZERO, -i], vec![i, ZERO]]).expect("2x2"),
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
    ]
}

/// Qubit SIC elements `(I + n·σ/√3)/4` for the cube vertices `n` of a
/// regular tetrahedron.
fn tetrahedral() -> Vec<ComplexMatrix> {
    let s = pauli();
    let verts = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let k = 1.0 / 3f64.sqrt();
    verts
        .iter()
        .map(|n| {
            let mut m = ComplexMatrix::identity(2);
            for (c, p) in n.iter().zip(&s) {
                m.add_scaled(Complex64::new(c * k, 0.0), p);
            }
            m.scale_real(0.25)
        })
        .collect()
}

/// Projectors onto `|j⟩`, `(|j⟩+|k⟩)/√2`, `(|j⟩+i|k⟩)/√2`, congruence-normalized
/// by `S^{-1/2}` with `S` their sum.
fn tomographic(d: usize) -> Result<Vec<ComplexMatrix>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut vecs = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut v = vec![ZERO; d];
        v[j] = ONE;
        vecs.push(v);
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut v = vec![ZERO; d];
            v[j] = Complex64::new(h, 0.0);
            v[k] = Complex64::new(h, 0.0);
            vecs.push(v.clone());
            v[k] = Complex64::new(0.0, h);
            vecs.push(v);
        }
    }
    let projs: Vec<ComplexMatrix> = vecs.iter().map(|v| ComplexMatrix::projector(v)).collect();
    let mut s = ComplexMatrix::zeros(d, d);
    for p in &projs {
        s += p;
    }
    let t = inv_sqrt_psd(&s)?;
    Ok(projs.iter().map(|p| t.matmul(p).matmul(&t).hermitian_part()).collect())
}

/// Default minimal IC-POVM on `C^d`: the tetrahedral SIC for `d = 2`,
/// normalized tomographic projectors otherwise, falling back to seeded random
/// rank-one POVMs if the Gram matrix is badly conditioned.
pub fn build_ic_povm(d: usize) -> Result<InformationallyCompletePovm> {
    if d < 2 {
        return Err(Error::InvalidSubsystems(format!("IC-POVM needs d >= 2, got {d}")));
    }
    let elements = if d == 2 { tetrahedral() } else { tomographic(d)? };
    let ic = InformationallyCompletePovm::from_povm(Povm::new_with_tolerance(elements, 1e-9)?)?;
    if ic.condition_number < MAX_CONDITION {
        return Ok(ic);
    }
    let mut rng = rng_from_seed(d as u64);
    loop {
        let ic = InformationallyCompletePovm::from_povm(random_povm(d, d * d, &mut rng))?;
        if ic.condition_number < MAX_CONDITION {
            return Ok(ic);
        }
    }
}

/// `ρ_AB = Σ_i p_i F_i ⊗ ρ_i` (ordered as in `ρ`'s tensor factors).
#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    pub measured: Side,
    pub weights: Vec<f64>,
    pub frame_ops: Vec<ComplexMatrix>,
    pub cond_states: Vec<DensityMatrix>,
}

impl LocalDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out: Option<ComplexMatrix> = None;
        for ((p, f), s) in self.weights.iter().zip(&self.frame_ops).zip(&self.cond_states) {
            let term = match self.measured {
                Side::A => f.kron(s.matrix()),
                Side::B => s.matrix().kron(f),
            }
            .scale_real(*p);
            match out.as_mut() {
                Some(o) => *o += &term,
                None => out = Some(term),
            }
        }
        out.expect("at least one term has positive weight")
    }
}

/// Weights below this are treated as zero and their terms dropped.
const ZERO_WEIGHT: f64 = 1e-14;

/// Measures the `measured` side of a bipartite state with the IC-POVM:
/// `p_i = Tr((E_i ⊗ I) ρ)`, `ρ_i = Tr_measured((E_i ⊗ I) ρ) / p_i`.
pub fn decompose(rho: &DensityMatrix, ic: &InformationallyCompletePovm, measured: Side) -> Result<LocalDecomposition> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::InvalidSubsystems(format!(
            "expected a bipartite state, got dims {dims:?}"
        )));
    }
    let (m_idx, o_idx) = match measured {
        Side::A => (0, 1),
        Side::B => (1, 0),
    };
    if dims[m_idx] != ic.dim() {
        return Err(Error::DimensionMismatch {
            expected: ic.dim(),
            found: dims[m_idx],
        });
    }
    let other = ComplexMatrix::identity(dims[o_idx]);
    let mut out = LocalDecomposition {
        measured,
        weights: Vec::new(),
        frame_ops: Vec::new(),
        cond_states: Vec::new(),
    };
    for (e, f) in ic.povm.elements().iter().zip(&ic.dual) {
        let lifted = match measured {
            Side::A => e.kron(&other),
            Side::B => other.kron(e),
        };
        let unnorm = lifted.matmul(rho.matrix()).partial_trace(dims, &[o_idx])?;
        let p = unnorm.trace().re;
        if p <= ZERO_WEIGHT {
            continue;
        }
        out.weights.push(p);
        out.frame_ops.push(f.clone());
        let cond = unnorm.scale_real(1.0 / p).hermitian_part();
        out.cond_states
            .push(DensityMatrix::new_with_tolerance(vec![dims[o_idx]], cond, 1e-9)?);
    }
    Ok(out)
}
