//! Complex Hermitian SDPs in standard form:
//! maximize `Σ_k Tr(C_k X_k)` subject to `Σ_k Tr(A^i_k X_k) = b_i`, `X_k ⪰ 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Hermitian matrix stored by its upper-triangle entries `(i, j, v)`, `i ≤ j`;
/// the lower triangle is implied by Hermiticity.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    n: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHermitian {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `v` at `(i, j)` and `v̄` at `(j, i)`; on the diagonal only the real
    /// part is kept.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(i < self.n && j < self.n, "entry ({i}, {j}) outside {}", self.n);
        let (i, j, v) = if i <= j { (i, j, v) } else { (j, i, v.conj()) };
        let v = if i == j { Complex64::new(v.re, 0.0) } else { v };
        if v != Complex64::new(0.0, 0.0) {
            self.entries.push((i, j, v));
        }
    }

    /// Upper triangle of a Hermitian matrix (the Hermitian part is taken).
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let h = m.hermitian_part();
        let mut s = Self::new(h.rows());
        for i in 0..h.rows() {
            for j in i..h.cols() {
                s.add(i, j, h[(i, j)]);
            }
        }
        s
    }

    /// The functional `H ↦ Re H_ij`.
    pub fn re_entry(n: usize, i: usize, j: usize) -> Self {
        let mut s = Self::new(n);
        let v = if i == j { 1.0 } else { 0.5 };
        s.add(i, j, Complex64::new(v, 0.0));
        s
    }

    /// The functional `H ↦ Im H_ij` (`i ≠ j`).
    pub fn im_entry(n: usize, i: usize, j: usize) -> Self {
        assert_ne!(i, j, "diagonal entries have no imaginary part");
        let mut s = Self::new(n);
        s.add(i, j, Complex64::new(0.0, 0.5));
        s
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for e in &mut self.entries {
            e.2 *= s;
        }
        self
    }

    /// Sums duplicate positions and drops zeros.
    pub fn compact(&mut self) {
        self.entries.sort_by_key(|e| (e.0, e.1));
        let mut out: Vec<(usize, usize, Complex64)> = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => out.push((i, j, v)),
            }
        }
        out.retain(|e| e.2 != Complex64::new(0.0, 0.0));
        self.entries = out;
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v.conj();
            }
        }
        m
    }

    /// `Tr(H X)` for Hermitian `X`.
    pub fn trace_with(&self, x: &ComplexMatrix) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    v.re * x[(i, i)].re
                } else {
                    2.0 * (v.conj() * x[(i, j)]).re
                }
            })
            .sum()
    }
}

/// One equality `Σ_k Tr(A_k X_k) = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, SparseHermitian)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SdpProblem {
    blocks: Vec<usize>,
    objective: Vec<SparseHermitian>,
    constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a PSD block of side `n`; returns its index.
    pub fn add_block(&mut self, n: usize) -> usize {
        self.blocks.push(n);
        self.objective.push(SparseHermitian::new(n));
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn objective(&self) -> &[SparseHermitian] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Adds `Tr(C X_block)` to the objective.
    pub fn add_objective(&mut self, block: usize, c: &SparseHermitian) {
        let obj = &mut self.objective[block];
        obj.entries.extend_from_slice(&c.entries);
        obj.compact();
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, SparseHermitian)>, rhs: f64) {
        let terms = terms
            .into_iter()
            .filter_map(|(k, mut a)| {
                a.compact();
                (!a.is_empty()).then_some((k, a))
            })
            .collect();
        self.constraints.push(Constraint { terms, rhs });
    }

    /// Constrains the square sub-block at `offset` of `block` to equal `m`.
    pub fn fix_submatrix(&mut self, block: usize, offset: usize, m: &ComplexMatrix) {
        let n = self.blocks[block];
        for a in 0..m.rows() {
            for b in a..m.rows() {
                let (i, j) = (offset + a, offset + b);
                self.add_constraint(vec![(block, SparseHermitian::re_entry(n, i, j))], m[(a, b)].re);
                if a != b {
                    self.add_constraint(vec![(block, SparseHermitian::im_entry(n, i, j))], m[(a, b)].im);
                }
            }
        }
    }

    /// Constrains the sub-block at `offset` of `block` to equal `image(X_var)`.
    pub fn affine_submatrix(&mut self, block: usize, offset: usize, var: usize, image: &LinearImage) {
        self.affine_sum(block, offset, &[(var, image)]);
    }

    /// Constrains the sub-block at `offset` of `block` to equal
    /// `Σ_t image_t(X_{var_t})` (constants included).
    pub fn affine_sum(&mut self, block: usize, offset: usize, terms: &[(usize, &LinearImage)]) {
        let n = self.blocks[block];
        let d = terms[0].1.n_out;
        let mut constant = ComplexMatrix::zeros(d, d);
        for (var, image) in terms {
            assert_eq!(self.blocks[*var], image.n_var, "variable block size");
            assert_eq!(image.n_out, d, "output size");
            constant += &image.constant;
        }
        for a in 0..d {
            for b in a..d {
                let (i, j) = (offset + a, offset + b);
                let mut re_terms = vec![(block, SparseHermitian::re_entry(n, i, j))];
                let mut im_terms = vec![];
                if a != b {
                    im_terms.push((block, SparseHermitian::im_entry(n, i, j)));
                }
                for (var, image) in terms {
                    let (re, im) = image.entry_functionals(a, b);
                    re_terms.push((*var, re.scaled(-1.0)));
                    if let Some(im) = im {
                        im_terms.push((*var, im.scaled(-1.0)));
                    }
                }
                self.add_constraint(re_terms, constant[(a, b)].re);
                if a != b {
                    self.add_constraint(im_terms, constant[(a, b)].im);
                }
            }
        }
    }

    /// Constrains `image(X_var) = target`.
    pub fn constrain_image(&mut self, var: usize, image: &LinearImage, target: &ComplexMatrix) {
        assert_eq!(self.blocks[var], image.n_var, "variable block size");
        let d = image.n_out;
        for a in 0..d {
            for b in a..d {
                let (re, im) = image.entry_functionals(a, b);
                let rhs = target[(a, b)] - image.constant[(a, b)];
                self.add_constraint(vec![(var, re)], rhs.re);
                if let Some(im) = im {
                    self.add_constraint(vec![(var, im)], rhs.im);
                }
            }
        }
    }

    /// Checks block indices, coefficient sizes and finiteness.
    pub fn validate(&self) -> Result<()> {
        let check = |k: usize, a: &SparseHermitian| -> Result<()> {
            let n = *self
                .blocks
                .get(k)
                .ok_or_else(|| Error::InconsistentProblem(format!("block {k} does not exist")))?;
            if a.n != n {
                return Err(Error::InconsistentProblem(format!(
                    "coefficient of side {} on block {k} of side {n}",
                    a.n
                )));
            }
            if a.entries.iter().any(|e| !e.2.re.is_finite() || !e.2.im.is_finite()) {
                return Err(Error::InconsistentProblem("non-finite coefficient".into()));
            }
            Ok(())
        };
        if self.blocks.is_empty() || self.blocks.contains(&0) {
            return Err(Error::InconsistentProblem("empty block list or zero-size block".into()));
        }
        for (k, c) in self.objective.iter().enumerate() {
            check(k, c)?;
        }
        for con in &self.constraints {
            if !con.rhs.is_finite() {
                return Err(Error::InconsistentProblem("non-finite right-hand side".into()));
            }
            for (k, a) in &con.terms {
                check(*k, a)?;
            }
        }
        Ok(())
    }

    /// Objective value `Σ_k Tr(C_k X_k)`.
    pub fn objective_value(&self, x: &[ComplexMatrix]) -> f64 {
        self.objective.iter().zip(x).map(|(c, xk)| c.trace_with(xk)).sum()
    }

    /// Left-hand side of constraint `i`.
    pub fn constraint_value(&self, i: usize, x: &[ComplexMatrix]) -> f64 {
        self.constraints[i]
            .terms
            .iter()
            .map(|(k, a)| a.trace_with(&x[*k]))
            .sum()
    }
}

/// Affine map `X ↦ L(X) + c` on `n_var × n_var` matrices, tabulated on the
/// matrix units: `images[p·n + q] = L(|p⟩⟨q|)`.
#[derive(Debug, Clone)]
pub struct LinearImage {
    pub n_var: usize,
    pub n_out: usize,
    images: Vec<ComplexMatrix>,
    constant: ComplexMatrix,
}

impl LinearImage {
    /// Tabulates an affine `f`.
    pub fn from_fn(n_var: usize, f: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<Self> {
        let constant = f(&ComplexMatrix::zeros(n_var, n_var))?;
        let mut images = Vec::with_capacity(n_var * n_var);
        for p in 0..n_var {
            for q in 0..n_var {
                images.push(&f(&ComplexMatrix::unit(n_var, n_var, p, q))? - &constant);
            }
        }
        Ok(Self {
            n_var,
            n_out: constant.rows(),
            images,
            constant,
        })
    }

    /// Hermitian `G_re`, `G_im` with `Tr(G_re X) = Re L(X)_ab` and
    /// `Tr(G_im X) = Im L(X)_ab` for Hermitian `X` (`G_im` only off the
    /// diagonal).
    pub fn entry_functionals(&self, a: usize, b: usize) -> (SparseHermitian, Option<SparseHermitian>) {
        let nv = self.n_var;
        // G with Tr(G X) = L(X)_ab
        let g = ComplexMatrix::from_fn(nv, nv, |q, p| self.images[p * nv + q][(a, b)]);
        let re = SparseHermitian::from_dense(&(&g + &g.adjoint()).scale_real(0.5));
        let im = (a != b).then(|| SparseHermitian::from_dense(&(&g - &g.adjoint()).scale(Complex64::new(0.0, -0.5))));
        (re, im)
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.constant.clone();
        for p in 0..self.n_var {
            for q in 0..self.n_var {
                let v = x[(p, q)];
                if v != Complex64::new(0.0, 0.0) {
                    out.add_scaled(v, &self.images[p * self.n_var + q]);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{ginibre, random_hermitian, rng_from_seed};

    #[test]
    fn entry_functionals() {
        let mut rng = rng_from_seed(1);
        let x = random_hermitian(4, &mut rng);
        assert!((SparseHermitian::re_entry(4, 1, 3).trace_with(&x) - x[(1, 3)].re).abs() < 1e-14);
        assert!((SparseHermitian::im_entry(4, 1, 3).trace_with(&x) - x[(1, 3)].im).abs() < 1e-14);
        assert!((SparseHermitian::im_entry(4, 3, 1).trace_with(&x) - x[(3, 1)].im).abs() < 1e-14);
        assert!((SparseHermitian::re_entry(4, 2, 2).trace_with(&x) - x[(2, 2)].re).abs() < 1e-14);
        let c = random_hermitian(4, &mut rng);
        let s = SparseHermitian::from_dense(&c);
        assert!(s.to_dense().max_abs_diff(&c) < 1e-15);
        assert!((s.trace_with(&x) - c.trace_product(&x).re).abs() < 1e-12);
    }

    #[test]
    fn linear_image_tabulation() {
        let mut rng = rng_from_seed(2);
        let a = ginibre(2, 3, &mut rng);
        let k = random_hermitian(2, &mut rng);
        let img = LinearImage::from_fn(3, |x| Ok(&a.matmul(x).matmul(&a.adjoint()) + &k)).unwrap();
        let x = ginibre(3, 3, &mut rng);
        let direct = &a.matmul(&x).matmul(&a.adjoint()) + &k;
        assert!(img.apply(&x).max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn validation() {
        let mut p = SdpProblem::new();
        let b = p.add_block(2);
        p.add_constraint(vec![(b, SparseHermitian::re_entry(3, 0, 0))], 1.0);
        assert!(p.validate().is_err());
        let mut p = SdpProblem::new();
        p.add_constraint(vec![(0, SparseHermitian::re_entry(3, 0, 0))], 1.0);
        assert!(p.validate().is_err());
    }
}
