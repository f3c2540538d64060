//! Real symmetric embedding `φ(H) = [[Re H, −Im H], [Im H, Re H]]`.
//!
//! `Tr(C H) = ½ Tr(φ(C) φ(H))` for Hermitian `C, H`, so every complex
//! coefficient `C` becomes `½ φ(C)` on the real side.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::problem::{SdpProblem, SparseHermitian};
use crate::linalg::ComplexMatrix;

/// Symmetric real matrix as merged upper-triangle entries `(r, c, v)`, `r ≤ c`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RealSparse {
    pub entries: Vec<(usize, usize, f64)>,
}

impl RealSparse {
    fn push(&mut self, r: usize, c: usize, v: f64) {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        self.entries.push((r, c, v));
    }

    fn compact(&mut self) {
        self.entries.sort_by_key(|e| (e.0, e.1));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for &(r, c, v) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        out.retain(|e| e.2 != 0.0);
        self.entries = out;
    }

    /// `⟨A, X⟩ = Tr(A X)` for symmetric `X`.
    pub fn dot(&self, x: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| if r == c { v * x[(r, r)] } else { 2.0 * v * x[(r, c)] })
            .sum()
    }

    pub fn add_to(&self, out: &mut DMatrix<f64>, s: f64) {
        for &(r, c, v) in &self.entries {
            out[(r, c)] += s * v;
            if r != c {
                out[(c, r)] += s * v;
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        self.add_to(&mut m, 1.0);
        m
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| if r == c { v * v } else { 2.0 * v * v })
            .sum()
    }

    pub fn scale(&mut self, s: f64) {
        for e in &mut self.entries {
            e.2 *= s;
        }
    }
}

/// `½ φ(H)` for a sparse Hermitian `H` of side `n`.
pub fn embed_coefficient(h: &SparseHermitian) -> RealSparse {
    let n = h.dim();
    let mut out = RealSparse::default();
    for &(i, j, v) in h.entries() {
        let re = 0.5 * v.re;
        let im = 0.5 * v.im;
        out.push(i, j, re);
        out.push(n + i, n + j, re);
        if i != j && im != 0.0 {
            out.push(i, n + j, -im);
            out.push(j, n + i, im);
        }
    }
    out.compact();
    out
}

/// `φ(H)` as a dense real matrix.
pub fn embed_matrix(h: &ComplexMatrix) -> DMatrix<f64> {
    let n = h.rows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Hermitian matrix closest to `x` in the range of `φ`, read back:
/// `Re = (X₁₁ + X₂₂)/2`, `Im = (X₂₁ − X₁₂)/2`.
pub fn extract(x: &DMatrix<f64>) -> ComplexMatrix {
    let n = x.nrows() / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (x[(i, j)] + x[(n + i, n + j)]);
        let im = 0.5 * (x[(n + i, j)] - x[(i, n + j)]);
        Complex64::new(re, im)
    })
    .hermitian_part()
}

/// Real-embedded problem in minimization form:
/// minimize `⟨c, X⟩` subject to `⟨a_i, X⟩ = b_i`, `X ⪰ 0`, with `c = −½φ(C)`.
#[derive(Debug, Clone)]
pub struct RealProblem {
    pub blocks: Vec<usize>,
    pub c: Vec<RealSparse>,
    pub a: Vec<Vec<(usize, RealSparse)>>,
    pub b: Vec<f64>,
}

pub fn embed_problem(p: &SdpProblem) -> RealProblem {
    let blocks = p.blocks().iter().map(|&n| 2 * n).collect();
    let c = p
        .objective()
        .iter()
        .map(|h| {
            let mut e = embed_coefficient(h);
            e.scale(-1.0);
            e
        })
        .collect();
    let a = p
        .constraints()
        .iter()
        .map(|con| con.terms.iter().map(|(k, h)| (*k, embed_coefficient(h))).collect())
        .collect();
    let b = p.constraints().iter().map(|con| con.rhs).collect();
    RealProblem { blocks, c, a, b }
}
