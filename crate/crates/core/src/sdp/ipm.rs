//! Infeasible primal-dual interior-point method (Mehrotra predictor-corrector,
//! Nesterov–Todd scaling) on the real-embedded problem.
//!
//! Internally: minimize `⟨c, X⟩` s.t. `⟨a_i, X⟩ = b_i`, `X ⪰ 0`, with dual
//! maximize `bᵀy` s.t. `Σ y_i a_i + Z = c`, `Z ⪰ 0`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::embed::{embed_problem, extract, RealProblem, RealSparse};
use super::problem::SdpProblem;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    /// Bound on the relative primal infeasibility, dual infeasibility and gap.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Unused by the interior-point method, which is deterministic.
    pub seed: u64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_iterations: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

/// Solution in terms of the original (maximization) problem. `dual_vector`
/// is `y` with `Σ y_i A_i − C ⪰ 0`, and `dual_value = bᵀy`.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// The iteration stopped making progress before reaching the tolerance.
    pub stalled: bool,
    pub iterations: usize,
    pub primal_blocks: Vec<ComplexMatrix>,
    pub dual_vector: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub residuals: Residuals,
    /// Constraints removed as linearly dependent by presolve.
    pub dropped_constraints: Vec<usize>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

/// Relative residual norm below which a constraint counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-9;

struct Presolved {
    problem: RealProblem,
    /// Original index of each kept row, and the factor it was divided by.
    kept: Vec<(usize, f64)>,
    dropped: Vec<usize>,
}

fn block_offsets(blocks: &[usize]) -> (Vec<usize>, usize) {
    let mut offs = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for &n in blocks {
        offs.push(acc);
        acc += n * (n + 1) / 2;
    }
    (offs, acc)
}

/// `svec` index of upper entry `(r, c)` in a block of side `n`.
fn svec_index(n: usize, r: usize, c: usize) -> usize {
    r * n - r * (r + 1) / 2 + c
}

/// Removes linearly dependent constraints (after checking that their
/// right-hand sides agree) and scales every row to unit norm.
fn presolve(p: RealProblem) -> Result<Presolved> {
    let (offs, dim) = block_offsets(&p.blocks);
    let m = p.b.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let bmax = p.b.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    for i in 0..m {
        let mut v = vec![0.0; dim];
        for (k, a) in &p.a[i] {
            let n = p.blocks[*k];
            for &(r, c, val) in &a.entries {
                let w = if r == c { 1.0 } else { std::f64::consts::SQRT_2 };
                v[offs[*k] + svec_index(n, r, c)] += w * val;
            }
        }
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            if p.b[i].abs() > 1e-12 * (1.0 + bmax) {
                return Err(Error::InconsistentProblem(format!(
                    "constraint {i} has no coefficients but right-hand side {}",
                    p.b[i]
                )));
            }
            dropped.push(i);
            continue;
        }
        let mut bi = p.b[i] / norm0;
        for x in &mut v {
            *x /= norm0;
        }
        for _ in 0..2 {
            for (q, bq) in basis.iter().zip(&beta) {
                let r: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                if r != 0.0 {
                    for (x, qx) in v.iter_mut().zip(q) {
                        *x -= r * qx;
                    }
                    bi -= r * bq;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < DEPENDENCE_TOL {
            if bi.abs() > 1e-8 * (1.0 + bmax / norm0) {
                return Err(Error::InconsistentProblem(format!(
                    "constraint {i} is a combination of earlier ones with a conflicting right-hand side (mismatch {bi:.3e})"
                )));
            }
            dropped.push(i);
            continue;
        }
        for x in &mut v {
            *x /= norm;
        }
        basis.push(v);
        beta.push(bi / norm);
        kept.push((i, norm0));
    }
    let mut a = Vec::with_capacity(kept.len());
    let mut b = Vec::with_capacity(kept.len());
    for &(i, s) in &kept {
        let row = p.a[i]
            .iter()
            .map(|(k, sp)| {
                let mut sp = sp.clone();
                sp.scale(1.0 / s);
                (*k, sp)
            })
            .collect();
        a.push(row);
        b.push(p.b[i] / s);
    }
    Ok(Presolved {
        problem: RealProblem {
            blocks: p.blocks,
            c: p.c,
            a,
            b,
        },
        kept,
        dropped,
    })
}

type Blocks = Vec<DMatrix<f64>>;

struct Solver<'a> {
    p: &'a RealProblem,
    c: Blocks,
    /// For every block, the constraints touching it.
    by_block: Vec<Vec<(usize, &'a RealSparse)>>,
    total_n: f64,
    norm_b: f64,
    norm_c: f64,
}

struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    w: DMatrix<f64>,
    lambda: DVector<f64>,
    lx_inv: DMatrix<f64>,
    lz_inv: DMatrix<f64>,
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

impl<'a> Solver<'a> {
    fn new(p: &'a RealProblem) -> Self {
        let c: Blocks = p.blocks.iter().zip(&p.c).map(|(&n, s)| s.to_dense(n)).collect();
        let mut by_block = vec![Vec::new(); p.blocks.len()];
        for (i, row) in p.a.iter().enumerate() {
            for (k, a) in row {
                by_block[*k].push((i, a));
            }
        }
        let norm_b = p.b.iter().map(|x| x * x).sum::<f64>().sqrt();
        let norm_c = c.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
        Self {
            p,
            c,
            by_block,
            total_n: p.blocks.iter().sum::<usize>() as f64,
            norm_b,
            norm_c,
        }
    }

    fn m(&self) -> usize {
        self.p.b.len()
    }

    fn a_op(&self, x: &Blocks) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.p
                .a
                .iter()
                .map(|row| row.iter().map(|(k, a)| a.dot(&x[*k])).sum::<f64>()),
        )
    }

    fn at_op(&self, y: &DVector<f64>) -> Blocks {
        let mut out: Blocks = self.p.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (i, row) in self.p.a.iter().enumerate() {
            for (k, a) in row {
                a.add_to(&mut out[*k], y[i]);
            }
        }
        out
    }

    fn initial_point(&self) -> (Blocks, DVector<f64>, Blocks) {
        let mut x = Vec::new();
        let mut z = Vec::new();
        for (k, &n) in self.p.blocks.iter().enumerate() {
            let sn = (n as f64).sqrt();
            let mut xi = 10f64.max(sn);
            let mut eta = 10f64.max(sn).max(self.c[k].norm());
            for &(i, a) in &self.by_block[k] {
                let fa = a.frobenius_sq().sqrt();
                xi = xi.max(sn * (1.0 + self.p.b[i].abs()) / (1.0 + fa));
                eta = eta.max(fa);
            }
            x.push(DMatrix::identity(n, n) * xi);
            z.push(DMatrix::identity(n, n) * eta);
        }
        (x, DVector::zeros(self.m()), z)
    }

    fn scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
        let n = x.nrows();
        let lx = Cholesky::new(x.clone())?.l();
        let lz = Cholesky::new(z.clone())?.l();
        let id = DMatrix::identity(n, n);
        let lx_inv = lx.solve_lower_triangular(&id)?;
        let lz_inv = lz.solve_lower_triangular(&id)?;
        let svd = (lz.transpose() * &lx).svd(false, true);
        let q = svd.v_t?.transpose();
        let lambda = svd.singular_values;
        if lambda.iter().any(|&s| s.is_nan() || s <= 0.0) {
            return None;
        }
        let inv_sqrt = DMatrix::from_diagonal(&lambda.map(|s| 1.0 / s.sqrt()));
        let sqrt = DMatrix::from_diagonal(&lambda.map(|s| s.sqrt()));
        let g = &lx * &q * inv_sqrt;
        let g_inv = sqrt * q.transpose() * &lx_inv;
        let w = &g * g.transpose();
        Some(Scaling {
            g,
            g_inv,
            w,
            lambda,
            lx_inv,
            lz_inv,
        })
    }

    /// `W a_j W` for every block touched by constraint `j`.
    fn waw(&self, j: usize, sc: &[Scaling]) -> Vec<(usize, DMatrix<f64>)> {
        self.p.a[j]
            .iter()
            .map(|(k, a)| {
                let w = &sc[*k].w;
                let n = w.nrows();
                let out = if a.entries.len() < n {
                    let mut out = DMatrix::zeros(n, n);
                    for &(r, c, v) in &a.entries {
                        let wr = w.column(r);
                        let wc = w.column(c);
                        if r == c {
                            out.ger(v, &wr, &wr, 1.0);
                        } else {
                            out.ger(v, &wr, &wc, 1.0);
                            out.ger(v, &wc, &wr, 1.0);
                        }
                    }
                    out
                } else {
                    w * a.to_dense(n) * w
                };
                (*k, out)
            })
            .collect()
    }

    /// Schur complement `M_ij = ⟨a_i, W a_j W⟩`.
    fn schur(&self, sc: &[Scaling]) -> DMatrix<f64> {
        let m = self.m();
        let cols: Vec<Vec<(usize, f64)>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let waw = self.waw(j, sc);
                let mut col = Vec::new();
                for (k, mat) in &waw {
                    for &(i, a) in &self.by_block[*k] {
                        if i >= j {
                            col.push((i, a.dot(mat)));
                        }
                    }
                }
                col
            })
            .collect();
        let mut mm = DMatrix::zeros(m, m);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col {
                mm[(i, j)] += v;
            }
        }
        for j in 0..m {
            for i in j + 1..m {
                mm[(j, i)] = mm[(i, j)];
            }
        }
        mm
    }

    fn factor(mm: DMatrix<f64>) -> Option<SchurFactor> {
        let m = mm.nrows();
        if let Some(ch) = Cholesky::new(mm.clone()) {
            return Some(SchurFactor::Cholesky(ch));
        }
        let diag_max = (0..m).map(|i| mm[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        for eps in [1e-14, 1e-12, 1e-10] {
            let reg = &mm + DMatrix::identity(m, m) * (eps * diag_max);
            if let Some(ch) = Cholesky::new(reg) {
                return Some(SchurFactor::Cholesky(ch));
            }
        }
        let lu = mm.lu();
        lu.is_invertible().then_some(SchurFactor::Lu(lu))
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        sc: &[Scaling],
        f: &SchurFactor,
        rp: &DVector<f64>,
        rd: &Blocks,
        rc: &Blocks,
    ) -> (Blocks, DVector<f64>, Blocks) {
        let tmp: Blocks = rc
            .iter()
            .zip(rd)
            .zip(sc)
            .map(|((rck, rdk), s)| rck - &s.w * rdk * &s.w)
            .collect();
        let rhs = rp - self.a_op(&tmp);
        let dy = f.solve(&rhs);
        let aty = self.at_op(&dy);
        let dz: Blocks = rd.iter().zip(&aty).map(|(r, a)| sym(&(r - a))).collect();
        let dx: Blocks = rc
            .iter()
            .zip(&dz)
            .zip(sc)
            .map(|((r, d), s)| sym(&(r - &s.w * d * &s.w)))
            .collect();
        (dx, dy, dz)
    }
}

enum SchurFactor {
    Cholesky(Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl SchurFactor {
    fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        match self {
            SchurFactor::Cholesky(c) => c.solve(b),
            SchurFactor::Lu(l) => l.solve(b).unwrap_or_else(|| DVector::zeros(b.len())),
        }
    }
}

/// Largest `α` with `X + α D ⪰ 0`, given `L⁻¹` for `X = L Lᵀ`.
fn max_step(l_inv: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let m = sym(&(l_inv * d * l_inv.transpose()));
    let min = SymmetricEigen::new(m).eigenvalues.min();
    if min >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / min
    }
}

struct Iterate {
    x: Blocks,
    y: DVector<f64>,
    z: Blocks,
    res: Residuals,
    pobj: f64,
    dobj: f64,
}

/// Above this magnitude an objective is treated as diverging.
const DIVERGENCE: f64 = 1e10;

pub fn solve(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let pre = presolve(embed_problem(problem))?;
    let p = &pre.problem;
    let s = Solver::new(p);

    let (mut x, mut y, mut z) = s.initial_point();
    let mut best: Option<Iterate> = None;
    let mut status = SdpStatus::MaxIterations;
    let mut stalled = false;
    let mut small_steps = 0;
    let mut iterations = 0;
    let b = DVector::from_column_slice(&p.b);

    for iter in 0..=opts.max_iterations {
        iterations = iter;
        let rp = &b - s.a_op(&x);
        let aty = s.at_op(&y);
        let rd: Blocks = s.c.iter().zip(&aty).zip(&z).map(|((c, a), z)| c - a - z).collect();
        let pobj: f64 = s.c.iter().zip(&x).map(|(c, x)| dot(c, x)).sum();
        let dobj = b.dot(&y);
        let res = Residuals {
            primal: rp.norm() / (1.0 + s.norm_b),
            dual: rd.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt() / (1.0 + s.norm_c),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        if best.as_ref().is_none_or(|bst| res.max() < bst.res.max()) {
            best = Some(Iterate {
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                res,
                pobj,
                dobj,
            });
        }
        if res.max() < opts.tolerance {
            status = SdpStatus::Optimal;
            break;
        }
        if (dobj > DIVERGENCE && res.dual < opts.tolerance) || (pobj < -DIVERGENCE && res.primal < opts.tolerance) {
            status = SdpStatus::Infeasible;
            break;
        }
        if iter == opts.max_iterations {
            break;
        }
        let mu: f64 = x.iter().zip(&z).map(|(x, z)| dot(x, z)).sum::<f64>() / s.total_n;

        let sc: Option<Vec<Scaling>> = x.iter().zip(&z).map(|(x, z)| Solver::scaling(x, z)).collect();
        let Some(sc) = sc else {
            stalled = true;
            break;
        };
        let Some(factor) = Solver::factor(s.schur(&sc)) else {
            stalled = true;
            break;
        };

        // predictor
        let rc_aff: Blocks = x.iter().map(|x| -x).collect();
        let (dxa, _dya, dza) = s.direction(&sc, &factor, &rp, &rd, &rc_aff);
        let ap_aff = sc
            .iter()
            .zip(&dxa)
            .map(|(s, d)| max_step(&s.lx_inv, d))
            .fold(1.0, f64::min);
        let ad_aff = sc
            .iter()
            .zip(&dza)
            .map(|(s, d)| max_step(&s.lz_inv, d))
            .fold(1.0, f64::min);
        let mu_aff: f64 = x
            .iter()
            .zip(&dxa)
            .zip(z.iter().zip(&dza))
            .map(|((x, dx), (z, dz))| dot(&(x + dx * ap_aff), &(z + dz * ad_aff)))
            .sum::<f64>()
            / s.total_n;
        let sigma = (mu_aff.max(0.0) / mu).powi(3).clamp(0.0, 1.0);

        // corrector
        let rc: Blocks = sc
            .iter()
            .zip(dxa.iter().zip(&dza))
            .map(|(s, (dx, dz))| {
                let n = s.lambda.len();
                let dxs = &s.g_inv * dx * s.g_inv.transpose();
                let dzs = s.g.transpose() * dz * &s.g;
                let corr = sym(&(dxs * dzs));
                let t = DMatrix::from_fn(n, n, |i, j| {
                    let mut r = -corr[(i, j)];
                    if i == j {
                        r += sigma * mu - s.lambda[i] * s.lambda[i];
                    }
                    2.0 * r / (s.lambda[i] + s.lambda[j])
                });
                &s.g * t * s.g.transpose()
            })
            .collect();
        let (dx, dy, dz) = s.direction(&sc, &factor, &rp, &rd, &rc);
        let tau = (0.9 + 0.09 * ap_aff.min(ad_aff)).min(0.98);
        let ap = sc
            .iter()
            .zip(&dx)
            .map(|(s, d)| max_step(&s.lx_inv, d))
            .fold(f64::INFINITY, f64::min);
        let ad = sc
            .iter()
            .zip(&dz)
            .map(|(s, d)| max_step(&s.lz_inv, d))
            .fold(f64::INFINITY, f64::min);
        let ap = (tau * ap).min(1.0);
        let ad = (tau * ad).min(1.0);
        for (xk, d) in x.iter_mut().zip(&dx) {
            *xk = sym(&(&*xk + d * ap));
        }
        y += &dy * ad;
        for (zk, d) in z.iter_mut().zip(&dz) {
            *zk = sym(&(&*zk + d * ad));
        }
        if ap.max(ad) < 1e-9 {
            small_steps += 1;
            if small_steps >= 3 {
                stalled = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }

    let it = best.expect("at least one iterate is recorded");
    let (x, y, res, pobj, dobj) = if status == SdpStatus::Optimal || status == SdpStatus::Infeasible {
        // the final iterate is the one that triggered the stop
        let rp = &b - s.a_op(&x);
        let aty = s.at_op(&y);
        let rd: Blocks = s.c.iter().zip(&aty).zip(&z).map(|((c, a), z)| c - a - z).collect();
        let pobj: f64 = s.c.iter().zip(&x).map(|(c, x)| dot(c, x)).sum();
        let dobj = b.dot(&y);
        let res = Residuals {
            primal: rp.norm() / (1.0 + s.norm_b),
            dual: rd.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt() / (1.0 + s.norm_c),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        (x, y, res, pobj, dobj)
    } else {
        let _ = &it.z;
        (it.x, it.y, it.res, it.pobj, it.dobj)
    };

    let primal_blocks: Vec<ComplexMatrix> = x.iter().map(extract).collect();
    let mut dual_vector = vec![0.0; problem.constraints().len()];
    for (yi, &(orig, scale)) in y.iter().zip(&pre.kept) {
        dual_vector[orig] = -yi / scale;
    }
    let primal_value = problem.objective_value(&primal_blocks);
    debug_assert!((primal_value + pobj).abs() <= 1e-8 * (1.0 + pobj.abs()) || !primal_value.is_finite());
    Ok(SdpSolution {
        status,
        stalled,
        iterations,
        primal_blocks,
        dual_vector,
        primal_value,
        dual_value: -dobj,
        residuals: res,
        dropped_constraints: pre.dropped,
    })
}
