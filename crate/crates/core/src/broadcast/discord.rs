//! Quantum discord `D(ρ) = I(A:B) − max_M I(A:B')`, where `B'` is the
//! classical outcome of a POVM `M` on the measured side.
//!
//! The maximum runs over rank-one POVMs `M_k = S^{-1/2} w_k w_k† S^{-1/2}`
//! with `S = Σ_k w_k w_k†`, parametrized freely by the vectors `w_k`. Each
//! restart runs BFGS from its own derived seed; restarts are merged by
//! maximum with ties broken by index, so the result does not depend on
//! scheduling.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::check_bipartite;
use crate::classicality::{classify_side, ClassifyOptions};
use crate::error::Result;
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::measures::{entropy, mutual_information, spectrum_entropy};
use crate::objects::{DensityMatrix, Povm, Side};
use crate::random::{derive_seed, gaussian_complex, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Number of POVM outcomes; `None` means `d²` for a `d`-dimensional side.
    pub outcomes: Option<usize>,
    pub max_iterations: usize,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 32,
            outcomes: None,
            max_iterations: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiscordResult {
    /// `mutual_information − classical_mi`, in bits.
    pub value: f64,
    pub best_povm: Povm,
    pub classical_mi: f64,
    pub mutual_information: f64,
    pub side: Side,
    pub restarts: usize,
    /// At least two restarts reached the best value within `1e-6`.
    pub converged: bool,
}

/// Spread in classical MI within which two restarts count as agreeing.
const AGREEMENT: f64 = 1e-6;

struct Objective {
    rho: ComplexMatrix,
    da: usize,
    db: usize,
    k: usize,
    s_a: f64,
}

impl Objective {
    fn vectors(&self, x: &[f64]) -> Option<Vec<Vec<Complex64>>> {
        let (db, k) = (self.db, self.k);
        let w: Vec<Vec<Complex64>> = (0..k)
            .map(|j| {
                (0..db)
                    .map(|b| Complex64::new(x[2 * (j * db + b)], x[2 * (j * db + b) + 1]))
                    .collect()
            })
            .collect();
        let mut s = ComplexMatrix::zeros(db, db);
        for v in &w {
            s += &ComplexMatrix::projector(v);
        }
        let eig = hermitian_eig(&s).ok()?;
        if eig.min_eigenvalue() <= 1e-12 * eig.max_eigenvalue() {
            return None;
        }
        let s_inv = eig.reconstruct_with(|l| 1.0 / l.sqrt());
        Some(w.iter().map(|v| s_inv.apply_vec(v)).collect())
    }

    /// `I(A:B')` for the POVM with elements `v_k v_k†`.
    fn classical_mi(&self, v: &[Vec<Complex64>]) -> f64 {
        let (da, db) = (self.da, self.db);
        let n = da * db;
        let r = self.rho.data();
        let mut cond = 0.0;
        for vk in v {
            let omega = ComplexMatrix::from_fn(da, da, |a, a2| {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..db {
                    let cb = vk[b].conj();
                    if cb == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let row = (a * db + b) * n + a2 * db;
                    let mut inner = Complex64::new(0.0, 0.0);
                    for b2 in 0..db {
                        inner += r[row + b2] * vk[b2];
                    }
                    acc += cb * inner;
                }
                acc
            });
            let p = omega.trace().re;
            if p <= 1e-15 {
                continue;
            }
            let ev = match hermitian_eig(&omega.hermitian_part()) {
                Ok(e) => e.eigenvalues,
                Err(_) => continue,
            };
            let normalized: Vec<f64> = ev.iter().map(|l| l / p).collect();
            cond += p * spectrum_entropy(&normalized);
        }
        self.s_a - cond
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self.vectors(x) {
            Some(v) => self.classical_mi(&v),
            None => f64::NEG_INFINITY,
        }
    }
}

fn gradient(obj: &Objective, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = xp[i];
            xp[i] = orig + h;
            let fp = obj.value(&xp);
            xp[i] = orig - h;
            let fm = obj.value(&xp);
            xp[i] = orig;
            if fp.is_finite() && fm.is_finite() {
                (fp - fm) / (2.0 * h)
            } else {
                0.0
            }
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS ascent on the classical MI; returns the final point and value.
fn maximize(obj: &Objective, mut x: Vec<f64>, max_iterations: usize) -> (Vec<f64>, f64) {
    let n = x.len();
    let h = 1e-6;
    let mut f = obj.value(&x);
    if !f.is_finite() {
        return (x, f);
    }
    let mut g = gradient(obj, &x, h);
    let mut hinv = vec![0.0; n * n];
    for i in 0..n {
        hinv[i * n + i] = 1.0;
    }
    let mut stale = 0;
    for _ in 0..max_iterations {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm < 1e-9 {
            break;
        }
        // ascent direction d = H g
        let mut d: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        if dot(&d, &g) <= 0.0 {
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            d = g.clone();
        }
        let slope = dot(&d, &g);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let fnew = obj.value(&xn);
            if fnew.is_finite() && fnew >= f + 1e-4 * step * slope {
                accepted = Some((xn, fnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = accepted else { break };
        let gn = gradient(obj, &xn, h);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        // curvature of the negated objective
        let y: Vec<f64> = g.iter().zip(&gn).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        let gain = fnew - f;
        x = xn;
        f = fnew;
        g = gn;
        if gain < 1e-13 {
            stale += 1;
            if stale >= 5 {
                break;
            }
        } else {
            stale = 0;
        }
    }
    (x, f)
}

pub fn discord(rho: &DensityMatrix, side: Side) -> Result<DiscordResult> {
    discord_with(rho, side, &DiscordOptions::default())
}

pub fn discord_with(rho: &DensityMatrix, side: Side, opts: &DiscordOptions) -> Result<DiscordResult> {
    check_bipartite(rho)?;
    let rho_m = match side {
        Side::A => rho.permute(&[1, 0])?,
        Side::B => rho.clone(),
    };
    let (da, db) = check_bipartite(&rho_m)?;
    let k = opts.outcomes.unwrap_or(db * db).max(db);
    let obj = Objective {
        rho: rho_m.matrix().clone(),
        da,
        db,
        k,
        s_a: entropy(&rho_m.reduced(&[0])?),
    };
    let mi = mutual_information(&rho_m, &[0], &[1])?;

    // restart 0 measures in a basis where the state looks classical, if any,
    // else in the eigenbasis of ρ_B
    let verdict = classify_side(&rho_m, Side::B, &ClassifyOptions::default())?;
    let basis = match verdict.basis {
        Some(b) => b,
        None => hermitian_eig(rho_m.reduced(&[1])?.matrix())?.eigenvectors,
    };
    let restarts = opts.restarts.max(1);
    let runs: Vec<(Vec<f64>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let x0: Vec<f64> = if r == 0 {
                let scale = 1.0 / ((k as f64) / (db as f64)).sqrt();
                (0..k)
                    .flat_map(|j| {
                        let col = basis.col(j % db);
                        col.into_iter().flat_map(move |z| [z.re * scale, z.im * scale])
                    })
                    .collect()
            } else {
                let mut rng = rng_from_seed(derive_seed(opts.seed, r as u64));
                let mut x: Vec<f64> = Vec::with_capacity(2 * db * k);
                for _ in 0..db * k {
                    let z = gaussian_complex(&mut rng);
                    x.push(z.re);
                    x.push(z.im);
                }
                // occasional sparse starts help reach projective optima
                if rng.random_bool(0.25) {
                    for v in x.iter_mut().skip(2 * db * db) {
                        *v *= 1e-3;
                    }
                }
                x
            };
            maximize(&obj, x0, opts.max_iterations)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.1 > runs[best].1 {
            best = i;
        }
    }
    let best_value = runs[best].1;
    let agreeing = runs.iter().filter(|r| r.1 >= best_value - AGREEMENT).count();
    let v = obj.vectors(&runs[best].0).expect("best restart has a valid POVM");
    let classical_mi = obj.classical_mi(&v);
    let best_povm = Povm::new_with_tolerance(v.iter().map(|vk| ComplexMatrix::projector(vk)).collect(), 1e-8)?;
    let mut value = mi - classical_mi;
    if value < 0.0 && value > -1e-9 {
        value = 0.0;
    }
    Ok(DiscordResult {
        value,
        best_povm,
        classical_mi,
        mutual_information: mi,
        side,
        restarts,
        converged: agreeing >= 2.min(restarts),
    })
}
