//! Seeded random generators for states, unitaries, channels and POVMs.
//!
//! Every generator takes an explicit RNG so callers control reproducibility;
//! [`rng_from_seed`] gives the portable ChaCha stream used across the crate.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{orthonormalize_columns, ComplexMatrix};
use crate::objects::{Channel, DensityMatrix, Povm, PureState};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for a sub-task (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(d, d, rng).hermitian_part()
}

/// Haar-distributed unitary (Gram–Schmidt of a Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let q = orthonormalize_columns(&ginibre(d, d, rng));
        if q.cols() == d {
            return q;
        }
    }
}

/// Isometry from `d_in` into `d_out` dimensions (`d_out ≥ d_in`).
pub fn random_isometry<R: Rng + ?Sized>(d_in: usize, d_out: usize, rng: &mut R) -> ComplexMatrix {
    assert!(d_out >= d_in, "isometry needs d_out >= d_in");
    loop {
        let q = orthonormalize_columns(&ginibre(d_out, d_in, rng));
        if q.cols() == d_in {
            return q;
        }
    }
}

pub fn random_pure_amplitudes<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let g = ginibre(d, 1, rng).col(0);
    let n: f64 = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    g.into_iter().map(|z| z / n).collect()
}

pub fn random_pure_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureState {
    let d = dims.iter().product();
    PureState::new(dims.to_vec(), random_pure_amplitudes(d, rng)).expect("normalized by construction")
}

/// Random mixed state `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let g = ginibre(d, rank.max(1), rng);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(dims.to_vec(), m.scale_real(1.0 / tr)).expect("valid by construction")
}

/// Full-rank random state.
pub fn random_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let d: usize = dims.iter().product();
    random_density(dims, d, rng)
}

/// Random channel from a random Stinespring isometry with the given Kraus rank.
pub fn random_channel<R: Rng + ?Sized>(
    in_dims: &[usize],
    out_dims: &[usize],
    kraus_rank: usize,
    rng: &mut R,
) -> Channel {
    let d_in: usize = in_dims.iter().product();
    let d_out: usize = out_dims.iter().product();
    let mut env = kraus_rank.max(1);
    while d_out * env < d_in {
        env += 1;
    }
    let v = random_isometry(d_in, d_out * env, rng);
    Channel::from_isometry(in_dims.to_vec(), out_dims.to_vec(), env, &v).expect("isometry is a channel")
}

/// Random rank-one POVM with `k ≥ d` outcomes.
pub fn random_povm<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Povm {
    let v = random_isometry(d, k.max(d), rng);
    // rows of an isometry V (k × d) give vectors w_i with Σ w_i w_i† = V†V = I
    let elements = (0..v.rows())
        .map(|i| {
            let w: Vec<Complex64> = v.row(i).iter().map(|z| z.conj()).collect();
            ComplexMatrix::projector(&w)
        })
        .collect();
    Povm::new_with_tolerance(elements, 1e-9).expect("isometry rows form a POVM")
}
