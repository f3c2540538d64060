//! Named and seeded test states: Bell, GHZ, Werner, classical-classical,
//! classical-on-B, Markov chains and generic random states, plus the families
//! of candidate broadcasters tried against them.

use num_complex::Complex64;
use rand::Rng;

use crate::classicality::basis_broadcaster;
use crate::error::Result;
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::objects::{Channel, DensityMatrix, PureState};
use crate::random::{derive_seed, random_state, random_unitary, rng_from_seed};

#[derive(Debug, Clone)]
pub struct CorpusState {
    pub label: String,
    pub state: DensityMatrix,
}

impl CorpusState {
    fn new(label: impl Into<String>, state: DensityMatrix) -> Self {
        Self {
            label: label.into(),
            state,
        }
    }
}

fn real_ket(dims: Vec<usize>, amps: &[f64]) -> DensityMatrix {
    PureState::normalized(dims, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .expect("nonzero amplitudes")
        .to_density()
}

/// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell() -> DensityMatrix {
    real_ket(vec![2, 2], &[1.0, 0.0, 0.0, 1.0])
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz() -> DensityMatrix {
    let mut amps = [0.0; 8];
    amps[0] = 1.0;
    amps[7] = 1.0;
    real_ket(vec![2, 2, 2], &amps)
}

/// `p |ψ⁻⟩⟨ψ⁻| + (1 − p) I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    let singlet = real_ket(vec![2, 2], &[0.0, 1.0, -1.0, 0.0]);
    let m = &singlet.matrix().scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    DensityMatrix::new(vec![2, 2], m)
}

fn random_probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// `Σ_ij p_ij |a_i⟩⟨a_i| ⊗ |b_j⟩⟨b_j|` in random local bases.
pub fn classical_classical(seed: u64, da: usize, db: usize) -> Result<DensityMatrix> {
    let mut rng = rng_from_seed(seed);
    let p = random_probabilities(da * db, &mut rng);
    let u = random_unitary(da, &mut rng).kron(&random_unitary(db, &mut rng));
    DensityMatrix::diagonal(vec![da, db], &p)?.conjugate(&u, vec![da, db])
}

/// `Σ_j p_j ρ_j ⊗ |b_j⟩⟨b_j|` with random `ρ_j` and a random basis `b_j`.
pub fn classical_on_b(seed: u64, da: usize, db: usize) -> Result<DensityMatrix> {
    let mut rng = rng_from_seed(seed);
    let p = random_probabilities(db, &mut rng);
    let parts: Vec<DensityMatrix> = (0..db)
        .map(|j| random_state(&[da], &mut rng).tensor(&DensityMatrix::basis(vec![db], j)))
        .collect();
    let u = ComplexMatrix::identity(da).kron(&random_unitary(db, &mut rng));
    DensityMatrix::mixture(&p, &parts)?.conjugate(&u, vec![da, db])
}

/// Generic full-rank random state.
pub fn random_bipartite(seed: u64, da: usize, db: usize) -> DensityMatrix {
    random_state(&[da, db], &mut rng_from_seed(seed))
}

/// Classical Markov chain: one bit copied into A, B and C.
pub fn copied_bit_chain(p0: f64) -> Result<DensityMatrix> {
    let mut probs = [0.0; 8];
    probs[0] = p0;
    probs[7] = 1.0 - p0;
    DensityMatrix::diagonal(vec![2, 2, 2], &probs)
}

/// `Σ_b p_b ρ_A^b ⊗ |b⟩⟨b| ⊗ ρ_C^b`, a quantum Markov chain A–B–C.
pub fn markov_chain(seed: u64, da: usize, db: usize, dc: usize) -> Result<DensityMatrix> {
    let mut rng = rng_from_seed(seed);
    let p = random_probabilities(db, &mut rng);
    let parts: Vec<DensityMatrix> = (0..db)
        .map(|b| {
            random_state(&[da], &mut rng)
                .tensor(&DensityMatrix::basis(vec![db], b))
                .tensor(&random_state(&[dc], &mut rng))
        })
        .collect();
    DensityMatrix::mixture(&p, &parts)
}

/// `ρ_AB ⊗ ρ_C`.
pub fn product_ac(seed: u64) -> DensityMatrix {
    let mut rng = rng_from_seed(seed);
    random_state(&[2, 2], &mut rng).tensor(&random_state(&[2], &mut rng))
}

pub fn random_tripartite(seed: u64) -> DensityMatrix {
    random_state(&[2, 2, 2], &mut rng_from_seed(seed))
}

/// Seeded classical-on-B states (qubit B, A of dimension 2 or 3).
pub fn classical_on_b_corpus(seed: u64, count: usize) -> Result<Vec<CorpusState>> {
    (0..count)
        .map(|i| {
            let da = 2 + i % 2;
            let s = derive_seed(seed, 100 + i as u64);
            let state = if i % 4 == 3 {
                classical_classical(s, da, 2)?
            } else {
                classical_on_b(s, da, 2)?
            };
            Ok(CorpusState::new(format!("classical-on-B #{i}"), state))
        })
        .collect()
}

/// Bell, Werner at `p ∈ {0.3, 0.7}` and seeded random two-qubit states.
pub fn non_classical_corpus(seed: u64, count: usize) -> Result<Vec<CorpusState>> {
    let mut out = vec![
        CorpusState::new("bell", bell()),
        CorpusState::new("werner 0.3", werner(0.3)?),
        CorpusState::new("werner 0.7", werner(0.7)?),
    ];
    let mut i = 0;
    while out.len() < count {
        out.push(CorpusState::new(
            format!("random #{i}"),
            random_bipartite(derive_seed(seed, 200 + i as u64), 2, 2),
        ));
        i += 1;
    }
    out.truncate(count);
    Ok(out)
}

/// Seeded classical-classical states.
pub fn classical_classical_corpus(seed: u64, count: usize) -> Result<Vec<CorpusState>> {
    (0..count)
        .map(|i| {
            let da = 2 + i % 2;
            let state = classical_classical(derive_seed(seed, 300 + i as u64), da, 2)?;
            Ok(CorpusState::new(format!("classical-classical #{i}"), state))
        })
        .collect()
}

/// Markov chains, GHZ, `ρ_AB ⊗ ρ_C` and random qubit triples.
pub fn tripartite_corpus(seed: u64, count: usize) -> Result<Vec<CorpusState>> {
    let mut out = vec![
        CorpusState::new("ghz", ghz()),
        CorpusState::new("copied bit", copied_bit_chain(0.3)?),
        CorpusState::new("product AB|C", product_ac(derive_seed(seed, 400))),
    ];
    let mut i = 0u64;
    while out.len() < count {
        let s = derive_seed(seed, 500 + i);
        let state = match i % 3 {
            0 => CorpusState::new(format!("markov #{i}"), markov_chain(s, 2, 2, 2)?),
            1 => CorpusState::new(format!("random #{i}"), random_tripartite(s)),
            _ => CorpusState::new(format!("product AB|C #{i}"), product_ac(s)),
        };
        out.push(state);
        i += 1;
    }
    out.truncate(count);
    Ok(out)
}

/// Orthonormal eigenbasis (columns) of a Hermitian matrix.
pub fn eigenbasis(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.eigenvectors)
}

/// The Hadamard-type Fourier basis of dimension `d`.
pub fn fourier_basis(d: usize) -> ComplexMatrix {
    let s = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |j, k| {
        Complex64::from_polar(s, 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64)
    })
}

/// `X ↦ X ⊗ τ`: keeps one perfect copy and appends a fixed state.
pub fn append_copy(tau: &DensityMatrix) -> Channel {
    Channel::append(tau.dims().to_vec(), tau)
}

/// Candidate broadcasters `B → BB` for a state with marginal `rho_b`:
/// basis broadcasters in the computational, Fourier and `ρ_B` eigenbases,
/// and appending a copy of `ρ_B`.
pub fn candidate_broadcasters(rho_b: &DensityMatrix) -> Result<Vec<(String, Channel)>> {
    let d = rho_b.dim();
    Ok(vec![
        (
            "computational basis".into(),
            basis_broadcaster(&ComplexMatrix::identity(d))?,
        ),
        ("fourier basis".into(), basis_broadcaster(&fourier_basis(d))?),
        (
            "marginal eigenbasis".into(),
            basis_broadcaster(&eigenbasis(rho_b.matrix())?)?,
        ),
        ("append marginal".into(), append_copy(rho_b)),
    ])
}

/// Candidate broadcasters for a pair of single-system states.
pub fn pair_broadcasters(rho: &DensityMatrix, rho2: &DensityMatrix) -> Result<Vec<(String, Channel)>> {
    let avg = DensityMatrix::mixture(&[0.5, 0.5], &[rho.clone(), rho2.clone()])?;
    let mut out = candidate_broadcasters(&avg)?;
    out.push((
        "first eigenbasis".into(),
        basis_broadcaster(&eigenbasis(rho.matrix())?)?,
    ));
    out.push((
        "second eigenbasis".into(),
        basis_broadcaster(&eigenbasis(rho2.matrix())?)?,
    ));
    out.push(("append first".into(), append_copy(rho)));
    out.push(("append second".into(), append_copy(rho2)));
    Ok(out)
}

/// Pseudo-random stream of commuting pairs `U diag(p) U†`, `U diag(q) U†`.
pub fn commuting_pair(seed: u64, d: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    let mut rng = rng_from_seed(seed);
    let u = random_unitary(d, &mut rng);
    let p = random_probabilities(d, &mut rng);
    let q = random_probabilities(d, &mut rng);
    Ok((
        DensityMatrix::diagonal(vec![d], &p)?.conjugate(&u, vec![d])?,
        DensityMatrix::diagonal(vec![d], &q)?.conjugate(&u, vec![d])?,
    ))
}

/// Pseudo-random non-commuting pair of full-rank states.
pub fn non_commuting_pair(seed: u64, d: usize) -> (DensityMatrix, DensityMatrix) {
    let mut rng = rng_from_seed(seed);
    (random_state(&[d], &mut rng), random_state(&[d], &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classicality::classify;
    use crate::measures::{conditional_mutual_information, mutual_information};

    #[test]
    fn named_states() {
        assert!((mutual_information(&bell(), &[0], &[1]).unwrap() - 2.0).abs() < 1e-9);
        assert!((conditional_mutual_information(&ghz(), &[0], &[2], &[1]).unwrap() - 1.0).abs() < 1e-9);
        assert!(werner(1.2).is_err());
    }

    #[test]
    fn generated_families_classify_as_labelled() {
        for s in classical_on_b_corpus(1, 8).unwrap() {
            assert!(classify(&s.state).unwrap().classical_on_b, "{}", s.label);
        }
        for s in classical_classical_corpus(1, 4).unwrap() {
            assert!(classify(&s.state).unwrap().classical_classical, "{}", s.label);
        }
        for s in non_classical_corpus(1, 8).unwrap() {
            let v = classify(&s.state).unwrap();
            assert!(!v.classical_on_b && !v.classical_on_a, "{}", s.label);
        }
    }

    #[test]
    fn markov_chains_have_zero_cmi() {
        let m = markov_chain(3, 2, 3, 2).unwrap();
        assert!(conditional_mutual_information(&m, &[0], &[2], &[1]).unwrap().abs() < 1e-9);
        let c = copied_bit_chain(0.4).unwrap();
        assert!(conditional_mutual_information(&c, &[0], &[2], &[1]).unwrap().abs() < 1e-9);
    }
}
