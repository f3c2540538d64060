//! Measure-and-copy broadcasters and the average mutual-information loss
//! `I(A:B) − (1/n) Σ_i I(A:B'_i)` of a channel `B → B'ⁿ`.

use num_complex::Complex64;

use super::check_bipartite;
use crate::error::{Error, Result};
use crate::measures::mutual_information;
use crate::objects::{entanglement_breaking, Channel, DensityMatrix, Povm, PureState};

/// The computational basis of dimension `k`, one vector per outcome.
pub fn computational_prep(k: usize) -> Vec<Vec<Complex64>> {
    (0..k)
        .map(|i| {
            let mut v = vec![Complex64::new(0.0, 0.0); k];
            v[i] = Complex64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Measures `povm` and writes outcome `k` into `n` registers as
/// `|φ_k⟩^{⊗n}`, with `prep[k] = φ_k`.
pub fn measurement_copy_broadcaster(povm: &Povm, prep: &[Vec<Complex64>], n: usize) -> Result<Channel> {
    if n == 0 {
        return Err(Error::InvalidSubsystems(
            "at least one output register is required".into(),
        ));
    }
    if prep.len() != povm.len() {
        return Err(Error::LengthMismatch(povm.len(), prep.len()));
    }
    let d = prep[0].len();
    let preps: Vec<DensityMatrix> = prep
        .iter()
        .map(|v| {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
            let psi = PureState::normalized(vec![d], v.clone())?;
            let mut acc = psi.clone();
            for _ in 1..n {
                acc = acc.tensor(&psi);
            }
            Ok(acc.to_density())
        })
        .collect::<Result<_>>()?;
    entanglement_breaking(povm, &preps)
}

/// Average loss of `I(A:·)` over the `n` output registers of `lambda`
/// applied to B.
pub fn average_mi_loss(rho: &DensityMatrix, lambda: &Channel) -> Result<f64> {
    let (_, db) = check_bipartite(rho)?;
    if lambda.in_dim() != db {
        return Err(Error::DimensionMismatch {
            expected: db,
            found: lambda.in_dim(),
        });
    }
    let n = lambda.out_dims().len();
    if n == 0 {
        return Err(Error::InvalidSubsystems("channel has no output registers".into()));
    }
    let out = lambda.apply_on_subsystem(rho, 1)?;
    let total = mutual_information(rho, &[0], &[1])?;
    let mut acc = 0.0;
    for i in 0..n {
        let marginal = out.reduced(&[0, 1 + i])?;
        acc += mutual_information(&marginal, &[0], &[1])?;
    }
    Ok(total - acc / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classicality::basis_broadcaster;
    use crate::linalg::ComplexMatrix;
    use crate::objects::quantum_to_classical;
    use crate::random::{random_povm, random_state, rng_from_seed};

    #[test]
    fn single_register_is_the_measurement_channel() {
        let mut rng = rng_from_seed(1);
        let povm = random_povm(2, 4, &mut rng);
        let ch = measurement_copy_broadcaster(&povm, &computational_prep(4), 1).unwrap();
        assert!(ch.choi().max_abs_diff(quantum_to_classical(&povm).choi()) < 1e-12);
    }

    #[test]
    fn registers_share_the_same_marginal() {
        let mut rng = rng_from_seed(2);
        let povm = random_povm(3, 5, &mut rng);
        let rho = random_state(&[2, 3], &mut rng);
        let ch = measurement_copy_broadcaster(&povm, &computational_prep(5), 3).unwrap();
        let out = ch.apply_on_subsystem(&rho, 1).unwrap();
        let first = out.reduced(&[0, 1]).unwrap();
        for i in 2..4 {
            assert!(out.reduced(&[0, i]).unwrap().matrix().max_abs_diff(first.matrix()) < 1e-10);
        }
    }

    #[test]
    fn exact_broadcast_has_zero_loss() {
        let rho = DensityMatrix::diagonal(vec![2, 2], &[0.1, 0.4, 0.3, 0.2]).unwrap();
        let ch = basis_broadcaster(&ComplexMatrix::identity(2)).unwrap();
        assert!(average_mi_loss(&rho, &ch).unwrap().abs() < 1e-10);
    }
}
