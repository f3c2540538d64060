use proptest::prelude::*;
use qbroadcast::corpus::{ghz, markov_chain, product_ac};
use qbroadcast::linalg::trace_norm;
use qbroadcast::measures::fidelity;
use qbroadcast::random::{random_channel, random_density, random_state, rng_from_seed};
use qbroadcast::recovery::{petz_map, petz_recovery_fidelity, recovery_report};
use qbroadcast::sdp::SdpOptions;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn petz_map_reverses_its_reference_state(seed in any::<u64>(), din in 2usize..=3, dout in 2usize..=3, rank in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let sigma = random_density(&[din], rank.min(din), &mut rng);
        let gamma = random_channel(&[din], &[dout], 2, &mut rng);
        // A valid channel: from_choi checks CP and TP on construction.
        let r = petz_map(&sigma, &gamma).unwrap();
        let back = r.apply(&gamma.apply(&sigma).unwrap()).unwrap();
        prop_assert!(trace_norm(&(back.matrix() - sigma.matrix())) < 1e-8);
        let tau = random_state(&[dout], &mut rng);
        let out = r.apply(&tau).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn petz_recovery_of_markov_chains_is_exact(seed in any::<u64>()) {
        let rho = markov_chain(seed, 2, 2, 2).unwrap();
        let p = petz_recovery_fidelity(&rho).unwrap();
        prop_assert!((p.fidelity - 1.0).abs() < 1e-6);
        prop_assert!(p.sigma_residual < 1e-8);
    }
}

#[test]
fn recovery_bound_on_named_states() {
    let opts = SdpOptions::default();
    let g = recovery_report(&ghz(), &opts).unwrap();
    assert!((g.cmi - 1.0).abs() < 1e-9);
    assert!(g.optimal_fidelity >= 0.5f64.sqrt() - 1e-6);
    assert!(g.optimal_fidelity >= g.petz_fidelity - 1e-6);
    let p = recovery_report(&product_ac(4), &opts).unwrap();
    assert!((p.petz_fidelity - 1.0).abs() < 1e-6);
    assert!((p.optimal_fidelity - 1.0).abs() < 1e-6);
}

#[test]
fn optimal_recovery_map_achieves_its_value() {
    let rho = random_state(&[2, 2, 2], &mut rng_from_seed(9));
    let rep = recovery_report(&rho, &SdpOptions::default()).unwrap();
    let rho_ab = rho.reduced(&[0, 1]).unwrap();
    let out = rep.optimal.map.apply_on_subsystem(&rho_ab, 1).unwrap();
    let f = fidelity(&rho, &out).unwrap();
    assert!(
        (f - rep.optimal_fidelity).abs() < 1e-5,
        "{f} vs {}",
        rep.optimal_fidelity
    );
    assert!(rep.bound_holds(1e-6));
}
