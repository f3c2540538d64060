use proptest::prelude::*;
use qbroadcast::classicality::basis_broadcaster;
use qbroadcast::measures::{
    conditional_mutual_information, entropy, fidelity, mutual_information, relative_entropy, subsystem_entropy,
};
use qbroadcast::objects::{Channel, DensityMatrix};
use qbroadcast::random::{random_channel, random_state, random_unitary, rng_from_seed};

fn dim() -> impl Strategy<Value = usize> {
    2usize..=3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn data_processing(seed in any::<u64>(), d in dim(), dout in dim(), rank in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(&[d], &mut rng);
        let sigma = random_state(&[d], &mut rng);
        let ch = random_channel(&[d], &[dout], rank, &mut rng);
        let before = relative_entropy(&rho, &sigma).unwrap().value();
        let after = relative_entropy(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()).unwrap().value();
        prop_assert!(before >= after - 1e-8, "{before} < {after}");
    }

    #[test]
    fn fidelity_is_monotone(seed in any::<u64>(), d in dim(), dout in dim(), rank in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(&[d], &mut rng);
        let sigma = random_state(&[d], &mut rng);
        let ch = random_channel(&[d], &[dout], rank, &mut rng);
        let before = fidelity(&rho, &sigma).unwrap();
        let after = fidelity(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()).unwrap();
        prop_assert!(after >= before - 1e-8);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&before));
        prop_assert!((fidelity(&sigma, &rho).unwrap() - before).abs() < 1e-9);
    }

    #[test]
    fn fidelity_is_multiplicative(seed in any::<u64>(), d in dim(), d2 in dim()) {
        let mut rng = rng_from_seed(seed);
        let (r1, s1) = (random_state(&[d], &mut rng), random_state(&[d], &mut rng));
        let (r2, s2) = (random_state(&[d2], &mut rng), random_state(&[d2], &mut rng));
        let joint = fidelity(&r1.tensor(&r2), &s1.tensor(&s2)).unwrap();
        let prod = fidelity(&r1, &s1).unwrap() * fidelity(&r2, &s2).unwrap();
        prop_assert!((joint - prod).abs() < 1e-8);
    }

    #[test]
    fn mutual_information_shrinks_under_local_channels(seed in any::<u64>(), da in dim(), db in dim()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(&[da, db], &mut rng);
        let la = random_channel(&[da], &[2], 2, &mut rng);
        let gb = random_channel(&[db], &[3], 3, &mut rng);
        let out = gb.apply_on_subsystem(&la.apply_on_subsystem(&rho, 0).unwrap(), 1).unwrap();
        let before = mutual_information(&rho, &[0], &[1]).unwrap();
        let after = mutual_information(&out, &[0], &[1]).unwrap();
        prop_assert!(before >= after - 1e-8);
    }

    #[test]
    fn mutual_information_matches_relative_entropy(seed in any::<u64>(), da in dim(), db in dim()) {
        let rho = random_state(&[da, db], &mut rng_from_seed(seed));
        let product = rho.reduced(&[0]).unwrap().tensor(&rho.reduced(&[1]).unwrap());
        let mi = mutual_information(&rho, &[0], &[1]).unwrap();
        prop_assert!((mi - relative_entropy(&rho, &product).unwrap().value()).abs() < 1e-8);
    }

    #[test]
    fn cmi_is_the_information_lost_to_the_environment(seed in any::<u64>(), da in dim(), rank in 1usize..=3) {
        // Γ: B → B' with Stinespring V: B → B'E. I(A:B) − I(A:B') = I(A:E|B').
        let mut rng = rng_from_seed(seed);
        let rho = random_state(&[da, 2], &mut rng);
        let gamma = random_channel(&[2], &[2], rank, &mut rng);
        let (v, env) = gamma.stinespring();
        let dilation = Channel::from_isometry(vec![2], vec![2, env], 1, &v).unwrap();
        let omega = dilation.apply_on_subsystem(&rho, 1).unwrap();
        let drop = mutual_information(&rho, &[0], &[1]).unwrap()
            - mutual_information(&omega.reduced(&[0, 1]).unwrap(), &[0], &[1]).unwrap();
        let cmi = conditional_mutual_information(&omega, &[0], &[2], &[1]).unwrap();
        prop_assert!((drop - cmi).abs() < 1e-8, "{drop} vs {cmi}");
    }

    #[test]
    fn cmi_identities(seed in any::<u64>(), da in dim(), db in dim()) {
        let rho = random_state(&[da, db, 2], &mut rng_from_seed(seed));
        let cmi = conditional_mutual_information(&rho, &[0], &[2], &[1]).unwrap();
        let swapped = conditional_mutual_information(&rho, &[2], &[0], &[1]).unwrap();
        let chain = mutual_information(&rho, &[0], &[1, 2]).unwrap() - mutual_information(&rho, &[0], &[1]).unwrap();
        prop_assert!(cmi >= -1e-8);
        prop_assert!((cmi - swapped).abs() < 1e-9);
        prop_assert!((cmi - chain).abs() < 1e-9);
        let s = |sys: &[usize]| subsystem_entropy(&rho, sys).unwrap();
        prop_assert!((cmi - (s(&[0, 1]) + s(&[1, 2]) - s(&[0, 1, 2]) - s(&[1]))).abs() < 1e-9);
    }

    #[test]
    fn entropy_is_bounded(seed in any::<u64>(), d in 2usize..=4) {
        let rho = random_state(&[d], &mut rng_from_seed(seed));
        let s = entropy(&rho);
        prop_assert!(s >= 0.0 && s <= (d as f64).log2() + 1e-9);
    }

    #[test]
    fn basis_cloner_copies_only_its_basis(seed in any::<u64>()) {
        // Commuting states diagonal in the cloner's basis are copied exactly. A
        // non-commuting pair cannot keep F(ρ,ρ′) ≤ F(ρ,ρ′)², so some copy degrades.
        let mut rng = rng_from_seed(seed);
        let u = random_unitary(2, &mut rng);
        let cloner = basis_broadcaster(&u).unwrap();
        let clone_fid = |rho: &DensityMatrix| {
            let out = cloner.apply(rho).unwrap();
            fidelity(&out, &rho.tensor(rho)).unwrap()
        };
        let diag = |p: f64| DensityMatrix::diagonal(vec![2], &[p, 1.0 - p]).unwrap().conjugate(&u, vec![2]).unwrap();
        prop_assert!((clone_fid(&diag(1.0)) - 1.0).abs() < 1e-9);
        prop_assert!((clone_fid(&diag(0.0)) - 1.0).abs() < 1e-9);

        let psi = random_state(&[2], &mut rng);
        let phi = random_state(&[2], &mut rng);
        let f = fidelity(&psi, &phi).unwrap();
        let f_out = fidelity(&cloner.apply(&psi).unwrap(), &cloner.apply(&phi).unwrap()).unwrap();
        prop_assert!(f_out >= f - 1e-9);
        prop_assert!(f > f * f + 1e-6);
        prop_assert!(clone_fid(&psi).min(clone_fid(&phi)) < 1.0 - 1e-6);
    }
}

#[test]
fn reference_values() {
    let d = DensityMatrix::diagonal(vec![2], &[0.75, 0.25]).unwrap();
    assert!((entropy(&d) - 0.811_278_124_459_132_8).abs() < 1e-9);
    let mixed = DensityMatrix::maximally_mixed(vec![2]);
    let expected = -1.0 - 0.5 * (0.75f64.log2() + 0.25f64.log2());
    assert!((relative_entropy(&mixed, &d).unwrap().value() - expected).abs() < 1e-9);
    let zero = DensityMatrix::basis(vec![2], 0);
    assert!((fidelity(&zero, &mixed).unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
    assert!(!relative_entropy(&zero, &DensityMatrix::basis(vec![2], 1))
        .unwrap()
        .is_finite());
}
