use proptest::prelude::*;
use qbroadcast::linalg::{hermitian_eig, ComplexMatrix};
use qbroadcast::objects::{compose, Channel, DensityMatrix};
use qbroadcast::random::{random_channel, random_state, rng_from_seed};

fn is_valid_state(rho: &DensityMatrix, tol: f64) -> bool {
    let m = rho.matrix();
    m.hermiticity_error() < tol
        && (m.trace().re - 1.0).abs() < tol
        && hermitian_eig(&m.hermitian_part()).unwrap().min_eigenvalue() > -tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outputs_are_states(seed in any::<u64>(), din in 2usize..=3, dout in 1usize..=4, rank in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let ch = random_channel(&[din], &[dout], rank, &mut rng);
        let rho = random_state(&[din], &mut rng);
        prop_assert!(is_valid_state(&ch.apply(&rho).unwrap(), 1e-8));
    }

    #[test]
    fn choi_kraus_stinespring_round_trip(seed in any::<u64>(), din in 2usize..=3, dout in 2usize..=3, rank in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let ch = random_channel(&[din], &[dout], rank, &mut rng);
        let via_kraus = Channel::from_kraus(vec![din], vec![dout], &ch.kraus()).unwrap();
        let (v, env) = ch.stinespring();
        let via_iso = Channel::from_isometry(vec![din], vec![dout], env, &v).unwrap();
        let via_choi = Channel::from_choi(vec![din], vec![dout], ch.choi().clone()).unwrap();
        let rho = random_state(&[din], &mut rng);
        let out = ch.apply(&rho).unwrap();
        for other in [&via_kraus, &via_iso, &via_choi] {
            prop_assert!(other.apply(&rho).unwrap().matrix().max_abs_diff(out.matrix()) < 1e-8);
        }
        // Explicit Kraus sum against the Choi action.
        let mut acc = ComplexMatrix::zeros(dout, dout);
        for k in ch.kraus() {
            acc += &k.matmul(rho.matrix()).matmul(&k.adjoint());
        }
        prop_assert!(acc.max_abs_diff(out.matrix()) < 1e-8);
    }

    #[test]
    fn disjoint_channels_commute(seed in any::<u64>(), da in 2usize..=3, db in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(&[da, db], &mut rng);
        let la = random_channel(&[da], &[2], 2, &mut rng);
        let gb = random_channel(&[db], &[3], 2, &mut rng);
        let ab = gb.apply_on_subsystem(&la.apply_on_subsystem(&rho, 0).unwrap(), 1).unwrap();
        let ba = la.apply_on_subsystem(&gb.apply_on_subsystem(&rho, 1).unwrap(), 0).unwrap();
        prop_assert!(ab.matrix().max_abs_diff(ba.matrix()) < 1e-10);
    }

    #[test]
    fn composition_matches_sequential_application(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let c1 = random_channel(&[2], &[3], 2, &mut rng);
        let c2 = random_channel(&[3], &[2], 3, &mut rng);
        let rho = random_state(&[2], &mut rng);
        let seq = c2.apply(&c1.apply(&rho).unwrap()).unwrap();
        let joined = compose(&c2, &c1).unwrap().apply(&rho).unwrap();
        prop_assert!(seq.matrix().max_abs_diff(joined.matrix()) < 1e-10);
    }

    #[test]
    fn dual_is_the_adjoint(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let ch = random_channel(&[3], &[2], 3, &mut rng);
        let x = random_state(&[2], &mut rng).into_matrix();
        let y = random_state(&[3], &mut rng).into_matrix();
        let lhs = x.adjoint().trace_product(&ch.apply_operator(&y).unwrap());
        let rhs = ch.dual().apply(&x).unwrap().adjoint().trace_product(&y);
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn non_cp_choi_is_rejected() {
    // Transpose map on a qubit: Choi is the swap, which has eigenvalue −1.
    let mut swap = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            swap[(i * 2 + j, j * 2 + i)] = 1.0.into();
        }
    }
    assert!(Channel::from_choi(vec![2], vec![2], swap).is_err());
}
