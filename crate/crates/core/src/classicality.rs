//! Commutation tests, classicality verdicts for bipartite states, exact
//! broadcasters and broadcast verifiers.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::frames::{build_ic_povm, decompose};
use crate::linalg::{hermitian_eig, orthonormality_error, trace_norm, ComplexMatrix};
use crate::objects::{entanglement_breaking, Channel, DensityMatrix, Povm, PureState, Side};
use crate::random::rng_from_seed;

/// Commutator max-entry modulus below which two operators commute.
pub const COMMUTE_TOL: f64 = 1e-9;

/// Trace-norm residual below which a broadcast counts as exact.
pub const BROADCAST_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commutation {
    pub commute: bool,
    /// `max |[ρ, ρ′]_{ij}|`.
    pub norm: f64,
}

pub fn commute_test(rho: &DensityMatrix, rho2: &DensityMatrix) -> Result<Commutation> {
    if rho.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: rho2.dim(),
        });
    }
    let norm = rho.matrix().commutator(rho2.matrix()).max_abs();
    Ok(Commutation {
        commute: norm < COMMUTE_TOL,
        norm,
    })
}

/// Orthonormal basis diagonalizing every operator in `ops` (assumed
/// pairwise commuting). Starts from a random positive mixture and splits any
/// remaining degenerate eigenspaces with the individual operators. The flag
/// reports whether the mixture alone was near-degenerate.
pub fn common_eigenbasis(ops: &[ComplexMatrix], seed: u64) -> Result<(ComplexMatrix, bool)> {
    let d = ops.first().map(|o| o.rows()).ok_or(Error::LengthMismatch(0, 1))?;
    let mut rng = rng_from_seed(seed);
    let mut mix = ComplexMatrix::zeros(d, d);
    for op in ops {
        let c: f64 = rng.random_range(0.5..1.5);
        mix.add_scaled(Complex64::new(c, 0.0), op);
    }
    let mix = mix.hermitian_part();
    let scale = mix.max_abs().max(1e-300);
    let eig = hermitian_eig(&mix)?;
    let degenerate = eig
        .eigenvalues
        .windows(2)
        .any(|w| (w[0] - w[1]).abs() < CLUSTER_TOL * scale);

    let mut ordered: Vec<&ComplexMatrix> = vec![&mix];
    ordered.extend(ops.iter());
    let cols = refine(&ComplexMatrix::identity(d), &ordered)?;
    let mut basis = ComplexMatrix::zeros(d, d);
    for (k, c) in cols.iter().enumerate() {
        basis.set_col(k, c);
    }
    Ok((basis, degenerate))
}

/// Relative eigenvalue gap under which eigenvectors are grouped together.
const CLUSTER_TOL: f64 = 1e-7;

/// Splits the subspace spanned by the columns of `v` into joint eigenspaces.
fn refine(v: &ComplexMatrix, ops: &[&ComplexMatrix]) -> Result<Vec<Vec<Complex64>>> {
    let m = v.cols();
    if m == 1 {
        return Ok(vec![v.col(0)]);
    }
    let vh = v.adjoint();
    for (k, op) in ops.iter().enumerate() {
        let small = vh.matmul(op).matmul(v).hermitian_part();
        let scale = op.max_abs().max(1e-300);
        let eig = hermitian_eig(&small)?;
        let spread = eig.max_eigenvalue() - eig.min_eigenvalue();
        if spread < CLUSTER_TOL * scale {
            continue;
        }
        let mut out = Vec::with_capacity(m);
        let mut start = 0;
        for end in 1..=m {
            let split = end == m || (eig.eigenvalues[end - 1] - eig.eigenvalues[end]).abs() >= CLUSTER_TOL * scale;
            if split {
                let w = ComplexMatrix::from_fn(m, end - start, |r, c| eig.eigenvectors[(r, start + c)]);
                out.extend(refine(&v.matmul(&w), &ops[k + 1..])?);
                start = end;
            }
        }
        return Ok(out);
    }
    Ok((0..m).map(|c| v.col(c)).collect())
}

/// Invariant measure of how far the operators `Tr_A((X_k ⊗ I) ρ)` fail to
/// commute, over an orthonormal Hermitian basis `X_k` on the measured side:
/// `(Σ_{k<l} ‖[Y_k, Y_l]‖_F²)^{1/2}`. Unchanged by local unitaries on either side.
pub fn invariant_witness(rho: &DensityMatrix, measured: Side) -> Result<f64> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::InvalidSubsystems(format!(
            "expected a bipartite state, got dims {dims:?}"
        )));
    }
    let dm = dims[measured.index()];
    let other_idx = measured.other().index();
    let id = ComplexMatrix::identity(dims[other_idx]);
    let ys: Vec<ComplexMatrix> = hermitian_basis(dm)
        .iter()
        .map(|x| {
            let lifted = match measured {
                Side::A => x.kron(&id),
                Side::B => id.kron(x),
            };
            lifted.matmul(rho.matrix()).partial_trace(dims, &[other_idx])
        })
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    for k in 0..ys.len() {
        for l in k + 1..ys.len() {
            sum += ys[k].commutator(&ys[l]).frobenius_norm().powi(2);
        }
    }
    Ok(sum.sqrt())
}

/// Hilbert–Schmidt orthonormal basis of Hermitian `d × d` matrices.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        out.push(ComplexMatrix::unit(d, d, j, j));
        for k in j + 1..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(j, k)] = Complex64::new(h, 0.0);
            re[(k, j)] = Complex64::new(h, 0.0);
            out.push(re);
            let mut im = ComplexMatrix::zeros(d, d);
            im[(j, k)] = Complex64::new(0.0, -h);
            im[(k, j)] = Complex64::new(0.0, h);
            out.push(im);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Commutator threshold on the witness.
    pub tolerance: f64,
    /// Seed for the random mixture used to extract the common basis.
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            tolerance: COMMUTE_TOL,
            seed: 0,
        }
    }
}

/// Classicality of one side of a bipartite state.
#[derive(Debug, Clone)]
pub struct SideVerdict {
    pub classical: bool,
    /// Max-entry commutator norm over pairs of conditional states on this side.
    pub witness: f64,
    pub invariant_witness: f64,
    /// Common eigenbasis of the conditional states, when classical.
    pub basis: Option<ComplexMatrix>,
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct ClassicalityVerdict {
    pub classical_on_a: bool,
    pub classical_on_b: bool,
    pub classical_classical: bool,
    /// The larger of the two side witnesses.
    pub witness: f64,
    pub a: SideVerdict,
    pub b: SideVerdict,
}

/// Conditional states on `side` (obtained by measuring the other side with
/// the default IC-POVM), then their pairwise commutators.
pub fn classify_side(rho: &DensityMatrix, side: Side, opts: &ClassifyOptions) -> Result<SideVerdict> {
    let measured = side.other();
    let dm = rho.dims()[measured.index()];
    let conds: Vec<ComplexMatrix> = if dm == 1 {
        vec![rho.matrix().clone()]
    } else {
        decompose(rho, &build_ic_povm(dm)?, measured)?
            .cond_states
            .iter()
            .map(|s| s.matrix().clone())
            .collect()
    };
    let mut witness: f64 = 0.0;
    for i in 0..conds.len() {
        for j in i + 1..conds.len() {
            witness = witness.max(conds[i].commutator(&conds[j]).max_abs());
        }
    }
    let classical = witness < opts.tolerance;
    let (basis, degenerate) = if classical {
        let (b, deg) = common_eigenbasis(&conds, opts.seed)?;
        (Some(b), deg)
    } else {
        (None, false)
    };
    Ok(SideVerdict {
        classical,
        witness,
        invariant_witness: invariant_witness(rho, measured)?,
        basis,
        degenerate,
    })
}

pub fn classify(rho: &DensityMatrix) -> Result<ClassicalityVerdict> {
    classify_with(rho, &ClassifyOptions::default())
}

pub fn classify_with(rho: &DensityMatrix, opts: &ClassifyOptions) -> Result<ClassicalityVerdict> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidSubsystems(format!(
            "expected a bipartite state, got dims {:?}",
            rho.dims()
        )));
    }
    let a = classify_side(rho, Side::A, opts)?;
    let b = classify_side(rho, Side::B, opts)?;
    Ok(ClassicalityVerdict {
        classical_on_a: a.classical,
        classical_on_b: b.classical,
        classical_classical: a.classical && b.classical,
        witness: a.witness.max(b.witness),
        a,
        b,
    })
}

/// Measure in `basis`, then prepare `|ψ_k⟩|ψ_k⟩`.
pub fn basis_broadcaster(basis: &ComplexMatrix) -> Result<Channel> {
    let d = basis.rows();
    let err = orthonormality_error(basis);
    if basis.cols() != d || err > 1e-10 {
        return Err(Error::NotOrthonormal(err));
    }
    let povm = Povm::from_basis(basis)?;
    let preps: Vec<DensityMatrix> = (0..d)
        .map(|k| {
            let psi = PureState::normalized(vec![d], basis.col(k))?;
            Ok(psi.tensor(&psi).to_density())
        })
        .collect::<Result<_>>()?;
    entanglement_breaking(&povm, &preps)
}

/// Trace-norm distances of the two broadcast copies from their targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadcastResiduals {
    pub first: f64,
    pub second: f64,
}

impl BroadcastResiduals {
    pub fn max(&self) -> f64 {
        self.first.max(self.second)
    }

    pub fn success(&self) -> bool {
        self.max() < BROADCAST_TOL
    }
}

fn check_broadcast_channel(ch: &Channel, d: usize) -> Result<()> {
    if ch.in_dim() != d || ch.out_dims().len() != 2 || ch.out_dims().iter().any(|&k| k != d) {
        return Err(Error::InvalidSubsystems(format!(
            "broadcast channel {:?} -> {:?} for a system of dimension {d}",
            ch.in_dims(),
            ch.out_dims()
        )));
    }
    Ok(())
}

/// `‖Tr_2 Γρ − ρ‖₁` and `‖Tr_1 Γρ − ρ‖₁` for a single system.
pub fn verify_broadcast(rho: &DensityMatrix, gamma: &Channel) -> Result<BroadcastResiduals> {
    check_broadcast_channel(gamma, rho.dim())?;
    let out = gamma.apply(rho)?;
    let first = out.reduced(&[0])?;
    let second = out.reduced(&[1])?;
    Ok(BroadcastResiduals {
        first: trace_norm(&(first.matrix() - rho.matrix())),
        second: trace_norm(&(second.matrix() - rho.matrix())),
    })
}

/// Broadcast of the B side: compares `ρ̃_{AB₁}` and `ρ̃_{AB₂}` with `ρ_AB`.
pub fn verify_unilocal_broadcast(rho: &DensityMatrix, gamma: &Channel) -> Result<BroadcastResiduals> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidSubsystems(format!(
            "expected a bipartite state, got dims {:?}",
            rho.dims()
        )));
    }
    check_broadcast_channel(gamma, rho.dims()[1])?;
    let out = gamma.apply_on_subsystem(rho, 1)?;
    let ab1 = out.reduced(&[0, 1])?;
    let ab2 = out.reduced(&[0, 2])?;
    Ok(BroadcastResiduals {
        first: trace_norm(&(ab1.matrix() - rho.matrix())),
        second: trace_norm(&(ab2.matrix() - rho.matrix())),
    })
}

/// Two-sided broadcast: compares `ρ̃_{A₁B₁}` and `ρ̃_{A₂B₂}` with `ρ_AB`.
pub fn verify_local_broadcast(rho: &DensityMatrix, lambda: &Channel, gamma: &Channel) -> Result<BroadcastResiduals> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidSubsystems(format!(
            "expected a bipartite state, got dims {:?}",
            rho.dims()
        )));
    }
    check_broadcast_channel(lambda, rho.dims()[0])?;
    check_broadcast_channel(gamma, rho.dims()[1])?;
    let out = gamma.apply_on_subsystem(&lambda.apply_on_subsystem(rho, 0)?, 2)?;
    let a1b1 = out.reduced(&[0, 2])?;
    let a2b2 = out.reduced(&[1, 3])?;
    Ok(BroadcastResiduals {
        first: trace_norm(&(a1b1.matrix() - rho.matrix())),
        second: trace_norm(&(a2b2.matrix() - rho.matrix())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, random_unitary};

    fn ket(v: &[f64]) -> DensityMatrix {
        let amps = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        PureState::normalized(vec![v.len()], amps).unwrap().to_density()
    }

    fn bell() -> DensityMatrix {
        PureState::normalized(
            vec![2, 2],
            [1.0, 0.0, 0.0, 1.0].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
        .unwrap()
        .to_density()
    }

    #[test]
    fn commutation_examples() {
        let a = DensityMatrix::diagonal(vec![2], &[0.2, 0.8]).unwrap();
        let b = DensityMatrix::diagonal(vec![2], &[0.6, 0.4]).unwrap();
        assert!(commute_test(&a, &b).unwrap().commute);
        let zero = ket(&[1.0, 0.0]);
        let plus = ket(&[1.0, 1.0]);
        let c = commute_test(&zero, &plus).unwrap();
        assert!(!c.commute);
        // [|0⟩⟨0|, |+⟩⟨+|] has off-diagonal entries ±1/2
        let direct = &zero.matrix().matmul(plus.matrix()) - &plus.matrix().matmul(zero.matrix());
        assert!((c.norm - direct.max_abs()).abs() < 1e-15);
        assert!((c.norm - 0.5).abs() < 1e-12);
        assert!(commute_test(&plus, &plus).unwrap().commute);
    }

    #[test]
    fn classical_quantum_state_is_classical_on_b() {
        let mut rng = rng_from_seed(1);
        let u = random_unitary(3, &mut rng);
        let mut m = ComplexMatrix::zeros(6, 6);
        for (j, p) in [0.5, 0.3, 0.2].iter().enumerate() {
            let ra = random_state(&[2], &mut rng);
            let bj = ComplexMatrix::projector(&u.col(j));
            m.add_scaled(Complex64::new(*p, 0.0), &ra.matrix().kron(&bj));
        }
        let rho = DensityMatrix::new(vec![2, 3], m).unwrap();
        let v = classify(&rho).unwrap();
        assert!(v.classical_on_b);
        assert!(!v.classical_on_a);
        assert!(!v.classical_classical);
        let basis = v.b.basis.unwrap();
        // the returned basis diagonalizes ρ_B
        let rb = rho.reduced(&[1]).unwrap();
        let diag = basis.adjoint().matmul(rb.matrix()).matmul(&basis);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(diag[(i, j)].norm() < 1e-9);
                }
            }
        }
        let res = verify_unilocal_broadcast(&rho, &basis_broadcaster(&basis).unwrap()).unwrap();
        assert!(res.success(), "{res:?}");
    }

    #[test]
    fn classical_classical_state() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let rho = DensityMatrix::diagonal(vec![2, 2], &p).unwrap();
        let v = classify(&rho).unwrap();
        assert!(v.classical_classical && v.classical_on_a && v.classical_on_b);
        let la = basis_broadcaster(&v.a.basis.unwrap()).unwrap();
        let gb = basis_broadcaster(&v.b.basis.unwrap()).unwrap();
        assert!(verify_local_broadcast(&rho, &la, &gb).unwrap().max() < 1e-9);
    }

    #[test]
    fn bell_state_is_not_classical() {
        let v = classify(&bell()).unwrap();
        assert!(!v.classical_on_a && !v.classical_on_b && !v.classical_classical);
        assert!(v.witness > 0.1);
        assert!(v.b.basis.is_none());
        let g = basis_broadcaster(&ComplexMatrix::identity(2)).unwrap();
        assert!(verify_unilocal_broadcast(&bell(), &g).unwrap().max() > 0.01);
    }

    #[test]
    fn degenerate_mixture_is_refined() {
        // equal operators leave the mixture degenerate; a second operator
        // rotated inside the degenerate block must split it
        let ops = vec![
            ComplexMatrix::diag(&[0.5, 0.5, 0.0]),
            ComplexMatrix::diag(&[0.5, 0.5, 0.0]),
        ];
        let (b, deg) = common_eigenbasis(&ops, 0).unwrap();
        assert!(deg);
        assert!(orthonormality_error(&b) < 1e-12);
        let u = random_unitary(2, &mut rng_from_seed(2));
        let mut rot = ComplexMatrix::identity(3);
        rot.set_block(0, 0, &u);
        let x = rot
            .matmul(&ComplexMatrix::diag(&[0.9, 0.1, 0.0]))
            .matmul(&rot.adjoint());
        let ops = vec![ComplexMatrix::diag(&[0.5, 0.5, 0.0]), x.clone()];
        let (b, _) = common_eigenbasis(&ops, 0).unwrap();
        for op in &ops {
            let d = b.adjoint().matmul(op).matmul(&b);
            assert!(
                (d.max_abs_diff(&ComplexMatrix::diag_complex(
                    &(0..3).map(|i| d[(i, i)]).collect::<Vec<_>>()
                ))) < 1e-9
            );
        }
    }

    #[test]
    fn broadcaster_examples() {
        let g = basis_broadcaster(&ComplexMatrix::identity(2)).unwrap();
        let rho = DensityMatrix::diagonal(vec![2], &[0.3, 0.7]).unwrap();
        assert!(verify_broadcast(&rho, &g).unwrap().max() < 1e-14);
        let out = g.apply(&DensityMatrix::basis(vec![2], 1)).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::basis(vec![2, 2], 3).matrix()) < 1e-15);
        assert!(verify_broadcast(&ket(&[1.0, 1.0]), &g).unwrap().max() > 0.5);
        let mut bad = ComplexMatrix::identity(2);
        bad[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(basis_broadcaster(&bad).is_err());
    }

    #[test]
    fn prepare_and_keep_residual() {
        // Γ(X) = X ⊗ τ keeps copy 1 exact; copy 2 becomes ρ_A ⊗ τ
        let mut rng = rng_from_seed(3);
        let rho = random_state(&[2, 2], &mut rng);
        let tau = random_state(&[2], &mut rng);
        let g = Channel::append(vec![2], &tau);
        let res = verify_unilocal_broadcast(&rho, &g).unwrap();
        assert!(res.first < 1e-12);
        let target = rho.reduced(&[0]).unwrap().tensor(&tau);
        let expected = trace_norm(&(target.matrix() - rho.matrix()));
        assert!((res.second - expected).abs() < 1e-12);
    }

    #[test]
    fn verdict_is_invariant_under_local_unitaries() {
        let mut rng = rng_from_seed(4);
        for rho in [bell(), random_state(&[2, 3], &mut rng)] {
            let v0 = classify(&rho).unwrap();
            let da = rho.dims()[0];
            let db = rho.dims()[1];
            let u = random_unitary(da, &mut rng).kron(&random_unitary(db, &mut rng));
            let v1 = classify(&rho.conjugate(&u, rho.dims().to_vec()).unwrap()).unwrap();
            assert_eq!(v0.classical_on_a, v1.classical_on_a);
            assert_eq!(v0.classical_on_b, v1.classical_on_b);
            assert!((v0.a.invariant_witness - v1.a.invariant_witness).abs() < 1e-8);
            assert!((v0.b.invariant_witness - v1.b.invariant_witness).abs() < 1e-8);
        }
    }

    #[test]
    fn trivial_side() {
        let mut rng = rng_from_seed(5);
        let rho = random_state(&[2], &mut rng).tensor(&DensityMatrix::basis(vec![2], 0));
        let v = classify(&rho).unwrap();
        assert!(v.classical_on_b);
        assert!(v.classical_on_a);
        assert!(v.b.invariant_witness < 1e-12);
    }
}
