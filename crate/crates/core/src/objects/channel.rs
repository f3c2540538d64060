//! Channels stored as Choi matrices, with Kraus and Stinespring views.
//!
//! Choi convention: `J = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)` on `in ⊗ out`; the `(i, j)`
//! block of size `d_out × d_out` is `Λ(|i⟩⟨j|)`.

use num_complex::Complex64;

use super::povm::Povm;
use super::state::{DensityMatrix, STATE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inv_sqrt_psd, orthonormality_error, ComplexMatrix, ZERO};

/// Tolerance for complete positivity and trace preservation at construction.
pub const CHANNEL_TOL: f64 = 1e-10;

/// Applies the map with Choi matrix `choi` (`d_in·d_out` square) to the
/// middle factor of `m`, whose layout is `pre ⊗ d_in ⊗ post`.
pub(crate) fn apply_choi_local(
    choi: &ComplexMatrix,
    d_in: usize,
    d_out: usize,
    m: &ComplexMatrix,
    pre: usize,
    post: usize,
) -> ComplexMatrix {
    let n_in = pre * d_in * post;
    let n_out = pre * d_out * post;
    debug_assert_eq!(m.rows(), n_in);
    let mut out = ComplexMatrix::zeros(n_out, n_out);
    let md = m.data();
    let jd = choi.data();
    let jn = d_in * d_out;
    let od = out.data_mut();
    for a in 0..pre {
        for t in 0..d_in {
            for c in 0..post {
                let r_in = (a * d_in + t) * post + c;
                for a2 in 0..pre {
                    for t2 in 0..d_in {
                        for c2 in 0..post {
                            let v = md[r_in * n_in + (a2 * d_in + t2) * post + c2];
                            if v == ZERO {
                                continue;
                            }
                            for o in 0..d_out {
                                let r_out = (a * d_out + o) * post + c;
                                let jrow = (t * d_out + o) * jn + t2 * d_out;
                                let orow = r_out * n_out + a2 * d_out * post + c2;
                                for o2 in 0..d_out {
                                    od[orow + o2 * post] += v * jd[jrow + o2];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Splits `dims` around a target span matching `in_dims`; returns
/// `(pre, post, output dims)`.
pub(crate) fn locate_target(
    dims: &[usize],
    target: usize,
    in_dims: &[usize],
    out_dims: &[usize],
) -> Result<(usize, usize, Vec<usize>)> {
    let k = in_dims.len().max(1);
    if target + k > dims.len() {
        return Err(Error::InvalidSubsystems(format!(
            "target {target} spanning {k} factors of {dims:?}"
        )));
    }
    let span = &dims[target..target + k];
    let matches = if in_dims.is_empty() {
        span == [1]
    } else {
        span == in_dims
    };
    if !matches {
        return Err(Error::DimensionMismatch {
            expected: in_dims.iter().product(),
            found: span.iter().product(),
        });
    }
    let pre = dims[..target].iter().product();
    let post = dims[target + k..].iter().product();
    let mut new_dims = dims[..target].to_vec();
    new_dims.extend_from_slice(out_dims);
    new_dims.extend_from_slice(&dims[target + k..]);
    Ok((pre, post, new_dims))
}

/// Linear map given by its Choi matrix, with no positivity requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
    choi: ComplexMatrix,
}

impl LinearMap {
    pub fn from_choi(in_dims: Vec<usize>, out_dims: Vec<usize>, choi: ComplexMatrix) -> Result<Self> {
        let n = in_dims.iter().product::<usize>() * out_dims.iter().product::<usize>();
        if choi.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: choi.rows(),
            });
        }
        Ok(Self {
            in_dims,
            out_dims,
            choi,
        })
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn in_dim(&self) -> usize {
        self.in_dims.iter().product()
    }

    pub fn out_dim(&self) -> usize {
        self.out_dims.iter().product()
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.in_dim(), self.in_dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim(),
                found: x.rows(),
            });
        }
        Ok(apply_choi_local(&self.choi, self.in_dim(), self.out_dim(), x, 1, 1))
    }

    /// Applies the map to the factors of `x` starting at `target`; returns the
    /// output operator and its dims.
    pub fn apply_on_subsystem(
        &self,
        x: &ComplexMatrix,
        dims: &[usize],
        target: usize,
    ) -> Result<(ComplexMatrix, Vec<usize>)> {
        let total: usize = dims.iter().product();
        if x.shape() != (total, total) {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: x.rows(),
            });
        }
        let (pre, post, new_dims) = locate_target(dims, target, &self.in_dims, &self.out_dims)?;
        let out = apply_choi_local(&self.choi, self.in_dim(), self.out_dim(), x, pre, post);
        Ok((out, new_dims))
    }
}

/// Completely positive trace-preserving map, stored as its Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    map: LinearMap,
}

impl Channel {
    pub fn from_choi(in_dims: Vec<usize>, out_dims: Vec<usize>, choi: ComplexMatrix) -> Result<Self> {
        Self::from_choi_with_tolerance(in_dims, out_dims, choi, CHANNEL_TOL)
    }

    /// Validates complete positivity and trace preservation to `tol`.
    pub fn from_choi_with_tolerance(
        in_dims: Vec<usize>,
        out_dims: Vec<usize>,
        choi: ComplexMatrix,
        tol: f64,
    ) -> Result<Self> {
        let map = LinearMap::from_choi(in_dims, out_dims, choi)?;
        let herr = map.choi.hermiticity_error();
        if herr > tol {
            return Err(Error::NotHermitian(herr));
        }
        let choi = map.choi.hermitian_part();
        let eig = hermitian_eig(&choi)?;
        if eig.min_eigenvalue() < -tol * eig.max_eigenvalue().max(1.0) {
            return Err(Error::NotPositive(eig.min_eigenvalue()));
        }
        let tp = tp_deviation(&choi, &map.in_dims, &map.out_dims)?;
        if tp > tol {
            return Err(Error::NotTracePreserving(tp));
        }
        Ok(Self {
            map: LinearMap { choi, ..map },
        })
    }

    /// Nearest-channel repair for numerically obtained Choi matrices: clips
    /// negative eigenvalues, then restores trace preservation by the
    /// congruence `(T^{-1/2} ⊗ I) J (T^{-1/2} ⊗ I)` with `T = Tr_out J`.
    pub fn from_choi_projected(in_dims: Vec<usize>, out_dims: Vec<usize>, choi: &ComplexMatrix) -> Result<Self> {
        let map = LinearMap::from_choi(in_dims, out_dims, choi.hermitian_part())?;
        let eig = hermitian_eig(&map.choi)?;
        let clipped = eig.reconstruct_with(|l| l.max(0.0));
        let d_in = map.in_dim();
        let d_out = map.out_dim();
        let t = clipped.partial_trace(&[d_in, d_out], &[0])?;
        let fix = inv_sqrt_psd(&t)?.kron(&ComplexMatrix::identity(d_out));
        let repaired = fix.matmul(&clipped).matmul(&fix).hermitian_part();
        Self::from_choi_with_tolerance(map.in_dims, map.out_dims, repaired, 1e-9)
    }

    pub fn from_kraus(in_dims: Vec<usize>, out_dims: Vec<usize>, kraus: &[ComplexMatrix]) -> Result<Self> {
        let d_in: usize = in_dims.iter().product();
        let d_out: usize = out_dims.iter().product();
        let mut choi = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
        for k in kraus {
            if k.shape() != (d_out, d_in) {
                return Err(Error::DimensionMismatch {
                    expected: d_out * d_in,
                    found: k.rows() * k.cols(),
                });
            }
            let v = vectorize_kraus(k);
            choi += &ComplexMatrix::outer(&v, &v);
        }
        Self::from_choi_with_tolerance(in_dims, out_dims, choi, 1e-9)
    }

    /// Channel `ρ ↦ Tr_env(V ρ V†)` for an isometry `V: in → out ⊗ env`.
    pub fn from_isometry(in_dims: Vec<usize>, out_dims: Vec<usize>, env: usize, v: &ComplexMatrix) -> Result<Self> {
        let d_in: usize = in_dims.iter().product();
        let d_out: usize = out_dims.iter().product();
        if v.shape() != (d_out * env, d_in) {
            return Err(Error::DimensionMismatch {
                expected: d_out * env * d_in,
                found: v.rows() * v.cols(),
            });
        }
        let err = orthonormality_error(v);
        if err > 1e-9 {
            return Err(Error::NotOrthonormal(err));
        }
        let kraus: Vec<ComplexMatrix> = (0..env)
            .map(|k| ComplexMatrix::from_fn(d_out, d_in, |o, i| v[(o * env + k, i)]))
            .collect();
        Self::from_kraus(in_dims, out_dims, &kraus)
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self::unitary(dims, &ComplexMatrix::identity(d)).expect("identity is unitary")
    }

    pub fn unitary(dims: Vec<usize>, u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(dims.clone(), dims, std::slice::from_ref(u))
    }

    /// Discards the whole input (output is the trivial system, `out_dims = []`).
    pub fn trace_out(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self::unchecked(dims, vec![], ComplexMatrix::identity(d))
    }

    /// Keeps the listed input factors and traces out the rest.
    pub fn partial_trace(dims: Vec<usize>, keep: &[usize]) -> Result<Self> {
        let keep = crate::linalg::normalized_subset(keep, dims.len())?;
        let d: usize = dims.iter().product();
        let mut choi_rows = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                choi_rows.push(ComplexMatrix::unit(d, d, i, j).partial_trace(&dims, &keep)?);
            }
        }
        let out_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        Ok(Self::unchecked(dims, out_dims, assemble_choi(d, &choi_rows)))
    }

    /// `X ↦ Tr(X) τ`.
    pub fn replace(in_dims: Vec<usize>, tau: &DensityMatrix) -> Self {
        let d: usize = in_dims.iter().product();
        Self::unchecked(
            in_dims,
            tau.dims().to_vec(),
            ComplexMatrix::identity(d).kron(tau.matrix()),
        )
    }

    /// `X ↦ X ⊗ τ`.
    pub fn append(in_dims: Vec<usize>, tau: &DensityMatrix) -> Self {
        let d: usize = in_dims.iter().product();
        let blocks: Vec<ComplexMatrix> = (0..d * d)
            .map(|ij| ComplexMatrix::unit(d, d, ij / d, ij % d).kron(tau.matrix()))
            .collect();
        let mut out_dims = in_dims.clone();
        out_dims.extend_from_slice(tau.dims());
        Self::unchecked(in_dims, out_dims, assemble_choi(d, &blocks))
    }

    /// `X ↦ (1-p) X + p Tr(X) I/d`.
    pub fn depolarizing(dims: Vec<usize>, p: f64) -> Result<Self> {
        let id = Self::identity(dims.clone());
        let mixed = Self::replace(dims.clone(), &DensityMatrix::maximally_mixed(dims.clone()));
        let mut choi = id.choi().scale_real(1.0 - p);
        choi.add_scaled(Complex64::new(p, 0.0), mixed.choi());
        Self::from_choi(dims.clone(), dims, choi)
    }

    /// Projective measurement in `basis`, re-preparing the observed basis vector.
    pub fn measure_in_basis(basis: &ComplexMatrix) -> Result<Self> {
        let d = basis.rows();
        let kraus: Vec<ComplexMatrix> = (0..basis.cols())
            .map(|k| ComplexMatrix::projector(&basis.col(k)))
            .collect();
        let err = orthonormality_error(basis);
        if err > STATE_TOL || basis.cols() != d {
            return Err(Error::NotOrthonormal(err));
        }
        Self::from_kraus(vec![d], vec![d], &kraus)
    }

    pub(crate) fn unchecked(in_dims: Vec<usize>, out_dims: Vec<usize>, choi: ComplexMatrix) -> Self {
        Self {
            map: LinearMap {
                in_dims,
                out_dims,
                choi,
            },
        }
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.map.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.map.out_dims
    }

    pub fn in_dim(&self) -> usize {
        self.map.in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.map.out_dim()
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.map.choi
    }

    pub fn as_linear_map(&self) -> &LinearMap {
        &self.map
    }

    /// Action on an arbitrary operator of the input space.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.map.apply(x)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dims() != self.in_dims() && rho.dim() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim(),
                found: rho.dim(),
            });
        }
        let out = self.map.apply(rho.matrix())?;
        DensityMatrix::new_with_tolerance(self.out_dims().to_vec(), out, 1e-8)
    }

    /// Applies the channel to the factors of `rho` starting at `target`
    /// (spanning `in_dims.len()` factors), identity elsewhere.
    pub fn apply_on_subsystem(&self, rho: &DensityMatrix, target: usize) -> Result<DensityMatrix> {
        let (out, dims) = self.map.apply_on_subsystem(rho.matrix(), rho.dims(), target)?;
        DensityMatrix::new_with_tolerance(dims, out, 1e-8)
    }

    /// Kraus operators (`d_out × d_in`) from the Choi eigendecomposition;
    /// eigenvalues below the support cutoff are dropped.
    pub fn kraus(&self) -> Vec<ComplexMatrix> {
        let eig = hermitian_eig(self.choi()).expect("Choi matrix is Hermitian");
        let t = eig.support_threshold();
        let (d_in, d_out) = (self.in_dim(), self.out_dim());
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > t)
            .map(|(k, &l)| {
                let v = eig.eigenvector(k);
                let s = l.sqrt();
                ComplexMatrix::from_fn(d_out, d_in, |o, i| v[i * d_out + o] * s)
            })
            .collect()
    }

    /// Stinespring isometry `V: in → out ⊗ env` with `env` the Kraus rank.
    pub fn stinespring(&self) -> (ComplexMatrix, usize) {
        let kraus = self.kraus();
        let env = kraus.len();
        let (d_in, d_out) = (self.in_dim(), self.out_dim());
        let v = ComplexMatrix::from_fn(d_out * env, d_in, |r, i| kraus[r % env][(r / env, i)]);
        (v, env)
    }

    /// The adjoint map `Λ†`, with `Tr(X† Λ(Y)) = Tr(Λ†(X)† Y)`.
    pub fn dual(&self) -> LinearMap {
        let (d_in, d_out) = (self.in_dim(), self.out_dim());
        let j = self.choi();
        let choi = ComplexMatrix::from_fn(d_out * d_in, d_out * d_in, |r, c| {
            let (o, i) = (r / d_in, r % d_in);
            let (o2, i2) = (c / d_in, c % d_in);
            j[(i * d_out + o, i2 * d_out + o2)].conj()
        });
        LinearMap {
            in_dims: self.out_dims().to_vec(),
            out_dims: self.in_dims().to_vec(),
            choi,
        }
    }

    /// Dual action computed from the Kraus operators: `Σ K† X K`.
    pub fn apply_dual_kraus(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.in_dim(), self.in_dim());
        for k in self.kraus() {
            out += &k.adjoint().matmul(x).matmul(&k);
        }
        out
    }

    /// Channel with the given output factors kept (others traced out).
    pub fn reduce_output(&self, keep: &[usize]) -> Result<Channel> {
        let tr = Channel::partial_trace(self.out_dims().to_vec(), keep)?;
        compose(&tr, self)
    }
}

/// `ch2 ∘ ch1`.
pub fn compose(ch2: &Channel, ch1: &Channel) -> Result<Channel> {
    if ch1.out_dim() != ch2.in_dim() {
        return Err(Error::DimensionMismatch {
            expected: ch2.in_dim(),
            found: ch1.out_dim(),
        });
    }
    let d = ch1.in_dim();
    let d1 = ch1.out_dim();
    let mut blocks = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let b = ch1.choi().block(i * d1, j * d1, d1, d1);
            blocks.push(ch2.apply_operator(&b)?);
        }
    }
    let choi = assemble_choi(d, &blocks);
    Channel::from_choi_with_tolerance(ch1.in_dims().to_vec(), ch2.out_dims().to_vec(), choi, 1e-8)
}

/// Quantum-to-classical channel `σ ↦ Σ_i Tr(M_i σ) |i⟩⟨i|`.
pub fn quantum_to_classical(povm: &Povm) -> Channel {
    let k = povm.len();
    let mut choi = ComplexMatrix::zeros(povm.dim() * k, povm.dim() * k);
    for (i, m) in povm.elements().iter().enumerate() {
        choi += &m.transpose().kron(&ComplexMatrix::unit(k, k, i, i));
    }
    Channel::unchecked(vec![povm.dim()], vec![k], choi)
}

/// Measure-and-prepare channel `σ ↦ Σ_i Tr(M_i σ) τ_i`.
pub fn entanglement_breaking(povm: &Povm, preps: &[DensityMatrix]) -> Result<Channel> {
    if povm.len() != preps.len() {
        return Err(Error::LengthMismatch(povm.len(), preps.len()));
    }
    let out_dims = preps[0].dims().to_vec();
    let d_out = preps[0].dim();
    let mut choi = ComplexMatrix::zeros(povm.dim() * d_out, povm.dim() * d_out);
    for (m, tau) in povm.elements().iter().zip(preps) {
        if tau.dims() != out_dims.as_slice() {
            return Err(Error::InvalidSubsystems(format!(
                "preparation dims {:?} vs {:?}",
                tau.dims(),
                out_dims
            )));
        }
        choi += &m.transpose().kron(tau.matrix());
    }
    Ok(Channel::unchecked(vec![povm.dim()], out_dims, choi))
}

/// Maximum over input-basis blocks of `|Tr_out J − I|`.
fn tp_deviation(choi: &ComplexMatrix, in_dims: &[usize], out_dims: &[usize]) -> Result<f64> {
    let d_in: usize = in_dims.iter().product();
    let d_out: usize = out_dims.iter().product();
    let t = choi.partial_trace(&[d_in, d_out], &[0])?;
    Ok(t.max_abs_diff(&ComplexMatrix::identity(d_in)))
}

/// `vec(K)` with entry `(i, o)` equal to `K[o][i]`.
fn vectorize_kraus(k: &ComplexMatrix) -> Vec<Complex64> {
    let (d_out, d_in) = k.shape();
    let mut v = vec![ZERO; d_in * d_out];
    for i in 0..d_in {
        for o in 0..d_out {
            v[i * d_out + o] = k[(o, i)];
        }
    }
    v
}

/// Choi matrix from the images of matrix units, `blocks[i*d + j] = Λ(|i⟩⟨j|)`.
pub(crate) fn assemble_choi(d: usize, blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let d_out = blocks[0].rows();
    let mut choi = ComplexMatrix::zeros(d * d_out, d * d_out);
    for i in 0..d {
        for j in 0..d {
            choi.set_block(i * d_out, j * d_out, &blocks[i * d + j]);
        }
    }
    choi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_channel, random_state, rng_from_seed};

    #[test]
    fn identity_and_constant_channels() {
        let rho = random_state(&[3], &mut rng_from_seed(1));
        let id = Channel::identity(vec![3]);
        assert!(id.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-14);
        let mm = DensityMatrix::maximally_mixed(vec![3]);
        let dep = Channel::replace(vec![3], &mm);
        assert!(dep.apply(&rho).unwrap().matrix().max_abs_diff(mm.matrix()) < 1e-14);
        assert!(Channel::from_choi(vec![3], vec![3], dep.choi().clone()).is_ok());
    }

    #[test]
    fn construction_rejects_non_tp_and_non_cp() {
        let half = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(matches!(
            Channel::from_choi(vec![2], vec![2], half),
            Err(Error::NotTracePreserving(_))
        ));
        let id = Channel::identity(vec![2]);
        let transpose = id.choi().partial_transpose(&[2, 2], &[1]).unwrap();
        assert!(matches!(
            Channel::from_choi(vec![2], vec![2], transpose),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn random_channel_preserves_trace() {
        let mut rng = rng_from_seed(2);
        let ch = random_channel(&[2], &[3], 3, &mut rng);
        let rho = random_state(&[2], &mut rng);
        let out = ch.apply(&rho).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subsystem_application() {
        let mut rng = rng_from_seed(3);
        let rho = random_state(&[2, 3], &mut rng);
        let id = Channel::identity(vec![3]);
        assert!(
            id.apply_on_subsystem(&rho, 1)
                .unwrap()
                .matrix()
                .max_abs_diff(rho.matrix())
                < 1e-14
        );

        let ra = random_state(&[2], &mut rng);
        let rb = random_state(&[3], &mut rng);
        let out = Channel::trace_out(vec![3])
            .apply_on_subsystem(&ra.tensor(&rb), 1)
            .unwrap();
        assert_eq!(out.dims(), &[2]);
        assert!(out.matrix().max_abs_diff(ra.matrix()) < 1e-14);

        let ch = random_channel(&[3], &[2, 2], 2, &mut rng);
        let out = ch.apply_on_subsystem(&rho, 1).unwrap();
        assert_eq!(out.dims(), &[2, 2, 2]);
        let marg = out.reduced(&[0]).unwrap();
        assert!(marg.matrix().max_abs_diff(rho.reduced(&[0]).unwrap().matrix()) < 1e-10);
        assert!(ch.apply_on_subsystem(&rho, 0).is_err());
    }

    #[test]
    fn kraus_views() {
        let id = Channel::identity(vec![2]);
        let k = id.kraus();
        assert_eq!(k.len(), 1);
        let phase = k[0][(0, 0)];
        assert!(k[0].max_abs_diff(&ComplexMatrix::identity(2).scale(phase)) < 1e-14);

        let meas = Channel::measure_in_basis(&ComplexMatrix::identity(3)).unwrap();
        let k = meas.kraus();
        assert_eq!(k.len(), 3);
        for op in &k {
            let e = hermitian_eig(&op.adjoint().matmul(op)).unwrap();
            assert_eq!(e.rank(), 1);
        }

        let ch = random_channel(&[2], &[3], 4, &mut rng_from_seed(4));
        let back = Channel::from_kraus(vec![2], vec![3], &ch.kraus()).unwrap();
        assert!(back.choi().max_abs_diff(ch.choi()) < 1e-8);
        let mut sum = ComplexMatrix::zeros(2, 2);
        for k in ch.kraus() {
            sum += &k.adjoint().matmul(&k);
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-8);
    }

    #[test]
    fn stinespring_views() {
        let (v, env) = Channel::identity(vec![2]).stinespring();
        assert_eq!(env, 1);
        assert!(orthonormality_error(&v) < 1e-14);

        let (v, env) = Channel::measure_in_basis(&ComplexMatrix::identity(2))
            .unwrap()
            .stinespring();
        assert_eq!(env, 2);
        // V|i⟩ is a product |i⟩|k_i⟩ with distinct environment labels
        let mut labels = Vec::new();
        for i in 0..2 {
            let col = v.col(i);
            let nz: Vec<usize> = (0..4).filter(|&r| col[r].norm() > 1e-12).collect();
            assert_eq!(nz.len(), 1);
            assert!((col[nz[0]].norm() - 1.0).abs() < 1e-14);
            assert_eq!(nz[0] / env, i);
            labels.push(nz[0] % env);
        }
        assert_ne!(labels[0], labels[1]);

        let mut rng = rng_from_seed(5);
        let ch = random_channel(&[2], &[2], 3, &mut rng);
        let (v, env) = ch.stinespring();
        assert!(orthonormality_error(&v) < 1e-8);
        for i in 0..2 {
            for j in 0..2 {
                let e = ComplexMatrix::unit(2, 2, i, j);
                let dilated = v
                    .matmul(&e)
                    .matmul(&v.adjoint())
                    .partial_trace(&[2, env], &[0])
                    .unwrap();
                assert!(dilated.max_abs_diff(&ch.apply_operator(&e).unwrap()) < 1e-8);
            }
        }
    }

    #[test]
    fn dual_pairing_and_unitality() {
        let mut rng = rng_from_seed(6);
        let ch = random_channel(&[2], &[3], 2, &mut rng);
        let dual = ch.dual();
        for _ in 0..10 {
            let x = crate::random::ginibre(3, 3, &mut rng);
            let y = crate::random::ginibre(2, 2, &mut rng);
            let lhs = x.inner(&ch.apply_operator(&y).unwrap());
            let rhs = dual.apply(&x).unwrap().inner(&y);
            assert!((lhs - rhs).norm() < 1e-10);
            assert!(dual.apply(&x).unwrap().max_abs_diff(&ch.apply_dual_kraus(&x)) < 1e-8);
        }
        let unit = dual.apply(&ComplexMatrix::identity(3)).unwrap();
        assert!(unit.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);

        let tr = Channel::trace_out(vec![2]);
        let d = tr.dual();
        assert!(
            d.apply(&ComplexMatrix::identity(1))
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-15
        );
        let id_dual = Channel::identity(vec![2]).dual();
        assert!(id_dual.choi().max_abs_diff(Channel::identity(vec![2]).choi()) < 1e-14);
    }

    #[test]
    fn composition_matches_sequential_action() {
        let mut rng = rng_from_seed(7);
        let ch1 = random_channel(&[2], &[3], 2, &mut rng);
        let ch2 = random_channel(&[3], &[2], 2, &mut rng);
        let c = compose(&ch2, &ch1).unwrap();
        for _ in 0..5 {
            let rho = random_state(&[2], &mut rng);
            let seq = ch2.apply(&ch1.apply(&rho).unwrap()).unwrap();
            assert!(c.apply(&rho).unwrap().matrix().max_abs_diff(seq.matrix()) < 1e-10);
        }
        let with_id = compose(&Channel::identity(vec![2]), &ch2).unwrap();
        assert!(with_id.choi().max_abs_diff(ch2.choi()) < 1e-12);
        assert!(compose(&ch1, &ch1).is_err());
    }

    #[test]
    fn measurement_channels() {
        let p = 0.3;
        let rho = DensityMatrix::diagonal(vec![2], &[p, 1.0 - p]).unwrap();
        let qc = quantum_to_classical(&Povm::computational(2));
        assert!(qc.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let tau = random_state(&[3], &mut rng_from_seed(8));
        let trivial = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let eb = entanglement_breaking(&trivial, std::slice::from_ref(&tau)).unwrap();
        assert!(eb.choi().max_abs_diff(Channel::replace(vec![2], &tau).choi()) < 1e-15);

        let basis_preps: Vec<DensityMatrix> = (0..2).map(|k| DensityMatrix::basis(vec![2], k)).collect();
        let deph = entanglement_breaking(&Povm::computational(2), &basis_preps).unwrap();
        let meas = Channel::measure_in_basis(&ComplexMatrix::identity(2)).unwrap();
        assert!(deph.choi().max_abs_diff(meas.choi()) < 1e-15);
        assert!(entanglement_breaking(&Povm::computational(2), &[tau]).is_err());
    }

    #[test]
    fn append_and_partial_trace_channels() {
        let mut rng = rng_from_seed(9);
        let x = random_state(&[2], &mut rng);
        let tau = random_state(&[3], &mut rng);
        let app = Channel::append(vec![2], &tau);
        assert!(Channel::from_choi(vec![2], vec![2, 3], app.choi().clone()).is_ok());
        let out = app.apply(&x).unwrap();
        assert!(out.matrix().max_abs_diff(x.tensor(&tau).matrix()) < 1e-15);
        let back = Channel::partial_trace(vec![2, 3], &[0]).unwrap().apply(&out).unwrap();
        assert!(back.matrix().max_abs_diff(x.matrix()) < 1e-15);
    }
}
