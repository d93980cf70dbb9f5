//! Dense complex linear algebra and validated quantum objects at small
//! dimension: density operators, POVMs, Kraus channels, instruments.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::config::Config;
use crate::error::{KdError, Result};

pub mod sample;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Kronecker product under the global row-major convention:
/// composite index k = i * dim_B + j.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

pub fn ensure_finite(m: &CMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(KdError::NonFinite { what })
    }
}

fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(KdError::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn hermiticity_gap(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigendecomposition of a (numerically) Hermitian matrix. The input is
/// symmetrized first so tiny asymmetries cannot trip the solver; callers are
/// expected to have checked `hermiticity_gap` against their tolerance.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(DVector<f64>, CMatrix)> {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = nalgebra::linalg::SymmetricEigen::try_new(h, f64::EPSILON, 100_000)
        .ok_or(KdError::EigenFailure)?;
    Ok((eig.eigenvalues, eig.eigenvectors))
}

pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigen(m)?;
    Ok(vals.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Apply `f` to the spectrum of a Hermitian matrix: V f(L) V^dagger.
pub fn hermitian_matrix_function(
    m: &CMatrix,
    f: impl Fn(f64) -> Complex64,
) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(m)?;
    let d = vals.len();
    let fl = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            f(vals[i])
        } else {
            Complex64::ZERO
        }
    });
    Ok(&vecs * fl * vecs.adjoint())
}

/// exp(iH) for Hermitian H; the workhorse of the unitary parameterization.
pub fn expi_hermitian(h: &CMatrix) -> Result<CMatrix> {
    hermitian_matrix_function(h, |lambda| c(0.0, lambda).exp())
}

/// Unitary swap |i>|j> -> |j>|i> as a (d_b*d_a) x (d_a*d_b) matrix.
pub fn swap_matrix(d_a: usize, d_b: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d_a * d_b, d_a * d_b);
    for i in 0..d_a {
        for j in 0..d_b {
            s[(j * d_a + i, i * d_b + j)] = Complex64::ONE;
        }
    }
    s
}

/// Density operator: Hermitian, unit trace, positive semidefinite
/// (all within `cfg.validation_tol`).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: CMatrix,
}

impl DensityOperator {
    pub fn new(mat: CMatrix, cfg: &Config) -> Result<Self> {
        let dim = ensure_square(&mat)?;
        cfg.check_dim(dim)?;
        ensure_finite(&mat, "density operator")?;
        let tol = cfg.validation_tol;
        let dev = hermiticity_gap(&mat);
        if dev > tol {
            return Err(KdError::NotHermitian { dev, tol });
        }
        let tr = trace(&mat);
        if (tr - Complex64::ONE).norm() > tol {
            return Err(KdError::BadTrace {
                expected: 1.0,
                got: tr.re,
                tol,
            });
        }
        let min_eig = min_eigenvalue(&mat)?;
        if min_eig < -tol {
            return Err(KdError::NotPositive { min_eig });
        }
        Ok(DensityOperator { mat })
    }

    /// |psi><psi| / <psi|psi>. Rejects the zero vector.
    pub fn pure(psi: &CVector, cfg: &Config) -> Result<Self> {
        cfg.check_dim(psi.len())?;
        let n2 = psi.norm_squared();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(KdError::NonFinite { what: "pure state" });
        }
        let mat = (psi * psi.adjoint()).map(|z| z / n2);
        Ok(DensityOperator { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }
}

/// Positive operator-valued measure: effects sum to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>, cfg: &Config) -> Result<Self> {
        let first = effects.first().ok_or(KdError::Empty { what: "POVM" })?;
        let dim = ensure_square(first)?;
        cfg.check_dim(dim)?;
        let tol = cfg.validation_tol;
        let mut sum = CMatrix::zeros(dim, dim);
        for e in &effects {
            validate_effect(e, dim, cfg)?;
            sum += e;
        }
        let dev = max_abs(&(sum - identity(dim)));
        if dev > tol {
            return Err(KdError::IncompletePovm { dev });
        }
        Ok(Povm { dim, effects })
    }

    /// Rank-one projective measurement onto an orthonormal set.
    pub fn projective(basis: &[CVector], cfg: &Config) -> Result<Self> {
        let effects = basis.iter().map(|v| v * v.adjoint()).collect();
        Povm::new(effects, cfg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// A single effect: Hermitian with spectrum in [0, 1], up to tolerance.
pub fn validate_effect(e: &CMatrix, dim: usize, cfg: &Config) -> Result<()> {
    if e.nrows() != dim || e.ncols() != dim {
        return Err(KdError::DimensionMismatch {
            expected: dim,
            got: e.nrows().max(e.ncols()),
        });
    }
    ensure_finite(e, "effect")?;
    let tol = cfg.validation_tol;
    let dev = hermiticity_gap(e);
    if dev > tol {
        return Err(KdError::NotHermitian { dev, tol });
    }
    let (vals, _) = hermitian_eigen(e)?;
    for &v in vals.iter() {
        if v < -tol || v > 1.0 + tol {
            return Err(KdError::EffectOutOfRange { eig: v });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceClass {
    /// sum K'K = 1: a channel proper.
    Preserving,
    /// sum K'K <= 1: one branch of an instrument.
    Nonincreasing,
}

/// Completely positive map in Kraus form, dim_in -> dim_out.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    trace_class: TraceClass,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>, trace_class: TraceClass, cfg: &Config) -> Result<Self> {
        let first = kraus.first().ok_or(KdError::Empty {
            what: "Kraus operator list",
        })?;
        let dim_out = first.nrows();
        let dim_in = first.ncols();
        cfg.check_dim(dim_in)?;
        cfg.check_dim(dim_out)?;
        let mut gram = CMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            if k.nrows() != dim_out || k.ncols() != dim_in {
                return Err(KdError::DimensionMismatch {
                    expected: dim_out,
                    got: k.nrows(),
                });
            }
            ensure_finite(k, "Kraus operator")?;
            gram += k.adjoint() * k;
        }
        let tol = cfg.validation_tol;
        match trace_class {
            TraceClass::Preserving => {
                let dev = max_abs(&(&gram - identity(dim_in)));
                if dev > tol {
                    return Err(KdError::NotTracePreserving { dev });
                }
            }
            TraceClass::Nonincreasing => {
                let min_eig = min_eigenvalue(&(identity(dim_in) - &gram))?;
                if min_eig < -tol {
                    return Err(KdError::NotTraceNonincreasing { min_eig });
                }
            }
        }
        Ok(KrausChannel {
            dim_in,
            dim_out,
            kraus,
            trace_class,
        })
    }

    /// For maps that are valid by construction (adjoints, compositions).
    pub(crate) fn new_unchecked(
        kraus: Vec<CMatrix>,
        trace_class: TraceClass,
        dim_in: usize,
        dim_out: usize,
    ) -> Self {
        KrausChannel {
            dim_in,
            dim_out,
            kraus,
            trace_class,
        }
    }

    pub fn identity_channel(dim: usize) -> Self {
        KrausChannel::new_unchecked(vec![identity(dim)], TraceClass::Preserving, dim, dim)
    }

    /// Single-Kraus channel rho -> U rho U'. Validates unitarity.
    pub fn unitary(u: CMatrix, cfg: &Config) -> Result<Self> {
        let dim = ensure_square(&u)?;
        cfg.check_dim(dim)?;
        ensure_finite(&u, "unitary")?;
        let dev = max_abs(&(u.adjoint() * &u - identity(dim)));
        if dev > cfg.validation_tol {
            return Err(KdError::NotTracePreserving { dev });
        }
        Ok(KrausChannel::new_unchecked(
            vec![u],
            TraceClass::Preserving,
            dim,
            dim,
        ))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn trace_class(&self) -> TraceClass {
        self.trace_class
    }

    /// sum_k K rho K'.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim_in || rho.ncols() != self.dim_in {
            return Err(KdError::DimensionMismatch {
                expected: self.dim_in,
                got: rho.nrows(),
            });
        }
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        Ok(out)
    }

    /// Heisenberg-picture adjoint, Kraus ops {K'}. Unital whenever the
    /// primal map is trace-preserving, but generally neither trace-preserving
    /// nor trace-nonincreasing itself; the `trace_class` flag is inherited
    /// and keeps describing the primal map.
    pub fn adjoint(&self) -> KrausChannel {
        let kraus = self.kraus.iter().map(|k| k.adjoint()).collect();
        KrausChannel::new_unchecked(kraus, self.trace_class, self.dim_out, self.dim_in)
    }

    /// self after `inner` (self . inner), Kraus products K_a L_b.
    pub fn compose(&self, inner: &KrausChannel) -> Result<KrausChannel> {
        if inner.dim_out != self.dim_in {
            return Err(KdError::DimensionMismatch {
                expected: self.dim_in,
                got: inner.dim_out,
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * inner.kraus.len());
        for a in &self.kraus {
            for b in &inner.kraus {
                kraus.push(a * b);
            }
        }
        let trace_class = match (self.trace_class, inner.trace_class) {
            (TraceClass::Preserving, TraceClass::Preserving) => TraceClass::Preserving,
            _ => TraceClass::Nonincreasing,
        };
        Ok(KrausChannel::new_unchecked(
            kraus,
            trace_class,
            inner.dim_in,
            self.dim_out,
        ))
    }

    /// Parallel composition self (x) other under the row-major convention.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(tensor(a, b));
            }
        }
        let trace_class = match (self.trace_class, other.trace_class) {
            (TraceClass::Preserving, TraceClass::Preserving) => TraceClass::Preserving,
            _ => TraceClass::Nonincreasing,
        };
        KrausChannel::new_unchecked(
            kraus,
            trace_class,
            self.dim_in * other.dim_in,
            self.dim_out * other.dim_out,
        )
    }
}

/// Collection of trace-nonincreasing branches summing to a trace-preserving
/// channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    branches: Vec<KrausChannel>,
}

impl Instrument {
    pub fn new(branches: Vec<KrausChannel>, cfg: &Config) -> Result<Self> {
        let first = branches.first().ok_or(KdError::Empty {
            what: "instrument branch list",
        })?;
        let (dim_in, dim_out) = (first.dim_in, first.dim_out);
        let mut gram = CMatrix::zeros(dim_in, dim_in);
        for b in &branches {
            if b.dim_in != dim_in || b.dim_out != dim_out {
                return Err(KdError::DimensionMismatch {
                    expected: dim_in,
                    got: b.dim_in,
                });
            }
            for k in &b.kraus {
                gram += k.adjoint() * k;
            }
        }
        let dev = max_abs(&(gram - identity(dim_in)));
        if dev > cfg.validation_tol {
            return Err(KdError::NotTracePreserving { dev });
        }
        Ok(Instrument { branches })
    }

    pub fn branches(&self) -> &[KrausChannel] {
        &self.branches
    }

    /// The trace-preserving sum of all branches.
    pub fn total(&self) -> KrausChannel {
        let mut kraus = Vec::new();
        for b in &self.branches {
            kraus.extend(b.kraus.iter().cloned());
        }
        KrausChannel::new_unchecked(
            kraus,
            TraceClass::Preserving,
            self.branches[0].dim_in,
            self.branches[0].dim_out,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> Config {
        Config::default()
    }

    fn ket(entries: &[Complex64]) -> CVector {
        CVector::from_column_slice(entries)
    }

    #[test]
    fn tensor_identity_case() {
        let i2 = identity(2);
        assert_eq!(tensor(&i2, &i2), identity(4));
    }

    #[test]
    fn tensor_trace_multiplicative() {
        let mut rng = sample::rng_from_seed(5);
        let a = sample::gaussian_matrix(3, 3, &mut rng);
        let b = sample::gaussian_matrix(3, 3, &mut rng);
        let lhs = trace(&tensor(&a, &b));
        let rhs = trace(&a) * trace(&b);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn tensor_block_position() {
        // |0><0| (x) |1><1| has its single 1 at row-major block position (1, 1)
        let p0 = CMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 0 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        let p1 = CMatrix::from_fn(2, 2, |i, j| {
            if i == 1 && j == 1 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        let t = tensor(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(t[(i, j)].re, want);
                assert_abs_diff_eq!(t[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn tensor_associativity() {
        let mut rng = sample::rng_from_seed(17);
        for _ in 0..20 {
            let a = sample::gaussian_matrix(2, 2, &mut rng);
            let b = sample::gaussian_matrix(3, 3, &mut rng);
            let c_ = sample::gaussian_matrix(2, 2, &mut rng);
            let lhs = tensor(&tensor(&a, &b), &c_);
            let rhs = tensor(&a, &tensor(&b, &c_));
            assert!(frobenius_distance(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn identity_channel_is_identity() {
        let ch = KrausChannel::identity_channel(3);
        let mut rng = sample::rng_from_seed(2);
        let rho = sample::random_density(3, &mut rng);
        let out = ch.apply(&rho).unwrap();
        assert!(frobenius_distance(&out, &rho) < 1e-15);
    }

    #[test]
    fn depolarizing_sends_everything_to_maximally_mixed() {
        // Kraus set {I/2, X/2, Y/2, Z/2}
        let x = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let y = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let z = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        let half = c(0.5, 0.0);
        let kraus = vec![
            identity(2).map(|e| e * half),
            x.map(|e| e * half),
            y.map(|e| e * half),
            z.map(|e| e * half),
        ];
        let ch = KrausChannel::new(kraus, TraceClass::Preserving, &cfg()).unwrap();
        let mut rng = sample::rng_from_seed(3);
        for _ in 0..5 {
            let rho = sample::random_density(2, &mut rng);
            let out = ch.apply(&rho).unwrap();
            assert!(frobenius_distance(&out, &identity(2).map(|e| e * half)) < 1e-12);
        }
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let s = 1.0 / 2f64.sqrt();
        let h = CMatrix::from_row_slice(2, 2, &[c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)]);
        let ch = KrausChannel::unitary(h, &cfg()).unwrap();
        let zero = ket(&[Complex64::ONE, Complex64::ZERO]);
        let rho = DensityOperator::pure(&zero, &cfg()).unwrap();
        let plus = ket(&[c(s, 0.), c(s, 0.)]);
        let expect = DensityOperator::pure(&plus, &cfg()).unwrap();
        let out = ch.apply(rho.matrix()).unwrap();
        assert!(frobenius_distance(&out, expect.matrix()) < 1e-12);
    }

    #[test]
    fn channel_linearity() {
        let mut rng = sample::rng_from_seed(11);
        for _ in 0..10 {
            let ch_kraus = sample::random_channel(2, 3, 4, &mut rng);
            let ch = KrausChannel::new(ch_kraus, TraceClass::Preserving, &cfg()).unwrap();
            let r1 = sample::random_density(2, &mut rng);
            let r2 = sample::random_density(2, &mut rng);
            let (al, be) = (c(0.3, 0.1), c(-0.2, 0.7));
            let mixed = r1.map(|e| e * al) + r2.map(|e| e * be);
            let lhs = ch.apply(&mixed).unwrap();
            let rhs =
                ch.apply(&r1).unwrap().map(|e| e * al) + ch.apply(&r2).unwrap().map(|e| e * be);
            assert!(frobenius_distance(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn trace_preserving_channels_preserve_trace() {
        let mut rng = sample::rng_from_seed(13);
        for _ in 0..10 {
            let kraus = sample::random_channel(3, 2, 3, &mut rng);
            let ch = KrausChannel::new(kraus, TraceClass::Preserving, &cfg()).unwrap();
            let rho = sample::random_density(3, &mut rng);
            let out = ch.apply(&rho).unwrap();
            assert!((trace(&out) - trace(&rho)).norm() < 1e-12);
        }
    }

    #[test]
    fn adjoint_of_unitary_channel_is_inverse() {
        let mut rng = sample::rng_from_seed(7);
        let u = sample::haar_unitary(3, &mut rng);
        let ch = KrausChannel::unitary(u.clone(), &cfg()).unwrap();
        let adj = ch.adjoint();
        assert!(frobenius_distance(&adj.kraus_ops()[0], &u.adjoint()) < 1e-15);
        // identity channel is self-adjoint
        let id = KrausChannel::identity_channel(2);
        assert_eq!(id.adjoint().kraus_ops(), id.kraus_ops());
    }

    #[test]
    fn adjoint_pairs_with_primal_under_trace() {
        // Tr[E ch(rho)] = Tr[ch'(E) rho]
        let mut rng = sample::rng_from_seed(23);
        for _ in 0..20 {
            let kraus = sample::random_channel(2, 2, 3, &mut rng);
            let ch = KrausChannel::new(kraus, TraceClass::Preserving, &cfg()).unwrap();
            let adj = ch.adjoint();
            let rho = sample::random_density(2, &mut rng);
            let e = &sample::random_povm(2, 2, &mut rng)[0];
            let lhs = trace(&(e * ch.apply(&rho).unwrap()));
            let rhs = trace(&(adj.apply(e).unwrap() * rho));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn adjoint_of_trace_preserving_is_unital() {
        let mut rng = sample::rng_from_seed(29);
        let kraus = sample::random_channel(3, 3, 4, &mut rng);
        let ch = KrausChannel::new(kraus, TraceClass::Preserving, &cfg()).unwrap();
        let out = ch.adjoint().apply(&identity(3)).unwrap();
        assert!(frobenius_distance(&out, &identity(3)) < 1e-10);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = sample::rng_from_seed(31);
        let k1 = sample::random_channel(2, 3, 2, &mut rng);
        let k2 = sample::random_channel(3, 2, 3, &mut rng);
        let ch1 = KrausChannel::new(k1, TraceClass::Preserving, &cfg()).unwrap();
        let ch2 = KrausChannel::new(k2, TraceClass::Preserving, &cfg()).unwrap();
        let both = ch2.compose(&ch1).unwrap();
        let rho = sample::random_density(2, &mut rng);
        let lhs = both.apply(&rho).unwrap();
        let rhs = ch2.apply(&ch1.apply(&rho).unwrap()).unwrap();
        assert!(frobenius_distance(&lhs, &rhs) < 1e-12);
        assert!(ch1.compose(&ch2).is_ok());
        assert!(ch1.compose(&KrausChannel::identity_channel(4)).is_err());
    }

    #[test]
    fn povm_validation() {
        let half = identity(2).map(|e| e * c(0.5, 0.0));
        Povm::new(vec![half.clone(), half.clone()], &cfg()).unwrap();
        assert!(matches!(
            Povm::new(vec![half.clone()], &cfg()),
            Err(KdError::IncompletePovm { .. })
        ));
        let bad = identity(2).map(|e| e * c(1.5, 0.0));
        assert!(matches!(
            Povm::new(vec![bad, identity(2).map(|e| e * c(-0.5, 0.0))], &cfg()),
            Err(KdError::EffectOutOfRange { .. })
        ));
    }

    #[test]
    fn density_validation() {
        let mut rho = identity(2).map(|e| e * c(0.5, 0.0));
        rho[(0, 1)] = c(0.0, 0.3);
        // not Hermitian yet
        assert!(matches!(
            DensityOperator::new(rho.clone(), &cfg()),
            Err(KdError::NotHermitian { .. })
        ));
        rho[(1, 0)] = c(0.0, -0.3);
        DensityOperator::new(rho.clone(), &cfg()).unwrap();
        // scale trace away from 1
        assert!(matches!(
            DensityOperator::new(rho.map(|e| e * c(1.1, 0.0)), &cfg()),
            Err(KdError::BadTrace { .. })
        ));
        // negative eigenvalue
        let neg = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.2, 0.), c(0., 0.), c(0., 0.), c(-0.2, 0.)],
        );
        assert!(matches!(
            DensityOperator::new(neg, &cfg()),
            Err(KdError::NotPositive { .. })
        ));
    }

    #[test]
    fn instrument_branches_must_sum_to_trace_preserving() {
        let p0 = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let p1 = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
        let b0 = KrausChannel::new(vec![p0.clone()], TraceClass::Nonincreasing, &cfg()).unwrap();
        let b1 = KrausChannel::new(vec![p1], TraceClass::Nonincreasing, &cfg()).unwrap();
        let ins = Instrument::new(vec![b0.clone(), b1], &cfg()).unwrap();
        assert_eq!(ins.branches().len(), 2);
        let mut rng = sample::rng_from_seed(37);
        let rho = sample::random_density(2, &mut rng);
        assert!((trace(&ins.total().apply(&rho).unwrap()) - Complex64::ONE).norm() < 1e-12);
        assert!(matches!(
            Instrument::new(vec![b0.clone(), b0.clone()], &cfg()),
            Err(KdError::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn expi_hermitian_gives_unitary() {
        let mut rng = sample::rng_from_seed(41);
        let h = sample::random_hermitian(4, &mut rng);
        let u = expi_hermitian(&h).unwrap();
        assert!(max_abs(&(u.adjoint() * &u - identity(4))) < 1e-12);
        // zero generator gives the identity
        let u0 = expi_hermitian(&CMatrix::zeros(3, 3)).unwrap();
        assert!(frobenius_distance(&u0, &identity(3)) < 1e-14);
    }

    #[test]
    fn swap_matrix_swaps() {
        let s = swap_matrix(2, 3);
        let mut rng = sample::rng_from_seed(43);
        let a = sample::random_density(2, &mut rng);
        let b = sample::random_density(3, &mut rng);
        let lhs = &s * tensor(&a, &b) * s.adjoint();
        assert!(frobenius_distance(&lhs, &tensor(&b, &a)) < 1e-13);
    }
}
