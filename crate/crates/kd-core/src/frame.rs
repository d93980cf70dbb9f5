//! KD frames: pairs of orthonormal bases with nowhere-vanishing cross
//! overlaps, and the rank-one frame/dual operator families they induce.
//!
//! With overlaps o(i, i') = <a'_{i'}|a_i>, the frame and dual operators are
//!
//! ```text
//! F_{i,i'} = |a'_{i'}><a_i| * o(i, i')        (representation side)
//! D_{i,i'} = |a_i><a'_{i'}| / o(i, i')        (reconstruction side)
//! ```
//!
//! so Tr[F_p D_q] = delta_pq, Tr[D] = 1 and Tr[F] = |o|^2. Both families are
//! stored eagerly; at the dimensions this crate targets (d^2 small matrices)
//! recomputation would buy nothing. Index pairs flatten row-major:
//! `k = i * d + i'`, the one global convention used everywhere.

use num_complex::Complex64;
use rand::Rng;

use crate::config::Config;
use crate::error::{KdError, Result};
use crate::qops::{self, c, CMatrix, CVector};

/// Rotate so the first amplitude of nonnegligible modulus is real positive.
/// Purely cosmetic for the representation (frame and dual operators are
/// invariant under per-vector phases) but makes serialized bases canonical.
fn canonical_phase(v: &CVector) -> CVector {
    match v.iter().find(|z| z.norm() > 1e-12) {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v.map(|e| e * phase)
        }
        None => v.clone(),
    }
}

/// Two orthonormal bases of the same space, all cross overlaps clear of the
/// configured floor.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPair {
    dim: usize,
    a: Vec<CVector>,
    a_prime: Vec<CVector>,
    /// overlaps[(i, i')] = <a'_{i'}|a_i>
    overlaps: CMatrix,
    min_overlap: f64,
}

impl BasisPair {
    pub fn new(a: Vec<CVector>, a_prime: Vec<CVector>, cfg: &Config) -> Result<Self> {
        let dim = a.len();
        cfg.check_dim(dim)?;
        if a_prime.len() != dim {
            return Err(KdError::DimensionMismatch {
                expected: dim,
                got: a_prime.len(),
            });
        }
        for v in a.iter().chain(a_prime.iter()) {
            if v.len() != dim {
                return Err(KdError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(KdError::NonFinite {
                    what: "basis vector",
                });
            }
        }
        let a: Vec<CVector> = a.iter().map(canonical_phase).collect();
        let a_prime: Vec<CVector> = a_prime.iter().map(canonical_phase).collect();
        for basis in [&a, &a_prime] {
            let dev = gram_deviation(basis);
            if dev > cfg.validation_tol {
                return Err(KdError::NotOrthonormal { dev });
            }
        }
        Self::assemble(a, a_prime, Some(cfg.overlap_floor))
    }

    /// Columns of two unitaries as the two bases.
    pub fn from_unitaries(u: &CMatrix, u_prime: &CMatrix, cfg: &Config) -> Result<Self> {
        let cols = |m: &CMatrix| -> Vec<CVector> {
            (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
        };
        if u.nrows() != u.ncols() || u_prime.nrows() != u_prime.ncols() {
            return Err(KdError::DimensionMismatch {
                expected: u.nrows(),
                got: u.ncols(),
            });
        }
        BasisPair::new(cols(u), cols(u_prime), cfg)
    }

    /// Skips orthonormality and floor checks; for optimizer interiors where
    /// the bases are unitary columns by construction and near-orthogonal
    /// pairs are handled by penalty instead of rejection.
    pub(crate) fn new_unchecked(a: Vec<CVector>, a_prime: Vec<CVector>) -> Self {
        let a: Vec<CVector> = a.iter().map(canonical_phase).collect();
        let a_prime: Vec<CVector> = a_prime.iter().map(canonical_phase).collect();
        Self::assemble(a, a_prime, None).expect("unchecked assembly cannot fail")
    }

    fn assemble(a: Vec<CVector>, a_prime: Vec<CVector>, floor: Option<f64>) -> Result<Self> {
        let dim = a.len();
        let overlaps = CMatrix::from_fn(dim, dim, |i, ip| a_prime[ip].dotc(&a[i]));
        let mut min_overlap = f64::INFINITY;
        for i in 0..dim {
            for ip in 0..dim {
                let o = overlaps[(i, ip)].norm();
                if let Some(floor) = floor {
                    if o < floor {
                        return Err(KdError::OrthogonalPair {
                            i,
                            i_prime: ip,
                            overlap: o,
                            floor,
                        });
                    }
                }
                min_overlap = min_overlap.min(o);
            }
        }
        Ok(BasisPair {
            dim,
            a,
            a_prime,
            overlaps,
            min_overlap,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector_a(&self, i: usize) -> &CVector {
        &self.a[i]
    }

    pub fn vector_a_prime(&self, i_prime: usize) -> &CVector {
        &self.a_prime[i_prime]
    }

    pub fn overlap(&self, i: usize, i_prime: usize) -> Complex64 {
        self.overlaps[(i, i_prime)]
    }

    /// Smallest |<a'_{i'}|a_i>|; the conditioning diagnostic of the pair.
    pub fn min_overlap(&self) -> f64 {
        self.min_overlap
    }
}

fn gram_deviation(basis: &[CVector]) -> f64 {
    let d = basis.len();
    let gram = CMatrix::from_fn(d, d, |i, j| basis[i].dotc(&basis[j]));
    qops::max_abs(&(gram - qops::identity(d)))
}

/// A basis pair with its frame and dual operator families materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct KDFrame {
    pair: BasisPair,
    frames: Vec<CMatrix>,
    duals: Vec<CMatrix>,
}

impl KDFrame {
    pub fn new(pair: BasisPair) -> Self {
        let d = pair.dim;
        let mut frames = Vec::with_capacity(d * d);
        let mut duals = Vec::with_capacity(d * d);
        for i in 0..d {
            for ip in 0..d {
                let o = pair.overlaps[(i, ip)];
                let outer = &pair.a_prime[ip] * pair.a[i].adjoint();
                frames.push(outer.map(|z| z * o));
                let outer_rev = &pair.a[i] * pair.a_prime[ip].adjoint();
                duals.push(outer_rev.map(|z| z / o));
            }
        }
        KDFrame {
            pair,
            frames,
            duals,
        }
    }

    pub fn from_bases(a: Vec<CVector>, a_prime: Vec<CVector>, cfg: &Config) -> Result<Self> {
        Ok(KDFrame::new(BasisPair::new(a, a_prime, cfg)?))
    }

    /// The workhorse qubit example: computational basis against the
    /// Hadamard basis {|+>, |->}; every overlap has modulus 2^{-1/2}.
    pub fn qubit_zx(cfg: &Config) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = CVector::from_column_slice(&[Complex64::ONE, Complex64::ZERO]);
        let one = CVector::from_column_slice(&[Complex64::ZERO, Complex64::ONE]);
        let plus = CVector::from_column_slice(&[c(s, 0.0), c(s, 0.0)]);
        let minus = CVector::from_column_slice(&[c(s, 0.0), c(-s, 0.0)]);
        KDFrame::from_bases(vec![zero, one], vec![plus, minus], cfg)
    }

    /// Pair of independent Haar-random bases. Retries the (measure-zero,
    /// but numerically possible) draws that land under the overlap floor.
    pub fn haar_random<R: Rng + ?Sized>(dim: usize, rng: &mut R, cfg: &Config) -> Result<Self> {
        let mut last_err = None;
        for _ in 0..32 {
            let u = qops::sample::haar_unitary(dim, rng);
            let up = qops::sample::haar_unitary(dim, rng);
            match BasisPair::from_unitaries(&u, &up, cfg) {
                Ok(pair) => return Ok(KDFrame::new(pair)),
                Err(e @ KdError::OrthogonalPair { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or(KdError::Internal {
            msg: "haar_random retry loop exited without error".into(),
        }))
    }

    pub fn pair(&self) -> &BasisPair {
        &self.pair
    }

    pub fn dim(&self) -> usize {
        self.pair.dim
    }

    /// Number of index pairs, d^2.
    pub fn n_ops(&self) -> usize {
        self.frames.len()
    }

    /// Row-major pair index.
    pub fn flat(&self, i: usize, i_prime: usize) -> usize {
        i * self.pair.dim + i_prime
    }

    pub fn unflat(&self, k: usize) -> (usize, usize) {
        (k / self.pair.dim, k % self.pair.dim)
    }

    pub fn frame_op(&self, i: usize, i_prime: usize) -> &CMatrix {
        &self.frames[self.flat(i, i_prime)]
    }

    pub fn dual_op(&self, i: usize, i_prime: usize) -> &CMatrix {
        &self.duals[self.flat(i, i_prime)]
    }

    pub fn frame_ops(&self) -> &[CMatrix] {
        &self.frames
    }

    pub fn dual_ops(&self) -> &[CMatrix] {
        &self.duals
    }

    /// Composite frame on dim_A * dim_B: both bases are the Kronecker
    /// products of the factors, so every composite frame operator equals the
    /// Kronecker product of the factor operators (same for duals). Composite
    /// overlaps multiply, which can sink below the floor even when both
    /// factors clear it — hence the fallible signature.
    pub fn tensor(&self, other: &KDFrame, cfg: &Config) -> Result<KDFrame> {
        let mut a = Vec::with_capacity(self.dim() * other.dim());
        let mut a_prime = Vec::with_capacity(self.dim() * other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                a.push(self.pair.a[i].kronecker(&other.pair.a[j]));
                a_prime.push(self.pair.a_prime[i].kronecker(&other.pair.a_prime[j]));
            }
        }
        KDFrame::from_bases(a, a_prime, cfg)
    }

    pub(crate) fn tensor_unchecked(&self, other: &KDFrame) -> KDFrame {
        let mut a = Vec::with_capacity(self.dim() * other.dim());
        let mut a_prime = Vec::with_capacity(self.dim() * other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                a.push(self.pair.a[i].kronecker(&other.pair.a[j]));
                a_prime.push(self.pair.a_prime[i].kronecker(&other.pair.a_prime[j]));
            }
        }
        KDFrame::new(BasisPair::new_unchecked(a, a_prime))
    }

    /// Largest |Tr[F_p D_q] - delta_pq| over all pairs of pair-indices;
    /// should sit at rounding level for any admissible frame.
    pub fn duality_gap(&self) -> f64 {
        let n = self.n_ops();
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                let t = qops::trace(&(&self.frames[p] * &self.duals[q]));
                let target = if p == q {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                worst = worst.max((t - target).norm());
            }
        }
        worst
    }

    /// sum_{i,i'} Tr[F_{i,i'} O]; equal to Tr[O] for any operator because
    /// the frame operators sum to a resolution of the trace.
    pub fn sum_frame_trace(&self, o: &CMatrix) -> Result<Complex64> {
        if o.nrows() != self.dim() || o.ncols() != self.dim() {
            return Err(KdError::DimensionMismatch {
                expected: self.dim(),
                got: o.nrows(),
            });
        }
        let mut acc = Complex64::ZERO;
        for f in &self.frames {
            acc += qops::trace(&(f * o));
        }
        Ok(acc)
    }

    /// True when both frames describe the same basis pair (up to rounding).
    /// Used to reject cross-frame algebra like chaining representation
    /// vectors through mismatched channel matrices.
    pub fn compatible(&self, other: &KDFrame) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let close = |x: &[CVector], y: &[CVector]| {
            x.iter()
                .zip(y)
                .all(|(u, v)| (u - v).iter().all(|z| z.norm() <= 1e-12))
        };
        close(&self.pair.a, &other.pair.a) && close(&self.pair.a_prime, &other.pair.a_prime)
    }
}
