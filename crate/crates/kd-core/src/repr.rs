//! Representations of quantum objects in a KD frame and their inverses.
//!
//! States map to complex quasiprobability vectors mu, effects to weak-value
//! vectors xi, channels to quasistochastic matrices Gamma:
//!
//! ```text
//! mu(i,i' | rho)   = Tr[F_{i,i'} rho]
//! xi(E | i,i')     = Tr[E D_{i,i'}]  =  <a'_{i'}|E|a_i> / <a'_{i'}|a_i>
//! Gamma(j,j'|i,i') = Tr[F_{j,j'} ch(D_{i,i'})]
//! ```
//!
//! Reconstruction swaps the operator families: rho = sum mu D, E = sum xi F,
//! and the channel action is recovered by sandwiching Gamma between the two.
//! Circuit outcomes are literal linear algebra on the vectors:
//! xi^T Gamma_n ... Gamma_1 mu reproduces Tr[E ch_n(...ch_1(rho))].

use std::sync::Arc;

use num_complex::Complex64;

use crate::config::Config;
use crate::error::{KdError, Result};
use crate::frame::KDFrame;
use crate::qops::{self, CMatrix, CVector, DensityOperator, KrausChannel, Povm, TraceClass};

fn frames_match(a: &Arc<KDFrame>, b: &Arc<KDFrame>) -> bool {
    Arc::ptr_eq(a, b) || a.compatible(b)
}

/// Quasiprobability vector of a state: d^2 complex entries, row-major over
/// (i, i'). Sums to one; every entry has modulus at most one.
#[derive(Debug, Clone)]
pub struct KDStateVector {
    frame: Arc<KDFrame>,
    entries: CVector,
}

/// Weak-value vector of an effect. The all-ones vector represents the unit
/// effect in every frame.
#[derive(Debug, Clone)]
pub struct KDEffectVector {
    frame: Arc<KDFrame>,
    entries: CVector,
}

/// Quasistochastic matrix of a channel: (d_out^2) x (d_in^2), columns sum to
/// one exactly when the channel is trace-preserving.
#[derive(Debug, Clone)]
pub struct KDChannelMatrix {
    frame_in: Arc<KDFrame>,
    frame_out: Arc<KDFrame>,
    entries: CMatrix,
    trace_class: TraceClass,
}

pub fn represent_state(rho: &DensityOperator, frame: &Arc<KDFrame>) -> Result<KDStateVector> {
    represent_density_matrix(rho.matrix(), frame)
}

/// Same map on a raw matrix; used internally where the caller guarantees
/// state validity (e.g. optimizer-generated pure states).
pub fn represent_density_matrix(rho: &CMatrix, frame: &Arc<KDFrame>) -> Result<KDStateVector> {
    if rho.nrows() != frame.dim() || rho.ncols() != frame.dim() {
        return Err(KdError::DimensionMismatch {
            expected: frame.dim(),
            got: rho.nrows(),
        });
    }
    let entries = CVector::from_fn(frame.n_ops(), |k, _| {
        qops::trace(&(&frame.frame_ops()[k] * rho))
    });
    Ok(KDStateVector {
        frame: frame.clone(),
        entries,
    })
}

pub fn represent_effect(e: &CMatrix, frame: &Arc<KDFrame>) -> Result<KDEffectVector> {
    if e.nrows() != frame.dim() || e.ncols() != frame.dim() {
        return Err(KdError::DimensionMismatch {
            expected: frame.dim(),
            got: e.nrows(),
        });
    }
    qops::ensure_finite(e, "effect")?;
    let entries = CVector::from_fn(frame.n_ops(), |k, _| {
        qops::trace(&(e * &frame.dual_ops()[k]))
    });
    Ok(KDEffectVector {
        frame: frame.clone(),
        entries,
    })
}

pub fn represent_povm(povm: &Povm, frame: &Arc<KDFrame>) -> Result<Vec<KDEffectVector>> {
    povm.effects()
        .iter()
        .map(|e| represent_effect(e, frame))
        .collect()
}

pub fn represent_channel(
    ch: &KrausChannel,
    frame_in: &Arc<KDFrame>,
    frame_out: &Arc<KDFrame>,
) -> Result<KDChannelMatrix> {
    if ch.dim_in() != frame_in.dim() {
        return Err(KdError::DimensionMismatch {
            expected: frame_in.dim(),
            got: ch.dim_in(),
        });
    }
    if ch.dim_out() != frame_out.dim() {
        return Err(KdError::DimensionMismatch {
            expected: frame_out.dim(),
            got: ch.dim_out(),
        });
    }
    let n_in = frame_in.n_ops();
    let n_out = frame_out.n_ops();
    let mut entries = CMatrix::zeros(n_out, n_in);
    for col in 0..n_in {
        let pushed = ch.apply(&frame_in.dual_ops()[col])?;
        for row in 0..n_out {
            entries[(row, col)] = qops::trace(&(&frame_out.frame_ops()[row] * &pushed));
        }
    }
    Ok(KDChannelMatrix {
        frame_in: frame_in.clone(),
        frame_out: frame_out.clone(),
        entries,
        trace_class: ch.trace_class(),
    })
}

impl KDStateVector {
    pub fn from_entries(frame: Arc<KDFrame>, entries: CVector) -> Result<Self> {
        if entries.len() != frame.n_ops() {
            return Err(KdError::DimensionMismatch {
                expected: frame.n_ops(),
                got: entries.len(),
            });
        }
        Ok(KDStateVector { frame, entries })
    }

    pub fn frame(&self) -> &Arc<KDFrame> {
        &self.frame
    }

    pub fn entries(&self) -> &CVector {
        &self.entries
    }

    pub fn entry(&self, i: usize, i_prime: usize) -> Complex64 {
        self.entries[self.frame.flat(i, i_prime)]
    }

    pub fn sum(&self) -> Complex64 {
        self.entries.sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// sum of max(0, -Re) over entries.
    pub fn total_negativity(&self) -> f64 {
        self.entries.iter().map(|z| (-z.re).max(0.0)).sum()
    }

    /// sum of |Im| over entries.
    pub fn total_imaginarity(&self) -> f64 {
        self.entries.iter().map(|z| z.im.abs()).sum()
    }

    /// Smallest admissible-region margin over all entries.
    pub fn min_region_margin(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| region_check(&KDPoint::from_entry(*z)))
            .fold(f64::INFINITY, f64::min)
    }

    /// rho = sum mu(i,i') D_{i,i'}.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.frame.dim();
        let mut out = CMatrix::zeros(d, d);
        for (k, dual) in self.frame.dual_ops().iter().enumerate() {
            out += dual.map(|z| z * self.entries[k]);
        }
        out
    }
}

impl KDEffectVector {
    pub fn from_entries(frame: Arc<KDFrame>, entries: CVector) -> Result<Self> {
        if entries.len() != frame.n_ops() {
            return Err(KdError::DimensionMismatch {
                expected: frame.n_ops(),
                got: entries.len(),
            });
        }
        Ok(KDEffectVector { frame, entries })
    }

    pub fn frame(&self) -> &Arc<KDFrame> {
        &self.frame
    }

    pub fn entries(&self) -> &CVector {
        &self.entries
    }

    pub fn entry(&self, i: usize, i_prime: usize) -> Complex64 {
        self.entries[self.frame.flat(i, i_prime)]
    }

    /// E = sum xi(i,i') F_{i,i'}.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.frame.dim();
        let mut out = CMatrix::zeros(d, d);
        for (k, f) in self.frame.frame_ops().iter().enumerate() {
            out += f.map(|z| z * self.entries[k]);
        }
        out
    }
}

impl KDChannelMatrix {
    pub fn from_entries(
        frame_in: Arc<KDFrame>,
        frame_out: Arc<KDFrame>,
        entries: CMatrix,
        trace_class: TraceClass,
    ) -> Result<Self> {
        if entries.nrows() != frame_out.n_ops() || entries.ncols() != frame_in.n_ops() {
            return Err(KdError::DimensionMismatch {
                expected: frame_out.n_ops(),
                got: entries.nrows(),
            });
        }
        Ok(KDChannelMatrix {
            frame_in,
            frame_out,
            entries,
            trace_class,
        })
    }

    pub fn frame_in(&self) -> &Arc<KDFrame> {
        &self.frame_in
    }

    pub fn frame_out(&self) -> &Arc<KDFrame> {
        &self.frame_out
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace_class(&self) -> TraceClass {
        self.trace_class
    }

    /// Largest |column sum - 1|; at rounding level for trace-preserving
    /// channels.
    pub fn max_column_sum_deviation(&self) -> f64 {
        (0..self.entries.ncols())
            .map(|c_| (self.entries.column(c_).sum() - Complex64::ONE).norm())
            .fold(0.0, f64::max)
    }

    /// The reconstructed channel action:
    /// rho -> sum_{jj', ii'} Gamma(jj'|ii') Tr[F_{ii'} rho] D_{jj'}.
    pub fn apply_to(&self, rho: &CMatrix) -> Result<CMatrix> {
        let mu = represent_density_matrix(rho, &self.frame_in)?;
        let pushed = &self.entries * mu.entries;
        let d = self.frame_out.dim();
        let mut out = CMatrix::zeros(d, d);
        for (k, dual) in self.frame_out.dual_ops().iter().enumerate() {
            out += dual.map(|z| z * pushed[k]);
        }
        Ok(out)
    }
}

/// xi^T Gamma_n ... Gamma_1 mu, the outcome probability (or quasi-value)
/// of a state pushed through a channel chain and measured by one effect.
/// Channels apply in list order: `gammas[0]` first.
pub fn predict(
    xi: &KDEffectVector,
    gammas: &[&KDChannelMatrix],
    mu: &KDStateVector,
) -> Result<Complex64> {
    let mut current = mu.frame().clone();
    for g in gammas {
        if !frames_match(&current, g.frame_in()) {
            return Err(KdError::FrameMismatch);
        }
        current = g.frame_out().clone();
    }
    if !frames_match(&current, xi.frame()) {
        return Err(KdError::FrameMismatch);
    }
    let mut v = mu.entries.clone();
    for g in gammas {
        v = &g.entries * v;
    }
    Ok((xi.entries.transpose() * v)[(0, 0)])
}

/// <post|E|pre> / <post|pre>, the conditioned mean of E between pre- and
/// post-selection. Coincides entrywise with `represent_effect` when pre and
/// post run over the two frame bases.
pub fn weak_value(
    e: &CMatrix,
    pre: &CVector,
    post: &CVector,
    cfg: &Config,
) -> Result<Complex64> {
    if e.nrows() != pre.len() || e.ncols() != pre.len() || post.len() != pre.len() {
        return Err(KdError::DimensionMismatch {
            expected: pre.len(),
            got: e.nrows().max(post.len()),
        });
    }
    let overlap = post.dotc(pre);
    if overlap.norm() < cfg.overlap_floor {
        return Err(KdError::OrthogonalPrePost {
            overlap: overlap.norm(),
            floor: cfg.overlap_floor,
        });
    }
    Ok(post.dotc(&(e * pre)) / overlap)
}

/// A quasiprobability value in polar form: magnitude |Delta|, phase phi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDPoint {
    pub magnitude: f64,
    pub phase: f64,
}

impl KDPoint {
    pub fn from_entry(z: Complex64) -> Self {
        KDPoint {
            magnitude: z.norm(),
            phase: z.arg(),
        }
    }
}

/// Margin of the admissible region for single quasiprobability values:
///
/// ```text
/// 1 - 3 |Delta|^(2/3) + 2 |Delta| cos(phi)
/// ```
///
/// Nonnegative for every entry produced by a valid state in any admissible
/// frame. Zero exactly at the extremal points (1/8, pi) — the most negative
/// real value, -1/8 — and (2^{-3/2}, pi/4) — the largest imaginary part, 1/4.
pub fn region_check(point: &KDPoint) -> f64 {
    let m = point.magnitude;
    1.0 - 3.0 * m.powf(2.0 / 3.0) + 2.0 * m * point.phase.cos()
}
