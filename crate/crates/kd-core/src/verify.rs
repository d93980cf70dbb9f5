//! Numerical verification of the structural identities of KD representations
//! and nonnegativity certification of process fragments.
//!
//! The identities checked here are theorems, not heuristics: representation
//! commutes with sequential composition (matrix product), parallel
//! composition (Kronecker product up to the pair-index interleaving), maps
//! identity to identity and swap to the pair-swap permutation, and normalizes
//! states, POVMs and trace-preserving channels. The checks exist to catch
//! implementation drift, so every one reports its worst observed deviation.
//!
//! Certification answers a different question: given one concrete frame, is
//! the representation of an entire fragment real and nonnegative? A verdict
//! of NEGATIVE speaks only for the frames actually tried - it is never a
//! statement that no nonnegative representation exists.

use std::sync::Arc;

use num_complex::Complex64;

use crate::config::Config;
use crate::error::{KdError, Result};
use crate::frame::KDFrame;
use crate::qops::sample;
use crate::qops::{
    self, CMatrix, DensityOperator, Instrument, KrausChannel, Povm, TraceClass,
};
use crate::repr::{represent_channel, represent_effect, represent_state};

/// A finite experimental scenario: states, measurements, channels and
/// instruments over a list of elementary systems (composite = row-major
/// tensor order of `dims`).
#[derive(Debug, Clone)]
pub struct Fragment {
    dims: Vec<usize>,
    states: Vec<DensityOperator>,
    povms: Vec<Povm>,
    channels: Vec<KrausChannel>,
    instruments: Vec<Instrument>,
}

impl Fragment {
    pub fn new(
        dims: Vec<usize>,
        states: Vec<DensityOperator>,
        povms: Vec<Povm>,
        channels: Vec<KrausChannel>,
        instruments: Vec<Instrument>,
        cfg: &Config,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(KdError::Empty {
                what: "system dimension list",
            });
        }
        let total: usize = dims.iter().product();
        cfg.check_dim(total)?;
        for d in &dims {
            cfg.check_dim(*d)?;
        }
        for s in &states {
            if s.dim() != total {
                return Err(KdError::DimensionMismatch {
                    expected: total,
                    got: s.dim(),
                });
            }
        }
        for p in &povms {
            if p.dim() != total {
                return Err(KdError::DimensionMismatch {
                    expected: total,
                    got: p.dim(),
                });
            }
        }
        for ch in &channels {
            if ch.dim_in() != total || ch.dim_out() != total {
                return Err(KdError::DimensionMismatch {
                    expected: total,
                    got: ch.dim_in().max(ch.dim_out()),
                });
            }
        }
        for ins in &instruments {
            for b in ins.branches() {
                if b.dim_in() != total || b.dim_out() != total {
                    return Err(KdError::DimensionMismatch {
                        expected: total,
                        got: b.dim_in().max(b.dim_out()),
                    });
                }
            }
        }
        Ok(Fragment {
            dims,
            states,
            povms,
            channels,
            instruments,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn channels(&self) -> &[KrausChannel] {
        &self.channels
    }

    pub fn instruments(&self) -> &[Instrument] {
        &self.instruments
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
            && self.povms.is_empty()
            && self.channels.is_empty()
            && self.instruments.is_empty()
    }
}

/// One frame per elementary system, tensored into the composite frame.
pub fn composite_frame(frames: &[Arc<KDFrame>], cfg: &Config) -> Result<Arc<KDFrame>> {
    let first = frames.first().ok_or(KdError::Empty {
        what: "frame list",
    })?;
    if frames.len() == 1 {
        return Ok(first.clone());
    }
    let mut acc = (**first).clone();
    for f in &frames[1..] {
        acc = acc.tensor(f, cfg)?;
    }
    Ok(Arc::new(acc))
}

fn frames_fit(fragment: &Fragment, frames: &[Arc<KDFrame>]) -> Result<()> {
    if frames.len() != fragment.dims().len() {
        return Err(KdError::DimensionMismatch {
            expected: fragment.dims().len(),
            got: frames.len(),
        });
    }
    for (f, d) in frames.iter().zip(fragment.dims()) {
        if f.dim() != *d {
            return Err(KdError::DimensionMismatch {
                expected: *d,
                got: f.dim(),
            });
        }
    }
    Ok(())
}

/// Result of one named numerical check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Worst observed deviation, always >= 0; `passed` iff <= `tol`.
    pub max_deviation: f64,
    pub tol: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, max_deviation: f64, tol: f64, detail: String) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: max_deviation <= tol,
            max_deviation,
            tol,
            detail,
        }
    }
}

/// The identity channel must represent as the identity matrix when the two
/// frames agree; with deliberately different frames the deviation is the
/// (nonzero) frame mismatch, reported rather than treated as an error.
pub fn verify_identity_channel_between(
    frame_in: &Arc<KDFrame>,
    frame_out: &Arc<KDFrame>,
    tol: f64,
) -> Result<CheckOutcome> {
    let ch = KrausChannel::identity_channel(frame_in.dim());
    let g = represent_channel(&ch, frame_in, frame_out)?;
    let dev = qops::max_abs(&(g.matrix() - qops::identity(frame_in.n_ops())));
    Ok(CheckOutcome::new(
        "identity channel represents as identity matrix",
        dev,
        tol,
        format!("dim {}", frame_in.dim()),
    ))
}

pub fn verify_identity_channel(frame: &Arc<KDFrame>, tol: f64) -> Result<CheckOutcome> {
    verify_identity_channel_between(frame, frame, tol)
}

/// Sequential functoriality: Gamma(ch2 . ch1) = Gamma(ch2) Gamma(ch1),
/// with the middle frame free.
pub fn verify_sequential(
    ch1: &KrausChannel,
    ch2: &KrausChannel,
    frame_in: &Arc<KDFrame>,
    frame_mid: &Arc<KDFrame>,
    frame_out: &Arc<KDFrame>,
    tol: f64,
) -> Result<CheckOutcome> {
    let g1 = represent_channel(ch1, frame_in, frame_mid)?;
    let g2 = represent_channel(ch2, frame_mid, frame_out)?;
    let composed = ch2.compose(ch1)?;
    let g21 = represent_channel(&composed, frame_in, frame_out)?;
    let dev = qops::max_abs(&(g21.matrix() - g2.matrix() * g1.matrix()));
    Ok(CheckOutcome::new(
        "sequential composition maps to matrix product",
        dev,
        tol,
        format!("dims {} -> {} -> {}", ch1.dim_in(), ch1.dim_out(), ch2.dim_out()),
    ))
}

/// Pair-index interleaving between a composite frame's flat index and the
/// Kronecker-product index of the factor representations. For the composite
/// pair k = (I, I') with I = i*d_b + j, the Kronecker side flattens the A
/// and B pairs separately: perm[k] = flatA(i,i') * d_b^2 + flatB(j,j').
fn pair_interleave(d_a: usize, d_b: usize) -> Vec<usize> {
    let big = d_a * d_b;
    let mut perm = Vec::with_capacity(big * big);
    for k in 0..big * big {
        let i_comp = k / big;
        let ip_comp = k % big;
        let (i, j) = (i_comp / d_b, i_comp % d_b);
        let (ip, jp) = (ip_comp / d_b, ip_comp % d_b);
        perm.push((i * d_a + ip) * (d_b * d_b) + (j * d_b + jp));
    }
    perm
}

/// Parallel functoriality: Gamma(ch_a (x) ch_b) on the tensor frames equals
/// the Kronecker product of the factor Gammas, up to the index interleaving.
pub fn verify_parallel(
    ch_a: &KrausChannel,
    ch_b: &KrausChannel,
    fa_in: &Arc<KDFrame>,
    fb_in: &Arc<KDFrame>,
    fa_out: &Arc<KDFrame>,
    fb_out: &Arc<KDFrame>,
    cfg: &Config,
    tol: f64,
) -> Result<CheckOutcome> {
    let f_in = Arc::new(fa_in.tensor(fb_in, cfg)?);
    let f_out = Arc::new(fa_out.tensor(fb_out, cfg)?);
    let g_comp = represent_channel(&ch_a.tensor(ch_b), &f_in, &f_out)?;
    let g_a = represent_channel(ch_a, fa_in, fa_out)?;
    let g_b = represent_channel(ch_b, fb_in, fb_out)?;
    let kron = g_a.matrix().kronecker(g_b.matrix());
    let perm_out = pair_interleave(fa_out.dim(), fb_out.dim());
    let perm_in = pair_interleave(fa_in.dim(), fb_in.dim());
    let mut dev = 0.0f64;
    for r in 0..g_comp.matrix().nrows() {
        for c_ in 0..g_comp.matrix().ncols() {
            let diff = g_comp.matrix()[(r, c_)] - kron[(perm_out[r], perm_in[c_])];
            dev = dev.max(diff.norm());
        }
    }
    Ok(CheckOutcome::new(
        "parallel composition maps to interleaved Kronecker product",
        dev,
        tol,
        format!("dims {} x {}", fa_in.dim(), fb_in.dim()),
    ))
}

/// The swap channel must represent as the permutation exchanging the A and B
/// pair indices between the tensor frames fa (x) fb and fb (x) fa.
pub fn verify_swap(
    fa: &Arc<KDFrame>,
    fb: &Arc<KDFrame>,
    cfg: &Config,
    tol: f64,
) -> Result<CheckOutcome> {
    let d_a = fa.dim();
    let d_b = fb.dim();
    let f_in = Arc::new(fa.tensor(fb, cfg)?);
    let f_out = Arc::new(fb.tensor(fa, cfg)?);
    let swap = KrausChannel::unitary(qops::swap_matrix(d_a, d_b), cfg)?;
    let g = represent_channel(&swap, &f_in, &f_out)?;
    let big = d_a * d_b;
    let mut expected = CMatrix::zeros(big * big, big * big);
    for k_in in 0..big * big {
        let i_comp = k_in / big;
        let ip_comp = k_in % big;
        let (i, j) = (i_comp / d_b, i_comp % d_b);
        let (ip, jp) = (ip_comp / d_b, ip_comp % d_b);
        let k_out = (j * d_a + i) * big + (jp * d_a + ip);
        expected[(k_out, k_in)] = Complex64::ONE;
    }
    let dev = qops::max_abs(&(g.matrix() - expected));
    Ok(CheckOutcome::new(
        "swap channel represents as the pair-swap permutation",
        dev,
        tol,
        format!("dims {} x {}", d_a, d_b),
    ))
}

/// Normalization identities: state entries sum to one, the effect vectors of
/// a POVM sum to the all-ones vector, and columns of trace-preserving
/// channel matrices (and of instrument branch sums) each sum to one.
pub fn verify_normalization(
    fragment: &Fragment,
    frames: &[Arc<KDFrame>],
    cfg: &Config,
    tol: f64,
) -> Result<Vec<CheckOutcome>> {
    frames_fit(fragment, frames)?;
    let frame = composite_frame(frames, cfg)?;
    let mut out = Vec::new();

    let mut dev_states = 0.0f64;
    for s in fragment.states() {
        let mu = represent_state(s, &frame)?;
        dev_states = dev_states.max((mu.sum() - Complex64::ONE).norm());
    }
    out.push(CheckOutcome::new(
        "state quasiprobabilities sum to one",
        dev_states,
        tol,
        format!("{} states", fragment.states().len()),
    ));

    let mut dev_povms = 0.0f64;
    for p in fragment.povms() {
        let mut acc = nalgebra::DVector::from_element(frame.n_ops(), Complex64::ZERO);
        for e in p.effects() {
            acc += represent_effect(e, &frame)?.entries();
        }
        for k in 0..frame.n_ops() {
            dev_povms = dev_povms.max((acc[k] - Complex64::ONE).norm());
        }
    }
    out.push(CheckOutcome::new(
        "POVM effect vectors sum to all-ones",
        dev_povms,
        tol,
        format!("{} POVMs", fragment.povms().len()),
    ));

    let mut dev_channels = 0.0f64;
    for ch in fragment.channels() {
        if ch.trace_class() == TraceClass::Preserving {
            let g = represent_channel(ch, &frame, &frame)?;
            dev_channels = dev_channels.max(g.max_column_sum_deviation());
        }
    }
    out.push(CheckOutcome::new(
        "trace-preserving channel columns sum to one",
        dev_channels,
        tol,
        format!("{} channels", fragment.channels().len()),
    ));

    let mut dev_instruments = 0.0f64;
    for ins in fragment.instruments() {
        let mut acc = CMatrix::zeros(frame.n_ops(), frame.n_ops());
        for b in ins.branches() {
            acc += represent_channel(b, &frame, &frame)?.matrix();
        }
        for c_ in 0..acc.ncols() {
            dev_instruments =
                dev_instruments.max((acc.column(c_).sum() - Complex64::ONE).norm());
        }
    }
    out.push(CheckOutcome::new(
        "instrument branch sums are column-normalized",
        dev_instruments,
        tol,
        format!("{} instruments", fragment.instruments().len()),
    ));

    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Nonnegative,
    Negative,
}

/// The single entry that pushes hardest against nonnegativity.
#[derive(Debug, Clone)]
pub struct Offender {
    pub object: String,
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

/// Margins of the probability/substochasticity consequences, evaluated only
/// under a NONNEGATIVE verdict (they are theorems there, so a failure is an
/// internal error, not a report line).
#[derive(Debug, Clone)]
pub struct SubstochasticityCheck {
    pub performed: bool,
    pub passed: bool,
    /// Smallest real part over all channel-matrix entries.
    pub min_entry: f64,
    /// Largest (column sum - 1) over all channel matrices; trace-preserving
    /// columns sit at ~0, trace-nonincreasing branches below.
    pub max_column_excess: f64,
}

#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub max_abs_imag: f64,
    pub min_real_entry: f64,
    pub worst_offender: Option<Offender>,
    pub substochasticity: SubstochasticityCheck,
    pub n_objects: usize,
    pub n_entries: usize,
}

/// Per-object and total negativity (sum of negative real mass) and
/// imaginarity (sum of |Im|).
#[derive(Debug, Clone)]
pub struct NegativityReport {
    pub total_negativity: f64,
    pub total_imaginarity: f64,
    pub per_object: Vec<(String, f64, f64)>,
}

/// Everything a fragment represents to, flattened with stable ids.
pub(crate) enum Represented {
    Vector(nalgebra::DVector<Complex64>),
    Matrix(CMatrix, TraceClass),
}

pub(crate) fn represent_fragment(
    fragment: &Fragment,
    frame: &Arc<KDFrame>,
) -> Result<Vec<(String, Represented)>> {
    let mut out = Vec::new();
    for (n, s) in fragment.states().iter().enumerate() {
        let mu = represent_state(s, frame)?;
        out.push((format!("state{n}"), Represented::Vector(mu.entries().clone())));
    }
    for (n, p) in fragment.povms().iter().enumerate() {
        for (m, e) in p.effects().iter().enumerate() {
            let xi = represent_effect(e, frame)?;
            out.push((
                format!("measurement{n}.effect{m}"),
                Represented::Vector(xi.entries().clone()),
            ));
        }
    }
    for (n, ch) in fragment.channels().iter().enumerate() {
        let g = represent_channel(ch, frame, frame)?;
        out.push((
            format!("channel{n}"),
            Represented::Matrix(g.matrix().clone(), ch.trace_class()),
        ));
    }
    for (n, ins) in fragment.instruments().iter().enumerate() {
        for (m, b) in ins.branches().iter().enumerate() {
            let g = represent_channel(b, frame, frame)?;
            out.push((
                format!("instrument{n}.branch{m}"),
                Represented::Matrix(g.matrix().clone(), TraceClass::Nonincreasing),
            ));
        }
    }
    Ok(out)
}

/// Represent every member of the fragment in the given frames and decide
/// whether the whole representation is real and nonnegative within
/// `cfg.nonneg_tol`.
pub fn certify(
    fragment: &Fragment,
    frames: &[Arc<KDFrame>],
    cfg: &Config,
) -> Result<CertificationReport> {
    frames_fit(fragment, frames)?;
    let frame = composite_frame(frames, cfg)?;
    let represented = represent_fragment(fragment, &frame)?;
    certify_represented(fragment, &represented, cfg)
}

pub(crate) fn certify_represented(
    fragment: &Fragment,
    represented: &[(String, Represented)],
    cfg: &Config,
) -> Result<CertificationReport> {
    let tol = cfg.nonneg_tol;
    let mut max_abs_imag = 0.0f64;
    let mut min_real_entry = f64::INFINITY;
    let mut worst: Option<Offender> = None;
    let mut worst_score = f64::NEG_INFINITY;
    let mut n_entries = 0usize;

    let mut visit = |object: &str, row: usize, col: usize, z: Complex64| {
        n_entries += 1;
        max_abs_imag = max_abs_imag.max(z.im.abs());
        min_real_entry = min_real_entry.min(z.re);
        let score = z.im.abs().max(-z.re);
        if score > worst_score {
            worst_score = score;
            worst = Some(Offender {
                object: object.to_string(),
                row,
                col,
                value: z,
            });
        }
    };

    for (id, rep) in represented {
        match rep {
            Represented::Vector(v) => {
                for (k, z) in v.iter().enumerate() {
                    visit(id, k, 0, *z);
                }
            }
            Represented::Matrix(m, _) => {
                for r in 0..m.nrows() {
                    for c_ in 0..m.ncols() {
                        visit(id, r, c_, m[(r, c_)]);
                    }
                }
            }
        }
    }

    if n_entries == 0 {
        min_real_entry = 0.0;
    }
    let verdict = if max_abs_imag <= tol && min_real_entry >= -tol {
        Verdict::Nonnegative
    } else {
        Verdict::Negative
    };

    let substochasticity = if verdict == Verdict::Nonnegative {
        let check = consequence_margins(fragment, represented, tol)?;
        if !check.passed {
            return Err(KdError::Internal {
                msg: format!(
                    "nonnegative representation failed a probability/substochasticity \
                     consequence (min entry {:.3e}, max column excess {:.3e})",
                    check.min_entry, check.max_column_excess
                ),
            });
        }
        check
    } else {
        SubstochasticityCheck {
            performed: false,
            passed: false,
            min_entry: f64::NAN,
            max_column_excess: f64::NAN,
        }
    };

    Ok(CertificationReport {
        verdict,
        max_abs_imag,
        min_real_entry,
        worst_offender: worst,
        substochasticity,
        n_objects: represented.len(),
        n_entries,
    })
}

/// Under a nonnegative verdict: states must be probability vectors, effect
/// entries must lie in [0, 1], channel matrices must be column-(sub)stochastic.
fn consequence_margins(
    fragment: &Fragment,
    represented: &[(String, Represented)],
    tol: f64,
) -> Result<SubstochasticityCheck> {
    let mut passed = true;
    let mut min_entry = f64::INFINITY;
    let mut max_column_excess = f64::NEG_INFINITY;
    let n_states = fragment.states().len();
    // normalization holds to machine precision independently of the verdict
    // tolerance; the effect upper bound inherits up to (d^2 - 1) entry slacks
    let sum_tol = (10.0 * tol).max(1e-9);

    for (idx, (_, rep)) in represented.iter().enumerate() {
        match rep {
            Represented::Vector(v) => {
                let is_state = idx < n_states;
                let sum: Complex64 = v.sum();
                if is_state && (sum - Complex64::ONE).norm() > sum_tol {
                    passed = false;
                }
                for z in v.iter() {
                    if z.re < -tol {
                        passed = false;
                    }
                    // effect entries additionally bounded above by one
                    if !is_state && z.re > 1.0 + sum_tol + v.len() as f64 * tol {
                        passed = false;
                    }
                }
            }
            Represented::Matrix(m, tc) => {
                for c_ in 0..m.ncols() {
                    let col_sum = m.column(c_).sum().re;
                    max_column_excess = max_column_excess.max(col_sum - 1.0);
                    match tc {
                        TraceClass::Preserving => {
                            if (col_sum - 1.0).abs() > sum_tol {
                                passed = false;
                            }
                        }
                        TraceClass::Nonincreasing => {
                            if col_sum > 1.0 + sum_tol {
                                passed = false;
                            }
                        }
                    }
                }
                for z in m.iter() {
                    min_entry = min_entry.min(z.re);
                    if z.re < -tol {
                        passed = false;
                    }
                }
            }
        }
    }
    if min_entry == f64::INFINITY {
        min_entry = 0.0;
    }
    if max_column_excess == f64::NEG_INFINITY {
        max_column_excess = 0.0;
    }
    Ok(SubstochasticityCheck {
        performed: true,
        passed,
        min_entry,
        max_column_excess,
    })
}

pub fn negativity_measures(
    fragment: &Fragment,
    frames: &[Arc<KDFrame>],
    cfg: &Config,
) -> Result<NegativityReport> {
    frames_fit(fragment, frames)?;
    let frame = composite_frame(frames, cfg)?;
    let represented = represent_fragment(fragment, &frame)?;
    Ok(negativity_of_represented(&represented))
}

pub(crate) fn negativity_of_represented(
    represented: &[(String, Represented)],
) -> NegativityReport {
    let mut per_object = Vec::with_capacity(represented.len());
    let mut total_negativity = 0.0;
    let mut total_imaginarity = 0.0;
    for (id, rep) in represented {
        let (mut neg, mut imag) = (0.0f64, 0.0f64);
        let mut add = |z: &Complex64| {
            neg += (-z.re).max(0.0);
            imag += z.im.abs();
        };
        match rep {
            Represented::Vector(v) => v.iter().for_each(&mut add),
            Represented::Matrix(m, _) => m.iter().for_each(&mut add),
        }
        total_negativity += neg;
        total_imaginarity += imag;
        per_object.push((id.clone(), neg, imag));
    }
    NegativityReport {
        total_negativity,
        total_imaginarity,
        per_object,
    }
}

/// Knobs for the randomized check suites. Results are a pure function of
/// these options: every suite derives its randomness from `seed` through
/// fixed, per-family RNG streams.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Instances per check family and dimension.
    pub trials: usize,
    pub dims: Vec<usize>,
    pub tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 7,
            trials: 50,
            dims: vec![2, 3],
            tol: 1e-9,
        }
    }
}

fn suite_guard(opts: &SuiteOptions, cfg: &Config) -> Result<()> {
    if opts.dims.is_empty() {
        return Err(KdError::Empty {
            what: "suite dimension list",
        });
    }
    if opts.trials == 0 {
        return Err(KdError::InvalidConfig {
            msg: "suite needs at least one trial".into(),
        });
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(KdError::InvalidConfig {
            msg: "suite tolerance must be positive and finite".into(),
        });
    }
    for d in &opts.dims {
        cfg.check_dim(*d)?;
    }
    Ok(())
}

fn haar_frame<R: rand::Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
    cfg: &Config,
) -> Result<Arc<KDFrame>> {
    Ok(Arc::new(KDFrame::haar_random(dim, rng, cfg)?))
}

/// Randomized functoriality checks: identity, sequential pairs, parallel
/// pairs on the smallest dimension, and swap for every ordered dimension
/// pair. One aggregated outcome per family.
pub fn functoriality_suite(opts: &SuiteOptions, cfg: &Config) -> Result<Vec<CheckOutcome>> {
    suite_guard(opts, cfg)?;
    let sample_channel = |dim: usize, rng: &mut sample::SeededRng| -> Result<KrausChannel> {
        KrausChannel::new(
            sample::random_channel(dim, dim, 2, rng),
            TraceClass::Preserving,
            cfg,
        )
    };
    let mut out = Vec::new();

    let mut dev = 0.0f64;
    for (n, &dim) in opts.dims.iter().enumerate() {
        let mut rng = sample::rng_stream(opts.seed, n as u64);
        let f = haar_frame(dim, &mut rng, cfg)?;
        dev = dev.max(verify_identity_channel(&f, opts.tol)?.max_deviation);
    }
    out.push(CheckOutcome::new(
        "identity channel represents as identity matrix",
        dev,
        opts.tol,
        format!("dims {:?}", opts.dims),
    ));

    let mut dev = 0.0f64;
    let mut pairs = 0usize;
    for (n, &dim) in opts.dims.iter().enumerate() {
        let mut rng = sample::rng_stream(opts.seed, 100 + n as u64);
        for _ in 0..opts.trials {
            let f_in = haar_frame(dim, &mut rng, cfg)?;
            let f_mid = haar_frame(dim, &mut rng, cfg)?;
            let f_out = haar_frame(dim, &mut rng, cfg)?;
            let ch1 = sample_channel(dim, &mut rng)?;
            let ch2 = sample_channel(dim, &mut rng)?;
            let check = verify_sequential(&ch1, &ch2, &f_in, &f_mid, &f_out, opts.tol)?;
            dev = dev.max(check.max_deviation);
            pairs += 1;
        }
    }
    out.push(CheckOutcome::new(
        "sequential composition maps to matrix product",
        dev,
        opts.tol,
        format!("{pairs} pairs across dims {:?}", opts.dims),
    ));

    let d_par = *opts.dims.iter().min().expect("dims nonempty");
    let mut rng = sample::rng_stream(opts.seed, 200);
    let mut dev = 0.0f64;
    for _ in 0..opts.trials {
        let fa_in = haar_frame(d_par, &mut rng, cfg)?;
        let fb_in = haar_frame(d_par, &mut rng, cfg)?;
        let fa_out = haar_frame(d_par, &mut rng, cfg)?;
        let fb_out = haar_frame(d_par, &mut rng, cfg)?;
        let ch_a = sample_channel(d_par, &mut rng)?;
        let ch_b = sample_channel(d_par, &mut rng)?;
        let check = verify_parallel(
            &ch_a, &ch_b, &fa_in, &fb_in, &fa_out, &fb_out, cfg, opts.tol,
        )?;
        dev = dev.max(check.max_deviation);
    }
    out.push(CheckOutcome::new(
        "parallel composition maps to interleaved Kronecker product",
        dev,
        opts.tol,
        format!("{} pairs at dim {d_par} x {d_par}", opts.trials),
    ));

    let mut dev = 0.0f64;
    let mut count = 0usize;
    let mut rng = sample::rng_stream(opts.seed, 300);
    for &da in &opts.dims {
        for &db in &opts.dims {
            let fa = haar_frame(da, &mut rng, cfg)?;
            let fb = haar_frame(db, &mut rng, cfg)?;
            dev = dev.max(verify_swap(&fa, &fb, cfg, opts.tol)?.max_deviation);
            count += 1;
        }
    }
    out.push(CheckOutcome::new(
        "swap channel represents as the pair-swap permutation",
        dev,
        opts.tol,
        format!("{count} dimension pairs from {:?}", opts.dims),
    ));

    Ok(out)
}

/// Randomized normalization checks over Haar frames and random objects.
pub fn normalization_suite(opts: &SuiteOptions, cfg: &Config) -> Result<Vec<CheckOutcome>> {
    suite_guard(opts, cfg)?;
    let mut dev_states = 0.0f64;
    let mut dev_povms = 0.0f64;
    let mut dev_channels = 0.0f64;
    let mut dev_instruments = 0.0f64;

    for (n, &dim) in opts.dims.iter().enumerate() {
        let mut rng = sample::rng_stream(opts.seed, 400 + n as u64);
        for _ in 0..opts.trials {
            let frame = haar_frame(dim, &mut rng, cfg)?;

            let rho = DensityOperator::new(sample::random_density(dim, &mut rng), cfg)?;
            let mu = represent_state(&rho, &frame)?;
            dev_states = dev_states.max((mu.sum() - Complex64::ONE).norm());

            let povm = Povm::new(sample::random_povm(dim, dim + 1, &mut rng), cfg)?;
            let mut acc = nalgebra::DVector::from_element(frame.n_ops(), Complex64::ZERO);
            for e in povm.effects() {
                acc += represent_effect(e, &frame)?.entries();
            }
            for k in 0..frame.n_ops() {
                dev_povms = dev_povms.max((acc[k] - Complex64::ONE).norm());
            }

            let ch = KrausChannel::new(
                sample::random_channel(dim, dim, 2, &mut rng),
                TraceClass::Preserving,
                cfg,
            )?;
            let g = represent_channel(&ch, &frame, &frame)?;
            dev_channels = dev_channels.max(g.max_column_sum_deviation());

            let branches: Vec<KrausChannel> = sample::random_instrument_kraus(dim, 2, &mut rng)
                .into_iter()
                .map(|ks| KrausChannel::new(ks, TraceClass::Nonincreasing, cfg))
                .collect::<Result<_>>()?;
            let ins = Instrument::new(branches, cfg)?;
            let mut total = CMatrix::zeros(frame.n_ops(), frame.n_ops());
            for b in ins.branches() {
                total += represent_channel(b, &frame, &frame)?.matrix();
            }
            for c_ in 0..total.ncols() {
                dev_instruments =
                    dev_instruments.max((total.column(c_).sum() - Complex64::ONE).norm());
            }
        }
    }

    let detail = format!("{} trials per dim, dims {:?}", opts.trials, opts.dims);
    Ok(vec![
        CheckOutcome::new(
            "state quasiprobabilities sum to one",
            dev_states,
            opts.tol,
            detail.clone(),
        ),
        CheckOutcome::new(
            "POVM effect vectors sum to all-ones",
            dev_povms,
            opts.tol,
            detail.clone(),
        ),
        CheckOutcome::new(
            "trace-preserving channel columns sum to one",
            dev_channels,
            opts.tol,
            detail.clone(),
        ),
        CheckOutcome::new(
            "instrument branch sums are column-normalized",
            dev_instruments,
            opts.tol,
            detail,
        ),
    ])
}

/// Randomized admissible-region checks on pure-state representations, plus
/// the exact boundary points of the region curve.
pub fn region_suite(opts: &SuiteOptions, cfg: &Config) -> Result<Vec<CheckOutcome>> {
    suite_guard(opts, cfg)?;
    let mut worst_margin = f64::INFINITY;
    let mut max_modulus = 0.0f64;
    let mut count = 0usize;
    for (n, &dim) in opts.dims.iter().enumerate() {
        let mut rng = sample::rng_stream(opts.seed, 500 + n as u64);
        for _ in 0..opts.trials {
            let frame = haar_frame(dim, &mut rng, cfg)?;
            let psi = sample::random_pure(dim, &mut rng);
            let rho = DensityOperator::pure(&psi, cfg)?;
            let mu = represent_state(&rho, &frame)?;
            worst_margin = worst_margin.min(mu.min_region_margin());
            max_modulus = max_modulus.max(mu.max_abs_entry());
            count += 1;
        }
    }

    let boundary_dev = {
        use crate::repr::{region_check, KDPoint};
        let real_extreme = region_check(&KDPoint {
            magnitude: 0.125,
            phase: std::f64::consts::PI,
        });
        let imag_extreme = region_check(&KDPoint {
            magnitude: 2f64.powf(-1.5),
            phase: std::f64::consts::FRAC_PI_4,
        });
        real_extreme.abs().max(imag_extreme.abs())
    };

    Ok(vec![
        CheckOutcome::new(
            "pure-state KD values stay inside the admissible region",
            (-worst_margin).max(0.0),
            opts.tol,
            format!("{count} (frame, state) pairs, worst margin {worst_margin:.3e}"),
        ),
        CheckOutcome::new(
            "KD value modulus never exceeds one",
            (max_modulus - 1.0).max(0.0),
            1e-12,
            format!("{count} (frame, state) pairs, max modulus {max_modulus:.15}"),
        ),
        CheckOutcome::new(
            "region boundary points sit exactly on the curve",
            boundary_dev,
            1e-12,
            "extremal real and imaginary points".into(),
        ),
    ])
}
