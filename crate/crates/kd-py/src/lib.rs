//! Python bindings: frames, representation/reconstruction, weak values,
//! fragment certification, and the extremal search. Matrices cross the
//! boundary as nested lists of complex numbers, row-major.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use kd_core::config::Config;
use kd_core::error::KdError;
use kd_core::frame::KDFrame;
use kd_core::qops::{
    CMatrix, CVector, DensityOperator, Instrument, KrausChannel, Povm, TraceClass,
};
use kd_core::repr::{
    self, KDChannelMatrix, KDEffectVector, KDPoint, KDStateVector,
};
use kd_core::search::{ExtremalMode, SearchConfig};
use kd_core::verify::{self, Fragment, Verdict};

type PyMat = Vec<Vec<Complex64>>;
type PyVec = Vec<Complex64>;

fn err(e: KdError) -> PyErr {
    match e {
        KdError::Internal { .. } | KdError::EigenFailure => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn mat_in(m: &PyMat, what: &str) -> PyResult<CMatrix> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err(format!(
            "{what}: expected a rectangular, non-empty nested list"
        )));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| m[i][j]))
}

fn mat_out(m: &CMatrix) -> PyMat {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn vec_in(v: &PyVec) -> CVector {
    DVector::from_iterator(v.len(), v.iter().copied())
}

fn vec_out(v: &CVector) -> PyVec {
    v.iter().copied().collect()
}

/// Flat pair-indexed entries -> nested [i][i'] table of side `dim`.
fn pairs_out(entries: &CVector, dim: usize) -> PyMat {
    (0..dim)
        .map(|i| (0..dim).map(|ip| entries[i * dim + ip]).collect())
        .collect()
}

fn pairs_in(table: &PyMat, dim: usize, what: &str) -> PyResult<CVector> {
    if table.len() != dim || table.iter().any(|r| r.len() != dim) {
        return Err(PyValueError::new_err(format!(
            "{what}: expected a {dim}x{dim} nested list"
        )));
    }
    Ok(DVector::from_iterator(
        dim * dim,
        table.iter().flatten().copied(),
    ))
}

fn channel_in(kraus: &[PyMat], trace_preserving: bool, cfg: &Config) -> PyResult<KrausChannel> {
    let ops = kraus
        .iter()
        .enumerate()
        .map(|(k, m)| mat_in(m, &format!("kraus operator {k}")))
        .collect::<PyResult<Vec<_>>>()?;
    let tc = if trace_preserving {
        TraceClass::Preserving
    } else {
        TraceClass::Nonincreasing
    };
    KrausChannel::new(ops, tc, cfg).map_err(err)
}

/// A two-basis frame over one system, shared by every value derived from it.
#[pyclass(frozen)]
struct Frame {
    inner: Arc<KDFrame>,
}

#[pymethods]
impl Frame {
    /// Frame from two orthonormal bases given as lists of vectors.
    #[new]
    fn new(basis_a: Vec<PyVec>, basis_a_prime: Vec<PyVec>) -> PyResult<Self> {
        let cfg = Config::default();
        let a: Vec<CVector> = basis_a.iter().map(vec_in).collect();
        let ap: Vec<CVector> = basis_a_prime.iter().map(vec_in).collect();
        Ok(Frame {
            inner: Arc::new(KDFrame::from_bases(a, ap, &cfg).map_err(err)?),
        })
    }

    /// Haar-random admissible frame, reproducible from the seed.
    #[staticmethod]
    fn haar(dim: usize, seed: u64) -> PyResult<Self> {
        let cfg = Config::default();
        let mut rng = kd_core::qops::sample::rng_from_seed(seed);
        Ok(Frame {
            inner: Arc::new(KDFrame::haar_random(dim, &mut rng, &cfg).map_err(err)?),
        })
    }

    /// Computational/Hadamard qubit frame.
    #[staticmethod]
    fn qubit_zx() -> PyResult<Self> {
        let cfg = Config::default();
        Ok(Frame {
            inner: Arc::new(KDFrame::qubit_zx(&cfg).map_err(err)?),
        })
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn n_ops(&self) -> usize {
        self.inner.n_ops()
    }

    fn overlap(&self, i: usize, i_prime: usize) -> PyResult<Complex64> {
        let d = self.inner.dim();
        if i >= d || i_prime >= d {
            return Err(PyValueError::new_err(format!(
                "pair ({i}, {i_prime}) out of range for dimension {d}"
            )));
        }
        Ok(self.inner.pair().overlap(i, i_prime))
    }

    fn basis_a(&self) -> Vec<PyVec> {
        (0..self.inner.dim())
            .map(|i| vec_out(self.inner.pair().vector_a(i)))
            .collect()
    }

    fn basis_a_prime(&self) -> Vec<PyVec> {
        (0..self.inner.dim())
            .map(|i| vec_out(self.inner.pair().vector_a_prime(i)))
            .collect()
    }

    /// Tensor with another frame (pair indices interleave per system).
    fn tensor(&self, other: &Frame) -> PyResult<Frame> {
        let cfg = Config::default();
        Ok(Frame {
            inner: Arc::new(self.inner.tensor(&other.inner, &cfg).map_err(err)?),
        })
    }

    fn __repr__(&self) -> String {
        format!("Frame(dim={}, n_ops={})", self.inner.dim(), self.inner.n_ops())
    }
}

/// Quasiprobability table mu[i][i'] of a density matrix.
#[pyfunction]
fn represent_state(rho: PyMat, frame: &Frame) -> PyResult<PyMat> {
    let m = mat_in(&rho, "state")?;
    let mu = repr::represent_density_matrix(&m, &frame.inner).map_err(err)?;
    Ok(pairs_out(mu.entries(), frame.inner.dim()))
}

/// Density matrix back from its quasiprobability table.
#[pyfunction]
fn reconstruct_state(mu: PyMat, frame: &Frame) -> PyResult<PyMat> {
    let entries = pairs_in(&mu, frame.inner.dim(), "state table")?;
    let v = KDStateVector::from_entries(frame.inner.clone(), entries).map_err(err)?;
    Ok(mat_out(&v.reconstruct()))
}

/// Weak-value table xi[i][i'] of an effect.
#[pyfunction]
fn represent_effect(effect: PyMat, frame: &Frame) -> PyResult<PyMat> {
    let m = mat_in(&effect, "effect")?;
    let xi = repr::represent_effect(&m, &frame.inner).map_err(err)?;
    Ok(pairs_out(xi.entries(), frame.inner.dim()))
}

#[pyfunction]
fn reconstruct_effect(xi: PyMat, frame: &Frame) -> PyResult<PyMat> {
    let entries = pairs_in(&xi, frame.inner.dim(), "effect table")?;
    let v = KDEffectVector::from_entries(frame.inner.clone(), entries).map_err(err)?;
    Ok(mat_out(&v.reconstruct()))
}

/// Transfer matrix of a Kraus channel on pair indices: rows are output
/// pairs, columns input pairs, both flattened row-major as i*dim + i'.
#[pyfunction]
fn represent_channel(
    kraus: Vec<PyMat>,
    trace_preserving: bool,
    frame: &Frame,
) -> PyResult<PyMat> {
    let cfg = Config::default();
    let ch = channel_in(&kraus, trace_preserving, &cfg)?;
    let g = repr::represent_channel(&ch, &frame.inner, &frame.inner).map_err(err)?;
    Ok(mat_out(g.matrix()))
}

/// Apply a Kraus channel to a matrix in the operator picture.
#[pyfunction]
fn apply_channel(kraus: Vec<PyMat>, trace_preserving: bool, rho: PyMat) -> PyResult<PyMat> {
    let cfg = Config::default();
    let ch = channel_in(&kraus, trace_preserving, &cfg)?;
    let m = mat_in(&rho, "state")?;
    Ok(mat_out(&ch.apply(&m).map_err(err)?))
}

/// Born probability of an effect after a chain of channels, computed
/// entirely from representation tables. Channels act in list order.
#[pyfunction]
fn predict(
    effect: PyMat,
    channels: Vec<(Vec<PyMat>, bool)>,
    rho: PyMat,
    frame: &Frame,
) -> PyResult<Complex64> {
    let cfg = Config::default();
    let mu = repr::represent_density_matrix(&mat_in(&rho, "state")?, &frame.inner).map_err(err)?;
    let xi = repr::represent_effect(&mat_in(&effect, "effect")?, &frame.inner).map_err(err)?;
    let gammas: Vec<KDChannelMatrix> = channels
        .iter()
        .map(|(kraus, tp)| {
            let ch = channel_in(kraus, *tp, &cfg)?;
            repr::represent_channel(&ch, &frame.inner, &frame.inner).map_err(err)
        })
        .collect::<PyResult<_>>()?;
    let refs: Vec<&KDChannelMatrix> = gammas.iter().collect();
    repr::predict(&xi, &refs, &mu).map_err(err)
}

/// <post|E|pre> / <post|pre>.
#[pyfunction]
fn weak_value(effect: PyMat, pre: PyVec, post: PyVec) -> PyResult<Complex64> {
    let cfg = Config::default();
    repr::weak_value(&mat_in(&effect, "effect")?, &vec_in(&pre), &vec_in(&post), &cfg)
        .map_err(err)
}

/// Margin of the pure-state admissibility region at (magnitude, phase);
/// nonnegative inside.
#[pyfunction]
fn region_check(magnitude: f64, phase: f64) -> f64 {
    repr::region_check(&KDPoint { magnitude, phase })
}

/// Certify a fragment of states, POVMs (lists of effects), channels
/// ((kraus list, trace_preserving) pairs) and instruments (lists of branch
/// kraus lists) in the given frame. Returns a dict with the verdict and the
/// negativity/imaginarity measures.
#[pyfunction]
#[pyo3(signature = (frame, states, povms=vec![], channels=vec![], instruments=vec![], tol=None))]
fn certify(
    py: Python<'_>,
    frame: &Frame,
    states: Vec<PyMat>,
    povms: Vec<Vec<PyMat>>,
    channels: Vec<(Vec<PyMat>, bool)>,
    instruments: Vec<Vec<Vec<PyMat>>>,
    tol: Option<f64>,
) -> PyResult<Py<PyDict>> {
    let mut cfg = Config::default();
    if let Some(t) = tol {
        cfg.nonneg_tol = t;
    }
    let states = states
        .iter()
        .map(|m| DensityOperator::new(mat_in(m, "state")?, &cfg).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let povms = povms
        .iter()
        .map(|effects| {
            let effects = effects
                .iter()
                .map(|m| mat_in(m, "effect"))
                .collect::<PyResult<Vec<_>>>()?;
            Povm::new(effects, &cfg).map_err(err)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let channels = channels
        .iter()
        .map(|(kraus, tp)| channel_in(kraus, *tp, &cfg))
        .collect::<PyResult<Vec<_>>>()?;
    let instruments = instruments
        .iter()
        .map(|branches| {
            let branches = branches
                .iter()
                .map(|kraus| channel_in(kraus, false, &cfg))
                .collect::<PyResult<Vec<_>>>()?;
            Instrument::new(branches, &cfg).map_err(err)
        })
        .collect::<PyResult<Vec<_>>>()?;

    let fragment = Fragment::new(
        vec![frame.inner.dim()],
        states,
        povms,
        channels,
        instruments,
        &cfg,
    )
    .map_err(err)?;
    let frames = vec![frame.inner.clone()];
    let cert = verify::certify(&fragment, &frames, &cfg).map_err(err)?;
    let neg = verify::negativity_measures(&fragment, &frames, &cfg).map_err(err)?;

    let out = PyDict::new(py);
    out.set_item(
        "verdict",
        match cert.verdict {
            Verdict::Nonnegative => "NONNEGATIVE",
            Verdict::Negative => "NEGATIVE",
        },
    )?;
    out.set_item("max_abs_imag", cert.max_abs_imag)?;
    out.set_item("min_real_entry", cert.min_real_entry)?;
    out.set_item("n_objects", cert.n_objects)?;
    out.set_item("n_entries", cert.n_entries)?;
    out.set_item("total_negativity", neg.total_negativity)?;
    out.set_item("total_imaginarity", neg.total_imaginarity)?;
    Ok(out.into())
}

/// Joint basis/state search for extremal single-entry values at dimension
/// `dim`. `mode` is "min-real" or "max-imag". Heuristic: reports the best
/// value found, not a certified optimum.
#[pyfunction]
#[pyo3(signature = (mode, dim=2, restarts=20, max_iters=300, seed=7))]
fn search_extremal(
    py: Python<'_>,
    mode: &str,
    dim: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> PyResult<Py<PyDict>> {
    let cfg = Config::default();
    let mode = match mode {
        "min-real" => ExtremalMode::MinReal,
        "max-imag" => ExtremalMode::MaxImag,
        other => {
            return Err(PyValueError::new_err(format!(
                "mode must be \"min-real\" or \"max-imag\", got {other:?}"
            )))
        }
    };
    let search_cfg = SearchConfig {
        restarts,
        max_iters,
        seed,
        ..SearchConfig::default()
    };
    let result = kd_core::search::search_extremal(mode, dim, &search_cfg, &cfg).map_err(err)?;

    let out = PyDict::new(py);
    out.set_item("best_objective", result.best_objective)?;
    out.set_item("evaluations", result.evaluations)?;
    out.set_item("trace", result.trace.clone())?;
    out.set_item("observed_min_real", result.observed_min_real)?;
    out.set_item("observed_max_imag", result.observed_max_imag)?;
    out.set_item(
        "observed_min_region_margin",
        result.observed_min_region_margin,
    )?;
    out.set_item("heuristic", result.heuristic)?;
    out.set_item("state", result.best_state.as_ref().map(vec_out))?;
    if let Some(f) = result.best_frames.first() {
        let d = f.dim();
        let a: Vec<PyVec> = (0..d).map(|i| vec_out(f.pair().vector_a(i))).collect();
        let ap: Vec<PyVec> = (0..d).map(|i| vec_out(f.pair().vector_a_prime(i))).collect();
        out.set_item("basis_a", a)?;
        out.set_item("basis_a_prime", ap)?;
    }
    Ok(out.into())
}

#[pymodule]
fn kdrep_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Frame>()?;
    m.add_function(wrap_pyfunction!(represent_state, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_state, m)?)?;
    m.add_function(wrap_pyfunction!(represent_effect, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_effect, m)?)?;
    m.add_function(wrap_pyfunction!(represent_channel, m)?)?;
    m.add_function(wrap_pyfunction!(apply_channel, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(weak_value, m)?)?;
    m.add_function(wrap_pyfunction!(region_check, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(search_extremal, m)?)?;
    Ok(())
}
