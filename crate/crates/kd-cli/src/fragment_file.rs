//! On-disk fragment format: systems, optional per-system frames, and named
//! operator payloads. Complex scalars are two-element arrays [re, im];
//! matrices are row-major nested arrays.

use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use kd_core::config::Config;
use kd_core::error::KdError;
use kd_core::frame::KDFrame;
use kd_core::qops::{CMatrix, CVector, DensityOperator, Instrument, KrausChannel, Povm, TraceClass};
use kd_core::verify::Fragment;

use crate::CliError;

pub type CNum = [f64; 2];
pub type VectorDef = Vec<CNum>;
pub type MatrixDef = Vec<VectorDef>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentFile {
    pub schema_version: u32,
    pub systems: Vec<SystemDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<FrameDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<StateDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measurements: Vec<MeasurementDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instruments: Vec<InstrumentDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDef {
    pub name: String,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDef {
    pub name: String,
    pub system: String,
    pub basis_a: Vec<VectorDef>,
    pub basis_a_prime: Vec<VectorDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDef {
    pub name: String,
    pub matrix: MatrixDef,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementDef {
    pub name: String,
    pub effects: Vec<MatrixDef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceClassDef {
    Preserving,
    Nonincreasing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDef {
    pub name: String,
    pub trace_class: TraceClassDef,
    pub kraus: Vec<MatrixDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDef {
    pub kraus: Vec<MatrixDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentDef {
    pub name: String,
    pub branches: Vec<BranchDef>,
}

fn to_complex(z: &CNum) -> Complex64 {
    Complex64::new(z[0], z[1])
}

pub fn complex_to_def(z: Complex64) -> CNum {
    [z.re, z.im]
}

fn to_vector(v: &VectorDef) -> CVector {
    DVector::from_iterator(v.len(), v.iter().map(to_complex))
}

pub fn vector_to_def(v: &CVector) -> VectorDef {
    v.iter().map(|z| complex_to_def(*z)).collect()
}

fn to_matrix(m: &MatrixDef, what: &str) -> Result<CMatrix, CliError> {
    let rows = m.len();
    if rows == 0 {
        return Err(CliError::validation(format!("{what}: empty matrix")));
    }
    let cols = m[0].len();
    if cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(CliError::validation(format!(
            "{what}: ragged or empty matrix rows"
        )));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| to_complex(&m[i][j])))
}

/// A fragment file resolved into validated library objects.
pub struct Loaded {
    pub file: FragmentFile,
    pub fragment: Fragment,
    pub state_names: Vec<String>,
    pub measurement_names: Vec<String>,
    pub channel_names: Vec<String>,
    pub instrument_names: Vec<String>,
    /// (frame name, system index, frame), in file order.
    pub frames: Vec<(String, usize, Arc<KDFrame>)>,
}

fn unique_names<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<(), CliError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(CliError::validation(format!("duplicate {what} name `{n}`")));
        }
    }
    Ok(())
}

pub fn load(path: &Path, cfg: &Config) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    let file: FragmentFile = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    resolve(file, cfg)
}

pub fn resolve(file: FragmentFile, cfg: &Config) -> Result<Loaded, CliError> {
    if file.schema_version != 1 {
        return Err(CliError::validation(format!(
            "unsupported schema_version {} (expected 1)",
            file.schema_version
        )));
    }
    if file.systems.is_empty() {
        return Err(CliError::validation("no systems declared".into()));
    }
    unique_names(file.systems.iter().map(|s| s.name.as_str()), "system")?;
    unique_names(file.frames.iter().map(|f| f.name.as_str()), "frame")?;
    unique_names(file.states.iter().map(|s| s.name.as_str()), "state")?;
    unique_names(
        file.measurements.iter().map(|m| m.name.as_str()),
        "measurement",
    )?;
    unique_names(file.channels.iter().map(|x| x.name.as_str()), "channel")?;
    unique_names(
        file.instruments.iter().map(|x| x.name.as_str()),
        "instrument",
    )?;

    let dims: Vec<usize> = file.systems.iter().map(|s| s.dim).collect();
    let total: usize = dims.iter().product();

    let mut frames = Vec::new();
    for fd in &file.frames {
        let sys_idx = file
            .systems
            .iter()
            .position(|s| s.name == fd.system)
            .ok_or_else(|| {
                CliError::validation(format!(
                    "frame `{}` references unknown system `{}`",
                    fd.name, fd.system
                ))
            })?;
        let d = dims[sys_idx];
        for (label, basis) in [("basis_a", &fd.basis_a), ("basis_a_prime", &fd.basis_a_prime)] {
            if basis.len() != d {
                return Err(CliError::validation(format!(
                    "frame `{}`: {label} has {} vectors, system `{}` has dimension {d}",
                    fd.name,
                    basis.len(),
                    fd.system
                )));
            }
            if basis.iter().any(|v| v.len() != d) {
                return Err(CliError::validation(format!(
                    "frame `{}`: {label} vector length mismatch",
                    fd.name
                )));
            }
        }
        let a: Vec<CVector> = fd.basis_a.iter().map(to_vector).collect();
        let a_prime: Vec<CVector> = fd.basis_a_prime.iter().map(to_vector).collect();
        let frame = KDFrame::from_bases(a, a_prime, cfg).map_err(CliError::from)?;
        frames.push((fd.name.clone(), sys_idx, Arc::new(frame)));
    }

    let check_square = |m: &CMatrix, what: &str| -> Result<(), CliError> {
        if m.nrows() != total || m.ncols() != total {
            return Err(CliError::validation(format!(
                "{what}: {}x{} matrix, composite dimension is {total}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    };

    let mut states = Vec::new();
    for sd in &file.states {
        let m = to_matrix(&sd.matrix, &format!("state `{}`", sd.name))?;
        check_square(&m, &format!("state `{}`", sd.name))?;
        states.push(DensityOperator::new(m, cfg).map_err(CliError::from)?);
    }

    let mut povms = Vec::new();
    for md in &file.measurements {
        let mut effects = Vec::new();
        for (k, ed) in md.effects.iter().enumerate() {
            let m = to_matrix(ed, &format!("measurement `{}` effect {k}", md.name))?;
            check_square(&m, &format!("measurement `{}` effect {k}", md.name))?;
            effects.push(m);
        }
        povms.push(Povm::new(effects, cfg).map_err(CliError::from)?);
    }

    let mut channels = Vec::new();
    for cd in &file.channels {
        let mut kraus = Vec::new();
        for (k, kd) in cd.kraus.iter().enumerate() {
            let m = to_matrix(kd, &format!("channel `{}` kraus {k}", cd.name))?;
            check_square(&m, &format!("channel `{}` kraus {k}", cd.name))?;
            kraus.push(m);
        }
        let tc = match cd.trace_class {
            TraceClassDef::Preserving => TraceClass::Preserving,
            TraceClassDef::Nonincreasing => TraceClass::Nonincreasing,
        };
        channels.push(KrausChannel::new(kraus, tc, cfg).map_err(CliError::from)?);
    }

    let mut instruments = Vec::new();
    for id in &file.instruments {
        let mut branches = Vec::new();
        for (b, bd) in id.branches.iter().enumerate() {
            let mut kraus = Vec::new();
            for (k, kd) in bd.kraus.iter().enumerate() {
                let m = to_matrix(
                    kd,
                    &format!("instrument `{}` branch {b} kraus {k}", id.name),
                )?;
                check_square(&m, &format!("instrument `{}` branch {b} kraus {k}", id.name))?;
                kraus.push(m);
            }
            branches.push(
                KrausChannel::new(kraus, TraceClass::Nonincreasing, cfg)
                    .map_err(CliError::from)?,
            );
        }
        instruments.push(Instrument::new(branches, cfg).map_err(CliError::from)?);
    }

    let fragment = Fragment::new(dims, states, povms, channels, instruments, cfg)
        .map_err(CliError::from)?;

    Ok(Loaded {
        state_names: file.states.iter().map(|s| s.name.clone()).collect(),
        measurement_names: file.measurements.iter().map(|m| m.name.clone()).collect(),
        channel_names: file.channels.iter().map(|x| x.name.clone()).collect(),
        instrument_names: file.instruments.iter().map(|x| x.name.clone()).collect(),
        frames,
        fragment,
        file,
    })
}

impl Loaded {
    /// One frame per system, in system order: the requested names, or the
    /// file's frames when they already cover each system exactly once.
    pub fn select_frames(&self, requested: &[String]) -> Result<Vec<Arc<KDFrame>>, CliError> {
        let n_systems = self.file.systems.len();
        let mut chosen: Vec<Option<Arc<KDFrame>>> = vec![None; n_systems];
        if requested.is_empty() {
            for (name, sys_idx, frame) in &self.frames {
                if chosen[*sys_idx].is_some() {
                    return Err(CliError::validation(format!(
                        "system `{}` has several frames; pick one with --frame (e.g. `{name}`)",
                        self.file.systems[*sys_idx].name
                    )));
                }
                chosen[*sys_idx] = Some(frame.clone());
            }
        } else {
            for want in requested {
                let (_, sys_idx, frame) = self
                    .frames
                    .iter()
                    .find(|(name, _, _)| name == want)
                    .ok_or_else(|| {
                        CliError::validation(format!("no frame named `{want}` in the input"))
                    })?;
                if chosen[*sys_idx].is_some() {
                    return Err(CliError::validation(format!(
                        "two requested frames target system `{}`",
                        self.file.systems[*sys_idx].name
                    )));
                }
                chosen[*sys_idx] = Some(frame.clone());
            }
        }
        chosen
            .into_iter()
            .enumerate()
            .map(|(i, f)| {
                f.ok_or_else(|| {
                    CliError::validation(format!(
                        "no frame selected for system `{}`",
                        self.file.systems[i].name
                    ))
                })
            })
            .collect()
    }

    /// Map the library's positional object ids ("state0",
    /// "measurement1.effect2", ...) back to the names from the file.
    pub fn pretty_id(&self, internal: &str) -> String {
        fn split(internal: &str, prefix: &str) -> Option<(usize, String)> {
            let rest = internal.strip_prefix(prefix)?;
            match rest.split_once('.') {
                Some((idx, tail)) => Some((idx.parse().ok()?, format!(".{tail}"))),
                None => Some((rest.parse().ok()?, String::new())),
            }
        }
        let lookup = |names: &[String], idx: usize, tail: &str| -> Option<String> {
            names.get(idx).map(|n| format!("{n}{tail}"))
        };
        if let Some((i, tail)) = split(internal, "state") {
            if let Some(s) = lookup(&self.state_names, i, &tail) {
                return s;
            }
        }
        if let Some((i, tail)) = split(internal, "measurement") {
            if let Some(s) = lookup(&self.measurement_names, i, &tail) {
                return s;
            }
        }
        if let Some((i, tail)) = split(internal, "channel") {
            if let Some(s) = lookup(&self.channel_names, i, &tail) {
                return s;
            }
        }
        if let Some((i, tail)) = split(internal, "instrument") {
            if let Some(s) = lookup(&self.instrument_names, i, &tail) {
                return s;
            }
        }
        internal.to_string()
    }
}

/// Serialize per-system frames into `FrameDef`s (used for witness output).
pub fn frames_to_defs(frames: &[KDFrame], systems: &[SystemDef]) -> Vec<FrameDef> {
    frames
        .iter()
        .zip(systems)
        .map(|(frame, sys)| {
            let d = frame.dim();
            FrameDef {
                name: format!("witness_{}", sys.name),
                system: sys.name.clone(),
                basis_a: (0..d)
                    .map(|i| vector_to_def(frame.pair().vector_a(i)))
                    .collect(),
                basis_a_prime: (0..d)
                    .map(|i| vector_to_def(frame.pair().vector_a_prime(i)))
                    .collect(),
            }
        })
        .collect()
}

pub fn kd_exit_code(e: &KdError) -> i32 {
    match e {
        KdError::OrthogonalPair { .. } | KdError::OrthogonalPrePost { .. } => 4,
        _ => 3,
    }
}
