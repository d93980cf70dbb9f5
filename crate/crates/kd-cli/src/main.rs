//! kdrep: represent fragments in two-basis frames, verify the structural
//! identities of the representation, certify nonnegativity, and search over
//! bases.

mod fragment_file;
mod report;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kd_core::config::Config;
use kd_core::error::KdError;
use kd_core::frame::KDFrame;
use kd_core::repr::{represent_channel, represent_povm, represent_state};
use kd_core::search::{ExtremalMode, SearchConfig, SearchResult};
use kd_core::verify::{
    certify, composite_frame, negativity_measures, verify_identity_channel,
    verify_normalization, verify_sequential, CheckOutcome, SuiteOptions, Verdict,
};

use fragment_file::Loaded;
use report::{fmt_f, write_json, write_text, Csv, MATRIX_HEADER, VECTOR_HEADER};

/// Exit codes are a contract: 0 success/nonnegative, 1 failed checks,
/// 2 parse, 3 validation, 4 frame admissibility, 10 negative verdict.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn parse(msg: String) -> Self {
        CliError { code: 2, msg }
    }

    pub fn validation(msg: String) -> Self {
        CliError { code: 3, msg }
    }
}

impl From<KdError> for CliError {
    fn from(e: KdError) -> Self {
        CliError {
            code: fragment_file::kd_exit_code(&e),
            msg: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "kdrep",
    version,
    about = "Two-basis frame representations of states, measurements, and channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a fragment's representation entries as CSV tables.
    Represent(RepresentArgs),
    /// Check structural identities (composition, normalization, region).
    Verify(VerifyArgs),
    /// Decide whether a fragment's representation is nonnegative.
    Certify(CertifyArgs),
    /// Search over bases for witnesses or extremal entries.
    Search(SearchArgs),
}

#[derive(Args)]
struct RepresentArgs {
    /// Fragment file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Frame names to use, one per system; defaults to the file's frames.
    #[arg(long, value_delimiter = ',')]
    frame: Vec<String>,
    /// Directory for emitted tables and the summary.
    #[arg(long, alias = "out", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Functoriality,
    Normalization,
    Region,
    All,
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::Functoriality => "functoriality",
            SuiteArg::Normalization => "normalization",
            SuiteArg::Region => "region",
            SuiteArg::All => "all",
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Fragment file (JSON); omit when using --random.
    #[arg(long, required_unless_present = "random", conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Frame names to use, one per system; defaults to the file's frames.
    #[arg(long, value_delimiter = ',')]
    frame: Vec<String>,
    /// Check randomized instances instead of a file.
    #[arg(long)]
    random: bool,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Seed for --random instances.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Instances per check family and dimension in --random mode.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Dimensions for --random instances.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3])]
    dims: Vec<usize>,
    /// Deviation tolerance for the composition checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, alias = "out", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    /// Fragment file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Frame names to use, one per system; defaults to the file's frames.
    #[arg(long, value_delimiter = ',')]
    frame: Vec<String>,
    /// Entries with |Im| and -Re below this count as nonnegative.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, alias = "out", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Minimize total negativity + imaginarity of the fragment.
    Nonneg,
    /// Drive a single pure-state entry's real part down (floor -1/8).
    MinReal,
    /// Drive a single pure-state entry's imaginary part up (ceiling 1/4).
    MaxImag,
}

#[derive(Args)]
struct SearchArgs {
    /// Fragment file (JSON); required for --mode nonneg.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// System dimension for the extremal modes.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Witness threshold: nonneg objective at or below this writes a witness.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, alias = "out", default_value = ".")]
    out_dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            e.code
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let cfg = base_config()?;
    match cli.command {
        Command::Represent(args) => cmd_represent(args, &cfg),
        Command::Verify(args) => cmd_verify(args, &cfg),
        Command::Certify(args) => cmd_certify(args, cfg),
        Command::Search(args) => cmd_search(args, &cfg),
    }
}

fn base_config() -> Result<Config, CliError> {
    let mut cfg = Config::default();
    if let Ok(v) = std::env::var("KDREP_MAX_DIM") {
        cfg.max_dim = v.trim().parse().map_err(|_| {
            CliError::validation(format!("KDREP_MAX_DIM must be a positive integer, got `{v}`"))
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::parse(format!("cannot create {}: {e}", dir.display())))
}

#[derive(Serialize)]
struct RunMeta {
    command: String,
    input: Option<String>,
    seed: Option<u64>,
    timestamp: String,
}

impl RunMeta {
    fn new(command: &str, input: Option<&Path>, seed: Option<u64>) -> Self {
        RunMeta {
            command: command.into(),
            input: input.map(|p| p.display().to_string()),
            seed,
            timestamp: report::timestamp(),
        }
    }
}

// ---------------------------------------------------------------- represent

#[derive(Serialize)]
struct RepresentSummary {
    meta: RunMeta,
    systems: Vec<fragment_file::SystemDef>,
    frames_used: Vec<String>,
    n_states: usize,
    n_measurements: usize,
    n_channels: usize,
    n_instruments: usize,
    /// Worst |sum(mu) - 1| over states; the representation's normalization.
    max_state_sum_deviation: f64,
    files: Vec<String>,
}

fn cmd_represent(args: RepresentArgs, cfg: &Config) -> Result<i32, CliError> {
    let loaded = fragment_file::load(&args.input, cfg)?;
    let frames = loaded.select_frames(&args.frame)?;
    let frame = composite_frame(&frames, cfg)?;
    out_dir(&args.out_dir)?;

    let fragment = &loaded.fragment;
    let mut files = Vec::new();
    let mut max_sum_dev = 0.0f64;

    if !fragment.states().is_empty() {
        let mut csv = Csv::new(VECTOR_HEADER);
        for (n, s) in fragment.states().iter().enumerate() {
            let mu = represent_state(s, &frame)?;
            max_sum_dev = max_sum_dev.max((mu.sum() - num_complex::Complex64::ONE).norm());
            for k in 0..frame.n_ops() {
                let (i, ip) = frame.unflat(k);
                csv.vector_row(&loaded.state_names[n], i, ip, mu.entries()[k]);
            }
        }
        files.push(write_csv(&args.out_dir, "states.csv", csv)?);
    }

    if !fragment.povms().is_empty() {
        let mut csv = Csv::new(VECTOR_HEADER);
        for (n, povm) in fragment.povms().iter().enumerate() {
            for (m, xi) in represent_povm(povm, &frame)?.iter().enumerate() {
                let object = format!("{}.effect{m}", loaded.measurement_names[n]);
                for k in 0..frame.n_ops() {
                    let (i, ip) = frame.unflat(k);
                    csv.vector_row(&object, i, ip, xi.entries()[k]);
                }
            }
        }
        files.push(write_csv(&args.out_dir, "effects.csv", csv)?);
    }

    if !fragment.channels().is_empty() {
        let mut csv = Csv::new(MATRIX_HEADER);
        for (n, ch) in fragment.channels().iter().enumerate() {
            let g = represent_channel(ch, &frame, &frame)?;
            matrix_rows(&mut csv, &loaded.channel_names[n], &frame, g.matrix());
        }
        files.push(write_csv(&args.out_dir, "channels.csv", csv)?);
    }

    if !fragment.instruments().is_empty() {
        let mut csv = Csv::new(MATRIX_HEADER);
        for (n, inst) in fragment.instruments().iter().enumerate() {
            for (b, branch) in inst.branches().iter().enumerate() {
                let g = represent_channel(branch, &frame, &frame)?;
                let object = format!("{}.branch{b}", loaded.instrument_names[n]);
                matrix_rows(&mut csv, &object, &frame, g.matrix());
            }
        }
        files.push(write_csv(&args.out_dir, "instruments.csv", csv)?);
    }

    let summary = RepresentSummary {
        meta: RunMeta::new("represent", Some(&args.input), None),
        systems: loaded.file.systems.clone(),
        frames_used: args.frame.clone(),
        n_states: fragment.states().len(),
        n_measurements: fragment.povms().len(),
        n_channels: fragment.channels().len(),
        n_instruments: fragment.instruments().len(),
        max_state_sum_deviation: max_sum_dev,
        files: files.clone(),
    };
    write_json(&args.out_dir.join("summary.json"), &summary)?;

    for f in &files {
        println!("wrote {f}");
    }
    println!(
        "represented {} objects at dimension {}",
        fragment.states().len()
            + fragment.povms().len()
            + fragment.channels().len()
            + fragment.instruments().len(),
        frame.dim()
    );
    Ok(0)
}

/// Rows are (input pair, output pair, entry): i,i' index what the channel
/// consumes, j,j' what it produces.
fn matrix_rows(csv: &mut Csv, object: &str, frame: &Arc<KDFrame>, m: &kd_core::qops::CMatrix) {
    for in_k in 0..frame.n_ops() {
        let (i, ip) = frame.unflat(in_k);
        for out_k in 0..frame.n_ops() {
            let (j, jp) = frame.unflat(out_k);
            csv.matrix_row(object, i, ip, j, jp, m[(out_k, in_k)]);
        }
    }
}

fn write_csv(dir: &Path, name: &str, csv: Csv) -> Result<String, CliError> {
    let path = dir.join(name);
    write_text(&path, &csv.into_string())?;
    Ok(path.display().to_string())
}

// ------------------------------------------------------------------- verify

#[derive(Serialize)]
struct CheckRow {
    name: String,
    passed: bool,
    max_deviation: f64,
    tol: f64,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    meta: RunMeta,
    suite: String,
    random: bool,
    trials: Option<usize>,
    dims: Option<Vec<usize>>,
    tol: f64,
    all_passed: bool,
    checks: Vec<CheckRow>,
}

fn cmd_verify(args: VerifyArgs, cfg: &Config) -> Result<i32, CliError> {
    let checks = if args.random {
        let opts = SuiteOptions {
            seed: args.seed,
            trials: args.trials,
            dims: args.dims.clone(),
            tol: args.tol,
        };
        let mut checks = Vec::new();
        if matches!(args.suite, SuiteArg::Functoriality | SuiteArg::All) {
            checks.extend(kd_core::verify::functoriality_suite(&opts, cfg)?);
        }
        if matches!(args.suite, SuiteArg::Normalization | SuiteArg::All) {
            checks.extend(kd_core::verify::normalization_suite(&opts, cfg)?);
        }
        if matches!(args.suite, SuiteArg::Region | SuiteArg::All) {
            checks.extend(kd_core::verify::region_suite(&opts, cfg)?);
        }
        checks
    } else {
        let input = args.input.as_deref().expect("clap enforces --input");
        let loaded = fragment_file::load(input, cfg)?;
        let frames = loaded.select_frames(&args.frame)?;
        file_checks(&loaded, &frames, args.suite, args.tol, cfg)?
    };

    out_dir(&args.out_dir)?;
    let all_passed = checks.iter().all(|c| c.passed);

    let mut csv_text = String::from("name,passed,max_deviation,tol\n");
    for c in &checks {
        csv_text.push_str(&format!(
            "{},{},{},{}\n",
            c.name,
            c.passed,
            fmt_f(c.max_deviation),
            fmt_f(c.tol)
        ));
        println!(
            "{} {} (max deviation {} at tolerance {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            fmt_f(c.max_deviation),
            fmt_f(c.tol)
        );
    }
    write_text(&args.out_dir.join("verify_checks.csv"), &csv_text)?;

    let report = VerifyReport {
        meta: RunMeta::new(
            "verify",
            args.input.as_deref(),
            args.random.then_some(args.seed),
        ),
        suite: args.suite.name().into(),
        random: args.random,
        trials: args.random.then_some(args.trials),
        dims: args.random.then(|| args.dims.clone()),
        tol: args.tol,
        all_passed,
        checks: checks
            .iter()
            .map(|c| CheckRow {
                name: c.name.clone(),
                passed: c.passed,
                max_deviation: c.max_deviation,
                tol: c.tol,
                detail: c.detail.clone(),
            })
            .collect(),
    };
    write_json(&args.out_dir.join("verify_report.json"), &report)?;

    if all_passed {
        println!("all {} checks passed", checks.len());
        Ok(0)
    } else {
        let failed = checks.iter().filter(|c| !c.passed).count();
        println!("{failed} of {} checks failed", checks.len());
        Ok(1)
    }
}

/// File-mode checks: normalization of everything in the file, composition
/// identities among its channels, and the admissible-region bounds for its
/// states.
fn file_checks(
    loaded: &Loaded,
    frames: &[Arc<KDFrame>],
    suite: SuiteArg,
    tol: f64,
    cfg: &Config,
) -> Result<Vec<CheckOutcome>, CliError> {
    let fragment = &loaded.fragment;
    let frame = composite_frame(frames, cfg)?;
    let mut checks = Vec::new();

    if matches!(suite, SuiteArg::Functoriality | SuiteArg::All) {
        let mut c = verify_identity_channel(&frame, tol)?;
        c.name = "identity channel maps to the identity matrix".into();
        checks.push(c);
        for (p, ch1) in fragment.channels().iter().enumerate() {
            for (q, ch2) in fragment.channels().iter().enumerate() {
                let mut c = verify_sequential(ch1, ch2, &frame, &frame, &frame, tol)?;
                c.name = format!(
                    "sequential composition {} after {}",
                    loaded.channel_names[q], loaded.channel_names[p]
                );
                checks.push(c);
            }
        }
    }

    if matches!(suite, SuiteArg::Normalization | SuiteArg::All) {
        checks.extend(verify_normalization(fragment, frames, cfg, tol)?);
    }

    if matches!(suite, SuiteArg::Region | SuiteArg::All) {
        for (n, s) in fragment.states().iter().enumerate() {
            let mu = represent_state(s, &frame)?;
            let name = &loaded.state_names[n];
            let excess = (mu.max_abs_entry() - 1.0).max(0.0);
            checks.push(CheckOutcome {
                name: format!("state {name} entry moduli stay at or below one"),
                passed: excess <= 1e-12,
                max_deviation: excess,
                tol: 1e-12,
                detail: format!("largest modulus {}", mu.max_abs_entry()),
            });
            let purity = (s.matrix() * s.matrix()).trace().re;
            if purity > 1.0 - 1e-10 {
                let violation = (-mu.min_region_margin()).max(0.0);
                checks.push(CheckOutcome {
                    name: format!("pure state {name} entries stay inside the region"),
                    passed: violation <= tol,
                    max_deviation: violation,
                    tol,
                    detail: format!("worst margin {}", mu.min_region_margin()),
                });
            }
        }
    }

    Ok(checks)
}

// ------------------------------------------------------------------ certify

#[derive(Serialize)]
struct OffenderRow {
    object: String,
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SubstochasticityRow {
    performed: bool,
    passed: bool,
    min_entry: f64,
    max_column_excess: f64,
}

#[derive(Serialize)]
struct PerObjectRow {
    object: String,
    negativity: f64,
    imaginarity: f64,
}

#[derive(Serialize)]
struct CertifyReport {
    meta: RunMeta,
    verdict: String,
    tol: f64,
    max_abs_imag: f64,
    min_real_entry: f64,
    worst_offender: Option<OffenderRow>,
    substochasticity: SubstochasticityRow,
    n_objects: usize,
    n_entries: usize,
    total_negativity: f64,
    total_imaginarity: f64,
    per_object: Vec<PerObjectRow>,
}

fn cmd_certify(args: CertifyArgs, mut cfg: Config) -> Result<i32, CliError> {
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(CliError::validation(format!(
                "--tol must be a nonnegative finite number, got {tol}"
            )));
        }
        cfg.nonneg_tol = tol;
    }
    let loaded = fragment_file::load(&args.input, &cfg)?;
    let frames = loaded.select_frames(&args.frame)?;
    let cert = certify(&loaded.fragment, &frames, &cfg)?;
    let neg = negativity_measures(&loaded.fragment, &frames, &cfg)?;
    out_dir(&args.out_dir)?;

    let verdict = match cert.verdict {
        Verdict::Nonnegative => "NONNEGATIVE",
        Verdict::Negative => "NEGATIVE",
    };
    let report = CertifyReport {
        meta: RunMeta::new("certify", Some(&args.input), None),
        verdict: verdict.into(),
        tol: cfg.nonneg_tol,
        max_abs_imag: cert.max_abs_imag,
        min_real_entry: cert.min_real_entry,
        worst_offender: cert.worst_offender.as_ref().map(|o| OffenderRow {
            object: loaded.pretty_id(&o.object),
            row: o.row,
            col: o.col,
            re: o.value.re,
            im: o.value.im,
        }),
        substochasticity: SubstochasticityRow {
            performed: cert.substochasticity.performed,
            passed: cert.substochasticity.passed,
            min_entry: cert.substochasticity.min_entry,
            max_column_excess: cert.substochasticity.max_column_excess,
        },
        n_objects: cert.n_objects,
        n_entries: cert.n_entries,
        total_negativity: neg.total_negativity,
        total_imaginarity: neg.total_imaginarity,
        per_object: neg
            .per_object
            .iter()
            .map(|(id, n, i)| PerObjectRow {
                object: loaded.pretty_id(id),
                negativity: *n,
                imaginarity: *i,
            })
            .collect(),
    };
    write_json(&args.out_dir.join("certify_report.json"), &report)?;

    println!("{verdict}");
    println!(
        "max |Im| {} | min Re {} | total negativity {} | total imaginarity {}",
        fmt_f(cert.max_abs_imag),
        fmt_f(cert.min_real_entry),
        fmt_f(neg.total_negativity),
        fmt_f(neg.total_imaginarity)
    );
    if let Some(o) = &report.worst_offender {
        println!(
            "worst offender {} at ({},{}): {}",
            o.object,
            o.row,
            o.col,
            report::fmt_c(o.re, o.im)
        );
    }
    match cert.verdict {
        Verdict::Nonnegative => Ok(0),
        Verdict::Negative => Ok(10),
    }
}

// ------------------------------------------------------------------- search

#[derive(Serialize)]
struct SearchReport {
    meta: RunMeta,
    mode: String,
    dim: usize,
    restarts: usize,
    max_iters: usize,
    evaluations: usize,
    best_objective: f64,
    /// Per-restart best values.
    trace: Vec<f64>,
    observed_min_real: f64,
    observed_max_imag: f64,
    observed_min_region_margin: f64,
    observed_max_abs_entry: f64,
    /// No global-optimality certificate: these are the best values found.
    heuristic: bool,
    best_state: Option<fragment_file::VectorDef>,
    frames: Vec<fragment_file::FrameDef>,
    witness: Option<String>,
}

fn cmd_search(args: SearchArgs, cfg: &Config) -> Result<i32, CliError> {
    let search_cfg = SearchConfig {
        restarts: args.restarts,
        max_iters: args.max_iters,
        seed: args.seed,
        ..SearchConfig::default()
    };
    out_dir(&args.out_dir)?;

    let (result, systems, witness, mode_name) = match args.mode {
        ModeArg::Nonneg => {
            let input = args.input.as_deref().ok_or_else(|| {
                CliError::validation("--mode nonneg needs --input".into())
            })?;
            let loaded = fragment_file::load(input, cfg)?;
            let result =
                kd_core::search::search_nonnegative(&loaded.fragment, &search_cfg, cfg)?;
            let witness = if result.best_objective <= args.tol {
                Some(write_witness(&loaded, &result, &args.out_dir, cfg)?)
            } else {
                None
            };
            (result, loaded.file.systems.clone(), witness, "nonneg")
        }
        ModeArg::MinReal | ModeArg::MaxImag => {
            let (mode, name) = match args.mode {
                ModeArg::MinReal => (ExtremalMode::MinReal, "min-real"),
                _ => (ExtremalMode::MaxImag, "max-imag"),
            };
            let result = kd_core::search::search_extremal(mode, args.dim, &search_cfg, cfg)?;
            let systems = vec![fragment_file::SystemDef {
                name: "q".into(),
                dim: args.dim,
            }];
            (result, systems, None, name)
        }
    };

    let mut csv = String::from("restart,objective\n");
    for (r, v) in result.trace.iter().enumerate() {
        csv.push_str(&format!("{r},{}\n", fmt_f(*v)));
    }
    write_text(&args.out_dir.join("search_trace.csv"), &csv)?;

    let report = SearchReport {
        meta: RunMeta::new("search", args.input.as_deref(), Some(args.seed)),
        mode: mode_name.into(),
        dim: result.best_frames.first().map_or(args.dim, KDFrame::dim),
        restarts: args.restarts,
        max_iters: args.max_iters,
        evaluations: result.evaluations,
        best_objective: result.best_objective,
        trace: result.trace.clone(),
        observed_min_real: result.observed_min_real,
        observed_max_imag: result.observed_max_imag,
        observed_min_region_margin: result.observed_min_region_margin,
        observed_max_abs_entry: result.observed_max_abs_entry,
        heuristic: result.heuristic,
        best_state: result.best_state.as_ref().map(fragment_file::vector_to_def),
        frames: fragment_file::frames_to_defs(&result.best_frames, &systems),
        witness: witness.clone(),
    };
    write_json(&args.out_dir.join("search_report.json"), &report)?;

    match args.mode {
        ModeArg::Nonneg => {
            println!(
                "best objective {} after {} evaluations",
                fmt_f(result.best_objective),
                result.evaluations
            );
            match &witness {
                Some(path) => println!("witness certifies NONNEGATIVE, written to {path}"),
                None => println!(
                    "no witness at tolerance {}; best frames recorded in the report",
                    fmt_f(args.tol)
                ),
            }
        }
        ModeArg::MinReal => {
            println!("best min real entry {}", fmt_f(result.best_objective));
            print_achiever(&result, &report.frames);
        }
        ModeArg::MaxImag => {
            println!("best max imag entry {}", fmt_f(result.best_objective));
            print_achiever(&result, &report.frames);
        }
    }
    Ok(0)
}

fn print_achiever(result: &SearchResult, frames: &[fragment_file::FrameDef]) {
    if let Some(state) = &result.best_state {
        let parts: Vec<String> = state
            .iter()
            .map(|z| report::fmt_c(z.re, z.im))
            .collect();
        println!("state [{}]", parts.join(", "));
    }
    for f in frames {
        for (label, basis) in [("basis_a", &f.basis_a), ("basis_a_prime", &f.basis_a_prime)] {
            for (i, v) in basis.iter().enumerate() {
                let parts: Vec<String> = v.iter().map(|z| report::fmt_c(z[0], z[1])).collect();
                println!("{label}[{i}] [{}]", parts.join(", "));
            }
        }
    }
}

/// Serialize the found frames back into the input's format, prove the result
/// re-ingests to a NONNEGATIVE verdict, and only then write it.
fn write_witness(
    loaded: &Loaded,
    result: &SearchResult,
    dir: &Path,
    cfg: &Config,
) -> Result<String, CliError> {
    let mut file = loaded.file.clone();
    file.frames = fragment_file::frames_to_defs(&result.best_frames, &file.systems);
    let reloaded = fragment_file::resolve(file.clone(), cfg)?;
    let frames = reloaded.select_frames(&[])?;
    let cert = certify(&reloaded.fragment, &frames, cfg)?;
    if cert.verdict != Verdict::Nonnegative {
        return Err(CliError::validation(
            "search reported a witness but re-ingestion certifies NEGATIVE".into(),
        ));
    }
    let path = dir.join("witness.json");
    write_json(&path, &file)?;
    Ok(path.display().to_string())
}
