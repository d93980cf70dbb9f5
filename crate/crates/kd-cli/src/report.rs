//! Deterministic text output: CSV tables for representation entries and JSON
//! reports for command summaries.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::CliError;

/// Table float form: 15 significant digits, then the shortest decimal that
/// round-trips the rounded value. One-ulp noise from products of stored
/// basis amplitudes collapses (0.5000000000000001 prints as 0.5), -0.0
/// prints as 0.0, and integers keep a decimal point (1 prints as 1.0).
pub fn fmt_f(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    let s = format!("{rounded}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn fmt_c(re: f64, im: f64) -> String {
    let sign = if im < 0.0 { "-" } else { "+" };
    format!("{}{sign}{}i", fmt_f(re), fmt_f(im.abs()))
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv {
            text: format!("{header}\n"),
        }
    }

    pub fn vector_row(&mut self, object: &str, i: usize, i_prime: usize, z: Complex64) {
        let _ = writeln!(
            self.text,
            "{object},{i},{i_prime},{},{}",
            fmt_f(z.re),
            fmt_f(z.im)
        );
    }

    #[allow(clippy::too_many_arguments)]
    pub fn matrix_row(
        &mut self,
        object: &str,
        i: usize,
        i_prime: usize,
        j: usize,
        j_prime: usize,
        z: Complex64,
    ) {
        let _ = writeln!(
            self.text,
            "{object},{i},{i_prime},{j},{j_prime},{},{}",
            fmt_f(z.re),
            fmt_f(z.im)
        );
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub const VECTOR_HEADER: &str = "object,i,i_prime,re,im";
pub const MATRIX_HEADER: &str = "object,i,i_prime,j,j_prime,re,im";

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::validation(format!("serialization: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
