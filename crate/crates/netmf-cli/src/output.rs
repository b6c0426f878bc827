//! Output plumbing: atomic writes, provenance headers, and C-style %g
//! float formatting for the TSV dumps.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use netmf_core::{Error, Result};

pub fn open_input(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    Ok(BufReader::new(file))
}

/// Write through a temp file in the target directory and rename into place.
pub fn write_atomic(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    f(&mut tmp)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.error.kind(),
            format!("{}: {}", path.display(), e.error),
        ))
    })?;
    Ok(())
}

/// Header comment lines common to every output file: tool version and the
/// resolved parameters, plus a timestamp unless suppressed.
pub fn provenance_lines(summary: &str, deterministic: bool) -> Vec<String> {
    let mut lines = vec![format!(
        "netmf v{} {summary}",
        env!("CARGO_PKG_VERSION")
    )];
    if !deterministic {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        lines.push(format!("timestamp={secs}"));
    }
    lines
}

/// C's `%.<prec>g`: `prec` significant digits, fixed or scientific by
/// exponent, trailing zeros trimmed, two-digit exponent with sign.
pub fn fmt_g(v: f64, prec: usize) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", prec - 1, v);
    let (mant, exp) = sci.split_once('e').expect("e-notation");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= prec as i32 {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!(
            "{mant}e{}{:02}",
            if exp < 0 { "-" } else { "+" },
            exp.abs()
        )
    } else {
        let decimals = (prec as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    }
}

pub fn fmt_g12(v: f64) -> String {
    fmt_g(v, 12)
}
