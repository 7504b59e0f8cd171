//! Text formats.
//!
//! Signals: one sample per line, `#` lines are comments, blank lines are
//! skipped. A single-column CSV with an optional non-numeric header row is
//! also accepted.
//!
//! Coefficients: CSV `level,index,value`, levels ascending from 1
//! (coarsest), index 0-based.

use std::fmt::Write as _;
use std::path::Path;

use hurst_core::{CoefficientPyramid, Origin, PollenFilter, Signal};

use crate::{Error, Result};

pub const COEFFICIENT_HEADER: &str = "level,index,value";

pub fn parse_signal(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_row = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let field = fields.next().unwrap_or("");
        if fields.any(|f| !f.is_empty()) {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected a single column".into(),
            });
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if !seen_row && is_label(field) => {}
            Err(_) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("not a number: {field:?}"),
                })
            }
        }
        seen_row = true;
    }
    Ok(values)
}

fn is_label(s: &str) -> bool {
    s.chars()
        .next()
        .is_some_and(|c| c.is_alphabetic() || c == '"')
}

pub fn read_signal(path: &Path) -> Result<Signal> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let values = parse_signal(&text)?;
    Ok(Signal::new(values, Origin::File)?.with_meta("path", path.display().to_string()))
}

/// Formats a signal with its `meta` as `# key=value` header lines.
pub fn format_signal(signal: &Signal) -> String {
    let mut out = String::with_capacity(signal.len() * 20);
    for (k, v) in signal.meta() {
        let _ = writeln!(out, "# {k}={v}");
    }
    for v in signal.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn format_coefficients(pyr: &CoefficientPyramid) -> String {
    let mut out = String::with_capacity(pyr.len() * pyr.levels() * 24);
    out.push_str(COEFFICIENT_HEADER);
    out.push('\n');
    for (level, detail) in pyr.iter_levels() {
        for (k, v) in detail.iter().enumerate() {
            let _ = writeln!(out, "{level},{k},{v}");
        }
    }
    out
}

/// Reads a coefficient CSV back into a pyramid (no smooth vector).
pub fn parse_coefficients(text: &str, filter: PollenFilter) -> Result<CoefficientPyramid> {
    let mut details: Vec<Vec<f64>> = Vec::new();
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    match lines.next() {
        Some((_, h)) if h.trim() == COEFFICIENT_HEADER => {}
        Some((i, _)) => {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected header {COEFFICIENT_HEADER:?}"),
            })
        }
        None => return Err(hurst_core::Error::ZeroLevels.into()),
    }
    for (i, raw) in lines {
        let bad = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 fields, got {}", fields.len())));
        }
        let level: usize = fields[0]
            .parse()
            .map_err(|_| bad(format!("bad level {:?}", fields[0])))?;
        let index: usize = fields[1]
            .parse()
            .map_err(|_| bad(format!("bad index {:?}", fields[1])))?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| bad(format!("bad value {:?}", fields[2])))?;
        if level == 0 || level > details.len() + 1 {
            return Err(bad(format!("level {level} out of sequence")));
        }
        if level == details.len() + 1 {
            details.push(Vec::new());
        }
        let current = details.len();
        let row = &mut details[level - 1];
        if level != current || index != row.len() {
            return Err(bad(format!("row ({level},{index}) out of sequence")));
        }
        row.push(value);
    }
    Ok(CoefficientPyramid::from_levels(details, None, filter)?)
}

pub fn read_coefficients(path: &Path, filter: PollenFilter) -> Result<CoefficientPyramid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_coefficients(&text, filter)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
