//! CSV ingestion and config files.

use std::collections::BTreeMap;
use std::path::Path;

use super::CliError;
use crate::dtp::Observation;

/// Numeric rows of a CSV document with their line numbers; a non-numeric first row is a header.
fn numeric_rows(text: &str, allow_empty_cells: bool) -> Result<Vec<(u64, Vec<Option<f64>>)>, CliError> {
    // The reader's line counter skips CRLF terminators.
    let text = text.replace("\r\n", "\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Result<Option<f64>, &str>> = record
            .iter()
            .map(|cell| {
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>().map(Some).map_err(|_| cell)
                }
            })
            .collect();
        if rows.is_empty() && width.is_none() && parsed.iter().all(|c| c.is_err()) {
            // Header row.
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::input(format!("line {line}: expected {expected} column(s), found {}", record.len())));
        }
        let mut cells = Vec::with_capacity(parsed.len());
        for c in parsed {
            match c {
                Ok(None) if !allow_empty_cells => return Err(CliError::input(format!("line {line}: empty cell"))),
                Ok(v) => cells.push(v),
                Err(cell) => return Err(CliError::input(format!("line {line}: `{cell}` is not a number"))),
            }
        }
        if cells.iter().flatten().any(|v| v.is_nan()) {
            return Err(CliError::input(format!("line {line}: NaN is not a valid value")));
        }
        rows.push((line, cells));
    }
    if rows.is_empty() {
        return Err(CliError::input("no data rows"));
    }
    Ok(rows)
}

/// One column of points or two columns `lo,hi` of intervals (empty cell = unbounded).
pub fn parse_observations_csv(text: &str) -> Result<Vec<Observation>, CliError> {
    numeric_rows(text, true)?
        .into_iter()
        .map(|(line, cells)| {
            let at = |e: crate::Error| CliError::input(format!("line {line}: {e}"));
            match cells.as_slice() {
                [Some(x)] => Observation::point(*x).map_err(at),
                [lo, hi] => {
                    let lo = lo.unwrap_or(f64::NEG_INFINITY);
                    let hi = hi.unwrap_or(f64::INFINITY);
                    if lo == hi {
                        Observation::point(lo).map_err(at)
                    } else {
                        Observation::interval(lo, hi).map_err(at)
                    }
                }
                [None] => Err(CliError::input(format!("line {line}: empty cell"))),
                _ => Err(CliError::input(format!("line {line}: expected one or two columns, found {}", cells.len()))),
            }
        })
        .collect()
}

/// Two columns `y,sigma` with finite `y` and positive finite `sigma`.
pub fn parse_hier_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut y = Vec::new();
    let mut sigma = Vec::new();
    for (line, cells) in numeric_rows(text, false)? {
        let [Some(a), Some(s)] = cells.as_slice() else {
            return Err(CliError::input(format!("line {line}: expected two columns y,sigma")));
        };
        if !a.is_finite() {
            return Err(CliError::input(format!("line {line}: y must be finite")));
        }
        if !(s.is_finite() && *s > 0.0) {
            return Err(CliError::input(format!("line {line}: sigma must be positive and finite, got {s}")));
        }
        y.push(*a);
        sigma.push(*s);
    }
    Ok((y, sigma))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// `key=value` lines; `#` comments and blank lines are skipped, `_` in keys reads as `-`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim();
        let key = match key.strip_prefix("prior.") {
            Some(p) => format!("prior.{p}"),
            None => key.replace('_', "-"),
        };
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}
