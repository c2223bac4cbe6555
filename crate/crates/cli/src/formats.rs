//! Text formats: sweep CSV, gridded heatmap, pinned-value files and flat
//! key-value reports.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hankel_nuclear_core::experiments::{DiffGrid, SweepRecord};
use hankel_nuclear_core::hankel::HankelSpec;

pub const CSV_HEADER: &str = "h1,h2,nuc_g0,nuc_ghat,diff,recovered,iterations";
pub const HEATMAP_CORNER: &str = "h1\\h2";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("nothing to write: record list is empty")]
    Empty,

    #[error(transparent)]
    Core(#[from] hankel_nuclear_core::Error),
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), FormatError> {
    fs::write(path, contents).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_line(e: &csv::Error) -> usize {
    e.position().map_or(0, |p| p.line() as usize)
}

fn csv_error(e: csv::Error) -> FormatError {
    FormatError::Parse {
        line: csv_line(&e),
        message: e.to_string(),
    }
}

fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory cannot fail");
    }
    let bytes = w.into_inner().expect("flushing to memory cannot fail");
    String::from_utf8(bytes).expect("all fields are ASCII")
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// Sweep records as CSV text, rows in the given order.
pub fn sweep_csv(records: &[SweepRecord]) -> Result<String, FormatError> {
    if records.is_empty() {
        return Err(FormatError::Empty);
    }
    let header = CSV_HEADER.split(',').map(String::from).collect();
    let rows = records.iter().map(|r| {
        vec![
            float(r.h1),
            float(r.h2),
            float(r.nuc_g0),
            float(r.nuc_ghat),
            float(r.diff),
            r.recovered.to_string(),
            r.iterations.to_string(),
        ]
    });
    Ok(csv_text(core::iter::once(header).chain(rows)))
}

pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<(), FormatError> {
    write_file(path, &sweep_csv(records)?)
}

fn parse_field<T: std::str::FromStr>(field: &str, line: usize, name: &str) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    field.trim().parse().map_err(|e| FormatError::Parse {
        line,
        message: format!("{name}: cannot parse {field:?}: {e}"),
    })
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRecord>, FormatError> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(FormatError::Parse {
            line: 1,
            message: format!("expected header {CSV_HEADER:?}"),
        });
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let f = |i: usize| &row[i];
        records.push(SweepRecord {
            h1: parse_field(f(0), line, "h1")?,
            h2: parse_field(f(1), line, "h2")?,
            nuc_g0: parse_field(f(2), line, "nuc_g0")?,
            nuc_ghat: parse_field(f(3), line, "nuc_ghat")?,
            diff: parse_field(f(4), line, "diff")?,
            recovered: parse_field(f(5), line, "recovered")?,
            iterations: parse_field(f(6), line, "iterations")?,
        });
    }
    Ok(records)
}

/// Gridded text: a header row of `h2` labels, then one row per `h1` with
/// the `diff` of each cell.
pub fn heatmap_text(grid: &DiffGrid) -> String {
    let header = core::iter::once(HEATMAP_CORNER.to_string())
        .chain(grid.cols.iter().map(|&h2| float(h2)))
        .collect();
    let rows = grid.rows.iter().enumerate().map(|(i, &h1)| {
        core::iter::once(float(h1))
            .chain((0..grid.cols.len()).map(|j| float(grid.get(i, j))))
            .collect()
    });
    csv_text(core::iter::once(header).chain(rows))
}

pub fn emit_heatmap(records: &[SweepRecord], path: &Path) -> Result<(), FormatError> {
    if records.is_empty() {
        return Err(FormatError::Empty);
    }
    let grid = DiffGrid::from_records(records)?;
    write_file(path, &heatmap_text(&grid))
}

pub fn parse_heatmap(text: &str) -> Result<DiffGrid, FormatError> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.get(0) != Some(HEATMAP_CORNER) {
        return Err(FormatError::Parse {
            line: 1,
            message: format!("expected corner label {HEATMAP_CORNER:?}"),
        });
    }
    let cols = header
        .iter()
        .skip(1)
        .map(|f| parse_field::<f64>(f, 1, "h2"))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    let mut cells = Vec::with_capacity(cols.len() * cols.len());
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        rows.push(parse_field::<f64>(&row[0], line, "h1")?);
        for f in row.iter().skip(1) {
            cells.push(parse_field::<f64>(f, line, "diff")?);
        }
    }
    Ok(DiffGrid { rows, cols, cells })
}

/// One real per line; blank lines and `#` comments (whole-line or trailing)
/// are ignored.
pub fn parse_pinned(text: &str) -> Result<Vec<f64>, FormatError> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let value: f64 = parse_field(content, idx + 1, "pinned value")?;
        if !value.is_finite() {
            return Err(FormatError::Parse {
                line: idx + 1,
                message: format!("pinned value must be finite, got {content}"),
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(FormatError::Parse {
            line: 1,
            message: "no pinned values found".into(),
        });
    }
    Ok(values)
}

/// `k,value` rows for the full anti-diagonal profile.
pub fn antidiag_csv(spec: &HankelSpec) -> String {
    let mut out = String::from("k,value\n");
    for (k, v) in spec.antidiag().iter().enumerate() {
        writeln!(out, "{k},{}", float(*v)).expect("writing to a String cannot fail");
    }
    out
}

/// Flat `key = value` lines.
pub fn key_values(pairs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        writeln!(out, "{k} = {v}").expect("writing to a String cannot fail");
    }
    out
}

pub fn write_text(path: &Path, contents: &str) -> Result<(), FormatError> {
    write_file(path, contents)
}
