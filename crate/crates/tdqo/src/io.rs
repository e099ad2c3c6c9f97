//! CSV traces and metadata sidecars.

use crate::error::{CliError, Result};
use crate::fmt::g17;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use tdqo_core::transforms::TimeGrid;

/// Relative tolerance on the sample spacing of an input trace.
pub const SPACING_TOLERANCE: f64 = 1e-6;

/// A uniformly sampled trace read from CSV; `columns` excludes `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub grid: TimeGrid,
    pub header: Option<Vec<String>>,
    pub columns: Vec<Vec<f64>>,
}

/// Reads `t,c1,..` with `min_cols..=max_cols` columns (counting `t`).
/// A header row is detected when its first field is not a number.
pub fn read_trace(path: &Path, min_cols: usize, max_cols: usize) -> Result<Trace> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(format!("opening {}", path.display()), e))?;
    parse_trace(file, &path.display().to_string(), min_cols, max_cols)
}

pub fn parse_trace<R: std::io::Read>(input: R, name: &str, min_cols: usize, max_cols: usize) -> Result<Trace> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(input);
    let mut header = None;
    let mut t = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut width = 0;
    for (line, rec) in rdr.records().enumerate() {
        let line = line + 1;
        let rec = rec.map_err(|e| CliError::config(format!("{name}: line {line}: {e}")))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if t.is_empty() && header.is_none() && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            header = Some(rec.iter().map(String::from).collect());
            continue;
        }
        if width == 0 {
            width = rec.len();
            if width < min_cols || width > max_cols {
                return Err(CliError::config(format!(
                    "{name}: line {line}: expected {min_cols}..={max_cols} columns, got {width}"
                )));
            }
            columns = vec![Vec::new(); width - 1];
        } else if rec.len() != width {
            return Err(CliError::config(format!("{name}: line {line}: expected {width} columns, got {}", rec.len())));
        }
        let mut values = rec.iter().map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::config(format!("{name}: line {line}: `{f}` is not a finite number")))
        });
        t.push(values.next().expect("width >= 1")?);
        for (c, v) in columns.iter_mut().zip(values) {
            c.push(v?);
        }
    }
    let grid = uniform_grid(&t, name)?;
    Ok(Trace { grid, header, columns })
}

/// Checks that `t` is strictly increasing and uniform; errors name the first offending data row (1-based).
pub fn uniform_grid(t: &[f64], name: &str) -> Result<TimeGrid> {
    if t.len() < 2 {
        return Err(CliError::config(format!("{name}: need at least 2 samples, got {}", t.len())));
    }
    let dt = t[1] - t[0];
    for j in 1..t.len() {
        let step = t[j] - t[j - 1];
        if !(step > 0.0) {
            return Err(CliError::config(format!("{name}: t is not strictly increasing at data row {}", j + 1)));
        }
        if (step - dt).abs() > SPACING_TOLERANCE * dt || (t[j] - (t[0] + j as f64 * dt)).abs() > SPACING_TOLERANCE * dt {
            return Err(CliError::config(format!(
                "{name}: non-uniform sampling at data row {} (step {} vs {})",
                j + 1,
                g17(step),
                g17(dt)
            )));
        }
    }
    if t.len() % 2 != 0 {
        return Err(CliError::config(format!("{name}: sample count must be even, got {}", t.len())));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    Ok(TimeGrid::new(t.len(), dt, t[0])?)
}

pub enum Column<'a> {
    Float(&'a [f64]),
    Flag(&'a [bool]),
}

/// Writes a header and one row per sample; floats as `%.17g`, flags as 0/1, LF endings.
pub fn write_csv<W: Write>(out: W, names: &[&str], cols: &[Column]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(names)?;
    let rows = cols
        .iter()
        .map(|c| match c {
            Column::Float(v) => v.len(),
            Column::Flag(v) => v.len(),
        })
        .min()
        .unwrap_or(0);
    let mut rec = Vec::with_capacity(cols.len());
    for j in 0..rows {
        rec.clear();
        for c in cols {
            rec.push(match c {
                Column::Float(v) => g17(v[j]),
                Column::Flag(v) => if v[j] { "1" } else { "0" }.to_string(),
            });
        }
        w.write_record(&rec)?;
    }
    w.flush()
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Sends `body` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| CliError::io(format!("creating {}", p.display()), e))?;
            let mut buf = std::io::BufWriter::new(file);
            body(&mut buf).and_then(|_| buf.flush()).map_err(|e| CliError::io(format!("writing {}", p.display()), e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock).and_then(|_| lock.flush()).map_err(|e| CliError::io("writing stdout", e))
        }
    }
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    emit(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

/// Writes `<out>.meta.json` next to a data file.
pub fn write_sidecar<T: Serialize>(out: &Path, meta: &T) -> Result<()> {
    write_json(Some(&sidecar_path(out)), meta)
}
