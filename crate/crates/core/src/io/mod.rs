//! Recipe ingestion and plain-text output formats.
//!
//! Diagram CSV:
//! ```text
//! # metric=pearson
//! lambda\omega1,0.9,1,1.1
//! 0.05,-0.98,0.12,0.97
//! 0.1,NaN,0.3,0.99
//! ```
//! Series CSV: a header naming the index column (`t` or `n`) and each series,
//! then one row per sample. Numbers carry 9 significant digits.

mod config;
#[cfg(feature = "heatmap")]
mod heatmap;
mod run;

pub use config::{parse_override, parse_recipe, parse_recipe_str, recipe_table, RunConfig};
#[cfg(feature = "heatmap")]
pub use heatmap::{color_for, write_heatmap};
pub use run::{execute, RunManifest};

use crate::error::{Error, Result};
use crate::experiments::{Axis, Metric, MissingReason, PhaseDiagram, SeriesTable};
use std::fmt::Write as _;
use std::path::Path;

/// Significant digits written for every number.
pub const SIG_DIGITS: usize = 9;

/// Shortest `%.9g`-style rendering; `NaN` for NaN.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -5 || exp >= SIG_DIGITS as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_number(path: &Path, s: &str) -> Result<f64> {
    match s.trim() {
        "NaN" => Ok(f64::NAN),
        t => t
            .parse()
            .map_err(|_| format_error(path, format!("bad number `{t}`"))),
    }
}

fn format_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn join(cells: impl Iterator<Item = String>) -> String {
    cells.collect::<Vec<_>>().join(",")
}

pub fn diagram_csv(d: &PhaseDiagram) -> String {
    let mut s = format!("# metric={}\n", d.metric);
    let _ = writeln!(
        s,
        "{}\\{},{}",
        d.y.name,
        d.x.name,
        join(d.x.values.iter().map(|v| format_number(*v)))
    );
    for iy in 0..d.ny() {
        let cells = (0..d.nx()).map(|ix| format_number(d.get(ix, iy).unwrap_or(f64::NAN)));
        let _ = writeln!(s, "{},{}", format_number(d.y.values[iy]), join(cells));
    }
    s
}

pub fn write_diagram(d: &PhaseDiagram, path: &Path) -> Result<()> {
    d.validate()?;
    write_text(path, &diagram_csv(d))
}

/// Inverse of [`write_diagram`]. Missing cells come back as `Unrecorded`.
pub fn read_diagram(path: &Path) -> Result<PhaseDiagram> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let metric = lines
        .next()
        .and_then(|l| l.strip_prefix("# metric="))
        .and_then(Metric::from_name)
        .ok_or_else(|| format_error(path, "missing `# metric=` header"))?;
    let header = lines
        .next()
        .ok_or_else(|| format_error(path, "missing axis row"))?;
    let mut fields = header.split(',');
    let corner = fields.next().unwrap_or_default();
    let (y_name, x_name) = corner
        .split_once('\\')
        .ok_or_else(|| format_error(path, "corner cell must be `y\\x`"))?;
    let xs = fields
        .map(|f| parse_number(path, f))
        .collect::<Result<Vec<_>>>()?;
    let mut ys = Vec::new();
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let mut f = line.split(',');
        ys.push(parse_number(path, f.next().unwrap_or_default())?);
        let row = f
            .map(|c| parse_number(path, c))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != xs.len() {
            return Err(format_error(
                path,
                format!("row {} has {} cells", ys.len(), row.len()),
            ));
        }
        rows.push(row);
    }
    let mut d = PhaseDiagram::new(Axis::new(x_name, xs), Axis::new(y_name, ys), metric);
    for (iy, row) in rows.iter().enumerate() {
        for (ix, v) in row.iter().enumerate() {
            if v.is_nan() {
                d.set_missing(ix, iy, MissingReason::Unrecorded);
            } else {
                d.set(ix, iy, Some(*v));
            }
        }
    }
    Ok(d)
}

pub fn series_csv(t: &SeriesTable) -> Result<String> {
    for (name, col) in &t.columns {
        if col.len() != t.index.len() {
            return Err(Error::Validation(format!(
                "column `{name}` has {} rows, index has {}",
                col.len(),
                t.index.len()
            )));
        }
    }
    let mut s = String::new();
    let names =
        std::iter::once(t.index_name.clone()).chain(t.columns.iter().map(|(n, _)| n.clone()));
    let _ = writeln!(s, "{}", join(names));
    for (k, idx) in t.index.iter().enumerate() {
        let row = std::iter::once(*idx).chain(t.columns.iter().map(|(_, c)| c[k]));
        let _ = writeln!(s, "{}", join(row.map(format_number)));
    }
    Ok(s)
}

pub fn write_series(t: &SeriesTable, path: &Path) -> Result<()> {
    write_text(path, &series_csv(t)?)
}

pub fn read_series(path: &Path) -> Result<SeriesTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| format_error(path, "empty file"))?
        .split(',')
        .collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for line in lines.filter(|l| !l.is_empty()) {
        let row: Vec<&str> = line.split(',').collect();
        if row.len() != header.len() {
            return Err(format_error(path, "ragged row"));
        }
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(parse_number(path, v)?);
        }
    }
    let mut cols = cols.into_iter();
    let mut t = SeriesTable::new(header[0], cols.next().unwrap_or_default());
    for (name, c) in header[1..].iter().zip(cols) {
        t.push(name, c);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.05), "0.05");
        assert_eq!(format_number(-0.123456789123), "-0.123456789");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333");
        assert_eq!(format_number(123456789.0), "123456789");
        assert_eq!(format_number(1234567891.0), "1.23456789e9");
        assert_eq!(format_number(2.5e-7), "2.5e-7");
        assert_eq!(format_number(1e-5), "0.00001");
        assert_eq!(format_number(f64::NAN), "NaN");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(10000.0), "10000");
    }

    fn two_by_two() -> PhaseDiagram {
        let mut d = PhaseDiagram::new(
            Axis::new("omega1", vec![0.9, 1.1]),
            Axis::new("lambda", vec![0.05, 0.1]),
            Metric::Pearson,
        );
        d.set(0, 0, Some(-0.987654321));
        d.set(1, 0, Some(0.5));
        d.set(0, 1, Some(1.0));
        d.set_missing(1, 1, MissingReason::UndefinedCorrelation);
        d
    }

    #[test]
    fn diagram_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let d = two_by_two();
        write_diagram(&d, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(
            text,
            "# metric=pearson\nlambda\\omega1,0.9,1.1\n0.05,-0.987654321,0.5\n0.1,1,NaN\n"
        );
        let back = read_diagram(&p).unwrap();
        assert_eq!(back.cells(), d.cells());
        assert_eq!(back.x, d.x);
        assert_eq!(back.y, d.y);
        assert_eq!(back.missing_reason(1, 1), Some(MissingReason::Unrecorded));
    }

    #[test]
    fn eleven_by_eleven_layout() {
        let mut d = PhaseDiagram::new(
            Axis::new("omega1", crate::experiments::linspace(0.9, 1.1, 11)),
            Axis::new("lambda", crate::experiments::linspace(0.02, 0.22, 11)),
            Metric::Pearson,
        );
        for iy in 0..11 {
            for ix in 0..11 {
                d.set(ix, iy, Some(0.1));
            }
        }
        let csv = diagram_csv(&d);
        let body: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(body.len(), 12);
        assert!(body.iter().all(|l| l.split(',').count() == 12));
    }

    #[test]
    fn series_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let mut t = SeriesTable::new("n", vec![1.0, 2.0, 3.0]);
        t.push("C12", vec![0.25, f64::NAN, -0.75]);
        t.push("NM", vec![0.0, 0.125, 0.125]);
        write_series(&t, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("n,C12,NM\n"));
        assert_eq!(text.lines().nth(1), Some("1,0.25,0"));
        let back = read_series(&p).unwrap();
        assert_eq!(back.index, t.index);
        assert_eq!(back.column("NM"), t.column("NM"));
        assert!(back.column("C12").unwrap()[1].is_nan());
        t.push("bad", vec![1.0]);
        assert!(write_series(&t, &p).is_err());
    }

    #[test]
    fn unwritable_path() {
        let d = two_by_two();
        let e = write_diagram(&d, Path::new("/nonexistent/dir/d.csv")).unwrap_err();
        assert!(matches!(e, Error::Io { .. }));
    }
}
