//! CSV and JSON artifacts.
//!
//! Spectrum files carry the columns in [`SPECTRUM_COLUMNS`]; 2D grids put
//! axis1 values across the first row and axis2 values down the first
//! column. Numbers are written with 9 significant digits and empty cells
//! mark gaps.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sweep::{SpectrumSet, SweepResult};

pub const SPECTRUM_COLUMNS: [&str; 8] = [
    "delta_norm",
    "mu",
    "nu_out",
    "t_re",
    "t_im",
    "t_abs2",
    "phase_rad",
    "tau_g_us",
];

/// Nine significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.8e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub fn write_spectrum_csv<W: Write>(mut w: W, set: &SpectrumSet) -> Result<()> {
    writeln!(w, "{}", SPECTRUM_COLUMNS.join(","))?;
    for block in &set.blocks {
        let s = &block.spectrum;
        for (db, row) in s.delta_bar.iter().zip(&s.rows) {
            match row {
                Some(r) => writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    fmt_num(*db),
                    fmt_num(r.mu),
                    fmt_num(r.nu_out),
                    fmt_num(r.t_p.re),
                    fmt_num(r.t_p.im),
                    fmt_num(r.t_p.norm_sqr()),
                    fmt_num(r.phase),
                    fmt_num(r.tau_g * 1e6),
                )?,
                None => writeln!(w, "{},,,,,,,", fmt_num(*db))?,
            }
        }
    }
    Ok(())
}

/// A 2D grid, or a two-column `<axis1>,<observable>` table for 1D sweeps.
pub fn write_grid_csv<W: Write>(mut w: W, r: &SweepResult) -> Result<()> {
    match &r.axis2 {
        Some(a2) => {
            write!(w, "{}\\{}", a2.param, r.axis1.param)?;
            for v in &r.axis1.values {
                write!(w, ",{}", fmt_num(*v))?;
            }
            writeln!(w)?;
            for (i2, y) in a2.values.iter().enumerate() {
                write!(w, "{}", fmt_num(*y))?;
                for v in r.row(i2) {
                    write!(w, ",{}", opt(*v))?;
                }
                writeln!(w)?;
            }
        }
        None => {
            writeln!(w, "{},{}", r.axis1.param, r.observable.name())?;
            for (x, v) in r.axis1.values.iter().zip(r.row(0)) {
                writeln!(w, "{},{}", fmt_num(*x), opt(*v))?;
            }
        }
    }
    Ok(())
}

fn parse_cell(cell: &str, line: usize, col: usize) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.trim().parse::<f64>().map(Some).map_err(|_| {
        Error::InvalidInput(format!(
            "line {line}, column {col}: `{cell}` is not a number"
        ))
    })
}

/// Check the spectrum schema; returns the number of data rows.
pub fn validate_spectrum_csv(text: &str) -> Result<usize> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty file".into()))?;
    if header.split(',').collect::<Vec<_>>() != SPECTRUM_COLUMNS {
        return Err(Error::InvalidInput(format!(
            "header `{header}` does not match `{}`",
            SPECTRUM_COLUMNS.join(",")
        )));
    }
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != SPECTRUM_COLUMNS.len() {
            return Err(Error::InvalidInput(format!(
                "line {}: {} columns, expected {}",
                i + 2,
                cells.len(),
                SPECTRUM_COLUMNS.len()
            )));
        }
        if parse_cell(cells[0], i + 2, 1)?.is_none() {
            return Err(Error::InvalidInput(format!(
                "line {}: delta_norm is empty",
                i + 2
            )));
        }
        for (c, cell) in cells.iter().enumerate().skip(1) {
            parse_cell(cell, i + 2, c + 1)?;
        }
        rows += 1;
    }
    Ok(rows)
}

/// Parsed 2D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub corner: String,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// Row-major over axis2.
    pub values: Vec<Option<f64>>,
}

/// Check and parse the 2D grid schema.
pub fn read_grid_csv(text: &str) -> Result<Grid> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty file".into()))?;
    let mut head = header.split(',');
    let corner = head.next().unwrap_or_default().to_owned();
    let axis1 = head
        .enumerate()
        .map(|(c, s)| {
            parse_cell(s, 1, c + 2)?.ok_or_else(|| Error::InvalidInput("empty axis1 value".into()))
        })
        .collect::<Result<Vec<f64>>>()?;
    if axis1.is_empty() {
        return Err(Error::InvalidInput("no axis1 values".into()));
    }
    let mut axis2 = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != axis1.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "line {}: {} columns, expected {}",
                i + 2,
                cells.len(),
                axis1.len() + 1
            )));
        }
        axis2
            .push(parse_cell(cells[0], i + 2, 1)?.ok_or_else(|| {
                Error::InvalidInput(format!("line {}: empty axis2 value", i + 2))
            })?);
        for (c, cell) in cells.iter().enumerate().skip(1) {
            values.push(parse_cell(cell, i + 2, c + 1)?);
        }
    }
    if axis2.is_empty() {
        return Err(Error::InvalidInput("no data rows".into()));
    }
    Ok(Grid {
        corner,
        axis1,
        axis2,
        values,
    })
}

/// (δ − ω_b, μ) pairs from a spectrum file, skipping gaps.
pub fn read_spectrum_mu(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    validate_spectrum_csv(text)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        if let (Some(d), Some(m)) = (
            parse_cell(cells[0], i + 1, 1)?,
            parse_cell(cells[1], i + 1, 2)?,
        ) {
            x.push(d);
            y.push(m);
        }
    }
    Ok((x, y))
}

/// Open `path` for writing, refusing to replace an existing file unless
/// `force` is set.
pub fn create_output(path: &Path, force: bool) -> Result<BufWriter<File>> {
    let mut opts = OpenOptions::new();
    opts.write(true);
    if force {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    match opts.open(path) {
        Ok(f) => Ok(BufWriter::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Config(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        ))),
        Err(e) => Err(e.into()),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T, force: bool) -> Result<()> {
    let mut w = create_output(path, force)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// `<dir>/<stem>.csv` and its `<dir>/<stem>.json` sidecar.
pub fn artifact_paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{stem}.csv")),
        dir.join(format!("{stem}.json")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;
    use crate::sweep::{
        run_spectra, run_sweep, Axis, Observable, Param, StabilityPolicy, SweepSpec,
    };

    fn small_set(policy: StabilityPolicy) -> SpectrumSet {
        let mut spec = SweepSpec::new(
            SystemParams::figure_base(0.8, 0.1),
            Axis::linspace(Param::DeltaBar, -0.5, 0.5, 11).unwrap(),
            Observable::Mu,
        );
        spec.axis2 = Some(Axis::list(Param::G, vec![0.01, 0.1]).unwrap());
        spec.stability = policy;
        run_spectra(&spec).unwrap()
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(1.0), "1.00000000e0");
        assert_eq!(fmt_num(-0.000123456789123), "-1.23456789e-4");
        assert_eq!(fmt_num(1.0).parse::<f64>().unwrap(), 1.0);
    }

    #[test]
    fn spectrum_roundtrip_schema() {
        for policy in [StabilityPolicy::Gap, StabilityPolicy::Annotate] {
            let set = small_set(policy);
            let mut buf = Vec::new();
            write_spectrum_csv(&mut buf, &set).unwrap();
            let text = String::from_utf8(buf).unwrap();
            assert_eq!(validate_spectrum_csv(&text).unwrap(), 22);
            let (x, _) = read_spectrum_mu(&text).unwrap();
            let expect = if policy == StabilityPolicy::Gap {
                11
            } else {
                22
            };
            assert_eq!(x.len(), expect);
        }
    }

    #[test]
    fn schema_rejections() {
        assert!(validate_spectrum_csv("").is_err());
        assert!(validate_spectrum_csv("delta_norm,mu\n1,2\n").is_err());
        let header = SPECTRUM_COLUMNS.join(",");
        assert!(validate_spectrum_csv(&format!("{header}\n1,2,3\n")).is_err());
        assert!(validate_spectrum_csv(&format!("{header}\n1,x,,,,,,\n")).is_err());
        assert!(validate_spectrum_csv(&format!("{header}\n,1,,,,,,\n")).is_err());
        assert_eq!(
            validate_spectrum_csv(&format!("{header}\n1,,,,,,,\n")).unwrap(),
            1
        );
    }

    #[test]
    fn grid_layout() {
        let mut spec = SweepSpec::new(
            SystemParams::figure_base(1.0, 0.0),
            Axis::linspace(Param::DeltaBar, -0.1, 0.1, 3).unwrap(),
            Observable::Mu,
        );
        spec.axis2 = Some(Axis::list(Param::G, vec![0.0, 0.05, 0.5]).unwrap());
        let r = run_sweep(&spec).unwrap();
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let g = read_grid_csv(&text).unwrap();
        assert_eq!(g.corner, "g\\delta_bar");
        assert_eq!(g.axis1, spec.axis1.values);
        assert_eq!(g.axis2, vec![0.0, 0.05, 0.5]);
        // g = 0.5 is past the spring threshold: empty cells
        assert!(g.values[6..].iter().all(Option::is_none));
        assert!(g.values[..6].iter().all(Option::is_some));
        assert!(text.lines().nth(3).unwrap().ends_with(",,,"));
    }

    #[test]
    fn refuses_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        write_json(&p, &1, false).unwrap();
        assert!(matches!(write_json(&p, &2, false), Err(Error::Config(_))));
        write_json(&p, &2, true).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap().trim(), "2");
    }
}
