//! CSV artifacts. Every float is written with 17 significant digits so
//! that re-parsing reproduces the value exactly.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::density::DensityTable;
use crate::diagram::CoexistenceCurve;
use crate::error::{Error, Result};
use crate::zeros::{MatchReport, Method, Zero, ZeroSet};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, line: u64) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Table(format!("line {line}: '{s}' is not a number")))
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub const ZERO_COLUMNS: [&str; 5] = ["re_z", "im_z", "multiplicity", "residual", "method"];

pub fn write_zeros_csv<W: Write>(w: W, zeros: &[Zero]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(ZERO_COLUMNS)?;
    for z in zeros {
        out.write_record([
            fmt_f64(z.z.re),
            fmt_f64(z.z.im),
            z.multiplicity.to_string(),
            fmt_f64(z.residual),
            z.method.as_str().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_zeros_csv<R: Read>(r: R) -> Result<Vec<Zero>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(ZERO_COLUMNS) {
        return Err(Error::Table(format!("unexpected zero CSV header {header:?}")));
    }
    let mut zeros = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let method = match &rec[4] {
            "brute_force" => Method::BruteForce,
            "two_phase_eq" => Method::TwoPhaseEq,
            "multipoint_eq" => Method::MultipointEq,
            other => return Err(Error::Table(format!("line {line}: unknown method '{other}'"))),
        };
        zeros.push(Zero {
            z: Complex64::new(parse_f64(&rec[0], line)?, parse_f64(&rec[1], line)?),
            multiplicity: rec[2]
                .parse()
                .map_err(|_| Error::Table(format!("line {line}: bad multiplicity '{}'", &rec[2])))?,
            residual: parse_f64(&rec[3], line)?,
            method,
        });
    }
    Ok(zeros)
}

pub const CURVE_COLUMNS: [&str; 7] = ["t", "re_z", "im_z", "re_vm", "im_vm", "re_vn", "im_vn"];

pub fn write_curve_csv<W: Write>(w: W, curve: &CoexistenceCurve) -> Result<()> {
    let mut out = writer(w);
    out.write_record(CURVE_COLUMNS)?;
    for s in &curve.samples {
        out.write_record(
            [s.t, s.z.re, s.z.im, s.v_m.re, s.v_m.im, s.v_n.re, s.v_n.im].map(fmt_f64),
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a numeric CSV with a header row into rows of floats.
pub fn read_numeric_csv<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push(rec.iter().map(|s| parse_f64(s, line)).collect::<Result<Vec<_>>>()?);
    }
    Ok((header, rows))
}

pub const DENSITY_COLUMNS: [&str; 10] = [
    "epsilon",
    "L",
    "N",
    "count",
    "predicted_count",
    "empirical",
    "theoretical",
    "abs_error",
    "envelope",
    "warning",
];

pub fn write_density_csv<W: Write>(w: W, table: &DensityTable) -> Result<()> {
    let mut out = writer(w);
    out.write_record(DENSITY_COLUMNS)?;
    for r in &table.rows {
        out.write_record([
            fmt_f64(r.epsilon),
            r.l.to_string(),
            r.volume.to_string(),
            r.count.to_string(),
            r.predicted_count.to_string(),
            fmt_f64(r.empirical),
            fmt_f64(r.theoretical),
            fmt_f64(r.abs_error),
            fmt_f64(r.envelope),
            r.warning.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub const MATCH_COLUMNS: [&str; 6] = ["re_pred", "im_pred", "re_loc", "im_loc", "distance", "tolerance"];

/// One row per matched pair; `report` must come from matching `predicted`
/// against `located`.
pub fn write_matches_csv<W: Write>(w: W, report: &MatchReport, predicted: &ZeroSet, located: &ZeroSet) -> Result<()> {
    let mut out = writer(w);
    out.write_record(MATCH_COLUMNS)?;
    for p in &report.pairs {
        let a = predicted.zeros[p.predicted].z;
        let b = located.zeros[p.located].z;
        out.write_record([a.re, a.im, b.re, b.im, p.distance, p.tolerance].map(fmt_f64))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_points_csv<W: Write>(w: W, points: &[Complex64]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["re_z", "im_z"])?;
    for p in points {
        out.write_record([fmt_f64(p.re), fmt_f64(p.im)])?;
    }
    out.flush()?;
    Ok(())
}
