//! Series CSV format: header `t,value`, 1-based consecutive time index,
//! shortest round-trip decimal values, gaps encoded as an empty value field
//! (accepted on input also as a case-insensitive NaN).

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::gaps::GappySeries;

pub fn write_series<W: Write>(series: &GappySeries, w: &mut W) -> Result<()> {
    writeln!(w, "t,value")?;
    for (i, (&v, &obs)) in series.values().iter().zip(series.observed()).enumerate() {
        if obs {
            writeln!(w, "{},{}", i + 1, v)?;
        } else {
            writeln!(w, "{},", i + 1)?;
        }
    }
    Ok(())
}

pub fn write_series_file(series: &GappySeries, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    write_series(series, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_series<R: Read>(r: R) -> Result<GappySeries> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(Error::parse("empty series file")),
    };
    if header.trim_start_matches('\u{feff}').trim() != "t,value" {
        return Err(Error::parse(format!("expected header 't,value', found '{}'", header.trim())));
    }
    let mut values = Vec::new();
    let mut observed = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let row = lineno + 2;
        if line.trim().is_empty() {
            continue;
        }
        let (t_str, v_str) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(format!("line {}: expected 't,value'", row)))?;
        let t: usize = t_str
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("line {}: bad time index '{}'", row, t_str.trim())))?;
        if t != values.len() + 1 {
            return Err(Error::parse(format!(
                "line {}: time index {} out of order (expected {})",
                row,
                t,
                values.len() + 1
            )));
        }
        let v_trim = v_str.trim();
        if v_trim.is_empty() || v_trim.eq_ignore_ascii_case("nan") {
            values.push(f64::NAN);
            observed.push(false);
        } else {
            let v: f64 = v_trim
                .parse()
                .map_err(|_| Error::parse(format!("line {}: bad value '{}'", row, v_trim)))?;
            values.push(v);
            observed.push(true);
        }
    }
    GappySeries::new(values, observed)
}

pub fn read_series_file(path: &Path) -> Result<GappySeries> {
    let file = std::fs::File::open(path)?;
    read_series(file)
}
