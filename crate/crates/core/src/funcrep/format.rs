//! Plain-text function files.
//!
//! ```text
//! d m
//! x1 .. xd v1 .. vm     one line per knot tuple, lexicographic in the knots
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{SampledFunction, TupleIter};
use crate::{Error, Result};

pub(crate) fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl SampledFunction {
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.d(), self.m());
        for (x, v) in self.grid_points() {
            let cols: Vec<String> = x.iter().chain(v).map(|&c| fmt_f64(c)).collect();
            let _ = writeln!(out, "{}", cols.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing `d m` header".into(),
        })?;
        let dims = parse_row(hline, header)?;
        if dims.len() != 2 || dims.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
            return Err(Error::Parse {
                line: hline,
                reason: "header must be two positive integers `d m`".into(),
            });
        }
        let (d, m) = (dims[0] as usize, dims[1] as usize);

        let mut rows = Vec::new();
        for (lineno, line) in lines {
            let row = parse_row(lineno, line)?;
            if row.len() != d + m {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("expected {} columns, found {}", d + m, row.len()),
                });
            }
            rows.push((lineno, row));
        }

        let mut knots: Vec<Vec<f64>> = vec![Vec::new(); d];
        for (_, row) in &rows {
            for (axis, k) in knots.iter_mut().enumerate() {
                k.push(row[axis]);
            }
        }
        for k in &mut knots {
            k.sort_by(f64::total_cmp);
            k.dedup();
        }
        let expected: usize = knots.iter().map(Vec::len).product();
        if expected != rows.len() {
            return Err(Error::InvalidGrid(format!(
                "{} rows do not form a full product grid of {} tuples",
                rows.len(),
                expected
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * m);
        for (tuple, (lineno, row)) in TupleIter::new(&knots).zip(&rows) {
            if tuple.as_slice() != &row[..d] {
                return Err(Error::Parse {
                    line: *lineno,
                    reason: format!("knot tuple {:?} out of lexicographic order", &row[..d]),
                });
            }
            values.extend_from_slice(&row[d..]);
        }
        SampledFunction::new(knots, m, values)
    }
}

fn parse_row(lineno: usize, line: &str) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                reason: format!("`{t}`: {e}"),
            })
        })
        .collect()
}

pub fn read_function_file(path: impl AsRef<Path>) -> Result<SampledFunction> {
    SampledFunction::from_text(&std::fs::read_to_string(path)?)
}

pub fn write_function_file(path: impl AsRef<Path>, h: &SampledFunction) -> Result<()> {
    std::fs::write(path, h.to_text())?;
    Ok(())
}
