//! Dyadic budget sweeps and log-log slope fits.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::adversary::{adversary_upper_bound, theory_upper_curve};
use crate::certifier::{certify, CertifyOptions};
use crate::chart::Chart;
use crate::error::invalid;
use crate::extremal::ExtremalFunction;
use crate::modulus::ModulusSpec;
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "eps",
    "n0",
    "certified_lb",
    "paper_lb",
    "theory_lb",
    "adversary_ub",
    "theory_ub",
    "wall_ms",
];

/// Largest `j` accepted for `eps = 2^-j`.
pub const MAX_J: u32 = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub d: usize,
    pub m: usize,
    pub p: usize,
    pub j_min: u32,
    pub j_max: u32,
    /// Run the adversary with this `C`; needs `d = m = 1`, `p = 0`, `alpha = 1`
    /// and `lambda <= 1`.
    pub adversary_c: Option<f64>,
    pub c_w: f64,
    /// `||f||` in the upper curve; defaults to `lambda`.
    pub norm: Option<f64>,
    /// Chart carrying the flat model to `W`; flat when absent.
    pub chart: Option<Chart>,
}

impl SweepConfig {
    pub fn new(alpha: f64, lambda: f64, d: usize, m: usize, p: usize, j_min: u32, j_max: u32) -> Self {
        SweepConfig {
            alpha,
            lambda,
            d,
            m,
            p,
            j_min,
            j_max,
            adversary_c: None,
            c_w: 1.0,
            norm: None,
            chart: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda", format!("must be positive, got {}", self.lambda)));
        }
        if self.p >= self.m {
            return Err(invalid("p", format!("need m - p >= 1, got m={}, p={}", self.m, self.p)));
        }
        if self.d < self.m - self.p {
            return Err(invalid("d", format!("need d >= m - p = {}, got {}", self.m - self.p, self.d)));
        }
        if self.j_max > MAX_J {
            return Err(invalid("j_max", format!("must be at most {MAX_J}, got {}", self.j_max)));
        }
        if let Some(c) = self.adversary_c {
            if !(c > 0.0 && c <= 1.0) {
                return Err(invalid("adversary_c", format!("must lie in (0, 1], got {c}")));
            }
            if self.d != 1 || self.m != 1 || self.p != 0 || self.alpha != 1.0 || self.lambda > 1.0 {
                return Err(invalid(
                    "adversary_c",
                    "the adversary needs d = m = 1, p = 0, alpha = 1 and lambda <= 1",
                ));
            }
        }
        if !(self.c_w > 0.0 && self.c_w.is_finite()) {
            return Err(invalid("c_w", format!("must be positive, got {}", self.c_w)));
        }
        if let Some(chart) = &self.chart {
            if chart.dim != self.m {
                return Err(invalid("chart", format!("acts on R^{}, need m = {}", chart.dim, self.m)));
            }
        }
        if let Some(norm) = self.norm {
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(invalid("norm", format!("must be positive, got {norm}")));
            }
        }
        Ok(())
    }

    pub fn modulus(&self) -> Result<ModulusSpec> {
        ModulusSpec::power(self.lambda, self.alpha)
    }

    /// Budgets `2^-j` for `j = j_min..=j_max`; empty when `j_min > j_max`.
    pub fn eps_grid(&self) -> Vec<f64> {
        (self.j_min..=self.j_max).map(|j| (-(j as f64)).exp2()).collect()
    }
}

impl FromStr for SweepConfig {
    type Err = Error;

    /// `key = value` lines; `#` starts a comment. `alpha`, `lambda`, `d`,
    /// `m`, `p`, `j_min` and `j_max` are required; `adversary_c`, `c_w`,
    /// `norm`, `chart` and `r0` are optional.
    fn from_str(text: &str) -> Result<Self> {
        let mut alpha = None;
        let mut lambda = None;
        let mut d = None;
        let mut m = None;
        let mut p = None;
        let mut j_min = None;
        let mut j_max = None;
        let mut adversary_c = None;
        let mut c_w = None;
        let mut norm = None;
        let mut chart: Option<String> = None;
        let mut r0 = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |reason: String| Error::Parse { line: i + 1, reason };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
                value
                    .parse()
                    .map_err(|_| invalid(key, format!("cannot parse `{value}`")))
            }
            let seen = match key {
                "alpha" => alpha.replace(num::<f64>(key, value)?).is_some(),
                "lambda" => lambda.replace(num::<f64>(key, value)?).is_some(),
                "d" => d.replace(num::<usize>(key, value)?).is_some(),
                "m" => m.replace(num::<usize>(key, value)?).is_some(),
                "p" => p.replace(num::<usize>(key, value)?).is_some(),
                "j_min" => j_min.replace(num::<u32>(key, value)?).is_some(),
                "j_max" => j_max.replace(num::<u32>(key, value)?).is_some(),
                "adversary_c" => adversary_c.replace(num::<f64>(key, value)?).is_some(),
                "c_w" => c_w.replace(num::<f64>(key, value)?).is_some(),
                "norm" => norm.replace(num::<f64>(key, value)?).is_some(),
                "chart" => chart.replace(value.to_string()).is_some(),
                "r0" => r0.replace(num::<f64>(key, value)?).is_some(),
                _ => return Err(invalid(key, "unknown key")),
            };
            if seen {
                return Err(invalid(key, "given more than once"));
            }
        }
        fn need<T>(v: Option<T>, key: &str) -> Result<T> {
            v.ok_or_else(|| invalid(key, "missing"))
        }
        let m = need(m, "m")?;
        let chart = match (chart, r0) {
            (Some(spec), r0) => {
                let c = Chart::parse(&spec, m)?;
                Some(match r0 {
                    Some(r) => c.with_r0(r)?,
                    None => c,
                })
            }
            (None, Some(_)) => return Err(invalid("r0", "needs a chart")),
            (None, None) => None,
        };
        let config = SweepConfig {
            alpha: need(alpha, "alpha")?,
            lambda: need(lambda, "lambda")?,
            d: need(d, "d")?,
            m,
            p: need(p, "p")?,
            j_min: need(j_min, "j_min")?,
            j_max: need(j_max, "j_max")?,
            adversary_c,
            c_w: c_w.unwrap_or(1.0),
            norm,
            chart,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub eps: f64,
    pub n0: u32,
    pub certified_lb: u128,
    pub paper_lb: u128,
    pub theory_lb: f64,
    pub adversary_ub: Option<u128>,
    pub theory_ub: f64,
    pub wall_ms: u64,
}

fn sweep_row(config: &SweepConfig, f: &ExtremalFunction, eps: f64) -> Result<SweepRecord> {
    let start = Instant::now();
    let opts = CertifyOptions {
        chart: config.chart.as_ref(),
        ..CertifyOptions::default()
    };
    let cert = certify(f, eps, &opts)?;
    let adversary_ub = match config.adversary_c {
        Some(c) => adversary_upper_bound(f, eps, c)?.map(|n| n as u128),
        None => None,
    };
    let theory_ub = theory_upper_curve(
        config.norm.unwrap_or(config.lambda),
        eps,
        config.alpha,
        config.m,
        config.p,
        config.c_w,
    )?;
    Ok(SweepRecord {
        eps,
        n0: cert.n0,
        certified_lb: cert.certified_count,
        paper_lb: cert.paper_bound,
        theory_lb: cert.theory_bound,
        adversary_ub,
        theory_ub,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// One record per dyadic budget, computed in parallel and ordered by
/// decreasing `eps` (increasing `j`).
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let f = ExtremalFunction::new(config.modulus()?, config.d, config.m - config.p, config.p)?;
    let mut records = config
        .eps_grid()
        .into_par_iter()
        .map(|eps| sweep_row(config, &f, eps))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    Ok(records)
}

/// Runs the sweep and writes the CSV to `out`.
pub fn sweep(config: &SweepConfig, out: impl AsRef<Path>) -> Result<Vec<SweepRecord>> {
    let records = run_sweep(config)?;
    let file = std::fs::File::create(out)?;
    write_csv(&records, file)?;
    Ok(records)
}

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            fmt_real(r.eps),
            r.n0.to_string(),
            r.certified_lb.to_string(),
            r.paper_lb.to_string(),
            fmt_real(r.theory_lb),
            r.adversary_ub.map(|n| n.to_string()).unwrap_or_default(),
            fmt_real(r.theory_ub),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            reason: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let field = |k: usize| -> Result<&str> {
            row.get(k).ok_or_else(|| Error::Parse {
                line,
                reason: format!("missing column `{}`", CSV_HEADER[k]),
            })
        };
        fn parse<T: FromStr>(s: &str, line: usize, name: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse {
                line,
                reason: format!("bad {name} `{s}`"),
            })
        }
        let adv = field(5)?;
        out.push(SweepRecord {
            eps: parse(field(0)?, line, "eps")?,
            n0: parse(field(1)?, line, "n0")?,
            certified_lb: parse(field(2)?, line, "certified_lb")?,
            paper_lb: parse(field(3)?, line, "paper_lb")?,
            theory_lb: parse(field(4)?, line, "theory_lb")?,
            adversary_ub: if adv.is_empty() {
                None
            } else {
                Some(parse(adv, line, "adversary_ub")?)
            },
            theory_ub: parse(field(6)?, line, "theory_ub")?,
            wall_ms: parse(field(7)?, line, "wall_ms")?,
        });
    }
    Ok(out)
}

/// Numeric columns of a [`SweepRecord`] that [`fit_slope`] can fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    N0,
    CertifiedLb,
    PaperLb,
    TheoryLb,
    AdversaryUb,
    TheoryUb,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::N0 => "n0",
            Column::CertifiedLb => "certified_lb",
            Column::PaperLb => "paper_lb",
            Column::TheoryLb => "theory_lb",
            Column::AdversaryUb => "adversary_ub",
            Column::TheoryUb => "theory_ub",
        }
    }

    pub fn get(self, r: &SweepRecord) -> Option<f64> {
        match self {
            Column::N0 => Some(r.n0 as f64),
            Column::CertifiedLb => Some(r.certified_lb as f64),
            Column::PaperLb => Some(r.paper_lb as f64),
            Column::TheoryLb => Some(r.theory_lb),
            Column::AdversaryUb => r.adversary_ub.map(|n| n as f64),
            Column::TheoryUb => Some(r.theory_ub),
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Column::N0,
            Column::CertifiedLb,
            Column::PaperLb,
            Column::TheoryLb,
            Column::AdversaryUb,
            Column::TheoryUb,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| invalid("column", format!("unknown column `{s}`")))
    }
}

/// Least-squares slope of `log2(value)` against `log2(eps)` over the rows
/// with a positive value.
pub fn fit_slope(records: &[SweepRecord], column: Column) -> Result<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| {
            let v = column.get(r)?;
            (v > 0.0 && r.eps > 0.0).then(|| (r.eps.log2(), v.log2()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} positive values in `{column}`, need at least 3",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all rows share one eps".into()));
    }
    Ok(sxy / sxx)
}
