//! Moduli of continuity and their generalized inverses.
//!
//! A modulus is either the power law `lambda * s^alpha` or a tabulated
//! curve with linear interpolation between breakpoints. Tables are not
//! required to be concave at construction; [`check_modulus_axioms`] reports
//! which axioms hold on a test grid.

use std::path::Path;

use crate::error::invalid;
use crate::funcrep::SampledFunction;
use crate::{Error, Result};

/// Absolute slack used by the axiom checks.
pub const AXIOM_TOLERANCE: f64 = 1e-12;

/// Relative width at which table inversion stops bisecting.
pub const INVERSE_REL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum ModulusSpec {
    /// `lambda * s^alpha` with `lambda > 0`, `0 < alpha <= 1`.
    Power { lambda: f64, alpha: f64 },
    /// Breakpoints `(delta, value)` with strictly increasing `delta >= 0`.
    /// Below the first breakpoint the curve interpolates from `(0, 0)`;
    /// past the last one it stays flat.
    Table(Vec<(f64, f64)>),
}

impl ModulusSpec {
    pub fn power(lambda: f64, alpha: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
        }
        Ok(ModulusSpec::Power { lambda, alpha })
    }

    /// The identity modulus `s -> s`.
    pub fn lipschitz() -> Self {
        ModulusSpec::Power {
            lambda: 1.0,
            alpha: 1.0,
        }
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("table", "needs at least one breakpoint"));
        }
        for (i, &(d, v)) in points.iter().enumerate() {
            if !(d.is_finite() && v.is_finite()) || d < 0.0 || v < 0.0 {
                return Err(invalid(
                    "table",
                    format!("breakpoint {i} ({d}, {v}) must be finite and nonnegative"),
                ));
            }
            if i > 0 && d <= points[i - 1].0 {
                return Err(invalid("table", "breakpoints must be strictly increasing in delta"));
            }
        }
        Ok(ModulusSpec::Table(points))
    }

    /// Reads a two-column `delta value` text file. Blank lines and `#`
    /// comments are skipped.
    pub fn table_from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::table_from_str(&text)
    }

    pub fn table_from_str(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    reason: format!("expected 2 columns, found {}", cols.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    reason: e.to_string(),
                })
            };
            points.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::table(points)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("modulus argument must be >= 0, got {s}")));
        }
        Ok(self.eval_unchecked(s))
    }

    /// Evaluation without the domain check; `s` must be nonnegative.
    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match self {
            ModulusSpec::Power { lambda, alpha } => {
                if s == 0.0 {
                    0.0
                } else if *alpha == 1.0 {
                    lambda * s
                } else {
                    lambda * s.powf(*alpha)
                }
            }
            ModulusSpec::Table(points) => table_eval(points, s),
        }
    }

    /// `sup beta`; the inverse is `+inf` at and above this level.
    pub fn saturation(&self) -> f64 {
        match self {
            ModulusSpec::Power { .. } => f64::INFINITY,
            ModulusSpec::Table(points) => points.iter().map(|p| p.1).fold(0.0, f64::max),
        }
    }

    pub fn inverse(&self) -> InverseModulus {
        InverseModulus {
            source: self.clone(),
            saturation: self.saturation(),
        }
    }
}

fn table_eval(points: &[(f64, f64)], s: f64) -> f64 {
    let (mut x0, mut y0) = (0.0, 0.0);
    for &(x1, y1) in points {
        if s <= x1 {
            if x1 == x0 {
                return y1;
            }
            let t = (s - x0) / (x1 - x0);
            return y0 + t * (y1 - y0);
        }
        x0 = x1;
        y0 = y1;
    }
    y0
}

/// `Psi(s) = sup { delta : beta(delta) <= s }` for a fixed modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseModulus {
    pub source: ModulusSpec,
    /// Level at and above which the inverse is `+inf`.
    pub saturation: f64,
}

impl InverseModulus {
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("inverse modulus argument must be >= 0, got {s}")));
        }
        Ok(self.eval_unchecked(s))
    }

    fn eval_unchecked(&self, s: f64) -> f64 {
        match &self.source {
            ModulusSpec::Power { lambda, alpha } => {
                if s == 0.0 {
                    0.0
                } else if *alpha == 1.0 {
                    s / lambda
                } else {
                    (s / lambda).powf(1.0 / alpha)
                }
            }
            ModulusSpec::Table(points) => {
                if s >= self.saturation || s >= points[points.len() - 1].1 {
                    return f64::INFINITY;
                }
                if table_eval(points, 0.0) > s {
                    return 0.0;
                }
                let (mut lo, mut hi) = (0.0_f64, points[points.len() - 1].0);
                while hi - lo > INVERSE_REL_TOLERANCE * hi {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if table_eval(points, mid) <= s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }
}

pub fn eval_modulus(beta: &ModulusSpec, s: f64) -> Result<f64> {
    beta.eval(s)
}

pub fn inverse_modulus(beta: &ModulusSpec, s: f64) -> Result<f64> {
    beta.inverse().eval(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub monotone: bool,
    pub subadditive: bool,
    pub vanishes_at_zero: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.monotone && self.subadditive && self.vanishes_at_zero
    }
}

/// Checks monotonicity on consecutive grid points, subadditivity on every
/// grid pair and `beta(0) = 0`, each within [`AXIOM_TOLERANCE`].
pub fn check_modulus_axioms(beta: &ModulusSpec, grid: &[f64]) -> AxiomReport {
    let values: Vec<f64> = grid.iter().map(|&s| beta.eval_unchecked(s.max(0.0))).collect();
    let monotone = values
        .windows(2)
        .all(|w| w[1] >= w[0] - AXIOM_TOLERANCE);
    let mut subadditive = true;
    'outer: for (i, &a) in grid.iter().enumerate() {
        for (j, &b) in grid.iter().enumerate().skip(i) {
            if beta.eval_unchecked(a + b) > values[i] + values[j] + AXIOM_TOLERANCE {
                subadditive = false;
                break 'outer;
            }
        }
    }
    let vanishes_at_zero = beta.eval_unchecked(0.0).abs() <= AXIOM_TOLERANCE;
    AxiomReport {
        monotone,
        subadditive,
        vanishes_at_zero,
    }
}

/// `omega_h(delta)` restricted to pairs of grid points.
///
/// Exact for piecewise-linear `h` in one dimension. For `d >= 2` it is a
/// lower estimate of the supremum over the multilinear interpolant.
pub fn minimal_modulus(h: &SampledFunction, delta: f64) -> Result<f64> {
    let diameter = (h.d() as f64).sqrt();
    if !(delta >= 0.0 && delta <= diameter) {
        return Err(Error::Domain(format!(
            "delta must lie in [0, {diameter}], got {delta}"
        )));
    }
    let points: Vec<(Vec<f64>, &[f64])> = h.grid_points().collect();
    let mut best = 0.0_f64;
    for (i, (x, hx)) in points.iter().enumerate() {
        for (y, hy) in points.iter().skip(i + 1) {
            if dist(x, y) <= delta {
                best = best.max(dist(hx, hy));
            }
        }
    }
    Ok(best)
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
