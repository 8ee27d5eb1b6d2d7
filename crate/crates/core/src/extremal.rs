//! Exact evaluation of the multi-scale extremal function.
//!
//! Level `n` occupies `[s_n, s_{n+1})` with `s_n = 1 - 2^(1-n)` and carries a
//! train of `2^(n^2)` odd bumps of period `4 l_n`, `l_n = 2^(-n^2-n-2)`.
//! Each bump rises as `beta(t)/2` to its peak at `t = l_n`, falls back to
//! zero at `2 l_n` and repeats with the opposite sign on `[2 l_n, 4 l_n]`.
//! The profile `r` is the sum of all trains; since trains have disjoint
//! supports, `r(s)` only needs the level containing `s`.
//!
//! Every level start and offset is dyadic, so locating the level, the bump
//! index and the local coordinate involves no rounding at all.

use crate::dyadic::Dyadic;
use crate::field::VectorField;
use crate::funcrep::SampledFunction;
use crate::modulus::ModulusSpec;
use crate::{Error, Result};

/// Deepest level the evaluator resolves; points beyond it evaluate to 0.
pub const MAX_LEVEL: u32 = 30;

/// `2^e` for exponents in the normal `f64` range.
pub(crate) fn exp2i(e: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// Exponent of `l_n`, i.e. `-(n^2 + n + 2)`.
pub(crate) fn ell_exponent(n: u32) -> i32 {
    let n = n as i32;
    -(n * n + n + 2)
}

/// `l_n = 2^(-n^2-n-2)` as a float (exact).
pub fn ell(n: u32) -> f64 {
    exp2i(ell_exponent(n))
}

/// `s_n = 1 - 2^(1-n)` as a float (exact for every level up to the cap).
pub fn level_start(n: u32) -> f64 {
    1.0 - exp2i(1 - n as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelSchedule {
    pub n: u32,
    pub start: Dyadic,
    pub ell: Dyadic,
    /// `log2` of the number of bumps in the train.
    pub bump_count_log2: u32,
    pub train_width: Dyadic,
}

impl LevelSchedule {
    /// `2^(n^2)`, when it fits.
    pub fn bump_count(&self) -> Option<u128> {
        1u128.checked_shl(self.bump_count_log2)
    }

    pub fn start_f64(&self) -> f64 {
        self.start.to_f64()
    }

    pub fn ell_f64(&self) -> f64 {
        self.ell.to_f64()
    }

    /// `s_{n+1}`.
    pub fn end(&self) -> Dyadic {
        self.start
            .checked_add(self.train_width)
            .expect("level end fits in the dyadic mantissa")
    }
}

pub fn level_params(n: u32) -> Result<LevelSchedule> {
    if !(1..=MAX_LEVEL).contains(&n) {
        return Err(Error::LevelOutOfRange(n));
    }
    let start = Dyadic::from_int(1)
        .checked_sub(Dyadic::pow2(1 - n as i32))
        .expect("level start fits");
    Ok(LevelSchedule {
        n,
        start,
        ell: Dyadic::pow2(ell_exponent(n)),
        bump_count_log2: n * n,
        train_width: Dyadic::pow2(-(n as i32)),
    })
}

/// The odd bump `c_n`, supported on `[0, 4 l_n]`.
pub fn bump(beta: &ModulusSpec, n: u32, t: f64) -> f64 {
    let l = ell(n);
    bump_with_ell(beta, l, t)
}

fn bump_with_ell(beta: &ModulusSpec, l: f64, t: f64) -> f64 {
    if !(0.0..=4.0 * l).contains(&t) {
        return 0.0;
    }
    if t > 2.0 * l {
        return -half_bump(beta, l, 4.0 * l - t);
    }
    half_bump(beta, l, t)
}

/// Positive half on `[0, 2 l]`.
fn half_bump(beta: &ModulusSpec, l: f64, t: f64) -> f64 {
    if t < l {
        0.5 * beta.eval_unchecked(t)
    } else {
        0.5 * beta.eval_unchecked(2.0 * l - t)
    }
}

/// Value of `r` together with whether the point was resolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RSample {
    pub value: f64,
    /// Level containing the point, `None` at `s = 1` or beyond the level cap.
    pub level: Option<u32>,
    /// False when `s` lies past level [`MAX_LEVEL`] and was evaluated as 0.
    pub resolved: bool,
}

/// Level `n` with `s_n <= s < s_{n+1}`; `None` past the cap or at `s = 1`.
pub fn level_of(s: f64) -> Option<u32> {
    (1..=MAX_LEVEL).find(|&n| s < 1.0 - exp2i(-(n as i32)))
}

pub fn eval_r_flagged(beta: &ModulusSpec, s: f64) -> Result<RSample> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("r is defined on [0,1], got {s}")));
    }
    if s == 1.0 {
        return Ok(RSample {
            value: 0.0,
            level: None,
            resolved: true,
        });
    }
    match level_of(s) {
        Some(n) => Ok(RSample {
            value: train_value(beta, n, s),
            level: Some(n),
            resolved: true,
        }),
        None => Ok(RSample {
            value: 0.0,
            level: None,
            resolved: false,
        }),
    }
}

pub fn eval_r(beta: &ModulusSpec, s: f64) -> Result<f64> {
    eval_r_flagged(beta, s).map(|r| r.value)
}

/// The train `u_n(s)` of a single level, zero off `[s_n, s_{n+1}]`.
pub fn level_train(beta: &ModulusSpec, n: u32, s: f64) -> f64 {
    let start = level_start(n);
    if s < start || s > start + exp2i(-(n as i32)) {
        return 0.0;
    }
    train_value(beta, n, s)
}

fn train_value(beta: &ModulusSpec, n: u32, s: f64) -> f64 {
    let l = ell(n);
    let period = 4.0 * l;
    // s - s_n is exact (Sterbenz for n >= 2, trivial for n = 1) and so is
    // the reduction modulo a power of two.
    let t = s - level_start(n);
    let k = (t / period).floor();
    let max_k = exp2i((n * n) as i32) - 1.0;
    let k = k.min(max_k);
    bump_with_ell(beta, l, t - k * period)
}

/// `x -> (0,...,0, r(x_1)/sqrt(q), ..., r(x_q)/sqrt(q))` on `[0,1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalFunction {
    pub beta: ModulusSpec,
    pub d: usize,
    /// Number of active coordinates (codimension).
    pub q: usize,
    /// Leading zero components.
    pub p: usize,
}

impl ExtremalFunction {
    pub fn new(beta: ModulusSpec, d: usize, q: usize, p: usize) -> Result<Self> {
        if d == 0 {
            return Err(crate::error::invalid("d", "must be positive"));
        }
        if q == 0 || q > d {
            return Err(crate::error::invalid(
                "q",
                format!("active dimension must satisfy 1 <= q <= d, got q={q}, d={d}"),
            ));
        }
        Ok(ExtremalFunction { beta, d, q, p })
    }

    /// Scalar function on `[0,1]`.
    pub fn scalar(beta: ModulusSpec) -> Self {
        ExtremalFunction {
            beta,
            d: 1,
            q: 1,
            p: 0,
        }
    }

    pub fn m(&self) -> usize {
        self.p + self.q
    }

    /// Evaluates and reports whether every active coordinate was resolved.
    pub fn eval_flagged(&self, x: &[f64]) -> Result<(Vec<f64>, bool)> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, expected d={}",
                x.len(),
                self.d
            )));
        }
        if let Some(bad) = x.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::Domain(format!("coordinate {bad} outside [0,1]")));
        }
        let scale = 1.0 / (self.q as f64).sqrt();
        let mut out = vec![0.0; self.m()];
        let mut resolved = true;
        for i in 0..self.q {
            let r = eval_r_flagged(&self.beta, x[i])?;
            resolved &= r.resolved;
            out[self.p + i] = if self.q == 1 { r.value } else { r.value * scale };
        }
        Ok((out, resolved))
    }

    /// Uniform grid samples with the given step on every axis.
    pub fn sample(&self, step: f64) -> Result<SampledFunction> {
        SampledFunction::sample(self, vec![uniform_knots(step)?; self.d])
    }
}

impl VectorField for ExtremalFunction {
    fn dim_in(&self) -> usize {
        self.d
    }
    fn dim_out(&self) -> usize {
        self.m()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.eval_flagged(x).map(|(v, _)| v)
    }
}

pub fn eval_extremal(f: &ExtremalFunction, x: &[f64]) -> Result<Vec<f64>> {
    f.eval(x)
}

/// `0, step, 2 step, ..., 1`; the last cell is shortened when `1/step` is
/// not an integer.
pub fn uniform_knots(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Domain(format!("grid step must lie in (0, 1], got {step}")));
    }
    let n = (1.0 / step).ceil() as usize;
    let mut k: Vec<f64> = (0..n).map(|i| i as f64 * step).filter(|&x| x < 1.0).collect();
    k.push(1.0);
    Ok(k)
}
