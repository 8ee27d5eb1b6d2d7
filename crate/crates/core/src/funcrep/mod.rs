//! Piecewise-multilinear functions on rectilinear grids over `[0,1]^d`.
//!
//! A [`SampledFunction`] stores `R^m` values at every knot tuple of a
//! product grid and interpolates multilinearly in between. Perturbation
//! candidates and adversary outputs are all of this form.

mod format;

use crate::field::VectorField;
use crate::modulus::dist;
use crate::{Error, Result};

pub use format::{read_function_file, write_function_file};

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    knots: Vec<Vec<f64>>,
    m: usize,
    /// Row-major over knot tuples (first axis slowest), `m` values per tuple.
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(knots: Vec<Vec<f64>>, m: usize, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidGrid("domain dimension must be positive".into()));
        }
        if m == 0 {
            return Err(Error::InvalidGrid("codomain dimension must be positive".into()));
        }
        for (axis, k) in knots.iter().enumerate() {
            validate_knots(axis, k)?;
        }
        let tuples: usize = knots.iter().map(Vec::len).product();
        if values.len() != tuples * m {
            return Err(Error::InvalidGrid(format!(
                "expected {} values ({} knot tuples x m={}), got {}",
                tuples * m,
                tuples,
                m,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("values must be finite".into()));
        }
        Ok(SampledFunction { knots, m, values })
    }

    /// Samples `f` at every knot tuple.
    pub fn from_fn<F>(knots: Vec<Vec<f64>>, m: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut values = Vec::new();
        for x in TupleIter::new(&knots) {
            let v = f(&x);
            if v.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "sampler returned {} components, expected {m}",
                    v.len()
                )));
            }
            values.extend(v);
        }
        SampledFunction::new(knots, m, values)
    }

    pub fn from_fn_1d<F: Fn(f64) -> f64>(knots: &[f64], f: F) -> Result<Self> {
        SampledFunction::new(vec![knots.to_vec()], 1, knots.iter().map(|&x| f(x)).collect())
    }

    /// Samples any evaluator on the given grid.
    pub fn sample<F: VectorField + ?Sized>(field: &F, knots: Vec<Vec<f64>>) -> Result<Self> {
        if field.dim_in() != knots.len() {
            return Err(Error::DimensionMismatch(format!(
                "field has d={}, grid has {} axes",
                field.dim_in(),
                knots.len()
            )));
        }
        let mut values = Vec::new();
        for x in TupleIter::new(&knots) {
            values.extend(field.eval(&x)?);
        }
        SampledFunction::new(knots, field.dim_out(), values)
    }

    pub fn d(&self) -> usize {
        self.knots.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn knots(&self) -> &[Vec<f64>] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values at knot tuple `idx`.
    pub fn value_at(&self, idx: &[usize]) -> &[f64] {
        let flat = self.flat_index(idx);
        &self.values[flat * self.m..(flat + 1) * self.m]
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.knots)
            .fold(0, |acc, (&i, k)| acc * k.len() + i)
    }

    /// Every knot tuple with its values, in storage order.
    pub fn grid_points(&self) -> impl Iterator<Item = (Vec<f64>, &[f64])> + '_ {
        TupleIter::new(&self.knots)
            .zip(self.values.chunks(self.m))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, function has d={}",
                x.len(),
                self.d()
            )));
        }
        if x.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
            return Err(Error::Domain(format!("point {x:?} outside [0,1]^{}", self.d())));
        }
        let cells: Vec<(usize, f64)> = x
            .iter()
            .zip(&self.knots)
            .map(|(&c, k)| locate(k, c))
            .collect();
        let d = self.d();
        let mut out = vec![0.0; self.m];
        let mut idx = vec![0usize; d];
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            for (axis, &(i, t)) in cells.iter().enumerate() {
                if corner >> axis & 1 == 1 {
                    w *= t;
                    idx[axis] = i + 1;
                } else {
                    w *= 1.0 - t;
                    idx[axis] = i;
                }
            }
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.value_at(&idx)) {
                *o += w * v;
            }
        }
        Ok(out)
    }

    /// Same interpolant represented on a finer grid; every original knot must
    /// appear in `knots`.
    pub fn refine_onto(&self, knots: Vec<Vec<f64>>) -> Result<Self> {
        if knots.len() != self.d() {
            return Err(Error::DimensionMismatch("refinement grid has wrong dimension".into()));
        }
        SampledFunction::sample(self, knots)
    }

    /// Applies `f` to every stored value.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        SampledFunction {
            knots: self.knots.clone(),
            m: self.m,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Keeps components `range` of the codomain.
    pub fn components(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.m || range.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "component range {range:?} invalid for m={}",
                self.m
            )));
        }
        let values = self
            .values
            .chunks(self.m)
            .flat_map(|c| c[range.clone()].iter().copied())
            .collect();
        SampledFunction::new(self.knots.clone(), range.len(), values)
    }
}

impl VectorField for SampledFunction {
    fn dim_in(&self) -> usize {
        self.d()
    }
    fn dim_out(&self) -> usize {
        self.m
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.evaluate(x)
    }
}

fn validate_knots(axis: usize, k: &[f64]) -> Result<()> {
    if k.len() < 2 {
        return Err(Error::InvalidGrid(format!("axis {axis} needs at least two knots")));
    }
    if k[0] != 0.0 || k[k.len() - 1] != 1.0 {
        return Err(Error::InvalidGrid(format!("axis {axis} knots must start at 0 and end at 1")));
    }
    if k.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(format!("axis {axis} knots must be strictly increasing")));
    }
    Ok(())
}

/// Cell index `i` with `k[i] <= x <= k[i+1]` and the local coordinate.
fn locate(k: &[f64], x: f64) -> (usize, f64) {
    let i = k.partition_point(|&v| v <= x).clamp(1, k.len() - 1) - 1;
    let t = (x - k[i]) / (k[i + 1] - k[i]);
    (i, t.clamp(0.0, 1.0))
}

/// Lexicographic iteration over knot tuples, first axis slowest.
struct TupleIter<'a> {
    knots: &'a [Vec<f64>],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> TupleIter<'a> {
    fn new(knots: &'a [Vec<f64>]) -> Self {
        TupleIter {
            knots,
            idx: vec![0; knots.len()],
            done: knots.iter().any(Vec::is_empty),
        }
    }
}

impl Iterator for TupleIter<'_> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.done {
            return None;
        }
        let out = self
            .idx
            .iter()
            .zip(self.knots)
            .map(|(&i, k)| k[i])
            .collect();
        let mut axis = self.knots.len();
        loop {
            if axis == 0 {
                self.done = true;
                break;
            }
            axis -= 1;
            self.idx[axis] += 1;
            if self.idx[axis] < self.knots[axis].len() {
                break;
            }
            self.idx[axis] = 0;
        }
        Some(out)
    }
}

pub(crate) fn merge_knots(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b).copied().collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Sup-norm distance between two interpolants.
///
/// Exact in `d = 1`: the difference is linear between merged knots and its
/// norm is convex there, so the maximum sits on a knot. For `d >= 2` the
/// merged knots and all cell midpoints are sampled, which gives a lower
/// estimate.
pub fn sup_distance(h1: &SampledFunction, h2: &SampledFunction) -> Result<f64> {
    if h1.d() != h2.d() || h1.m() != h2.m() {
        return Err(Error::DimensionMismatch(format!(
            "(d, m) = ({}, {}) vs ({}, {})",
            h1.d(),
            h1.m(),
            h2.d(),
            h2.m()
        )));
    }
    let axes: Vec<Vec<f64>> = h1
        .knots
        .iter()
        .zip(&h2.knots)
        .map(|(a, b)| {
            let merged = merge_knots(a, b);
            if h1.d() == 1 {
                return merged;
            }
            let mids: Vec<f64> = merged.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            merge_knots(&merged, &mids)
        })
        .collect();
    let mut best = 0.0_f64;
    for x in TupleIter::new(&axes) {
        best = best.max(dist(&h1.evaluate(&x)?, &h2.evaluate(&x)?));
    }
    Ok(best)
}

/// Cardinality of a zero set as a point count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cardinality {
    Finite(usize),
    Infinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSetSummary {
    /// Connected components as closed parameter intervals; isolated zeros
    /// have `start == end`.
    pub components: Vec<(f64, f64)>,
    pub has_flat_zero_interval: bool,
}

impl ZeroSetSummary {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// `H^0` of the zero set: infinite as soon as one component is an interval.
    pub fn cardinality(&self) -> Cardinality {
        if self.has_flat_zero_interval {
            Cardinality::Infinite
        } else {
            Cardinality::Finite(self.components.len())
        }
    }
}

/// Connected components of `{x : h(x) = 0}` for a scalar function on `[0,1]`.
pub fn count_zero_components(h: &SampledFunction) -> Result<ZeroSetSummary> {
    require_scalar_1d(h)?;
    let x = &h.knots[0];
    let v = &h.values;
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut push = |a: f64, b: f64| match pieces.last_mut() {
        Some(last) if a <= last.1 => last.1 = last.1.max(b),
        _ => pieces.push((a, b)),
    };
    for i in 0..x.len() {
        if v[i] == 0.0 {
            push(x[i], x[i]);
        }
        if i + 1 == x.len() {
            break;
        }
        let (a, b) = (v[i], v[i + 1]);
        if a == 0.0 && b == 0.0 {
            push(x[i], x[i + 1]);
        } else if (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) {
            let root = x[i] + (x[i + 1] - x[i]) * (a / (a - b));
            let root = root.clamp(x[i], x[i + 1]);
            push(root, root);
        }
    }
    let has_flat_zero_interval = pieces.iter().any(|&(a, b)| b > a);
    Ok(ZeroSetSummary {
        components: pieces,
        has_flat_zero_interval,
    })
}

/// Replaces every knot value with `|value| < eta` by `+eta`.
pub fn nudge_knot_zeros(h: &SampledFunction, eta: f64) -> Result<SampledFunction> {
    require_scalar_1d(h)?;
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    Ok(h.map_values(|v| if v.abs() < eta { eta } else { v }))
}

fn require_scalar_1d(h: &SampledFunction) -> Result<()> {
    if h.d() != 1 || h.m() != 1 {
        return Err(Error::UnsupportedShape {
            expected_d: 1,
            expected_m: 1,
            d: h.d(),
            m: h.m(),
        });
    }
    Ok(())
}
