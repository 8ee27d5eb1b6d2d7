//! Piecewise-linear perturbations that remove zeros on `[0,1]`.
//!
//! All constructions assume the target `f` admits `beta(s) = s` (the caller's
//! claim; nothing here can check it from an evaluator) and return
//! [`SampledFunction`]s whose zero sets are then counted exactly.

use crate::error::invalid;
use crate::extremal::uniform_knots;
use crate::field::{scalar_at, VectorField};
use crate::funcrep::{
    count_zero_components, merge_knots, nudge_knot_zeros, sup_distance, Cardinality,
    SampledFunction,
};
use crate::{Error, Result};

/// Knot-value nudge applied by [`refine_interpolant`].
pub const NUDGE: f64 = 1e-12;

/// Sampling step for interval maxima, as a fraction of `eps`.
const ARGMAX_STEPS_PER_EPS: f64 = 64.0;

fn require_scalar<F: VectorField + ?Sized>(f: &F) -> Result<()> {
    if f.dim_in() != 1 || f.dim_out() != 1 {
        return Err(Error::UnsupportedShape {
            expected_d: 1,
            expected_m: 1,
            d: f.dim_in(),
            m: f.dim_out(),
        });
    }
    Ok(())
}

fn check_budget(eps: f64, c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid("C", format!("must lie in (0, 1], got {c}")));
    }
    if !(eps > 0.0 && eps <= c * c / 12.0) {
        return Err(invalid(
            "eps",
            format!("must lie in (0, C^2/12] = (0, {}], got {eps}", c * c / 12.0),
        ));
    }
    Ok(())
}

/// Uniform partition into `ceil(C / (3 eps))` intervals, each of length in
/// `[2 eps / C, 3 eps / C]`.
fn coarse_partition(eps: f64, c: f64) -> Vec<f64> {
    let k0 = (c / (3.0 * eps)).ceil() as usize;
    uniform_cells(k0)
}

fn uniform_cells(k: usize) -> Vec<f64> {
    (0..=k)
        .map(|i| if i == k { 1.0 } else { i as f64 / k as f64 })
        .collect()
}

/// Sampled `max |f|` on `[a, b]` and a point attaining it.
fn interval_argmax<F: VectorField + ?Sized>(f: &F, a: f64, b: f64, step: f64) -> Result<(f64, f64)> {
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let mut best = (a, scalar_at(f, a)?.abs());
    for j in 1..=n {
        let x = if j == n { b } else { a + j as f64 * step };
        let v = scalar_at(f, x)?.abs();
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok((best.0, best.1))
}

#[derive(Default)]
struct KnotBuilder {
    xs: Vec<f64>,
    vs: Vec<f64>,
}

impl KnotBuilder {
    fn push(&mut self, x: f64, v: f64) {
        if let Some(&last) = self.xs.last() {
            if x <= last {
                return;
            }
        }
        self.xs.push(x);
        self.vs.push(v);
    }

    fn finish(self) -> Result<SampledFunction> {
        SampledFunction::new(vec![self.xs], 1, self.vs)
    }
}

/// Output of [`flatten_perturbation`].
#[derive(Clone, Debug)]
pub struct Flattening {
    pub function: SampledFunction,
    /// Coarse partition `a_0 < ... < a_K0`.
    pub partition: Vec<f64>,
    /// Whether interval `i` was lifted to the `eps/2` plateau (otherwise it
    /// was interpolated).
    pub lifted: Vec<bool>,
    /// Subintervals per interpolated interval, `ceil(3/C)`.
    pub pieces_per_interval: usize,
}

impl Flattening {
    pub fn interpolated_count(&self) -> usize {
        self.lifted.iter().filter(|l| !**l).count()
    }

    /// `2 (K0 - |I|) + |I| (3/C + 1)`, the per-interval zero allowance.
    pub fn zero_allowance(&self, c: f64) -> f64 {
        let lifted = self.lifted.len() - self.interpolated_count();
        2.0 * lifted as f64 + self.interpolated_count() as f64 * (3.0 / c + 1.0)
    }
}

/// Lifts `f` to the plateau `eps/2` wherever `|f| <= eps/2` on a coarse
/// interval, and interpolates it linearly on pieces of length `<= eps`
/// elsewhere.
pub fn flatten_perturbation<F: VectorField + ?Sized>(f: &F, eps: f64, c: f64) -> Result<Flattening> {
    require_scalar(f)?;
    check_budget(eps, c)?;
    let partition = coarse_partition(eps, c);
    let k1 = (3.0 / c).ceil() as usize;
    let step = eps / ARGMAX_STEPS_PER_EPS;
    let half = 0.5 * eps;
    let mut out = KnotBuilder::default();
    let mut lifted = Vec::with_capacity(partition.len() - 1);
    for w in partition.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (_, peak) = interval_argmax(f, a, b, step)?;
        let (fa, fb) = (scalar_at(f, a)?, scalar_at(f, b)?);
        if peak <= half {
            // ramp up with slope 1, plateau, ramp down with slope -1
            out.push(a, fa);
            out.push(a + (half - fa), half);
            out.push(b - (half - fb), half);
            out.push(b, fb);
            lifted.push(true);
        } else {
            for j in 0..=k1 {
                let x = if j == k1 { b } else { a + (b - a) * j as f64 / k1 as f64 };
                out.push(x, scalar_at(f, x)?);
            }
            lifted.push(false);
        }
    }
    Ok(Flattening {
        function: out.finish()?,
        partition,
        lifted,
        pieces_per_interval: k1,
    })
}

/// Points where `|f| >= eps/2`, pairwise at least `2 eps / C` apart.
#[derive(Clone, Debug, PartialEq)]
pub struct PeakSet {
    pub points: Vec<f64>,
    /// `|f(y_i)|`.
    pub values: Vec<f64>,
    pub separation: f64,
    /// `C^2 / (18 eps)`, the count the contradiction hypothesis guarantees.
    pub target: f64,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn meets_target(&self) -> bool {
        self.len() as f64 >= self.target
    }
}

pub fn find_separated_peaks<F: VectorField + ?Sized>(f: &F, eps: f64, c: f64) -> Result<PeakSet> {
    require_scalar(f)?;
    check_budget(eps, c)?;
    let separation = 2.0 * eps / c;
    let step = eps / ARGMAX_STEPS_PER_EPS;
    let mut points: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for w in coarse_partition(eps, c).windows(2) {
        let (z, v) = interval_argmax(f, w[0], w[1], step)?;
        if v <= 0.5 * eps {
            continue;
        }
        // greedy, left to right: first point of each conflict wins
        if points.last().is_none_or(|&last| z - last >= separation) {
            points.push(z);
            values.push(v);
        }
    }
    Ok(PeakSet {
        points,
        values,
        separation,
        target: c * c / (18.0 * eps),
    })
}

/// Output of [`refine_interpolant`].
#[derive(Clone, Debug)]
pub struct Refinement {
    pub function: SampledFunction,
    /// `K_eps = ceil(4 / eps)` cells.
    pub cells: usize,
    /// Cells that contain at least one peak.
    pub peak_cells: Vec<usize>,
}

impl Refinement {
    /// `K_eps - N`: cells without a peak, each holding at most one zero.
    pub fn zero_budget(&self) -> usize {
        self.cells - self.peak_cells.len()
    }
}

/// Piecewise-linear interpolant of `f` on `ceil(4/eps)` uniform cells with
/// knot zeros nudged to `+1e-12`, so every cell holds at most one zero.
pub fn refine_interpolant<F: VectorField + ?Sized>(
    f: &F,
    eps: f64,
    peaks: &PeakSet,
) -> Result<Refinement> {
    require_scalar(f)?;
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    let cells = (4.0 / eps).ceil() as usize;
    let knots = uniform_cells(cells);
    let raw = SampledFunction::sample(f, vec![knots.clone()])?;
    let function = nudge_knot_zeros(&raw, NUDGE)?;
    let mut peak_cells: Vec<usize> = peaks
        .points
        .iter()
        .map(|&y| knots.partition_point(|&b| b <= y).clamp(1, cells) - 1)
        .collect();
    peak_cells.dedup();
    Ok(Refinement {
        function,
        cells,
        peak_cells,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImprovementStep {
    pub round: u32,
    /// Scale the peaks were extracted at, `eps0 / 4^(round-1)`.
    pub scale: f64,
    /// Budget achieved by the interpolant, `eps0 / 4^round`.
    pub eps: f64,
    pub peaks: usize,
    pub zero_count: Cardinality,
    /// `(1 - 7 C^2/36)^round * 4^round / eps0`.
    pub envelope: f64,
}

/// Repeats peak extraction and refinement at scales `eps0 / 4^k`.
pub fn iterate_improvement<F: VectorField + ?Sized>(
    f: &F,
    eps0: f64,
    c: f64,
    rounds: u32,
) -> Result<Vec<ImprovementStep>> {
    require_scalar(f)?;
    check_budget(eps0, c)?;
    if rounds == 0 {
        return Err(invalid("rounds", "must be at least 1"));
    }
    let shrink = 1.0 - 7.0 * c * c / 36.0;
    let mut out = Vec::with_capacity(rounds as usize);
    let mut scale = eps0;
    for round in 1..=rounds {
        let peaks = find_separated_peaks(f, scale, c)?;
        let refined = refine_interpolant(f, scale, &peaks)?;
        let zeros = count_zero_components(&refined.function)?;
        out.push(ImprovementStep {
            round,
            scale,
            eps: scale / 4.0,
            peaks: peaks.len(),
            zero_count: zeros.cardinality(),
            envelope: shrink.powi(round as i32) * 4f64.powi(round as i32) / eps0,
        });
        scale /= 4.0;
    }
    Ok(out)
}

/// `C_W (norm / eps)^((m - p) / alpha)`.
pub fn theory_upper_curve(norm: f64, eps: f64, alpha: f64, m: usize, p: usize, c_w: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    let exponent = m.saturating_sub(p) as f64 / alpha;
    Ok(c_w * (norm / eps).powf(exponent))
}

/// Sup distance between `h` and `f` sampled on `h`'s knots merged with a
/// uniform grid of the given step.
pub fn sampled_distance<F: VectorField + ?Sized>(f: &F, h: &SampledFunction, step: f64) -> Result<f64> {
    require_scalar(f)?;
    let knots = merge_knots(&h.knots()[0], &uniform_knots(step)?);
    let fs = SampledFunction::sample(f, vec![knots])?;
    sup_distance(&fs, h)
}

/// Fewest zeros among the constructions that stay within `eps` of `f`:
/// the refined interpolant at scale `4 eps` and, when `eps <= C^2/12`, the
/// flattening at `eps`. `None` when every candidate has a flat zero
/// interval.
pub fn adversary_upper_bound<F: VectorField + ?Sized>(f: &F, eps: f64, c: f64) -> Result<Option<usize>> {
    require_scalar(f)?;
    let empty = PeakSet {
        points: Vec::new(),
        values: Vec::new(),
        separation: 0.0,
        target: 0.0,
    };
    let mut best: Option<usize> = None;
    let mut consider = |card: Cardinality| {
        if let Cardinality::Finite(n) = card {
            best = Some(best.map_or(n, |b| b.min(n)));
        }
    };
    let refined = refine_interpolant(f, 4.0 * eps, &empty)?;
    consider(count_zero_components(&refined.function)?.cardinality());
    if check_budget(eps, c).is_ok() {
        let flat = flatten_perturbation(f, eps, c)?;
        consider(count_zero_components(&flat.function)?.cardinality());
    }
    Ok(best)
}
