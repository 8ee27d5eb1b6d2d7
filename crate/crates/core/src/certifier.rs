//! Lower bounds on zero sets of every perturbation within a sup-norm budget.
//!
//! For a budget `eps` the certifier resolves the deepest level `n0` at which
//! the bump amplitude still dominates the perturbation. Every level `n <= n0`
//! contributes `2^(q n^2)` cubes of side `2 l_n`, centered on bump extrema,
//! and every admissible perturbation has a zero in each of them (the
//! sign condition on opposite faces forces one). In theoretical mode those
//! cubes are counted; in empirical mode a concrete perturbation is checked
//! face by face.

use rayon::prelude::*;

use crate::chart::{gamma_w, pullback_perturbation, Chart};
use crate::dyadic::Dyadic;
use crate::error::invalid;
use crate::extremal::{ell, level_params, ExtremalFunction, MAX_LEVEL};
use crate::field::VectorField;
use crate::modulus::ModulusSpec;
use crate::{Error, Result};

/// Largest `q * n^2` for which cubes are enumerated (`2^24` cubes).
pub const ENUMERATION_CAP: u64 = 24;

/// Face lattice points per unit of `l_n` along each face axis.
const LATTICE_PER_ELL: u64 = 4;

/// Grid cell `[a_{n,i_1}, b_{n,i_1}] x ... x [a_{n,i_q}, b_{n,i_q}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cube {
    pub n: u32,
    pub iota: Vec<u64>,
}

impl Cube {
    fn corner(&self, axis: usize, offset: i128) -> Dyadic {
        let sched = level_params(self.n).expect("cube level within range");
        let k = self.iota[axis] as i128;
        sched
            .ell
            .checked_mul_int(4 * k + offset)
            .and_then(|o| sched.start.checked_add(o))
            .expect("cube corner fits the dyadic mantissa for enumerable levels")
    }

    /// `a_{n, iota_axis} = s_n + (4 iota + 1) l_n`.
    pub fn lower(&self, axis: usize) -> Dyadic {
        self.corner(axis, 1)
    }

    /// `b_{n, iota_axis} = s_n + (4 iota + 3) l_n`.
    pub fn upper(&self, axis: usize) -> Dyadic {
        self.corner(axis, 3)
    }

    pub fn center(&self, axis: usize) -> Dyadic {
        self.corner(axis, 2)
    }

    pub fn side(&self) -> Dyadic {
        Dyadic::pow2(crate::extremal::ell_exponent(self.n) + 1)
    }

    pub fn q(&self) -> usize {
        self.iota.len()
    }

    pub fn bounds_f64(&self) -> Vec<(f64, f64)> {
        (0..self.q())
            .map(|i| (self.lower(i).to_f64(), self.upper(i).to_f64()))
            .collect()
    }
}

fn check_cap(n: u32, q: usize) -> Result<u64> {
    if n == 0 || n > MAX_LEVEL {
        return Err(Error::LevelOutOfRange(n));
    }
    if q == 0 {
        return Err(invalid("q", "must be positive"));
    }
    let requested = q as u64 * (n as u64) * (n as u64);
    if requested > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            requested,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(requested)
}

/// Cube with lexicographic index `index` (first axis slowest).
fn cube_at(n: u32, q: usize, index: u64) -> Cube {
    let bits = n * n;
    let mask = (1u64 << bits) - 1;
    let iota = (0..q)
        .map(|axis| (index >> (bits as usize * (q - 1 - axis))) & mask)
        .collect();
    Cube { n, iota }
}

/// All `2^(q n^2)` cubes of level `n`, lexicographic in `iota`.
pub fn enumerate_cubes(n: u32, q: usize) -> Result<impl Iterator<Item = Cube>> {
    let bits = check_cap(n, q)?;
    Ok((0..(1u64 << bits)).map(move |i| cube_at(n, q, i)))
}

/// Largest depth guaranteed by the budget, scaled by `gamma`.
///
/// The band for depth `n` is `beta(l_{n+1}/2) <= gamma * eps <= beta(l_n/2)`.
/// Neighbouring bands share an endpoint; a budget sitting exactly on it is
/// assigned the shallower depth. Returns 0 when `gamma * eps > beta(l_1/2)`.
pub fn resolve_depth_scaled(beta: &ModulusSpec, gamma: f64, eps: f64) -> u32 {
    let scaled = gamma * eps;
    let edge = |n: u32| beta.eval_unchecked(0.5 * ell(n));
    if !(scaled <= edge(1)) {
        return 0;
    }
    (1..MAX_LEVEL)
        .find(|&n| scaled >= edge(n + 1))
        .unwrap_or(MAX_LEVEL)
}

/// Depth `n0` for `q` active coordinates on the flat model (`gamma = 2 sqrt(q)`).
pub fn resolve_depth(beta: &ModulusSpec, q: usize, eps: f64) -> u32 {
    resolve_depth_scaled(beta, 2.0 * (q as f64).sqrt(), eps)
}

/// Sign condition of the active block on the faces of `cube`.
///
/// Component `p + i` must be positive on the face `y_i = a` and negative on
/// `y_i = b` for every axis (or the reverse on every axis). Faces are
/// sampled on a lattice of step `l_n / 4`, and a sample only counts when
/// its magnitude exceeds `beta(l_n / 4)`, which keeps the sign fixed across
/// the lattice cell for perturbations that themselves admit `beta`.
pub fn miranda_verify<H: VectorField + ?Sized>(
    h: &H,
    cube: &Cube,
    z: &[f64],
    beta: &ModulusSpec,
    p: usize,
) -> Result<bool> {
    let q = cube.q();
    if h.dim_in() != q + z.len() {
        return Err(Error::DimensionMismatch(format!(
            "perturbation has d={}, cube and slice give {}",
            h.dim_in(),
            q + z.len()
        )));
    }
    if h.dim_out() < p + q {
        return Err(Error::DimensionMismatch(format!(
            "perturbation has m={}, need at least p+q={}",
            h.dim_out(),
            p + q
        )));
    }
    let l = ell(cube.n);
    let step = l / LATTICE_PER_ELL as f64;
    let slack = beta.eval_unchecked(step);
    let lattice = 2 * LATTICE_PER_ELL as usize + 1;
    let bounds = cube.bounds_f64();

    // (positive on lower faces and negative on upper faces, the reverse)
    let mut standard = true;
    let mut reverse = true;
    let mut x = vec![0.0; h.dim_in()];
    x[q..].copy_from_slice(z);
    let face_points = lattice.pow(q as u32 - 1);
    for axis in 0..q {
        for (face_value, lower_face) in [(bounds[axis].0, true), (bounds[axis].1, false)] {
            for flat in 0..face_points {
                let mut rest = flat;
                for other in (0..q).filter(|&o| o != axis) {
                    let k = rest % lattice;
                    rest /= lattice;
                    x[other] = bounds[other].0 + k as f64 * step;
                }
                x[axis] = face_value;
                let v = h.eval(&x)?[p + axis];
                let positive = v > slack;
                let negative = v < -slack;
                if lower_face {
                    standard &= positive;
                    reverse &= negative;
                } else {
                    standard &= negative;
                    reverse &= positive;
                }
                if !standard && !reverse {
                    return Ok(false);
                }
            }
        }
    }
    Ok(standard || reverse)
}

/// Value of the analytic lower envelope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryBound {
    pub value: f64,
    /// True when the inverse modulus saturated and the bound carries no
    /// information.
    pub vacuous: bool,
}

fn envelope_from_psi(psi: f64, q: usize) -> Result<TheoryBound> {
    if psi.is_infinite() {
        return Ok(TheoryBound {
            value: 0.0,
            vacuous: true,
        });
    }
    if !(psi > 0.0) {
        return Err(Error::Domain(format!(
            "inverse modulus must be positive, got {psi}"
        )));
    }
    let q = q as f64;
    let value = (16.0 / psi).powf(q) * (-4.0 * q * psi.log2().abs().sqrt()).exp2();
    Ok(TheoryBound {
        value,
        vacuous: false,
    })
}

/// `(16 / Psi(gamma eps))^(m-p) * 2^(-4 (m-p) sqrt|log2 Psi(gamma eps)|)`.
pub fn theory_lower_bound(
    beta: &ModulusSpec,
    eps: f64,
    m: usize,
    p: usize,
    gamma: f64,
) -> Result<TheoryBound> {
    if p >= m {
        return Err(invalid("p", format!("need p < m, got p={p}, m={m}")));
    }
    let psi = beta.inverse().eval(gamma * eps)?;
    envelope_from_psi(psi, m - p)
}

/// Closed form of [`theory_lower_bound`] for `beta(s) = lambda s^alpha`,
/// where `Psi(s) = (s / lambda)^(1/alpha)`.
pub fn holder_lower_bound(
    lambda: f64,
    alpha: f64,
    eps: f64,
    m: usize,
    p: usize,
    gamma: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    if !(lambda > 0.0) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    if p >= m {
        return Err(invalid("p", format!("need p < m, got p={p}, m={m}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    // log2 Psi directly, which avoids the pow round trip
    let log_psi = ((gamma * eps).log2() - lambda.log2()) / alpha;
    let q = (m - p) as f64;
    Ok((q * (4.0 - log_psi) - 4.0 * q * log_psi.abs().sqrt()).exp2())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelCount {
    pub n: u32,
    pub verified: u128,
    pub total: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateMode {
    /// Cube counts follow from the construction.
    Theoretical,
    /// A concrete perturbation was checked on `z_slices` slices per cube.
    Empirical { z_slices: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub eps: f64,
    /// Budget seen by the flat model after chart distortion.
    pub effective_eps: f64,
    pub gamma: f64,
    pub n0: u32,
    pub levels: Vec<LevelCount>,
    /// Sum of verified cubes over levels `1..=n0`.
    pub certified_count: u128,
    /// `2^(q n0^2)`, the deepest level alone; 0 when `n0 = 0`.
    pub paper_bound: u128,
    pub theory_bound: f64,
    pub theory_vacuous: bool,
    pub mode: CertificateMode,
    /// `theory_bound <= certified_count`, checked whenever `n0 >= 1`.
    pub envelope_ok: bool,
}

impl Certificate {
    pub fn is_vacuous(&self) -> bool {
        self.n0 == 0 || self.theory_vacuous
    }

    /// `key=value` lines, one field per line.
    pub fn to_key_values(&self) -> String {
        let mode = match self.mode {
            CertificateMode::Theoretical => "theoretical".to_string(),
            CertificateMode::Empirical { z_slices } => format!("empirical(z_slices={z_slices})"),
        };
        let levels: Vec<String> = self
            .levels
            .iter()
            .map(|l| format!("{}:{}/{}", l.n, l.verified, l.total))
            .collect();
        format!(
            "eps={:.16e}\neffective_eps={:.16e}\ngamma={:.16e}\nn0={}\nlevels={}\ncertified_count={}\npaper_bound={}\ntheory_bound={:.16e}\ntheory_vacuous={}\nmode={}\nenvelope_ok={}\n",
            self.eps,
            self.effective_eps,
            self.gamma,
            self.n0,
            levels.join(","),
            self.certified_count,
            self.paper_bound,
            self.theory_bound,
            self.theory_vacuous,
            mode,
            self.envelope_ok
        )
    }
}

#[derive(Default, Clone, Copy)]
pub struct CertifyOptions<'a> {
    /// Perturbation to check; theoretical mode when absent.
    pub perturbation: Option<&'a dyn VectorField>,
    /// Chart carrying the flat model to `W`.
    pub chart: Option<&'a Chart>,
    /// `K` slices per inactive axis; the midpoint slice when absent.
    pub z_grid: Option<usize>,
}

fn pow2_u128(bits: u64) -> Result<u128> {
    1u128.checked_shl(bits as u32).filter(|_| bits < 128).ok_or(Error::CountOverflow)
}

/// Slice points `((j + 1/2) / K)` on `[0,1]^k`.
fn z_slices(k: usize, grid: Option<usize>) -> Vec<Vec<f64>> {
    let per_axis = grid.unwrap_or(1).max(1);
    let coords: Vec<f64> = (0..per_axis)
        .map(|j| (j as f64 + 0.5) / per_axis as f64)
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                coords.iter().map(move |&c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn certify(f: &ExtremalFunction, eps: f64, opts: &CertifyOptions<'_>) -> Result<Certificate> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let (q, p, m) = (f.q, f.p, f.m());
    let (gamma, factor, rect) = match opts.chart {
        Some(chart) => {
            if chart.dim != m {
                return Err(Error::DimensionMismatch(format!(
                    "chart acts on R^{}, function has m={m}",
                    chart.dim
                )));
            }
            (
                gamma_w(chart, m, p)?,
                chart.lambda2 / chart.lambda1,
                chart.r0 / chart.lambda2,
            )
        }
        None => (2.0 * (q as f64).sqrt(), 1.0, f64::INFINITY),
    };
    let effective_eps = factor * eps;
    // the padded coordinates only stay inside the flat rectangle while the
    // budget is below its half-width
    let n0 = if p > 0 && effective_eps > rect {
        0
    } else {
        resolve_depth_scaled(&f.beta, gamma, eps)
    };
    let theory = theory_lower_bound(&f.beta, eps, m, p, gamma)?;

    let mut levels = Vec::new();
    let mut certified: u128 = 0;
    let mode = match opts.perturbation {
        None => {
            for n in 1..=n0 {
                let total = pow2_u128(q as u64 * (n as u64).pow(2))?;
                certified = certified.checked_add(total).ok_or(Error::CountOverflow)?;
                levels.push(LevelCount {
                    n,
                    verified: total,
                    total,
                });
            }
            CertificateMode::Theoretical
        }
        Some(h) => {
            if h.dim_in() != f.d || h.dim_out() != m {
                return Err(Error::DimensionMismatch(format!(
                    "perturbation maps R^{} -> R^{}, expected R^{} -> R^{}",
                    h.dim_in(),
                    h.dim_out(),
                    f.d,
                    m
                )));
            }
            let slices = z_slices(f.d - q, opts.z_grid);
            let count_level = |target: &dyn VectorField, n: u32| -> Result<u128> {
                let bits = check_cap(n, q)?;
                (0..(1u64 << bits))
                    .into_par_iter()
                    .map(|i| -> Result<u128> {
                        let cube = cube_at(n, q, i);
                        for z in &slices {
                            if !miranda_verify(target, &cube, z, &f.beta, p)? {
                                return Ok(0);
                            }
                        }
                        Ok(1)
                    })
                    .try_reduce(|| 0, |a, b| Ok(a + b))
            };
            for n in 1..=n0 {
                let total = pow2_u128(q as u64 * (n as u64).pow(2))?;
                let verified = match opts.chart {
                    Some(chart) => {
                        let (pb, _) = pullback_perturbation(chart, h);
                        count_level(&pb, n)?
                    }
                    None => count_level(h, n)?,
                };
                certified += verified;
                levels.push(LevelCount { n, verified, total });
            }
            CertificateMode::Empirical {
                z_slices: slices.len(),
            }
        }
    };
    let paper_bound = if n0 == 0 {
        0
    } else {
        pow2_u128(q as u64 * (n0 as u64).pow(2))?
    };
    let envelope_ok = n0 == 0 || theory.value <= certified as f64;
    Ok(Certificate {
        eps,
        effective_eps,
        gamma,
        n0,
        levels,
        certified_count: certified,
        paper_bound,
        theory_bound: theory.value,
        theory_vacuous: theory.vacuous,
        mode,
        envelope_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::exp2i;
    use crate::FnField;

    fn id() -> ModulusSpec {
        ModulusSpec::lipschitz()
    }

    #[test]
    fn resolve_depth_examples() {
        assert_eq!(resolve_depth(&id(), 1, exp2i(-7)), 1);
        assert_eq!(resolve_depth(&id(), 1, exp2i(-12)), 2);
        assert_eq!(resolve_depth(&id(), 1, 0.5), 0);
    }

    #[test]
    fn shared_band_edges_take_the_shallower_depth() {
        assert_eq!(resolve_depth(&id(), 1, exp2i(-6)), 1);
        assert_eq!(resolve_depth(&id(), 1, exp2i(-10)), 1);
        assert_eq!(resolve_depth(&id(), 1, exp2i(-10) * 0.999), 2);
        assert_eq!(resolve_depth(&id(), 1, exp2i(-16)), 2);
        assert_eq!(resolve_depth(&id(), 1, exp2i(-6) * 1.001), 0);
    }

    #[test]
    fn enumerate_examples() {
        let cubes: Vec<Cube> = enumerate_cubes(1, 1).unwrap().collect();
        assert_eq!(cubes.len(), 2);
        assert_eq!(cubes[0].bounds_f64(), vec![(0.0625, 0.1875)]);
        assert_eq!(cubes[1].bounds_f64(), vec![(0.3125, 0.4375)]);

        let cubes: Vec<Cube> = enumerate_cubes(1, 2).unwrap().collect();
        assert_eq!(cubes.len(), 4);
        assert_eq!(cubes[1].iota, vec![0, 1]);
        assert_eq!(cubes[2].iota, vec![1, 0]);

        let cubes: Vec<Cube> = enumerate_cubes(2, 1).unwrap().collect();
        assert_eq!(cubes.len(), 16);
        assert_eq!(cubes[0].lower(0).to_f64(), 0.5 + exp2i(-8));
    }

    #[test]
    fn enumeration_cap_is_named() {
        match enumerate_cubes(5, 1) {
            Err(Error::EnumerationCap { requested, cap }) => {
                assert_eq!(requested, 25);
                assert_eq!(cap, ENUMERATION_CAP);
            }
            Err(e) => panic!("wrong error {e}"),
            Ok(_) => panic!("cap not enforced"),
        }
        assert!(enumerate_cubes(4, 1).is_ok());
        assert!(enumerate_cubes(2, 7).is_err());
    }

    #[test]
    fn cube_geometry() {
        for cube in enumerate_cubes(2, 2).unwrap() {
            for axis in 0..2 {
                let side = cube.upper(axis).checked_sub(cube.lower(axis)).unwrap();
                assert_eq!(side, cube.side());
                assert!(cube.lower(axis) > Dyadic::ZERO);
                assert!(cube.upper(axis) < Dyadic::from_int(1));
                let mid = cube.lower(axis).checked_add(cube.upper(axis)).unwrap();
                assert_eq!(Dyadic::new(mid.mantissa(), mid.exponent() - 1), cube.center(axis));
            }
        }
    }

    #[test]
    fn miranda_examples() {
        let f = ExtremalFunction::scalar(id());
        let cube = enumerate_cubes(1, 1).unwrap().next().unwrap();
        assert!(miranda_verify(&f, &cube, &[], &id(), 0).unwrap());

        let eps = exp2i(-7);
        let shifted = FnField::new(1, 1, |x| vec![f.eval(x).unwrap()[0] + eps]);
        assert!(miranda_verify(&shifted, &cube, &[], &id(), 0).unwrap());

        let zero = FnField::new(1, 1, |_| vec![0.0]);
        assert!(!miranda_verify(&zero, &cube, &[], &id(), 0).unwrap());
    }

    #[test]
    fn miranda_accepts_uniform_reverse_orientation_only() {
        let f = ExtremalFunction::new(id(), 2, 2, 0).unwrap();
        let cube = enumerate_cubes(1, 2).unwrap().next().unwrap();
        let neg = FnField::new(2, 2, |x| f.eval(x).unwrap().iter().map(|v| -v).collect());
        assert!(miranda_verify(&neg, &cube, &[], &id(), 0).unwrap());
        let mixed = FnField::new(2, 2, |x| {
            let v = f.eval(x).unwrap();
            vec![v[0], -v[1]]
        });
        assert!(!miranda_verify(&mixed, &cube, &[], &id(), 0).unwrap());
    }

    #[test]
    fn miranda_dimension_checks() {
        let f = ExtremalFunction::scalar(id());
        let cube = enumerate_cubes(1, 1).unwrap().next().unwrap();
        assert!(miranda_verify(&f, &cube, &[0.5], &id(), 0).is_err());
        assert!(miranda_verify(&f, &cube, &[], &id(), 1).is_err());
    }

    #[test]
    fn certify_theoretical_examples() {
        let f = ExtremalFunction::scalar(id());
        let c = certify(&f, exp2i(-7), &CertifyOptions::default()).unwrap();
        assert_eq!((c.n0, c.certified_count, c.paper_bound), (1, 2, 2));
        let c = certify(&f, exp2i(-12), &CertifyOptions::default()).unwrap();
        assert_eq!((c.n0, c.certified_count, c.paper_bound), (2, 18, 16));
        let expected = exp2i(15) * (-4.0 * 11f64.sqrt()).exp2();
        assert!((c.theory_bound - expected).abs() <= 1e-12 * expected);
        assert!((c.theory_bound - 3.3257).abs() < 1e-3);
        assert!(c.envelope_ok);

        let c = certify(&f, 0.5, &CertifyOptions::default()).unwrap();
        assert_eq!((c.n0, c.certified_count, c.paper_bound), (0, 0, 0));
        assert!(c.is_vacuous());
        assert!(certify(&f, 0.0, &CertifyOptions::default()).is_err());
    }

    #[test]
    fn certify_empirical_on_the_function_itself() {
        let f = ExtremalFunction::scalar(id());
        let opts = CertifyOptions {
            perturbation: Some(&f),
            ..Default::default()
        };
        let c = certify(&f, exp2i(-12), &opts).unwrap();
        assert_eq!(c.levels[0], LevelCount { n: 1, verified: 2, total: 2 });
        assert_eq!(c.levels[1], LevelCount { n: 2, verified: 16, total: 16 });
        assert_eq!(c.certified_count, 18);
        assert_eq!(c.mode, CertificateMode::Empirical { z_slices: 1 });
    }

    #[test]
    fn z_grid_slices() {
        assert_eq!(z_slices(0, Some(3)), vec![Vec::<f64>::new()]);
        assert_eq!(z_slices(1, None), vec![vec![0.5]]);
        assert_eq!(z_slices(2, Some(2)).len(), 4);
        let f = ExtremalFunction::new(id(), 2, 1, 0).unwrap();
        let opts = CertifyOptions {
            perturbation: Some(&f),
            z_grid: Some(4),
            ..Default::default()
        };
        let c = certify(&f, exp2i(-7), &opts).unwrap();
        assert_eq!(c.certified_count, 2);
        assert_eq!(c.mode, CertificateMode::Empirical { z_slices: 4 });
    }

    #[test]
    fn theory_examples() {
        let b = theory_lower_bound(&id(), exp2i(-12), 1, 0, 2.0).unwrap();
        assert!(!b.vacuous);
        assert!((b.value - 3.3257).abs() < 1e-3);

        // Psi(2 eps) = (2 eps)^2 = 2^-16
        let sqrt = ModulusSpec::power(1.0, 0.5).unwrap();
        let eps = exp2i(-8) / 2.0;
        let b = theory_lower_bound(&sqrt, eps, 1, 0, 2.0).unwrap();
        assert!((b.value - 16.0).abs() < 1e-9);

        // Psi = 16 with beta = id, gamma eps = 16
        let b = theory_lower_bound(&id(), 8.0, 2, 1, 2.0).unwrap();
        assert!((b.value - exp2i(-8)).abs() < 1e-15);

        let table = ModulusSpec::table(vec![(1.0, 0.5)]).unwrap();
        let b = theory_lower_bound(&table, 1.0, 1, 0, 2.0).unwrap();
        assert!(b.vacuous);
        assert_eq!(b.value, 0.0);
        assert!(theory_lower_bound(&id(), 0.1, 1, 1, 2.0).is_err());
    }

    #[test]
    fn holder_examples() {
        let a = holder_lower_bound(1.0, 1.0, exp2i(-12), 1, 0, 2.0).unwrap();
        let b = theory_lower_bound(&id(), exp2i(-12), 1, 0, 2.0).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * b);

        let v = holder_lower_bound(1.0, 0.5, exp2i(-8), 1, 0, 2.0).unwrap();
        let expect = (18.0 - 4.0 * 14f64.sqrt()).exp2();
        assert!((v - expect).abs() <= 1e-12 * expect);
        assert!((v - 8.2).abs() < 0.05);

        // gamma eps = lambda makes Psi = 1
        let v = holder_lower_bound(3.0, 1.0, 1.5, 3, 1, 2.0).unwrap();
        assert!((v - 256.0).abs() < 1e-9);
        assert!(holder_lower_bound(1.0, 0.0, 0.1, 1, 0, 2.0).is_err());
    }

    #[test]
    fn key_value_output() {
        let f = ExtremalFunction::scalar(id());
        let c = certify(&f, exp2i(-12), &CertifyOptions::default()).unwrap();
        let text = c.to_key_values();
        assert!(text.contains("n0=2\n"));
        assert!(text.contains("certified_count=18\n"));
        assert!(text.contains("paper_bound=16\n"));
        assert!(text.contains("levels=1:2/2,2:16/16\n"));
        assert!(text.contains("mode=theoretical\n"));
    }
}
