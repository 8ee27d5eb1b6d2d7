//! Single-chart transport between a manifold `W` and the flat model
//! `[-r0, r0]^p x {0}^(m-p)`.
//!
//! Charts are a closed set of built-ins whose Lipschitz constants are known
//! in closed form: `lambda2 = sup |D phi|` (operator norm) and
//! `lambda1 = 1 / sup |D phi^-1|`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use crate::error::invalid;
use crate::field::VectorField;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ChartKind {
    Identity,
    /// `phi(y) = A y + b`.
    Affine { a: DMatrix<f64>, b: DVector<f64> },
    /// Right half of the annulus `1/2 < |y| < 2` mapped to `(theta, |y| - 1)`.
    /// `W` is the unit half-circle, flattened onto the `theta` axis.
    PolarDemo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub kind: ChartKind,
    pub dim: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Half-width of the flat rectangle contained in `phi(W)`.
    pub r0: f64,
}

impl Chart {
    pub fn identity(dim: usize) -> Self {
        Chart {
            kind: ChartKind::Identity,
            dim,
            lambda1: 1.0,
            lambda2: 1.0,
            r0: f64::INFINITY,
        }
    }

    /// `a` is row-major `dim x dim`.
    pub fn affine(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let dim = b.len();
        if dim == 0 || a.len() != dim * dim {
            return Err(invalid(
                "chart",
                format!("affine chart needs m^2 + m coefficients, got {} + {}", a.len(), b.len()),
            ));
        }
        let a = DMatrix::from_row_slice(dim, dim, &a);
        let sv = a.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        if !(smin > 0.0) || !smax.is_finite() || smax / smin > 1e12 {
            return Err(invalid("chart", "affine matrix must be well-conditioned and invertible"));
        }
        Ok(Chart {
            kind: ChartKind::Affine {
                a,
                b: DVector::from_vec(b),
            },
            dim,
            lambda1: smin,
            lambda2: smax,
            r0: f64::INFINITY,
        })
    }

    pub fn polar_demo() -> Self {
        Chart {
            kind: ChartKind::PolarDemo,
            dim: 2,
            lambda1: 0.5,
            lambda2: 2.0,
            r0: 1.0,
        }
    }

    pub fn with_r0(mut self, r0: f64) -> Result<Self> {
        if !(r0 > 0.0) {
            return Err(invalid("r0", format!("must be positive, got {r0}")));
        }
        if matches!(self.kind, ChartKind::PolarDemo) && r0 >= FRAC_PI_2 {
            return Err(invalid("r0", "polar demo chart needs r0 < pi/2"));
        }
        self.r0 = r0;
        Ok(self)
    }

    /// Parses `identity`, `polar-demo` or `affine:a11,...,amm,b1,...,bm`.
    pub fn parse(spec: &str, m: usize) -> Result<Self> {
        match spec.trim() {
            "identity" => Ok(Chart::identity(m)),
            "polar-demo" => Ok(Chart::polar_demo()),
            s if s.starts_with("affine:") => {
                let coeffs: Vec<f64> = s["affine:".len()..]
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| invalid("chart", format!("bad affine coefficient: {e}")))?;
                if coeffs.len() != m * m + m {
                    return Err(invalid(
                        "chart",
                        format!("affine chart for m={m} needs {} numbers, got {}", m * m + m, coeffs.len()),
                    ));
                }
                let (a, b) = coeffs.split_at(m * m);
                Chart::affine(a.to_vec(), b.to_vec())
            }
            other => Err(invalid("chart", format!("unknown chart `{other}`"))),
        }
    }

    pub fn in_domain(&self, y: &[f64]) -> bool {
        match self.kind {
            ChartKind::PolarDemo => {
                let rho = y[0].hypot(y[1]);
                rho > 0.5 && rho < 2.0 && y[0] > 0.0
            }
            _ => y.iter().all(|v| v.is_finite()),
        }
    }

    pub fn in_range(&self, v: &[f64]) -> bool {
        match self.kind {
            ChartKind::PolarDemo => v[0].abs() < FRAC_PI_2 && v[1] > -0.5 && v[1] < 1.0,
            _ => v.iter().all(|c| c.is_finite()),
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "chart acts on R^{}, got a vector of length {}",
                self.dim,
                v.len()
            )));
        }
        Ok(())
    }

    /// `phi(y)`; `y` must lie in `U`.
    pub fn forward(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        if !self.in_domain(y) {
            return Err(Error::RangeEscape {
                region: "U",
                x: y.to_vec(),
            });
        }
        Ok(match &self.kind {
            ChartKind::Identity => y.to_vec(),
            ChartKind::Affine { a, b } => (a * DVector::from_column_slice(y) + b).as_slice().to_vec(),
            ChartKind::PolarDemo => vec![y[1].atan2(y[0]), y[0].hypot(y[1]) - 1.0],
        })
    }

    /// `phi^-1(v)`; `v` must lie in `V`.
    pub fn inverse(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(v)?;
        if !self.in_range(v) {
            return Err(Error::RangeEscape {
                region: "V",
                x: v.to_vec(),
            });
        }
        Ok(match &self.kind {
            ChartKind::Identity => v.to_vec(),
            ChartKind::Affine { a, b } => {
                let rhs = DVector::from_column_slice(v) - b;
                a.clone()
                    .lu()
                    .solve(&rhs)
                    .ok_or_else(|| Error::Domain("singular affine chart".into()))?
                    .as_slice()
                    .to_vec()
            }
            ChartKind::PolarDemo => {
                let (theta, t) = (v[0], v[1]);
                vec![(1.0 + t) * theta.cos(), (1.0 + t) * theta.sin()]
            }
        })
    }
}

/// `2 sqrt(m - p) * lambda2 / lambda1`.
pub fn gamma_w(chart: &Chart, m: usize, p: usize) -> Result<f64> {
    if p >= m {
        return Err(invalid("p", format!("need p < m, got p={p}, m={m}")));
    }
    Ok(2.0 * ((m - p) as f64).sqrt() * chart.lambda2 / chart.lambda1)
}

/// `x -> phi^-1(lambda1 * g(x))`.
pub struct Transported<'a, G: ?Sized> {
    pub chart: &'a Chart,
    pub inner: &'a G,
}

pub fn transport_function<'a, G: VectorField + ?Sized>(
    chart: &'a Chart,
    g: &'a G,
) -> Transported<'a, G> {
    Transported { chart, inner: g }
}

impl<G: VectorField + ?Sized> VectorField for Transported<'_, G> {
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.chart.dim
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let v: Vec<f64> = self
            .inner
            .eval(x)?
            .into_iter()
            .map(|c| self.chart.lambda1 * c)
            .collect();
        self.chart.inverse(&v).map_err(|e| match e {
            Error::RangeEscape { region, .. } => Error::RangeEscape {
                region,
                x: x.to_vec(),
            },
            other => other,
        })
    }
}

/// `x -> phi(h(x)) / lambda1`.
pub struct Pullback<'a, H: ?Sized> {
    pub chart: &'a Chart,
    pub inner: &'a H,
}

/// Pulls a perturbation back to the flat model. The returned factor
/// `lambda2 / lambda1` converts a sup-norm budget around the transported
/// function into the budget around the flat one.
pub fn pullback_perturbation<'a, H: VectorField + ?Sized>(
    chart: &'a Chart,
    h: &'a H,
) -> (Pullback<'a, H>, f64) {
    (
        Pullback { chart, inner: h },
        chart.lambda2 / chart.lambda1,
    )
}

impl<H: VectorField + ?Sized> VectorField for Pullback<'_, H> {
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.chart.dim
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = self.inner.eval(x)?;
        let v = self.chart.forward(&y).map_err(|e| match e {
            Error::RangeEscape { region, .. } => Error::RangeEscape {
                region,
                x: x.to_vec(),
            },
            other => other,
        })?;
        Ok(v.into_iter().map(|c| c / self.chart.lambda1).collect())
    }
}

/// True iff `|v_i| <= r0` for `i < p` and `v_i = 0` for `i >= p`.
pub fn membership_rectangle(v: &[f64], r0: f64, p: usize) -> bool {
    v.iter()
        .enumerate()
        .all(|(i, &c)| if i < p { c.abs() <= r0 } else { c == 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::ExtremalFunction;
    use crate::modulus::ModulusSpec;
    use crate::FnField;

    #[test]
    fn gamma_examples() {
        let id = Chart::identity(3);
        assert_eq!(gamma_w(&id, 1, 0).unwrap(), 2.0);
        assert!((gamma_w(&id, 3, 1).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        let stretch = Chart::affine(vec![3.0, 0.0, 0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!((gamma_w(&stretch, 2, 1).unwrap() - 6.0).abs() < 1e-12);
        assert!(gamma_w(&id, 2, 2).is_err());
    }

    #[test]
    fn affine_constants_from_singular_values() {
        let c = Chart::affine(vec![2.0, 0.0, 0.0, 2.0], vec![1.0, -1.0]).unwrap();
        assert!((c.lambda1 - 2.0).abs() < 1e-12);
        assert!((c.lambda2 - 2.0).abs() < 1e-12);
        assert!(Chart::affine(vec![1.0, 2.0, 2.0, 4.0], vec![0.0, 0.0]).is_err());
        assert!(Chart::affine(vec![1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn round_trips() {
        let charts = [
            Chart::identity(2),
            Chart::affine(vec![1.0, 2.0, -0.5, 3.0], vec![0.25, -1.0]).unwrap(),
            Chart::polar_demo(),
        ];
        for c in &charts {
            for &(x, y) in &[(1.0, 0.0), (0.8, 0.3), (1.5, -0.9), (0.6, 0.1)] {
                let back = c.inverse(&c.forward(&[x, y]).unwrap()).unwrap();
                assert!((back[0] - x).abs() < 1e-10 && (back[1] - y).abs() < 1e-10, "{c:?}");
            }
        }
    }

    #[test]
    fn parse_charts() {
        assert_eq!(Chart::parse("identity", 2).unwrap(), Chart::identity(2));
        let a = Chart::parse("affine:2,0,0,2,0,0", 2).unwrap();
        assert!((a.lambda1 - 2.0).abs() < 1e-12);
        assert!(Chart::parse("affine:1,2,3", 2).is_err());
        assert!(Chart::parse("mobius", 2).is_err());
        assert_eq!(Chart::parse("polar-demo", 2).unwrap().lambda2, 2.0);
    }

    #[test]
    fn transport_examples() {
        let g = ExtremalFunction::new(ModulusSpec::lipschitz(), 2, 1, 1).unwrap();
        let id = Chart::identity(2);
        let t = transport_function(&id, &g);
        let x = [0.0625, 0.4];
        assert_eq!(t.eval(&x).unwrap(), g.eval(&x).unwrap());

        let double = Chart::affine(vec![2.0, 0.0, 0.0, 2.0], vec![0.0, 0.0]).unwrap();
        let t = transport_function(&double, &g);
        let v = t.eval(&x).unwrap();
        let gv = g.eval(&x).unwrap();
        assert!((v[0] - gv[0]).abs() < 1e-15 && (v[1] - gv[1]).abs() < 1e-15);

        let polar = Chart::polar_demo();
        let zero = FnField::new(1, 2, |_| vec![0.0, 0.0]);
        let t = transport_function(&polar, &zero);
        assert_eq!(t.eval(&[0.3]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(t.eval(&[0.9]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn transport_reports_range_escape() {
        let polar = Chart::polar_demo();
        let wild = FnField::new(1, 2, |_| vec![5.0, 0.0]);
        let t = transport_function(&polar, &wild);
        match t.eval(&[0.25]) {
            Err(Error::RangeEscape { region, x }) => {
                assert_eq!(region, "V");
                assert_eq!(x, vec![0.25]);
            }
            other => panic!("expected range escape, got {other:?}"),
        }
    }

    #[test]
    fn pullback_examples() {
        let h = FnField::new(1, 2, |x| vec![0.9 + x[0], 0.1]);
        let id = Chart::identity(2);
        let (pb, factor) = pullback_perturbation(&id, &h);
        assert_eq!(factor, 1.0);
        assert_eq!(pb.eval(&[0.5]).unwrap(), vec![1.4, 0.1]);

        let double = Chart::affine(vec![2.0, 0.0, 0.0, 2.0], vec![0.0, 0.0]).unwrap();
        let (pb, factor) = pullback_perturbation(&double, &h);
        assert!((factor - 1.0).abs() < 1e-12);
        let v = pb.eval(&[0.5]).unwrap();
        assert!((v[0] - 1.4).abs() < 1e-12 && (v[1] - 0.1).abs() < 1e-12);

        let stretch = Chart::affine(vec![3.0, 0.0, 0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let (pb, factor) = pullback_perturbation(&stretch, &h);
        assert!((factor - 3.0).abs() < 1e-12);
        let v = pb.eval(&[0.5]).unwrap();
        assert!((v[0] - 4.2).abs() < 1e-12 && (v[1] - 0.1).abs() < 1e-12);

        let polar = Chart::polar_demo();
        let outside = FnField::new(1, 2, |_| vec![-1.0, 0.0]);
        let (pb, _) = pullback_perturbation(&polar, &outside);
        assert!(matches!(pb.eval(&[0.1]), Err(Error::RangeEscape { region: "U", .. })));
    }

    #[test]
    fn pullback_contracts_budget_by_factor() {
        // |phi(h)/l1 - g| <= (l2/l1) |h - f| for f = transported g
        let polar = Chart::polar_demo();
        let g = ExtremalFunction::new(ModulusSpec::lipschitz(), 1, 1, 1).unwrap();
        let f = transport_function(&polar, &g);
        let eps = 1e-3;
        let h = FnField::new(1, 2, |x| {
            let v = f.eval(x).unwrap();
            vec![v[0] + eps * (17.0 * x[0]).sin(), v[1] - eps * (5.0 * x[0]).cos()]
        });
        let (pb, factor) = pullback_perturbation(&polar, &h);
        for i in 0..=200 {
            let x = [i as f64 / 200.0];
            let a = pb.eval(&x).unwrap();
            let b = g.eval(&x).unwrap();
            let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            assert!(d <= factor * eps * 2f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn membership_examples() {
        assert!(membership_rectangle(&[0.1, 0.0], 1.0, 1));
        assert!(!membership_rectangle(&[2.0, 0.0], 1.0, 1));
        assert!(!membership_rectangle(&[0.1, 1e-3], 1.0, 1));
        assert!(membership_rectangle(&[0.0], 1.0, 0));
    }
}
