//! Integration and differentiation engines.
//!
//! * [`integrate`]: composite Gauss–Legendre with panel doubling.
//! * [`integrate_singular_endpoints`]: tanh-sinh for power-type endpoint singularities.
//! * [`central_derivative`]: fourth-order central difference.
//! * [`cumulative_integral`]: running integral of grid samples.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub panel_count: usize,
    pub nodes_per_panel: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panel_count: 8,
            nodes_per_panel: 16,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn new(panel_count: usize, nodes_per_panel: usize, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let spec = Self {
            panel_count,
            nodes_per_panel,
            abs_tol,
            rel_tol,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same node layout, both tolerances set to `tol`.
    pub fn with_tol(self, tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidGrid("quadrature tolerances must be positive".into()));
        }
        if self.nodes_per_panel < 2 || self.panel_count < 1 {
            return Err(Error::InvalidGrid(
                "need at least one panel and two nodes per panel".into(),
            ));
        }
        Ok(())
    }

    fn accepts(&self, value: Complex64, err: f64) -> bool {
        err <= self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// A quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub err_estimate: f64,
}

const MAX_DOUBLINGS: usize = 10;
const MAX_TANH_SINH_LEVEL: usize = 12;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn cached_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (0..=64).map(|k| if k == 0 { (vec![], vec![]) } else { gauss_legendre(k) }).collect());
    if n <= 64 {
        rules[n].clone()
    } else {
        gauss_legendre(n)
    }
}

/// Composite Gauss–Legendre nodes and weights on `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize, nodes_per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = cached_rule(nodes_per_panel);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * nodes_per_panel);
    let mut weights = Vec::with_capacity(panels * nodes_per_panel);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + 0.5 * width * xi);
            weights.push(0.5 * width * wi);
        }
    }
    (nodes, weights)
}

fn composite_sum<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, panels: usize, n: usize) -> Complex64 {
    let (nodes, weights) = composite_rule(a, b, panels, n);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| f(x) * w)
        .sum()
}

/// Composite Gauss–Legendre on `[a, b]`. The error estimate is the change
/// under one doubling of the panel count; panels keep doubling until the
/// requested tolerance is met.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::InvalidGrid(format!("empty interval [{a}, {b}]")));
    }
    let n = spec.nodes_per_panel;
    let mut panels = spec.panel_count;
    let mut coarse = composite_sum(&f, a, b, panels, n);
    let mut best = Estimate {
        value: coarse,
        err_estimate: f64::INFINITY,
    };
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let fine = composite_sum(&f, a, b, panels, n);
        let err = (fine - coarse).norm();
        best = Estimate {
            value: fine,
            err_estimate: err,
        };
        if spec.accepts(fine, err) {
            return Ok(best);
        }
        coarse = fine;
    }
    Err(Error::QuadratureTolerance {
        value: best.value,
        err_estimate: best.err_estimate,
    })
}

/// [`integrate`] for integrands that are cheaper to evaluate in bulk: each
/// refinement level hands all of its nodes to `f` at once.
pub fn integrate_batched<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Result<Vec<Complex64>>,
{
    spec.validate()?;
    if !(a < b) {
        return Err(Error::InvalidGrid(format!("empty interval [{a}, {b}]")));
    }
    let n = spec.nodes_per_panel;
    let sum = |panels: usize| -> Result<Complex64> {
        let (nodes, weights) = composite_rule(a, b, panels, n);
        let values = f(&nodes)?;
        Ok(values.iter().zip(&weights).map(|(v, w)| v * w).sum())
    };
    let mut panels = spec.panel_count;
    let mut coarse = sum(panels)?;
    let mut best = Estimate {
        value: coarse,
        err_estimate: f64::INFINITY,
    };
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let fine = sum(panels)?;
        let err = (fine - coarse).norm();
        best = Estimate {
            value: fine,
            err_estimate: err,
        };
        if spec.accepts(fine, err) {
            return Ok(best);
        }
        coarse = fine;
    }
    Err(Error::QuadratureTolerance {
        value: best.value,
        err_estimate: best.err_estimate,
    })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let e = integrate(|x| Complex64::new(f(x), 0.0), a, b, spec)?;
    Ok((e.value.re, e.err_estimate))
}

/// Tanh-sinh quadrature. Endpoint singularities of power type `(x - a)^s`,
/// `s > -1`, are handled without special casing.
pub fn integrate_singular_endpoints<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    tanh_sinh(|x, _, _| f(x), a, b, spec)
}

/// Tanh-sinh where the integrand also receives the exact distances
/// `x - a` and `b - x`; these stay accurate where `x` itself has rounded
/// onto an endpoint, which matters for integrands singular there.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::InvalidGrid(format!("empty interval [{a}, {b}]")));
    }
    let half = 0.5 * (b - a);
    let t_max = 6.5;
    let h0 = 0.5;

    let term = |t: f64| -> Complex64 {
        let u = FRAC_PI_2 * t.sinh().abs();
        let e = (-2.0 * u).exp();
        let w = FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        let d = half * 2.0 * e / (1.0 + e);
        if w == 0.0 || d == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let v = if t < 0.0 {
            f(a + d, d, 2.0 * half - d)
        } else if t > 0.0 {
            f(b - d, 2.0 * half - d, d)
        } else {
            f(a + half, half, half)
        };
        v * w
    };

    let mut sum = term(0.0);
    let mut k = 1usize;
    loop {
        let t = k as f64 * h0;
        if t > t_max {
            break;
        }
        sum += term(t) + term(-t);
        k += 1;
    }
    let mut estimate = sum * h0 * half;
    let mut h = h0;
    let mut err = f64::INFINITY;
    for level in 1..=MAX_TANH_SINH_LEVEL {
        h *= 0.5;
        let mut j = 1usize;
        loop {
            let t = j as f64 * h;
            if t > t_max {
                break;
            }
            sum += term(t) + term(-t);
            j += 2;
        }
        let next = sum * h * half;
        err = (next - estimate).norm();
        estimate = next;
        if level >= 2 && spec.accepts(estimate, err) {
            return Ok(Estimate {
                value: estimate,
                err_estimate: err,
            });
        }
    }
    Err(Error::QuadratureTolerance {
        value: estimate,
        err_estimate: err,
    })
}

/// `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / (12h)`.
pub fn central_derivative<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> Complex64 {
    (-f(x + 2.0 * h) + f(x + h) * 8.0 - f(x - h) * 8.0 + f(x - 2.0 * h)) / (12.0 * h)
}

/// Result of [`cumulative_integral`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cumulative {
    pub function: GridFunction,
    /// Set when the input has not decayed at the left edge.
    pub warning: Option<String>,
}

/// Running integral `x -> \int_{-X}^x f(t) dt` on the grid.
///
/// Trapezoid sums with the first Euler–Maclaurin end correction
/// `-h^2/12 (f'(x) - f'(-X))`, which lifts the rule to fourth order.
pub fn cumulative_integral(f: &GridFunction) -> Cumulative {
    let grid = *f.grid();
    let h = grid.spacing();
    let v = f.values();
    let n = v.len();

    let warning = {
        let max = f.max_abs();
        let edge = v[0].norm();
        if max > 0.0 && edge >= 1e-10 * max {
            Some(format!(
                "integrand has not decayed at the left edge: |f(-X)| = {edge:e}, max |f| = {max:e}"
            ))
        } else {
            None
        }
    };

    let deriv = grid_derivative(v, h);
    let mut out = Vec::with_capacity(n);
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for k in 1..n {
        acc += (v[k - 1] + v[k]) * (0.5 * h);
        let correction = (deriv[k] - deriv[0]) * (h * h / 12.0);
        out.push(acc - correction);
    }
    Cumulative {
        function: GridFunction::new(grid, out).expect("length preserved"),
        warning,
    }
}

/// Fourth-order finite-difference derivative of equally spaced samples.
pub(crate) fn grid_derivative(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    if n < 5 {
        // too short for the five-point stencils: plain differences
        return (0..n)
            .map(|i| {
                let (l, r) = (i.saturating_sub(1), (i + 1).min(n - 1));
                (v[r] - v[l]) / (h * (r - l).max(1) as f64)
            })
            .collect();
    }
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for i in 2..n - 2 {
        d[i] = (-v[i + 2] + v[i + 1] * 8.0 - v[i - 1] * 8.0 + v[i - 2]) / (12.0 * h);
    }
    let fwd = |i: usize| {
        (v[i] * -25.0 + v[i + 1] * 48.0 - v[i + 2] * 36.0 + v[i + 3] * 16.0 - v[i + 4] * 3.0) / (12.0 * h)
    };
    let bwd = |i: usize| {
        (v[i] * 25.0 - v[i - 1] * 48.0 + v[i - 2] * 36.0 - v[i - 3] * 16.0 + v[i - 4] * 3.0) / (12.0 * h)
    };
    d[0] = fwd(0);
    d[1] = fwd(1);
    d[n - 2] = bwd(n - 2);
    d[n - 1] = bwd(n - 1);
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpatialGrid;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn constant_and_sine() {
        let spec = QuadratureSpec::default();
        let e = integrate(|_| c(1.0), 0.0, 1.0, &spec).unwrap();
        assert!((e.value.re - 1.0).abs() < 1e-14);
        let e = integrate(|x| c(x.sin()), 0.0, PI, &spec).unwrap();
        assert!((e.value.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_over_truncated_line() {
        let spec = QuadratureSpec::default();
        let e = integrate(|x| c((-x * x).exp()), -6.0, 6.0, &spec).unwrap();
        assert!((e.value.re - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_is_rejected() {
        assert!(integrate(|_| c(1.0), 1.0, 1.0, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn tolerance_failure_carries_best_value() {
        let spec = QuadratureSpec::new(1, 2, 1e-300, 1e-300).unwrap();
        match integrate(|x| c(x.sin()), 0.0, PI, &spec) {
            Err(Error::QuadratureTolerance { value, .. }) => assert!((value.re - 2.0).abs() < 1e-6),
            other => panic!("expected tolerance failure, got {other:?}"),
        }
    }

    #[test]
    fn inverse_square_root_endpoint() {
        let spec = QuadratureSpec::default();
        let e = integrate_singular_endpoints(|x| c(x.powf(-0.5)), 0.0, 1.0, &spec).unwrap();
        assert!((e.value.re - 2.0).abs() < 1e-10);
    }

    #[test]
    fn sine_squared() {
        let spec = QuadratureSpec::default();
        let e = integrate_singular_endpoints(|x| c(x.sin().powi(2)), 0.0, PI, &spec).unwrap();
        assert!((e.value.re - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_sine_power_against_riemann_oracle() {
        // By symmetry and t = s^2 the integral becomes
        // 4 int_0^sqrt(pi/2) s / sqrt(sin s^2) ds, whose integrand is smooth;
        // a 10^6-cell midpoint sum of it is the oracle.
        let n = 1_000_000usize;
        let top = (PI / 2.0).sqrt();
        let h = top / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let v = (i as f64 + 0.5) * h;
            s += v / (v * v).sin().sqrt();
        }
        s *= 4.0 * h;
        let spec = QuadratureSpec::default();
        let e = integrate_singular_endpoints(|x| c(x.sin().powf(-0.5)), 0.0, PI, &spec).unwrap();
        assert!((e.value.re - s).abs() < 1e-6, "{} vs {}", e.value.re, s);
    }

    #[test]
    fn routes_agree_on_smooth_integrands() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| c((x * 1.3).cos() * (-x).exp());
        let a = integrate(f, 0.0, 2.0, &spec).unwrap();
        let b = integrate_singular_endpoints(f, 0.0, 2.0, &spec).unwrap();
        assert!((a.value - b.value).norm() <= a.err_estimate + b.err_estimate + 1e-12);
    }

    #[test]
    fn doubling_panels_does_not_increase_error() {
        let integrands: Vec<Box<dyn Fn(f64) -> Complex64>> = vec![
            Box::new(|x: f64| c((3.0 * x).sin())),
            Box::new(|x: f64| c((-x * x).exp())),
            Box::new(|x: f64| c(1.0 / (1.0 + x * x))),
        ];
        for f in &integrands {
            let coarse = QuadratureSpec::new(1, 4, 1e-6, 1e-6).unwrap();
            let fine = QuadratureSpec::new(2, 4, 1e-6, 1e-6).unwrap();
            let a = integrate(f, -2.0, 3.0, &coarse).unwrap();
            let b = integrate(f, -2.0, 3.0, &fine).unwrap();
            assert!(b.err_estimate <= a.err_estimate, "{} > {}", b.err_estimate, a.err_estimate);
        }
    }

    #[test]
    fn derivatives() {
        let d = central_derivative(|x| c(x.exp()), 0.0, 1e-3);
        assert!((d.re - 1.0).abs() < 1e-12);
        let d = central_derivative(|x| c(x.sin()), PI / 3.0, 1e-3);
        assert!((d.re - 0.5).abs() < 1e-11);
    }

    #[test]
    fn cumulative_of_zero_is_zero() {
        let g = SpatialGrid::new(3.0, 61).unwrap();
        let out = cumulative_integral(&GridFunction::zeros(g));
        assert!(out.function.is_zero());
        assert!(out.warning.is_none());
    }

    #[test]
    fn cumulative_matches_exact_antiderivative() {
        let g = SpatialGrid::new(8.0, 1601).unwrap();
        let f = GridFunction::from_real_fn(g, |t| (-t * t).exp() * t);
        let out = cumulative_integral(&f);
        let at0 = out.function.values()[g.center()].re;
        let want = -0.5 + 0.5 * (-64.0f64).exp();
        assert!((at0 - want).abs() < 1e-10, "{at0} vs {want}");
        // odd input: total integral vanishes
        let right = out.function.values()[g.points() - 1].norm();
        assert!(right < 1e-8);
    }

    #[test]
    fn cumulative_warns_without_decay() {
        let g = SpatialGrid::new(1.0, 21).unwrap();
        let out = cumulative_integral(&GridFunction::from_real_fn(g, |_| 1.0));
        assert!(out.warning.is_some());
    }
}
