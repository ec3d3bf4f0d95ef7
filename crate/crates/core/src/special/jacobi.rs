//! Jacobi functions and the Opdam eigenfunctions.
//!
//! `phi_lambda(x)` is evaluated along one of three routes, picked per point
//! by an estimate of the digits lost to cancellation:
//!
//! * the Pfaff-transformed hypergeometric series in `tanh^2 x`, exact for
//!   every `lambda` but slow for large `x` and cancelling like
//!   `exp(|Re lambda| tanh x)`;
//! * the Harish-Chandra expansion `c(l) Phi_l + c(-l) Phi_{-l}`, a series in
//!   `cosh^{-2} x` that is fast for large `x` but singular for `lambda` in `iZ`;
//! * near those poles at large `x`, the mean value of the (entire) map
//!   `lambda -> phi_lambda(x)` over a small circle, each sample taken on the
//!   Harish-Chandra route;
//! * for large `|Re lambda|` in the middle range where both series cancel
//!   badly, Taylor stepping of the hypergeometric equation in `z = -sinh^2 x`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::gamma::{log_gamma_analytic, log_rgamma};
use super::hyper::{gauss_series, SERIES_CAP};
use crate::error::{Error, Result};
use crate::model::Parameters;

const CIRCLE_POINTS: usize = 32;
const CIRCLE_RADIUS: f64 = 0.25;
const MAX_PFAFF_TERMS: f64 = 8000.0;
// e-folds of cancellation accepted before switching route
const GOOD_COST: f64 = 7.0;
const ODE_PHASE_STEP: f64 = 2.0;
const TAYLOR_CAP: usize = 600;

/// `log c(lambda)` in the Gamma-quotient form
/// `Gamma(a+1) 2^{rho - i l} Gamma(i l) / (Gamma((rho + i l)/2) Gamma((a-b+1+i l)/2))`.
///
/// `Ok(None)` means `c(lambda) = 0`; a pole of `Gamma(i lambda)` is an error.
pub(crate) fn log_c(params: &Parameters, lambda: Complex64) -> Result<Option<Complex64>> {
    let il = Complex64::i() * lambda;
    let num = log_gamma_analytic(Complex64::new(params.alpha() + 1.0, 0.0))?
        + (Complex64::new(params.rho(), 0.0) - il) * 2f64.ln()
        + log_gamma_analytic(il).map_err(|_| Error::Pole {
            function: "c_function",
            at: format!("lambda = {lambda}"),
        })?;
    let d1 = log_rgamma((params.rho() + il) * 0.5)?;
    let d2 = log_rgamma((params.k1() + 1.0 + il) * 0.5)?;
    Ok(match (d1, d2) {
        (Some(a), Some(b)) => Some(num + a + b),
        _ => None,
    })
}

/// Distance from `lambda` to the lattice `iZ` where the expansion breaks down.
fn pole_distance(lambda: Complex64) -> f64 {
    lambda.re.hypot(lambda.im - lambda.im.round())
}

#[derive(Debug, Clone, Copy)]
struct HcCoefficients {
    lambda: Complex64,
    plus: Option<Complex64>,
    minus: Option<Complex64>,
}

impl HcCoefficients {
    fn new(params: &Parameters, lambda: Complex64) -> Option<Self> {
        if pole_distance(lambda) < 1e-9 {
            return None;
        }
        let plus = log_c(params, lambda).ok()?;
        let minus = log_c(params, -lambda).ok()?;
        Some(Self { lambda, plus, minus })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Pfaff,
    HarishChandra,
    Circle,
    Ode,
}

/// `phi_lambda^{(alpha,beta)}` for one fixed `lambda`, reusable across many `x`.
#[derive(Debug)]
pub struct JacobiPhi {
    params: Parameters,
    lambda: Complex64,
    hc: Option<HcCoefficients>,
    circle: OnceLock<Vec<Option<HcCoefficients>>>,
    ode: OnceLock<Result<OdeTable>>,
}

impl JacobiPhi {
    pub fn new(params: Parameters, lambda: Complex64) -> Self {
        Self {
            hc: HcCoefficients::new(&params, lambda),
            params,
            lambda,
            circle: OnceLock::new(),
            ode: OnceLock::new(),
        }
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// `phi_lambda(x)`; even in `x`.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        let x = x.abs();
        if x == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        match self.route(x) {
            Route::Pfaff => self.pfaff(x),
            Route::HarishChandra => hc_sum(&self.params, self.hc.as_ref().expect("route checked"), x),
            Route::Circle => self.circle_mean(x),
            Route::Ode => self.ode(x),
        }
    }

    fn route(&self, x: f64) -> Route {
        let t = x.tanh();
        let u = sech2(x);
        let pfaff_ok = -(t * t).ln() * MAX_PFAFF_TERMS > 37.0;
        let cost_a = self.lambda.re.abs() * t;
        let hc_ok = self.hc.is_some() && u < 0.97;
        let cost_b = self.hc_cost(u);
        let mut best = pfaff_ok.then_some((Route::Pfaff, cost_a));
        if hc_ok && best.map_or(true, |(_, c)| cost_b < c) {
            best = Some((Route::HarishChandra, cost_b));
        }
        match best {
            Some((r, c)) if c <= GOOD_COST => r,
            _ if self.lambda.re.abs() > GOOD_COST && x <= self.ode_end() => Route::Ode,
            _ if u < 0.5 => Route::Circle,
            Some((r, _)) => r,
            None => Route::Circle,
        }
    }

    /// Estimated e-folds of cancellation on the Harish-Chandra route.
    fn hc_cost(&self, u: f64) -> f64 {
        self.lambda.norm() * u / 4.0 + (1.0 / pole_distance(self.lambda).min(1.0)).ln()
    }

    /// Right end of the stretch handed to the ODE route: where the
    /// Harish-Chandra route becomes cheap again.
    fn ode_end(&self) -> f64 {
        let d = pole_distance(self.lambda).min(1.0);
        let u1 = 4.0 * (GOOD_COST - (1.0 / d).ln()) / self.lambda.norm();
        if u1 >= 1.0 {
            0.0
        } else {
            (1.0 / u1.sqrt()).acosh() + 0.05
        }
    }

    fn pfaff(&self, x: f64) -> Result<Complex64> {
        // 2F1(a, b; c; -sinh^2 x) = cosh^{-2a} x 2F1(a, c - b; c; tanh^2 x)
        let p = &self.params;
        let il = Complex64::i() * self.lambda;
        let a = (p.rho() + il) * 0.5;
        let cb = (p.k1() + 1.0 + il) * 0.5;
        let c = Complex64::new(p.alpha() + 1.0, 0.0);
        let t = x.tanh();
        let s = gauss_series(a, cb, c, t * t, SERIES_CAP)?;
        Ok(s * (-a * 2.0 * ln_cosh(x)).exp())
    }

    fn hyp_params(&self) -> (Complex64, Complex64, Complex64) {
        let il = Complex64::i() * self.lambda;
        let p = &self.params;
        ((il + p.rho()) * 0.5, (-il + p.rho()) * 0.5, Complex64::new(p.alpha() + 1.0, 0.0))
    }

    /// Taylor stepping of the hypergeometric equation in `z = -sinh^2 x`,
    /// started where the Pfaff series is still accurate.
    fn build_ode(&self) -> Result<OdeTable> {
        let (a, b, c) = self.hyp_params();
        let x0 = (GOOD_COST / self.lambda.re.abs()).atanh();
        let x_end = self.ode_end();
        let shifted = JacobiPhi::new(self.params.shifted(), self.lambda);
        // d/dz 2F1(a,b;c;z) = ab/c 2F1(a+1,b+1;c+1;z), the shifted Jacobi function
        let mut x = x0;
        let mut z = -x0.sinh().powi(2);
        let mut f = self.pfaff(x0)?;
        let mut df = a * b / c * shifted.pfaff(x0)?;
        let mut table = OdeTable {
            z: vec![z],
            f: vec![f],
            df: vec![df],
        };
        let omega = self.lambda.norm();
        while x < x_end {
            let by_phase = (2.0 * x).sinh() * ODE_PHASE_STEP / omega;
            let step = by_phase.min(0.5 * z.abs());
            let (nf, ndf) = taylor_step(a, b, c, z, f, df, -step)?;
            z -= step;
            x = (-z).sqrt().asinh();
            f = nf;
            df = ndf;
            table.z.push(z);
            table.f.push(f);
            table.df.push(df);
        }
        Ok(table)
    }

    fn ode(&self, x: f64) -> Result<Complex64> {
        let table = self.ode.get_or_init(|| self.build_ode()).as_ref().map_err(|e| e.clone())?;
        let z = -x.sinh().powi(2);
        // z decreases along the table; start from the last node at or above z
        let k = table.z.partition_point(|&zk| zk >= z);
        if k == 0 {
            return self.pfaff(x);
        }
        let k = k - 1;
        let (a, b, c) = self.hyp_params();
        let (f, _) = taylor_step(a, b, c, table.z[k], table.f[k], table.df[k], z - table.z[k])?;
        Ok(f)
    }

    fn circle_mean(&self, x: f64) -> Result<Complex64> {
        let samples = self.circle.get_or_init(|| {
            (0..CIRCLE_POINTS)
                .map(|k| {
                    let theta = 2.0 * PI * (k as f64 + 0.5) / CIRCLE_POINTS as f64;
                    let l = self.lambda + Complex64::from_polar(CIRCLE_RADIUS, theta);
                    HcCoefficients::new(&self.params, l)
                })
                .collect()
        });
        let mut acc = Complex64::new(0.0, 0.0);
        for s in samples {
            let s = s.as_ref().ok_or_else(|| Error::Pole {
                function: "jacobi_phi",
                at: format!("circle around lambda = {}", self.lambda),
            })?;
            acc += hc_sum(&self.params, s, x)?;
        }
        let mean = acc / CIRCLE_POINTS as f64;
        // phi is real for real lambda
        Ok(if self.lambda.im == 0.0 { Complex64::new(mean.re, 0.0) } else { mean })
    }
}

#[derive(Debug)]
struct OdeTable {
    z: Vec<f64>,
    f: Vec<Complex64>,
    df: Vec<Complex64>,
}

/// Advances `(F, F')` of `z(1-z)F'' + (c - (a+b+1)z)F' - abF = 0` from `z0`
/// to `z0 + delta` by the Taylor series about `z0`, which converges for
/// `|delta| < |z0|`. The scaled coefficients `d_n = F^{(n)}(z0) delta^n / n!`
/// obey a three-term recurrence.
fn taylor_step(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z0: f64,
    f: Complex64,
    df: Complex64,
    delta: f64,
) -> Result<(Complex64, Complex64)> {
    if delta == 0.0 {
        return Ok((f, df));
    }
    let q = z0 * (1.0 - z0);
    let mut d0 = f;
    let mut d1 = df * delta;
    let mut sum = d0 + d1;
    let mut dsum = d1;
    let mut quiet = 0;
    for n in 0..TAYLOR_CAP {
        let nf = n as f64;
        let lin = (c - (a + b + 1.0) * z0 + (1.0 - 2.0 * z0) * nf) * (nf + 1.0);
        let d2 = ((a + nf) * (b + nf) * d0 * (delta * delta) - lin * d1 * delta) / (q * (nf + 1.0) * (nf + 2.0));
        sum += d2;
        dsum += d2 * (nf + 2.0);
        let small = d2.norm() <= 1e-17 * sum.norm().max(f64::MIN_POSITIVE);
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 2 {
            return Ok((sum, dsum / delta));
        }
        d0 = d1;
        d1 = d2;
    }
    Err(Error::SeriesNonConvergence {
        terms: TAYLOR_CAP,
        residual: d1.norm(),
    })
}

fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - 2f64.ln()
}

/// `c(l) Phi_l(x) + c(-l) Phi_{-l}(x)` with
/// `Phi_l(x) = (2 cosh x)^{i l - rho} 2F1((rho - i l)/2, (a - b + 1 - i l)/2; 1 - i l; cosh^{-2} x)`.
fn hc_sum(params: &Parameters, hc: &HcCoefficients, x: f64) -> Result<Complex64> {
    let u = sech2(x);
    let l2c = x + (-2.0 * x).exp().ln_1p();
    let term = |lambda: Complex64, log_c: Option<Complex64>| -> Result<Complex64> {
        let Some(log_c) = log_c else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let il = Complex64::i() * lambda;
        let s = gauss_series(
            (params.rho() - il) * 0.5,
            (params.k1() + 1.0 - il) * 0.5,
            Complex64::new(1.0, 0.0) - il,
            u,
            SERIES_CAP,
        )?;
        Ok((log_c + (il - params.rho()) * l2c).exp() * s)
    };
    let plus = term(hc.lambda, hc.plus)?;
    if hc.lambda.im == 0.0 {
        return Ok(Complex64::new(2.0 * plus.re, 0.0));
    }
    Ok(plus + term(-hc.lambda, hc.minus)?)
}

/// `phi_lambda^{(alpha,beta)}(x) = 2F1((rho+i l)/2, (rho-i l)/2; alpha+1; -sinh^2 x)`.
pub fn jacobi_phi(params: &Parameters, lambda: Complex64, x: f64) -> Result<Complex64> {
    JacobiPhi::new(*params, lambda).eval(x)
}

/// `G_lambda` for one fixed `lambda`, reusable across many `x`.
#[derive(Debug)]
pub struct OpdamG {
    phi: JacobiPhi,
    shifted: JacobiPhi,
    factor: Complex64,
}

impl OpdamG {
    pub fn new(params: Parameters, lambda: Complex64) -> Self {
        let factor = (Complex64::i() * lambda + params.rho()) / (4.0 * (params.alpha() + 1.0));
        Self {
            phi: JacobiPhi::new(params, lambda),
            shifted: JacobiPhi::new(params.shifted(), lambda),
            factor,
        }
    }

    pub fn lambda(&self) -> Complex64 {
        self.phi.lambda
    }

    /// `G_lambda(x) = phi(x) + (rho + i l)/(4(alpha+1)) sinh(2x) phi^{(alpha+1,beta+1)}(x)`.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if x == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self.phi.eval(x)? + self.factor * (2.0 * x).sinh() * self.shifted.eval(x)?)
    }
}

/// The eigenfunction `G_lambda` of `T` with eigenvalue `i lambda`, `G_lambda(0) = 1`.
pub fn opdam_g(params: &Parameters, lambda: Complex64, x: f64) -> Result<Complex64> {
    OpdamG::new(*params, lambda).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::central_derivative;
    use crate::special::hyper::hyp2f1;

    fn p(a: f64, b: f64) -> Parameters {
        Parameters::new(a, b).unwrap()
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Direct Pfaff evaluation, no route selection.
    fn reference(params: &Parameters, lambda: Complex64, x: f64) -> Complex64 {
        let il = Complex64::i() * lambda;
        let s = x.sinh();
        hyp2f1((params.rho() + il) * 0.5, (params.rho() - il) * 0.5, params.alpha() + 1.0, -s * s).unwrap()
    }

    #[test]
    fn value_at_origin() {
        for l in [0.0, 1.0, 7.5, 40.0] {
            assert_eq!(jacobi_phi(&p(1.0, 0.25), re(l), 0.0).unwrap(), re(1.0));
        }
    }

    #[test]
    fn rank_one_closed_form() {
        let params = p(0.5, -0.5);
        let (l, x) = (2.0f64, 0.8f64);
        let want = (l * x).sin() / (l * x.sinh());
        let got = jacobi_phi(&params, re(l), x).unwrap();
        assert!((got.re - want).abs() / want.abs() < 1e-9);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn closed_form_across_routes() {
        let params = p(0.5, -0.5);
        for &l in &[0.0f64, 0.02, 0.3, 1.0, 5.0, 17.0, 40.0, 80.0, 150.0] {
            for &x in &[0.05f64, 0.13, 0.25, 0.4, 0.7, 1.0, 1.4, 2.5, 4.0, 8.0, 15.0] {
                let want = if l == 0.0 { x / x.sinh() } else { (l * x).sin() / (l * x.sinh()) };
                let got = jacobi_phi(&params, re(l), x).unwrap();
                let scale = (1.0 / (l.max(1.0) * x.sinh())).max(want.abs());
                assert!((got.re - want).abs() <= 1e-9 * scale, "l={l} x={x}: {} vs {want}", got.re);
            }
        }
    }

    #[test]
    fn harish_chandra_matches_pfaff() {
        for params in [p(1.0, 0.25), p(2.3, 0.7), p(0.0, -0.5), p(3.0, 3.0)] {
            for &l in &[0.7f64, 3.3, 12.0] {
                for &x in &[0.8f64, 1.5, 2.4] {
                    if l * x.tanh() > 9.0 {
                        // the Pfaff reference itself loses too many digits
                        continue;
                    }
                    let phi = JacobiPhi::new(params, re(l));
                    let hc = hc_sum(&params, phi.hc.as_ref().unwrap(), x).unwrap();
                    let pf = phi.pfaff(x).unwrap();
                    let scale = pf.norm().max((-params.rho() * x).exp() / l);
                    assert!((hc - pf).norm() < 1e-10 * scale, "{params:?} l={l} x={x}: {hc} vs {pf}");
                }
            }
        }
    }

    #[test]
    fn harish_chandra_matches_pfaff_off_axis() {
        let params = p(1.0, 0.25);
        for l in [Complex64::new(1.5, 0.6), Complex64::new(-2.0, -1.3), Complex64::new(0.3, 2.5)] {
            let phi = JacobiPhi::new(params, l);
            let hc = hc_sum(&params, phi.hc.as_ref().unwrap(), 1.7).unwrap();
            let pf = phi.pfaff(1.7).unwrap();
            assert!((hc - pf).norm() < 1e-10 * pf.norm(), "{l}: {hc} vs {pf}");
        }
    }

    #[test]
    fn circle_mean_matches_pfaff_on_poles() {
        let params = p(1.0, 0.25);
        for l in [re(0.0), re(0.01), Complex64::new(0.0, 1.0), Complex64::new(0.02, -2.0)] {
            let phi = JacobiPhi::new(params, l);
            let c = phi.circle_mean(2.5).unwrap();
            let pf = phi.pfaff(2.5).unwrap();
            assert!((c - pf).norm() < 1e-10 * pf.norm(), "{l}: {c} vs {pf}");
        }
    }

    #[test]
    fn large_x_near_zero_is_consistent() {
        // phi is even in lambda: eliminate the lambda^2 and lambda^4 terms
        // from off-pole samples and compare with the circle route at 0
        let params = p(1.0, 0.25);
        let x = 10.0;
        let d = 0.05;
        let f = |l: f64| jacobi_phi(&params, re(l), x).unwrap().re;
        let extrapolated = (15.0 * f(d) - 6.0 * f(2.0 * d) + f(3.0 * d)) / 10.0;
        let at_zero = f(0.0);
        assert!(at_zero > 0.0);
        assert!((at_zero - extrapolated).abs() < 5e-3 * at_zero, "{at_zero} vs {extrapolated}");
    }

    #[test]
    fn even_in_lambda_and_x() {
        let params = p(1.0, 0.25);
        for &(l, x) in &[(3.1, 1.2), (0.4, 5.0), (25.0, 0.3)] {
            let a = jacobi_phi(&params, re(l), x).unwrap();
            let b = jacobi_phi(&params, re(-l), x).unwrap();
            let c = jacobi_phi(&params, re(l), -x).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
            assert_eq!(a, c);
        }
    }

    #[test]
    fn matches_reference_series_on_small_x() {
        let params = p(2.3, 0.7);
        for &(l, x) in &[(0.5, 0.3), (7.0, 0.9), (Complex64::new(0.0, 9.0).im, 1.2)] {
            let got = jacobi_phi(&params, re(l), x).unwrap();
            let want = reference(&params, re(l), x);
            assert!((got - want).norm() < 1e-9 * want.norm().max(1e-3));
        }
        let l = Complex64::new(0.0, 9.0);
        let got = jacobi_phi(&params, l, 1.2).unwrap();
        let want = reference(&params, l, 1.2);
        assert!((got - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn ode_route_for_large_frequencies() {
        let phi = JacobiPhi::new(p(0.5, -0.5), re(150.0));
        assert_eq!(phi.route(0.25), Route::Ode);
        // eigenvalue equation away from the closed-form case
        let params = p(1.0, 0.25);
        for l in [60.0, 120.0] {
            let g = OpdamG::new(params, re(l));
            let f = |x: f64| g.eval(x).unwrap();
            for x in [0.3, 0.6, 1.0] {
                let h = 1e-4;
                let d = (-f(x + 2.0 * h) + f(x + h) * 8.0 - f(x - h) * 8.0 + f(x - 2.0 * h)) / (12.0 * h);
                let c = 0.5 * ((2.0 * params.alpha() + 1.0) / x.tanh() + (2.0 * params.beta() + 1.0) * x.tanh());
                let t = d + (f(x) - f(-x)) * c - f(-x) * params.rho();
                let r = (t - Complex64::new(0.0, l) * f(x)).norm() / (l * f(0.0).norm());
                assert!(r < 1e-6, "l={l} x={x}: {r}");
            }
        }
    }

    #[test]
    fn g_normalization() {
        for params in [p(0.5, -0.5), p(1.0, 0.25), p(2.3, 0.7)] {
            for l in [re(0.0), re(3.0), Complex64::new(1.0, -2.0)] {
                assert_eq!(opdam_g(&params, l, 0.0).unwrap(), re(1.0));
            }
        }
    }

    #[test]
    fn g_matches_derivative_form() {
        let params = p(1.0, 0.25);
        let (l, x) = (2.0, 0.7);
        let dphi = central_derivative(|t| jacobi_phi(&params, re(l), t).unwrap(), x, 1e-3);
        let phi = jacobi_phi(&params, re(l), x).unwrap();
        let want = phi - dphi / (Complex64::new(params.rho(), -l));
        let got = opdam_g(&params, re(l), x).unwrap();
        assert!((got - want).norm() < 1e-6);
    }

    #[test]
    fn g_bounded_by_g0() {
        let params = p(1.0, 0.25);
        let x = 1.5;
        let g0 = opdam_g(&params, re(0.0), x).unwrap();
        assert!(g0.im.abs() < 1e-14 && g0.re > 0.0);
        assert!(opdam_g(&params, re(5.0), x).unwrap().norm() <= g0.re);
    }
}
