//! Product-formula kernel `K(x, y, z)`, generalized translation and
//! convolution.
//!
//! `dmu_{x,y}(z) = K(x,y,z) A(|z|) dz` for `xy != 0`, and the point mass at
//! the nonzero argument otherwise, so that `tau_0 f = f`.

use std::cell::RefCell;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GridFunction, Parameters, SpatialGrid};
use crate::quadrature::{tanh_sinh, QuadratureSpec};
use crate::special::{weight_a, OpdamG};
use crate::transform::measure_weights;

/// Calibration point for the normalizing constant.
pub const CALIBRATION_POINT: (f64, f64) = (0.7, 1.1);

/// `(cosh x cosh y - cosh z cos chi) / (sinh x sinh y)`, and `0` when `xy = 0`.
pub fn sigma(x: f64, y: f64, z: f64, chi: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    (x.cosh() * y.cosh() - z.cosh() * chi.cos()) / (x.sinh() * y.sinh())
}

/// `1 - cosh^2 x - cosh^2 y - cosh^2 z + 2 cosh x cosh y cosh z cos chi`.
pub fn g_quantity(x: f64, y: f64, z: f64, chi: f64) -> f64 {
    let (a, b, c) = (x.cosh(), y.cosh(), z.cosh());
    1.0 - a * a - b * b - c * c + 2.0 * a * b * c * chi.cos()
}

/// `g(x, y, z, 0)` as `4 sinh(s) sinh(s - |x|) sinh(s - |y|) sinh(s - |z|)`,
/// `s` the half perimeter; positive exactly inside the triangle.
fn g_at_zero(x: f64, y: f64, z: f64) -> f64 {
    let (x, y, z) = (x.abs(), y.abs(), z.abs());
    let s = 0.5 * (x + y + z);
    4.0 * s.sinh() * (s - x).sinh() * (s - y).sinh() * (s - z).sinh()
}

/// `||x| - |y|| < |z| < |x| + |y|`.
pub fn in_triangle(x: f64, y: f64, z: f64) -> bool {
    let (x, y, z) = (x.abs(), y.abs(), z.abs());
    (x - y).abs() < z && z < x + y
}

/// Gauss–Jacobi nodes and weights on `[-1, 1]` for the `chi` integral.
type ChiRule = Arc<[(f64, f64)]>;

#[derive(Debug, Clone, Serialize)]
pub struct KernelContext {
    #[serde(skip)]
    pub params: Parameters,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(skip)]
    pub chi_spec: QuadratureSpec,
    /// Rule for the outer `z` integrals of translation and the product formula.
    #[serde(skip)]
    pub z_spec: QuadratureSpec,
    /// Degree of the `chi` rule that met the tolerance of `chi_spec`.
    pub chi_degree: usize,
    #[serde(skip)]
    rule: ChiRule,
}

fn check_kernel_params(params: &Parameters) -> Result<()> {
    if !(params.alpha() > params.beta()) || !(params.beta() > -0.5) {
        return Err(Error::UnsupportedParameters(format!(
            "the product kernel needs alpha > beta > -1/2, got ({}, {})",
            params.alpha(),
            params.beta()
        )));
    }
    Ok(())
}

/// Default rule for the `z` integrals: a few digits looser than the `chi` rule.
pub fn outer_spec(chi_spec: &QuadratureSpec) -> QuadratureSpec {
    chi_spec.with_tol((chi_spec.rel_tol * 1e3).clamp(1e-9, 1e-6))
}

/// Rule for weight `(1-t)^{alpha-beta-1} (1+t)^{2 beta}`; `degree` must be even.
fn chi_rule(params: &Parameters, degree: usize) -> Result<ChiRule> {
    let a = params.alpha() - params.beta() - 1.0;
    let b = 2.0 * params.beta();
    let exponent = |v: f64| {
        FiniteAboveNegOneF64::try_from(v)
            .map_err(|_| Error::UnsupportedParameters(format!("chi rule exponent {v} is not above -1")))
    };
    let deg = NonZeroUsize::new(degree).ok_or_else(|| Error::InvalidGrid("chi rule degree must be positive".into()))?;
    let rule = GaussJacobi::new(deg, exponent(a)?, exponent(b)?);
    Ok(rule.nodes().copied().zip(rule.weights().copied()).collect())
}

/// `K(x, y, z) / M` with the `chi` integral done by `rule`.
///
/// With `chi = chi0 (1 + t) / 2` the endpoint factors `chi^{2 beta}` and
/// `(chi0 - chi)^{alpha - beta - 1}` become the Jacobi weight; what is left
/// is analytic on `[0, chi0]`.
fn kernel_unscaled(params: &Parameters, rule: &[(f64, f64)], x: f64, y: f64, z: f64) -> Result<f64> {
    if x == 0.0 || y == 0.0 || z == 0.0 {
        return Err(Error::InvalidParameters(format!(
            "kernel needs xyz != 0, got ({x}, {y}, {z})"
        )));
    }
    if !in_triangle(x, y, z) {
        return Ok(0.0);
    }
    let d = g_at_zero(x, y, z);
    if !(d > 0.0) {
        return Ok(0.0);
    }
    let c4 = 4.0 * x.cosh() * y.cosh() * z.cosh();
    // sin^2(chi0 / 2) = g(chi = 0) / (4 cosh x cosh y cosh z)
    let chi0 = 2.0 * (d / c4).sqrt().min(1.0).asin();
    let (a, b) = (params.alpha(), params.beta());
    let gexp = a - b - 1.0;
    let coth3 = 1.0 / (x.tanh() * y.tanh() * z.tanh());
    let last = params.rho() / (b + 0.5) * coth3;
    let half = 0.5 * chi0;
    let mut sum = 0.0;
    for &(t, w) in rule.iter() {
        let chi = half * (1.0 + t);
        let to_end = half * (1.0 - t);
        // g / (chi0 - chi) and sin(chi) / chi, both positive and smooth
        let g_ratio = c4 * sinc(0.5 * to_end) * 0.5 * (0.5 * (chi0 + chi)).sin();
        let s = chi.sin();
        let bracket = 1.0 - sigma(x, y, z, chi) + sigma(x, z, y, chi) + sigma(z, y, x, chi) + last * s * s;
        sum += w * (gexp * g_ratio.ln() + 2.0 * b * sinc(chi).ln()).exp() * bracket;
    }
    // (chi0 - chi)^{gexp} chi^{2b} dchi = half^{gexp + 2b + 1} (1-t)^{gexp} (1+t)^{2b} dt
    let log_scale = (gexp + 2.0 * b + 1.0) * half.ln();
    let pre = -2.0 * a * (x.sinh().abs().ln() + y.sinh().abs().ln() + z.sinh().abs().ln());
    Ok((pre + log_scale).exp() * sum)
}

fn sinc(v: f64) -> f64 {
    if v.abs() < 1e-4 {
        1.0 - v * v / 6.0
    } else {
        v.sin() / v
    }
}

/// `K(x, y, z)`; zero outside the triangle.
pub fn kernel_k(ctx: &KernelContext, x: f64, y: f64, z: f64) -> Result<f64> {
    Ok(ctx.m * kernel_unscaled(&ctx.params, &ctx.rule, x, y, z)?)
}

/// `int f(z) K(x,y,z) A(|z|) dz` over both signed pieces of the triangle,
/// restricted to `window`, with the kernel scaled by `m`.
#[allow(clippy::too_many_arguments)]
fn measure_integral<F: Fn(f64) -> Complex64>(
    params: &Parameters,
    rule: &[(f64, f64)],
    z_spec: &QuadratureSpec,
    m: f64,
    f: &F,
    x: f64,
    y: f64,
    window: (f64, f64),
) -> Result<Complex64> {
    let lo = (x.abs() - y.abs()).abs();
    let hi = x.abs() + y.abs();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b) in [(lo, hi), (-hi, -lo)] {
        let (a, b) = (a.max(window.0), b.min(window.1));
        if !(a < b) {
            continue;
        }
        let e = tanh_sinh(
            |z, _, _| {
                if z == 0.0 || failure.borrow().is_some() {
                    return Complex64::new(0.0, 0.0);
                }
                match kernel_unscaled(params, rule, x, y, z) {
                    Ok(k) if k != 0.0 => f(z) * (k * weight_a(params, z)),
                    Ok(_) => Complex64::new(0.0, 0.0),
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            a,
            b,
            z_spec,
        );
        if let Some(err) = failure.borrow_mut().take() {
            return Err(err);
        }
        total += e?.value;
    }
    Ok(total * m)
}

const CHI_DEGREES: [usize; 5] = [8, 16, 32, 64, 128];

/// Smallest degree whose kernel values at sample points of the calibration
/// triangle agree with the next degree to the tolerance of `chi_spec`.
fn choose_chi_rule(params: &Parameters, chi_spec: &QuadratureSpec) -> Result<(usize, ChiRule)> {
    let (x0, y0) = CALIBRATION_POINT;
    let (lo, hi) = ((x0 - y0).abs(), x0 + y0);
    let zs: Vec<f64> = [1e-6, 0.01, 0.3, 0.7, 0.99, 1.0 - 1e-6].iter().map(|u| lo + (hi - lo) * u).collect();
    let mut previous = chi_rule(params, CHI_DEGREES[0])?;
    for pair in CHI_DEGREES.windows(2) {
        let next = chi_rule(params, pair[1])?;
        let close = zs.iter().try_fold(true, |ok, &z| -> Result<bool> {
            let a = kernel_unscaled(params, &previous, x0, y0, z)?;
            let b = kernel_unscaled(params, &next, x0, y0, z)?;
            Ok(ok && (a - b).abs() <= chi_spec.abs_tol.max(chi_spec.rel_tol * b.abs()))
        })?;
        if close {
            return Ok((pair[0], previous));
        }
        previous = next;
    }
    Err(Error::Calibration(format!(
        "chi rule did not reach tolerance {:e} by degree {}",
        chi_spec.rel_tol,
        CHI_DEGREES[CHI_DEGREES.len() - 1]
    )))
}

/// Fixes `M` by the product formula for `G_0` at [`CALIBRATION_POINT`].
pub fn calibrate_m(params: &Parameters, chi_spec: &QuadratureSpec) -> Result<KernelContext> {
    check_kernel_params(params)?;
    chi_spec.validate()?;
    let (chi_degree, rule) = choose_chi_rule(params, chi_spec)?;
    let z_spec = outer_spec(chi_spec);
    let (x0, y0) = CALIBRATION_POINT;
    let g0 = OpdamG::new(*params, Complex64::new(0.0, 0.0));
    let lhs = g0.eval(x0)? * g0.eval(y0)?;
    let eval = |z: f64| g0.eval(z).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let integral = measure_integral(params, &rule, &z_spec, 1.0, &eval, x0, y0, (f64::NEG_INFINITY, f64::INFINITY))?;
    if !integral.re.is_finite() || integral.norm() < 1e-12 * lhs.norm() {
        return Err(Error::Calibration(format!(
            "calibration integral {integral} is not usable at ({x0}, {y0})"
        )));
    }
    let m = (lhs / integral).re;
    Ok(KernelContext {
        params: *params,
        m,
        chi_spec: *chi_spec,
        z_spec,
        chi_degree,
        rule,
    })
}

impl KernelContext {
    /// [`calibrate_m`] with the default rule at `chi_tol`.
    pub fn calibrated(params: &Parameters, chi_tol: f64) -> Result<Self> {
        calibrate_m(params, &QuadratureSpec::default().with_tol(chi_tol))
    }

    /// `int f dmu_{x,y}` for an explicit function.
    pub fn translate_fn<F: Fn(f64) -> Complex64>(&self, f: F, x: f64, y: f64) -> Result<Complex64> {
        self.translate_windowed(&f, x, y, (f64::NEG_INFINITY, f64::INFINITY))
    }

    fn translate_windowed<F: Fn(f64) -> Complex64>(&self, f: &F, x: f64, y: f64, window: (f64, f64)) -> Result<Complex64> {
        if x == 0.0 {
            return Ok(f(y));
        }
        if y == 0.0 {
            return Ok(f(x));
        }
        measure_integral(&self.params, &self.rule, &self.z_spec, self.m, f, x, y, window)
    }

    /// `int G_lambda dmu_{x,y}`, to compare with `G_lambda(x) G_lambda(y)`.
    pub fn product_integral(&self, x: f64, y: f64, lambda: Complex64) -> Result<Complex64> {
        let g = OpdamG::new(self.params, lambda);
        self.translate_fn(|z| g.eval(z).unwrap_or(Complex64::new(f64::NAN, 0.0)), x, y)
    }
}

/// `tau_x f(y) = int f(z) dmu_{x,y}(z)`, `f` interpolated from its grid.
pub fn translate(ctx: &KernelContext, f: &GridFunction, x: f64, y: f64) -> Result<Complex64> {
    let Some(window) = f.support_bounds(0.0) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    ctx.translate_windowed(&|z| f.interpolate(z), x, y, window)
}

/// `f * g (x) = int tau_x f(-y) g(y) A(|y|) dy`, trapezoid rule in `y` on the grid of `g`.
pub fn convolve(ctx: &KernelContext, f: &GridFunction, g: &GridFunction, x: f64) -> Result<Complex64> {
    if f.is_zero() || g.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let grid = g.grid();
    let w = measure_weights(&ctx.params, grid);
    let terms = (0..grid.points())
        .into_par_iter()
        .filter(|&i| g.values()[i] != Complex64::new(0.0, 0.0) && w[i] != 0.0)
        .map(|i| {
            let y = grid.node(i);
            Ok(translate(ctx, f, x, -y)? * g.values()[i] * w[i])
        })
        .collect::<Result<Vec<Complex64>>>()?;
    Ok(terms.iter().sum())
}

/// [`convolve`] at every node of `out`. Nodes beyond the sum of the two
/// support radii are zero without evaluation.
pub fn convolve_on(ctx: &KernelContext, f: &GridFunction, g: &GridFunction, out: SpatialGrid) -> Result<GridFunction> {
    let radius = |h: &GridFunction| h.support_bounds(0.0).map(|(a, b)| a.abs().max(b.abs()));
    let (Some(rf), Some(rg)) = (radius(f), radius(g)) else {
        return Ok(GridFunction::zeros(out));
    };
    let values = out
        .nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x| {
            if x.abs() > rf + rg {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                convolve(ctx, f, g, x)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(out, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> KernelContext {
        KernelContext::calibrated(&Parameters::new(1.0, 0.25).unwrap(), 1e-10).unwrap()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(0.0, 1.0, 2.0, 0.3), 0.0);
        let (x, y, z) = (1.0f64, 1.0f64, 2.0f64);
        let chi = (x.cosh() * y.cosh() / z.cosh()).acos();
        assert!(sigma(x, y, z, chi).abs() < 1e-14);
        let want = (1f64.cosh().powi(2) - 1.5f64.cosh() * 0.4f64.cos()) / 1f64.sinh().powi(2);
        assert!((sigma(1.0, 1.0, 1.5, 0.4) - want).abs() < 1e-14);
        assert_eq!(sigma(0.7, 1.1, 1.6, 1.0), sigma(1.1, 0.7, 1.6, 1.0));
    }

    #[test]
    fn g_values() {
        assert!((g_quantity(0.0, 0.0, 0.0, 0.9) - (2.0 * 0.9f64.cos() - 2.0)).abs() < 1e-15);
        for (x, y, z) in [(0.7, 1.1, 1.5), (1.0, 0.5, 0.6), (0.3, 2.0, 1.9)] {
            assert!((g_at_zero(x, y, z) - g_quantity(x, y, z, 0.0)).abs() < 1e-13);
        }
        let (x, y, z) = (1.0, 1.0, 1.5);
        let h = 1e-5;
        let fd = (g_quantity(x, y, z, 0.7 + h) - g_quantity(x, y, z, 0.7 - h)) / (2.0 * h);
        let want = -2.0 * x.cosh() * y.cosh() * f64::cosh(z) * 0.7f64.sin();
        assert!((fd - want).abs() < 1e-8 * want.abs());
    }

    #[test]
    fn g_sign_scan() {
        // g > 0 for some chi exactly inside the triangle
        let (x, y) = (1.0, 0.5);
        for i in 0..300 {
            let z = 0.01 * i as f64 + 0.005;
            let max = (0..=200)
                .map(|j| g_quantity(x, y, z, std::f64::consts::PI * j as f64 / 200.0))
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(max > 0.0, in_triangle(x, y, z), "z = {z}");
        }
        assert!(g_quantity(1.0, 0.5, 2.0, 0.3) <= 0.0);
    }

    #[test]
    fn kernel_support_and_symmetry() {
        let c = ctx();
        assert_eq!(kernel_k(&c, 1.0, 1.0, 2.5).unwrap(), 0.0);
        let a = kernel_k(&c, 0.7, 1.1, 1.5).unwrap();
        let b = kernel_k(&c, 1.1, 0.7, 1.5).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs());
        assert!(kernel_k(&c, 0.0, 1.0, 1.0).is_err());
        assert!(matches!(
            KernelContext::calibrated(&Parameters::new(0.5, -0.5).unwrap(), 1e-10),
            Err(Error::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn calibration_point_is_exact() {
        let c = ctx();
        let (x, y) = CALIBRATION_POINT;
        let g = OpdamG::new(c.params, Complex64::new(0.0, 0.0));
        let lhs = g.eval(x).unwrap() * g.eval(y).unwrap();
        let rhs = c.product_integral(x, y, Complex64::new(0.0, 0.0)).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm());
    }

    #[test]
    fn calibration_is_stable_under_refinement() {
        let params = Parameters::new(1.0, 0.25).unwrap();
        let a = KernelContext::calibrated(&params, 1e-9).unwrap().m;
        let b = KernelContext::calibrated(&params, 1e-12).unwrap().m;
        assert!((a - b).abs() < 1e-6 * a.abs());
    }

    #[test]
    fn product_formula_off_calibration() {
        let c = ctx();
        for (x, y, l) in [(1.2, 0.6, 1.5), (-0.8, 1.3, 0.7), (0.9, -0.4, 3.0)] {
            let lam = Complex64::new(l, 0.0);
            let g = OpdamG::new(c.params, lam);
            let lhs = g.eval(x).unwrap() * g.eval(y).unwrap();
            let rhs = c.product_integral(x, y, lam).unwrap();
            assert!((lhs - rhs).norm() <= 1e-2 * lhs.norm() + 1e-3, "({x},{y},{l}): {lhs} vs {rhs}");
        }
    }

    #[test]
    fn translation_by_zero() {
        let c = ctx();
        let grid = SpatialGrid::new(4.0, 401).unwrap();
        let f = GridFunction::from_real_fn(grid, |x| (-x * x).exp() * (1.0 + x));
        assert_eq!(translate(&c, &f, 0.0, 0.5).unwrap(), f.interpolate(0.5));
        assert_eq!(translate(&c, &f, 0.5, 0.0).unwrap(), f.interpolate(0.5));
        assert_eq!(convolve(&c, &f, &GridFunction::zeros(grid), 0.3).unwrap(), Complex64::new(0.0, 0.0));
    }
}
