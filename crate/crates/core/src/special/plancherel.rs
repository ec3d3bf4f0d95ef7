use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::log_gamma_analytic;
use super::jacobi::log_c;
use crate::error::Result;
use crate::model::Parameters;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFunctionValue {
    pub value: Complex64,
    /// `|c(lambda)|^{-2}`.
    pub abs_sq_inverse: f64,
}

/// The Harish-Chandra c-function together with `|c|^{-2}`.
pub fn c_function(params: &Parameters, lambda: Complex64) -> Result<CFunctionValue> {
    match log_c(params, lambda)? {
        Some(l) => Ok(CFunctionValue {
            value: l.exp(),
            abs_sq_inverse: (-2.0 * l.re).exp(),
        }),
        None => Ok(CFunctionValue {
            value: Complex64::new(0.0, 0.0),
            abs_sq_inverse: f64::INFINITY,
        }),
    }
}

/// The other Gamma-quotient form,
/// `Gamma(2a+1)/Gamma(a+1/2) * Gamma(i l)/Gamma(a-b+i l) * Gamma((a-b+i l)/2)/Gamma((rho+i l)/2)`.
pub fn c_function_alt(params: &Parameters, lambda: Complex64) -> Result<Complex64> {
    let il = Complex64::i() * lambda;
    let a = params.alpha();
    let k1 = params.k1();
    let lg = |z: Complex64| log_gamma_analytic(z);
    let v = lg(Complex64::new(2.0 * a + 1.0, 0.0))? - lg(Complex64::new(a + 0.5, 0.0))? + lg(il)? - lg(il + k1)?
        + lg((il + k1) * 0.5)?
        - lg((il + params.rho()) * 0.5)?;
    Ok(v.exp())
}

/// `|c(lambda)|^{-2}` for real `lambda`, extended by `0` at `lambda = 0`.
pub fn c_abs_sq_inverse(params: &Parameters, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    match c_function(params, Complex64::new(lambda, 0.0)) {
        Ok(c) => c.abs_sq_inverse,
        Err(_) => 0.0,
    }
}

/// `A(|x|) = sinh^{2a+1}|x| cosh^{2b+1}|x|`.
pub fn weight_a(params: &Parameters, x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return 0.0;
    }
    log_weight_a(params, x).exp()
}

/// `log A(|x|)`, finite for `x != 0`.
pub fn log_weight_a(params: &Parameters, x: f64) -> f64 {
    let x = x.abs();
    let e = (-2.0 * x).exp();
    let ln_sinh = if x < 0.5 { x.sinh().ln() } else { x + (-e).ln_1p() - 2f64.ln() };
    let ln_cosh = x + e.ln_1p() - 2f64.ln();
    (2.0 * params.alpha() + 1.0) * ln_sinh + (2.0 * params.beta() + 1.0) * ln_cosh
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelDensities {
    /// Density on `[0, inf)` of the two-term form.
    pub symmetric: f64,
    /// Density on the full line of the pairing form and of the inversion.
    pub asymmetric: Complex64,
    pub asymmetric_modulus: f64,
}

/// The constant in front of `|c|^{-2}`: `2^{2 rho} / (8 pi)`.
pub fn plancherel_constant(params: &Parameters) -> f64 {
    (2.0 * params.rho() * 2f64.ln()).exp() / (8.0 * PI)
}

pub fn plancherel_densities(params: &Parameters, lambda: f64) -> PlancherelDensities {
    if lambda == 0.0 {
        return PlancherelDensities {
            symmetric: 0.0,
            asymmetric: Complex64::new(0.0, 0.0),
            asymmetric_modulus: 0.0,
        };
    }
    let base = plancherel_constant(params) * c_abs_sq_inverse(params, lambda);
    // 1 - rho/(i l) = 1 + i rho / l
    let factor = Complex64::new(1.0, params.rho() / lambda);
    let asymmetric = factor * base;
    PlancherelDensities {
        symmetric: base,
        asymmetric,
        asymmetric_modulus: base * factor.norm(),
    }
}
