use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// B_{2k} / (2k (2k-1)) for k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Principal branch of `log Gamma(w)`; the imaginary part lies in `(-pi, pi]`.
pub fn log_gamma(w: Complex64) -> Result<Complex64> {
    Ok(principal(log_gamma_analytic(w)?))
}

/// The analytic continuation of `log Gamma` from the positive axis
/// (imaginary part not reduced). Exponentials of sums of these are exact.
pub(crate) fn log_gamma_analytic(w: Complex64) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::InvalidParameters(format!("log_gamma argument {w} is not finite")));
    }
    if w.im == 0.0 && w.re <= 0.0 && w.re == w.re.round() {
        return Err(Error::Pole {
            function: "log_gamma",
            at: format!("{}", w.re),
        });
    }
    if w.im < 0.0 {
        return log_gamma_analytic(w.conj()).map(|v| v.conj());
    }
    if w.re < 0.5 {
        // Gamma(w) Gamma(1-w) = pi / sin(pi w)
        let reflected = log_gamma_analytic(Complex64::new(1.0, 0.0) - w)?;
        if w.im == 0.0 {
            let s = (PI * w.re).sin();
            let im = if s < 0.0 { PI } else { 0.0 };
            return Ok(Complex64::new(PI.ln() - s.abs().ln() - reflected.re, im));
        }
        // log sin from exp(2 i pi w), which has modulus < 1 for Im w > 0
        let e = (Complex64::i() * 2.0 * PI * w).exp();
        let log_sin = -Complex64::i() * PI * w + ((e - 1.0) / Complex64::new(0.0, 2.0)).ln();
        return Ok(Complex64::new(PI.ln(), 0.0) - log_sin - reflected);
    }
    Ok(stirling_shifted(w))
}

fn stirling_shifted(w: Complex64) -> Complex64 {
    let mut z = w;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift
}

fn principal(v: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    let mut im = v.im - two_pi * (v.im / two_pi).round();
    if im <= -PI {
        im += two_pi;
    }
    Complex64::new(v.re, im)
}

/// `log(1/Gamma(w))`, or `None` where `1/Gamma` vanishes.
pub(crate) fn log_rgamma(w: Complex64) -> Result<Option<Complex64>> {
    match log_gamma_analytic(w) {
        Ok(v) => Ok(Some(-v)),
        Err(Error::Pole { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exact_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - PI.sqrt().ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        // Gamma(10) = 9!
        let ten = log_gamma(c(10.0, 0.0)).unwrap();
        assert!((ten.re - 362880.0f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn modulus_on_imaginary_axis_matches_reflection_oracle() {
        let lambda = 1.3f64;
        let v = log_gamma(c(0.0, lambda)).unwrap();
        let got = (2.0 * v.re).exp();
        let want = PI / (lambda * (PI * lambda).sinh());
        assert!(((got - want) / want).abs() < 1e-12);
    }

    #[test]
    fn negative_half_integer_and_poles() {
        // Gamma(-1/2) = -2 sqrt(pi)
        let v = log_gamma(c(-0.5, 0.0)).unwrap();
        assert!((v.re - (2.0 * PI.sqrt()).ln()).abs() < 1e-13);
        assert!((v.im.abs() - PI).abs() < 1e-13);
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(log_gamma(c(-3.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn recurrence_in_the_complex_plane() {
        for &(re, im) in &[(0.3, 2.0), (-2.7, 0.4), (5.5, -11.0), (-7.2, -3.3), (0.01, 40.0)] {
            let z = c(re, im);
            let lhs = log_gamma_analytic(z + 1.0).unwrap();
            let rhs = log_gamma_analytic(z).unwrap() + z.ln();
            let diff = (lhs - rhs).exp();
            assert!((diff - 1.0).norm() < 1e-12, "{z}: {diff}");
        }
    }

    #[test]
    fn conjugate_symmetry_and_principal_branch() {
        let z = c(3.0, 25.0);
        let a = log_gamma(z).unwrap();
        let b = log_gamma(z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        assert!(a.im > -PI && a.im <= PI);
    }

    #[test]
    fn large_imaginary_part_modulus() {
        // |Gamma(1/2 + i y)|^2 = pi / cosh(pi y)
        let y = 30.0;
        let v = log_gamma(c(0.5, y)).unwrap();
        let want = PI.ln() - (PI * y) - (0.5 * (1.0 + (-2.0 * PI * y).exp())).ln();
        assert!((2.0 * v.re - want).abs() < 1e-12);
    }
}
