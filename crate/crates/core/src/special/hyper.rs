use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const SERIES_CAP: usize = 10_000;
const SERIES_TOL: f64 = 1e-14;

/// Direct summation of `sum (a)_n (b)_n / ((c)_n n!) w^n` for `0 <= w < 1`.
pub(crate) fn gauss_series(a: Complex64, b: Complex64, c: Complex64, w: f64, cap: usize) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut term = one;
    let mut sum = one;
    if w == 0.0 {
        return Ok(sum);
    }
    let tail_factor = 1.0 / (1.0 - w);
    let mut residual = f64::INFINITY;
    for n in 0..cap {
        let nf = n as f64;
        let denom = (c + nf) * (nf + 1.0);
        if denom.norm() == 0.0 {
            return Err(Error::Pole {
                function: "hyp2f1",
                at: format!("c = {c}"),
            });
        }
        let next = term * (a + nf) * (b + nf) / denom * w;
        sum += next;
        let mag = next.norm();
        // Once the term ratio has settled below one, the remaining tail is
        // bounded by a geometric series with ratio close to w.
        let ratio = if term.norm() > 0.0 { mag / term.norm() } else { 0.0 };
        term = next;
        if mag == 0.0 {
            return Ok(sum);
        }
        residual = mag * tail_factor;
        if ratio < 1.0 && residual <= SERIES_TOL * sum.norm().max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
        if ratio < 1.0 && residual <= 1e-300 {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: cap,
        residual,
    })
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real `z <= 0`.
///
/// Pfaff's transformation `2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))`
/// moves the argument into `[0, 1)`, where the series converges.
pub fn hyp2f1(a: Complex64, b: Complex64, c: f64, z: f64) -> Result<Complex64> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameters(format!("hyp2f1 requires c > 0, got {c}")));
    }
    if !(z <= 0.0) {
        return Err(Error::InvalidParameters(format!("hyp2f1 is evaluated only for z <= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let w = z / (z - 1.0);
    let cc = Complex64::new(c, 0.0);
    // either parameter can be pulled out; keep the one whose series is tamer
    let (lead, other) = if (cc - b).norm() <= (cc - a).norm() { (a, b) } else { (b, a) };
    let s = gauss_series(lead, cc - other, cc, w, SERIES_CAP)?;
    Ok(s * (-lead * (1.0 - z).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_singular_endpoints, QuadratureSpec};
    use crate::special::gamma::log_gamma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_argument() {
        assert_eq!(hyp2f1(c(3.0, 1.0), c(-2.0, 5.0), 1.5, 0.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn logarithm_closed_form() {
        // 2F1(1,1;2;z) = -log(1-z)/z
        let v = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), 2.0, -1.0).unwrap();
        assert!((v.re - 2f64.ln()).abs() < 1e-14);
        // plain series oracle at z = -1/2, inside the unit disc
        let z = -0.5f64;
        let mut s = 0.0;
        for n in 0..200 {
            s += z.powi(n) / (n as f64 + 1.0);
        }
        let v = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), 2.0, z).unwrap();
        assert!((v.re - s).abs() < 1e-14);
    }

    #[test]
    fn large_negative_argument_against_euler_integral() {
        // 2F1(a,b;c;z) = Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt
        let (a, b, cc, z) = (c(1.3, 2.0), 0.8, 2.1, -25.0);
        let spec = QuadratureSpec::default().with_tol(1e-13);
        let integral = integrate_singular_endpoints(
            |t| {
                let base = (1.0 - z * t).ln();
                (-a * base).exp() * t.powf(b - 1.0) * (1.0 - t).powf(cc - b - 1.0)
            },
            0.0,
            1.0,
            &spec,
        )
        .unwrap()
        .value;
        let pre = (log_gamma(c(cc, 0.0)).unwrap()
            - log_gamma(c(b, 0.0)).unwrap()
            - log_gamma(c(cc - b, 0.0)).unwrap())
        .exp();
        let want = integral * pre;
        let got = hyp2f1(a, c(b, 0.0), cc, z).unwrap();
        assert!((got - want).norm() / want.norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn transformed_series_against_brute_force_sum() {
        let (a, b, cc, z) = (c(2.5, 3.0), c(2.5, -3.0), 2.0, -25.0);
        let w = z / (z - 1.0);
        let bb = c(cc, 0.0) - b;
        let mut term = c(1.0, 0.0);
        let mut sum = term;
        for n in 0..20_000 {
            let n = n as f64;
            term = term * (a + n) * (bb + n) / ((cc + n) * (n + 1.0)) * w;
            sum += term;
        }
        let want = sum * (-a * (1.0 - z).ln()).exp();
        let got = hyp2f1(a, b, cc, z).unwrap();
        assert!((got - want).norm() / want.norm() < 1e-10);
    }

    #[test]
    fn rejects_positive_argument() {
        assert!(hyp2f1(c(1.0, 0.0), c(1.0, 0.0), 2.0, 0.5).is_err());
    }

    #[test]
    fn cap_is_reported() {
        match gauss_series(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 0.9999, 50) {
            Err(Error::SeriesNonConvergence { terms, .. }) => assert_eq!(terms, 50),
            other => panic!("{other:?}"),
        }
    }
}
