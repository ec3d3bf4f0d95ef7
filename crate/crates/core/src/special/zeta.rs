use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::log_gamma_analytic;

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACT: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// Riemann zeta for real `s > 1` by Euler–Maclaurin summation.
fn zeta_right(s: f64) -> f64 {
    const N: usize = 12;
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising product s (s+1) ... (s+2j-2)
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum += b * rising * power;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power /= n * n;
    }
    sum
}

/// `zeta(-s)` for `s > 0`, through the functional equation.
pub(crate) fn zeta_negative(s: f64) -> f64 {
    let half = -0.5 * PI * s;
    // sin(-pi s/2) zeta(1+s) stays finite as s -> 0
    let product = if s < 1e-6 { -0.5 * PI } else { half.sin() * zeta_right(1.0 + s) };
    let lg = log_gamma_analytic(Complex64::new(1.0 + s, 0.0)).map(|v| v.re).unwrap_or(f64::INFINITY);
    2.0 * (lg - s * (2.0 * PI).ln()).exp() / (2.0 * PI) * product
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_half_line() {
        assert!((zeta_right(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta_right(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        // zeta(1+e) = 1/e + euler_gamma + O(e)
        let e = 1e-5;
        assert!((zeta_right(1.0 + e) - 1.0 / e - 0.5772156649015329).abs() < 1e-4);
    }

    #[test]
    fn negative_integers() {
        assert!((zeta_negative(1.0) + 1.0 / 12.0).abs() < 1e-14);
        assert!((zeta_negative(3.0) - 1.0 / 120.0).abs() < 1e-14);
        assert!((zeta_negative(5.0) + 1.0 / 252.0).abs() < 1e-14);
        assert!(zeta_negative(2.0).abs() < 1e-15);
        assert!((zeta_negative(1e-9) + 0.5).abs() < 1e-8);
    }

    #[test]
    fn half_integer_against_direct_sum() {
        // zeta(-1/2) = -zeta(3/2)/(4 pi)
        let z32: f64 = zeta_right(1.5);
        assert!((zeta_negative(0.5) + z32 / (4.0 * PI)).abs() < 1e-13);
        // zeta(3/2) by a partial sum with an integral tail
        let n = 200_000;
        let partial: f64 = (1..n).map(|k| (k as f64).powf(-1.5)).sum();
        let tail = 2.0 / (n as f64).sqrt() + 0.5 * (n as f64).powf(-1.5);
        assert!((z32 - partial - tail).abs() < 1e-12);
    }
}
