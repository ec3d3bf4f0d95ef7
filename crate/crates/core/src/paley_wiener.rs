//! Support radius from spectral moments, the operator radius
//! `lim ||L^n f||^{1/2n}`, exponential type along the imaginary axis, and
//! the Paley–Wiener membership table.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GridFunction, Parameters, SpatialGrid, SpectralFunction};
use crate::ops::apply_l_on_grid;
use crate::quadrature::QuadratureSpec;
use crate::special::plancherel_densities;
use crate::transform::{forward_many, measure_weights, spatial_energy, spectral_moment};

/// Default number of moments.
pub const DEFAULT_N_MAX: u32 = 64;
/// Share of a moment integral the two edge nodes may carry.
const TAIL_FRACTION: f64 = 1e-3;
/// `r_N / r_{N/2}` at or above this ratio counts as growth without flattening.
const GROWTH_RATIO: f64 = 1.1;
/// Relative change between steps `h` and `2h` tolerated in the operator route.
const FD_AGREEMENT: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusReport {
    /// `(n, r_n)`.
    pub moment_sequence: Vec<(u32, f64)>,
    pub estimate: f64,
    pub diverging: bool,
    /// `(n, r_n)` from the other route, when one was computed.
    pub cross_check: Vec<(u32, f64)>,
    pub diagnostics: Vec<String>,
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.filter(|t| t.is_finite()).collect();
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    max + v.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `r_n = (int |l|^{4n} |g|^2 dnu~ / int |g|^2 dnu~)^{1/(4n)}` for
/// `n = 1..=n_max`, trapezoid rule on the grid of `g`, in log space.
///
/// Normalizing by `int |g|^2 dnu~` does not change the limit and makes the
/// sequence nondecreasing in `n`.
pub fn spectral_radius(params: &Parameters, g: &SpectralFunction, n_max: u32) -> Result<RadiusReport> {
    let grid = g.grid();
    if grid.imag_offset() != 0.0 {
        return Err(Error::InvalidGrid("moments need a real spectral grid".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidParameters("n_max must be at least 1".into()));
    }
    if g.is_zero() {
        return Ok(RadiusReport {
            moment_sequence: (1..=n_max).map(|n| (n, 0.0)).collect(),
            estimate: 0.0,
            diverging: false,
            cross_check: Vec::new(),
            diagnostics: vec!["zero input".into()],
        });
    }
    let weights = grid.trapezoid_weights();
    // (ln|l|, 2 ln|g| + ln(w dnu~)) for every node that contributes
    let nodes: Vec<(f64, f64)> = (0..grid.points())
        .filter_map(|k| {
            let l = grid.real_node(k);
            let density = plancherel_densities(params, l).asymmetric_modulus * weights[k];
            let v = g.values()[k].norm();
            (v > 0.0 && density > 0.0).then(|| (l.abs().ln(), 2.0 * v.ln() + density.ln()))
        })
        .collect();
    let log_mass = log_sum_exp(nodes.iter().map(|&(_, b)| b));
    let last = grid.points() - 1;
    let edge_logs: Vec<(f64, f64)> = [0, last]
        .iter()
        .filter_map(|&k| {
            let l = grid.real_node(k);
            let density = plancherel_densities(params, l).asymmetric_modulus * weights[k];
            let v = g.values()[k].norm();
            (v > 0.0 && density > 0.0).then(|| (l.abs().ln(), 2.0 * v.ln() + density.ln()))
        })
        .collect();
    let mut sequence = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let p = 4.0 * n as f64;
        let log_moment = log_sum_exp(nodes.iter().map(|&(ll, b)| b + p * ll));
        let log_edge = log_sum_exp(edge_logs.iter().map(|&(ll, b)| b + p * ll));
        let share = (log_edge - log_moment).exp();
        if share > TAIL_FRACTION {
            return Err(Error::UnreliableTail(format!(
                "the grid edge carries {share:.3e} of moment n = {n}; extend the spectral grid"
            )));
        }
        sequence.push((n, ((log_moment - log_mass) / p).exp()));
    }
    let estimate = sequence[sequence.len() - 1].1;
    let mut diagnostics = Vec::new();
    let mut diverging = false;
    if n_max >= 2 {
        let half = sequence[(n_max / 2) as usize - 1].1;
        let ratio = estimate / half;
        diagnostics.push(format!("r_{n_max} / r_{} = {ratio:.6}", n_max / 2));
        if ratio >= GROWTH_RATIO {
            diverging = true;
            diagnostics.push("sequence still growing; no finite support radius".into());
        }
    }
    Ok(RadiusReport {
        moment_sequence: sequence,
        estimate,
        diverging,
        cross_check: Vec::new(),
        diagnostics,
    })
}

fn operator_norm<F: Fn(f64) -> Complex64 + Sync>(
    f: &F,
    params: &Parameters,
    grid: SpatialGrid,
    h: f64,
    n: usize,
    m: u32,
) -> Result<Vec<f64>> {
    let lf = if n == 0 {
        GridFunction::from_fn(grid, f)
    } else {
        apply_l_on_grid(f, params, grid, h, n)?
    };
    let w = measure_weights(params, &grid);
    Ok((0..=m)
        .map(|k| {
            lf.values()
                .iter()
                .zip(&w)
                .zip(grid.nodes())
                .map(|((v, w), x)| v.norm_sqr() * w * (1.0 + x.abs()).powi(2 * k as i32))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// `(||L^n f|| / ||f||)^{1/(2n)}` in `L^2(mu)` for `n = 1..=n_max <= 2`, with
/// `L^n` by nested differences of step `h` evaluated at the nodes of `grid`.
/// The spectral moments of the sampled `f` give the cross-check.
pub fn operator_radius<F: Fn(f64) -> Complex64 + Sync>(
    params: &Parameters,
    f: &F,
    grid: SpatialGrid,
    n_max: u32,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<RadiusReport> {
    if !(1..=2).contains(&n_max) {
        return Err(Error::InvalidParameters(format!(
            "the difference route covers n = 1, 2; got n_max = {n_max}"
        )));
    }
    let sampled = GridFunction::from_fn(grid, f);
    if sampled.is_zero() {
        return Err(Error::ZeroInput);
    }
    let base = spatial_energy(params, &sampled).sqrt();
    let base_spectral = spectral_moment(params, &sampled, 0, spec)?;
    let mut sequence = Vec::new();
    let mut cross = Vec::new();
    let mut diagnostics = Vec::new();
    for n in 1..=n_max {
        let fine = operator_norm(f, params, grid, h, n as usize, 0)?[0];
        let coarse = operator_norm(f, params, grid, 2.0 * h, n as usize, 0)?[0];
        let change = (fine - coarse).abs() / fine;
        if change > FD_AGREEMENT {
            return Err(Error::Unreliable(format!(
                "||L^{n} f|| moves by {change:.3e} between steps {h} and {}",
                2.0 * h
            )));
        }
        let r = (fine / base).powf(0.5 / n as f64);
        sequence.push((n, r));
        let moment = spectral_moment(params, &sampled, n, spec)?;
        let s = (moment / base_spectral).powf(0.25 / n as f64);
        cross.push((n, s));
        diagnostics.push(format!("n = {n}: difference route {r:.8}, spectral route {s:.8}, step change {change:.2e}"));
    }
    let estimate = sequence[sequence.len() - 1].1;
    Ok(RadiusReport {
        moment_sequence: sequence,
        estimate,
        diverging: false,
        cross_check: cross,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeReport {
    /// Fitted rate over the whole range.
    pub r_fit: f64,
    pub slope_lower_half: f64,
    pub slope_upper_half: f64,
    /// False when the slope keeps growing along the range.
    pub finite_type: bool,
    /// `(eta, ln|H f(i eta)|)`.
    pub samples: Vec<(f64, f64)>,
}

/// Coefficient of `eta` in the least-squares fit `a + R eta + c ln(eta)`.
fn growth_rate(points: &[(f64, f64)]) -> f64 {
    let basis = |e: f64| [1.0, e, e.ln()];
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for &(e, v) in points {
        let b = basis(e);
        for i in 0..3 {
            r[i] += b[i] * v;
            for j in 0..3 {
                m[i][j] += b[i] * b[j];
            }
        }
    }
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    // Cramer's rule for the middle unknown
    let mut m1 = m;
    for i in 0..3 {
        m1[i][1] = r[i];
    }
    det(&m1) / det(&m)
}

/// Fitted growth rate of `ln|H f(i eta)|` for `eta` in `eta_range`.
///
/// The fit `a + R eta + c ln(eta)` absorbs the polynomial factor allowed by
/// the growth bound `|H f(l)| <= C (1+|l|)^N e^{R |Im l|}`; `R` is reported.
pub fn exponential_type(params: &Parameters, f: &GridFunction, eta_range: (f64, f64), samples: usize) -> Result<TypeReport> {
    let (a, b) = eta_range;
    if !(a < b) || samples < 4 {
        return Err(Error::InvalidParameters(format!(
            "need eta_min < eta_max and at least 4 samples, got ({a}, {b}) and {samples}"
        )));
    }
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let etas: Vec<f64> = (0..samples).map(|k| a + (b - a) * k as f64 / (samples - 1) as f64).collect();
    let lambdas: Vec<Complex64> = etas.iter().map(|&e| Complex64::new(0.0, e)).collect();
    let values = forward_many(params, f, &lambdas)?;
    let points: Vec<(f64, f64)> = etas.iter().zip(&values).map(|(&e, v)| (e, v.norm().ln())).collect();
    if let Some(&(e, _)) = points.iter().find(|p| !p.1.is_finite()) {
        return Err(Error::RangeShrink(format!("|H f(i {e})| is not representable; shrink eta_range")));
    }
    let mid = samples / 2;
    let (lo, hi) = (growth_rate(&points[..=mid]), growth_rate(&points[mid..]));
    Ok(TypeReport {
        r_fit: growth_rate(&points),
        slope_lower_half: lo,
        slope_upper_half: hi,
        finite_type: hi < GROWTH_RATIO * lo,
        samples: points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PwEntry {
    pub m: u32,
    pub n: u32,
    /// `||(1+|x|)^m L^n f||_{2,mu}`.
    pub value: f64,
    /// Same value with step `2h` agrees to 1%.
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PwReport {
    pub table: Vec<PwEntry>,
    /// `(n, ||L^n f||)` from the spectral moments; `None` where the
    /// transform has not decayed within the scanned range, so the moment is
    /// not established either way.
    pub spectral: Vec<(u32, Option<f64>)>,
    /// Every table entry resolved and every spectral moment established.
    pub all_finite: bool,
    pub flags: Vec<String>,
}

/// Table of `||(1+|x|)^m L^n f||_{2,mu}` for `m <= m_max`, `n <= n_max <= 2`,
/// next to the spectral values of `||L^n f||` for `n = 1..=n_spectral`.
#[allow(clippy::too_many_arguments)]
pub fn pw_membership<F: Fn(f64) -> Complex64 + Sync>(
    params: &Parameters,
    f: &F,
    grid: SpatialGrid,
    h: f64,
    m_max: u32,
    n_max: u32,
    n_spectral: u32,
    spec: &QuadratureSpec,
) -> Result<PwReport> {
    if n_max > 2 {
        return Err(Error::InvalidParameters(format!(
            "the difference route covers n <= 2; got n_max = {n_max}"
        )));
    }
    let mut table = Vec::new();
    let mut flags = Vec::new();
    for n in 0..=n_max {
        let fine = operator_norm(f, params, grid, h, n as usize, m_max)?;
        let coarse = operator_norm(f, params, grid, 2.0 * h, n as usize, m_max)?;
        for m in 0..=m_max {
            let (v, c) = (fine[m as usize], coarse[m as usize]);
            let resolved = v.is_finite() && (v - c).abs() <= FD_AGREEMENT * v;
            if !resolved {
                flags.push(format!("m = {m}, n = {n}: unresolved ({v:.6e} at h, {c:.6e} at 2h)"));
            }
            table.push(PwEntry { m, n, value: v, resolved });
        }
    }
    let sampled = GridFunction::from_fn(grid, f);
    let mut spectral = Vec::new();
    for n in 1..=n_spectral {
        match spectral_moment(params, &sampled, n, spec) {
            Ok(v) => spectral.push((n, Some(v.sqrt()))),
            Err(Error::Truncation(msg)) => {
                flags.push(format!("n = {n}: spectral moment unresolved ({msg})"));
                spectral.push((n, None));
            }
            Err(e) => return Err(e),
        }
    }
    let all_finite = table.iter().all(|e| e.resolved) && spectral.iter().all(|s| s.1.is_some_and(f64::is_finite));
    Ok(PwReport {
        table,
        spectral,
        all_finite,
        flags,
    })
}
