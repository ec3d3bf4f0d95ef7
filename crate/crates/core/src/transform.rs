//! The transform `H f(l) = int f(x) G_l(-x) A(|x|) dx`, its inverse, the
//! Jacobi transform, Plancherel energies, strip evaluation and
//! Hausdorff–Young ratios.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    strip_halfwidth, GridFunction, LebesgueExponent, Parameters, SpatialGrid, SpectralFunction, SpectralGrid,
};
use crate::ops::{antiderivative_j, parity_split};
use crate::quadrature::{integrate, integrate_batched, QuadratureSpec};
use crate::special::{log_weight_a, plancherel_densities, weight_a, zeta_negative, JacobiPhi, OpdamG};

/// Relative tolerance of the spatial truncation rule.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-10;
/// Relative tolerance of the spectral truncation rule.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-6;
/// Relative level at which [`spectral_cutoff`] places `Lambda` for the energy integrals.
pub const DEFAULT_CUTOFF_TOL: f64 = 1e-8;
/// The spectral cutoff search never looks beyond this `|lambda|`.
pub const MAX_CUTOFF: f64 = 100.0;
const CUTOFF_STEP: f64 = 0.5;

/// `phi_l(x)` and `sinh(2x) phi_l^{(a+1,b+1)}(x)` on the nonnegative nodes.
struct EvenParts {
    phi: Vec<Complex64>,
    psi: Vec<Complex64>,
}

fn even_parts(params: &Parameters, grid: &SpatialGrid, lambda: Complex64) -> Result<EvenParts> {
    let main = JacobiPhi::new(*params, lambda);
    let shifted = JacobiPhi::new(params.shifted(), lambda);
    let c = grid.center();
    let mut phi = Vec::with_capacity(c + 1);
    let mut psi = Vec::with_capacity(c + 1);
    for i in c..grid.points() {
        let x = grid.node(i);
        phi.push(main.eval(x)?);
        psi.push(if x == 0.0 { Complex64::new(0.0, 0.0) } else { shifted.eval(x)? * (2.0 * x).sinh() });
    }
    Ok(EvenParts { phi, psi })
}

/// `G_l(x_i)` for a list of `lambda` and every node of a grid. Real `lambda`
/// of equal modulus share their Jacobi parts.
pub(crate) struct KernelBank {
    grid: SpatialGrid,
    factors: Vec<Complex64>,
    slot: Vec<usize>,
    parts: Vec<EvenParts>,
}

impl KernelBank {
    pub(crate) fn new(params: &Parameters, grid: SpatialGrid, lambdas: &[Complex64]) -> Result<Self> {
        let mut keys: HashMap<(u64, u64), usize> = HashMap::new();
        let mut unique = Vec::new();
        let mut slot = Vec::with_capacity(lambdas.len());
        for l in lambdas {
            let rep = if l.im == 0.0 { Complex64::new(l.re.abs(), 0.0) } else { *l };
            let key = (rep.re.to_bits(), rep.im.to_bits());
            let next = unique.len();
            let k = *keys.entry(key).or_insert(next);
            if k == next {
                unique.push(rep);
            }
            slot.push(k);
        }
        let parts = unique
            .par_iter()
            .map(|&l| even_parts(params, &grid, l))
            .collect::<Result<Vec<_>>>()?;
        let factors = lambdas
            .iter()
            .map(|l| (Complex64::i() * l + params.rho()) / (4.0 * (params.alpha() + 1.0)))
            .collect();
        Ok(Self {
            grid,
            factors,
            slot,
            parts,
        })
    }

    /// `G_{lambda_k}(x_i)`.
    pub(crate) fn g(&self, k: usize, i: usize) -> Complex64 {
        let c = self.grid.center();
        let p = &self.parts[self.slot[k]];
        if i >= c {
            p.phi[i - c] + self.factors[k] * p.psi[i - c]
        } else {
            p.phi[c - i] - self.factors[k] * p.psi[c - i]
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.slot.len()
    }
}

/// Trapezoid weights times `A(|x|)` on the grid.
///
/// `A(|x|) = |x|^s a(x)` with `s = 2 alpha + 1` and `a` smooth, and for
/// integrands `|x|^s g(x)` the plain rule carries the error
/// `sum_k 2 zeta(-s-k) h^{s+k+1} g^{(k)}(0) / k!` over even `k`. The weights
/// near the origin remove the terms `k = 0, 2, 4`, with the derivatives taken
/// from a five-point stencil.
pub fn measure_weights(params: &Parameters, grid: &SpatialGrid) -> Vec<f64> {
    let mut w: Vec<f64> = grid
        .trapezoid_weights()
        .iter()
        .zip(grid.nodes())
        .map(|(w, x)| w * weight_a(params, x))
        .collect();
    let s = 2.0 * params.alpha() + 1.0;
    let h = grid.spacing();
    let c = grid.center();
    let scale = h.powf(s + 1.0);
    let (z0, z2, z4) = (zeta_negative(s), zeta_negative(s + 2.0), zeta_negative(s + 4.0));
    let a = |x: f64| (log_weight_a(params, x) - s * x.ln()).exp();
    w[c] = -scale * (2.0 * z0 - 2.5 * z2 + 0.5 * z4);
    if c >= 2 {
        let d1 = -scale * (16.0 * z2 - 4.0 * z4) / 12.0 * a(h);
        let d2 = -scale * (z4 - z2) / 12.0 * a(2.0 * h);
        w[c - 1] += d1;
        w[c + 1] += d1;
        w[c - 2] += d2;
        w[c + 2] += d2;
    }
    w
}

/// Spatial truncation rule: `e^{2 rho X} max|f(+-X)| <= tol max|f|`.
pub fn check_spatial_truncation(params: &Parameters, f: &GridFunction, tol: f64) -> Result<()> {
    let max = f.max_abs();
    if max == 0.0 {
        return Ok(());
    }
    let x = f.grid().half_width();
    let edge = f.edge_abs();
    let weighted = if edge == 0.0 { 0.0 } else { (edge.ln() + 2.0 * params.rho() * x).exp() };
    if weighted > tol * max {
        return Err(Error::Truncation(format!(
            "e^(2 rho X) |f(+-X)| = {weighted:e} exceeds {tol:e} * max|f| at X = {x}; widen the spatial grid"
        )));
    }
    Ok(())
}

/// Spectral truncation rule: `|g(+-Lambda)| (1 + Lambda)^{2 alpha + 2}` at most
/// `tol` times the largest value of `|g(l)| (1 + |l|)^{2 alpha + 2}` on the grid.
pub fn check_spectral_truncation(params: &Parameters, g: &SpectralFunction, tol: f64) -> Result<()> {
    let power = 2.0 * params.alpha() + 2.0;
    let grid = g.grid();
    let weighted: Vec<f64> = g
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v.norm() * (1.0 + grid.real_node(k).abs()).powf(power))
        .collect();
    let max = weighted.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(());
    }
    let edge = weighted[0].max(weighted[weighted.len() - 1]);
    if edge > tol * max {
        return Err(Error::Truncation(format!(
            "|g(+-Lambda)| (1+Lambda)^(2 alpha+2) = {edge:e} exceeds {tol:e} times its maximum at Lambda = {}",
            grid.extent()
        )));
    }
    Ok(())
}

fn forward_with_bank(f: &GridFunction, wa: &[f64], bank: &KernelBank) -> Vec<Complex64> {
    let v = f.values();
    let grid = f.grid();
    (0..bank.len())
        .into_par_iter()
        .map(|k| {
            v.iter()
                .zip(wa)
                .enumerate()
                .map(|(i, (fi, w))| fi * *w * bank.g(k, grid.mirror(i)))
                .sum()
        })
        .collect()
}

/// `H f` at many points.
pub fn forward_many(params: &Parameters, f: &GridFunction, lambdas: &[Complex64]) -> Result<Vec<Complex64>> {
    check_spatial_truncation(params, f, DEFAULT_TRUNCATION_TOL)?;
    if f.is_zero() {
        return Ok(vec![Complex64::new(0.0, 0.0); lambdas.len()]);
    }
    let bank = KernelBank::new(params, *f.grid(), lambdas)?;
    Ok(forward_with_bank(f, &measure_weights(params, f.grid()), &bank))
}

/// `H f(lambda) = int f(x) G_lambda(-x) A(|x|) dx`, trapezoid rule on the grid.
pub fn forward(params: &Parameters, f: &GridFunction, lambda: Complex64) -> Result<Complex64> {
    Ok(forward_many(params, f, &[lambda])?[0])
}

/// `H f` sampled on a spectral grid.
pub fn forward_on(params: &Parameters, f: &GridFunction, grid: SpectralGrid) -> Result<SpectralFunction> {
    let lambdas: Vec<Complex64> = grid.nodes().collect();
    SpectralFunction::new(grid, forward_many(params, f, &lambdas)?)
}

fn require_even(f: &GridFunction) -> Result<()> {
    let (_, odd) = parity_split(f);
    let scale = f.max_abs();
    let residual = if scale > 0.0 { odd.max_abs() / scale } else { 0.0 };
    if residual >= 1e-10 {
        return Err(Error::ParityViolation(residual));
    }
    Ok(())
}

/// Jacobi transform `F f(lambda) = int_0^inf f(x) phi_lambda(x) A(x) dx` of an even function.
pub fn jacobi_forward(params: &Parameters, f_even: &GridFunction, lambda: Complex64) -> Result<Complex64> {
    require_even(f_even)?;
    check_spatial_truncation(params, f_even, DEFAULT_TRUNCATION_TOL)?;
    jacobi_sum(params, f_even, lambda)
}

fn jacobi_sum(params: &Parameters, f_even: &GridFunction, lambda: Complex64) -> Result<Complex64> {
    let grid = f_even.grid();
    let phi = JacobiPhi::new(*params, lambda);
    let wa = measure_weights(params, grid);
    let c = grid.center();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in c..grid.points() {
        // the centre node carries half of its trapezoid weight on [0, inf)
        let w = if i == c { 0.5 * wa[i] } else { wa[i] };
        if w != 0.0 {
            acc += f_even.values()[i] * w * phi.eval(grid.node(i))?;
        }
    }
    Ok(acc)
}

/// Right-hand side of `H f = 2 F(f_e) + 2 (rho + i lambda) F(J f_o)`.
pub fn jacobi_relation(params: &Parameters, f: &GridFunction, lambda: Complex64) -> Result<Complex64> {
    check_spatial_truncation(params, f, DEFAULT_TRUNCATION_TOL)?;
    let (even, odd) = parity_split(f);
    // J f_o inherits the decay of f up to the rounding of the running sum
    let j = antiderivative_j(&odd)?;
    require_even(&j)?;
    let a = jacobi_sum(params, &even, lambda)?;
    let b = jacobi_sum(params, &j, lambda)?;
    Ok(a * 2.0 + (Complex64::i() * lambda + params.rho()) * 2.0 * b)
}

fn inverse_density(params: &Parameters, grid: &SpectralGrid) -> Result<Vec<Complex64>> {
    if grid.imag_offset() != 0.0 {
        return Err(Error::UnsupportedParameters(format!(
            "the inversion integral runs over the real axis; got Im lambda = {}",
            grid.imag_offset()
        )));
    }
    Ok(grid
        .trapezoid_weights()
        .iter()
        .enumerate()
        .map(|(k, w)| plancherel_densities(params, grid.real_node(k)).asymmetric * *w)
        .collect())
}

fn inverse_with_bank(g: &SpectralFunction, density: &[Complex64], bank: &KernelBank, grid: SpatialGrid) -> Result<GridFunction> {
    let gv = g.values();
    let values = (0..grid.points())
        .into_par_iter()
        .map(|i| {
            gv.iter()
                .zip(density)
                .enumerate()
                .map(|(k, (gk, dk))| gk * dk * bank.g(k, i))
                .sum()
        })
        .collect();
    GridFunction::new(grid, values)
}

/// `I g(x) = int g(l) G_l(x) (1 - rho/(i l)) 2^{2 rho} dl / (8 pi |c(l)|^2)` on
/// every node of `grid`, trapezoid rule in `lambda`.
pub fn inverse_on(params: &Parameters, g: &SpectralFunction, grid: SpatialGrid) -> Result<GridFunction> {
    check_spectral_truncation(params, g, DEFAULT_SPECTRAL_TOL)?;
    let density = inverse_density(params, g.grid())?;
    if g.is_zero() {
        return Ok(GridFunction::zeros(grid));
    }
    let lambdas: Vec<Complex64> = g.grid().nodes().collect();
    let bank = KernelBank::new(params, grid, &lambdas)?;
    inverse_with_bank(g, &density, &bank, grid)
}

/// `I g(x)` at a single point.
pub fn inverse(params: &Parameters, g: &SpectralFunction, x: f64) -> Result<Complex64> {
    check_spectral_truncation(params, g, DEFAULT_SPECTRAL_TOL)?;
    let density = inverse_density(params, g.grid())?;
    let terms = g
        .grid()
        .nodes()
        .zip(g.values())
        .zip(&density)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|((l, gk), dk)| {
            if *gk == Complex64::new(0.0, 0.0) || *dk == Complex64::new(0.0, 0.0) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(gk * dk * OpdamG::new(*params, l).eval(x)?)
        })
        .collect::<Result<Vec<Complex64>>>()?;
    Ok(terms.iter().sum())
}

/// `||f||_{2,mu}^2` by the trapezoid rule.
pub fn spatial_energy(params: &Parameters, f: &GridFunction) -> f64 {
    f.values()
        .iter()
        .zip(measure_weights(params, f.grid()))
        .map(|(v, w)| v.norm_sqr() * w)
        .sum()
}

/// `||f||_{p,mu}`; `p = inf` is the sup norm.
pub fn spatial_norm(params: &Parameters, f: &GridFunction, p: f64) -> f64 {
    if p.is_infinite() {
        return f.max_abs();
    }
    let s: f64 = f
        .values()
        .iter()
        .zip(measure_weights(params, f.grid()))
        .map(|(v, w)| v.norm().powf(p) * w)
        .sum();
    s.powf(1.0 / p)
}

/// `I(H f)` on the grid of `f`, with the relative `L^2(mu)` error.
pub fn roundtrip(params: &Parameters, f: &GridFunction, spectral: SpectralGrid) -> Result<(GridFunction, f64)> {
    check_spatial_truncation(params, f, DEFAULT_TRUNCATION_TOL)?;
    let grid = *f.grid();
    let lambdas: Vec<Complex64> = spectral.nodes().collect();
    let bank = KernelBank::new(params, grid, &lambdas)?;
    let wa = measure_weights(params, &grid);
    let hf = SpectralFunction::new(spectral, forward_with_bank(f, &wa, &bank))?;
    check_spectral_truncation(params, &hf, DEFAULT_SPECTRAL_TOL)?;
    let density = inverse_density(params, &spectral)?;
    let back = inverse_with_bank(&hf, &density, &bank, grid)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((a, b), w) in back.values().iter().zip(f.values()).zip(&wa) {
        num += (a - b).norm_sqr() * w;
        den += b.norm_sqr() * w;
    }
    let err = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok((back, err))
}

/// First `Lambda` on a `0.5`-spaced scan past the peak of
/// `S(l)^exponent (1+l)^{2 alpha + 2 + extra}`, with
/// `S(l) = |H f(+-l)| + |H f^(+-l)|`, where that envelope stays below `tol`
/// times its maximum for the next few samples.
///
/// `S^exponent (1+l)^extra` is the function integrated against
/// `|c(l)|^{-2} ~ l^{2 alpha + 1}`: exponent 1 for the inversion integral,
/// 2 with `extra = 4n` for the moment of order `n`. The discrete transform has
/// a slowly growing floor, so the first sustained drop is used rather than
/// the last excursion.
pub fn spectral_cutoff(params: &Parameters, f: &GridFunction, exponent: f64, extra_power: f64, tol: f64) -> Result<f64> {
    let steps = (MAX_CUTOFF / CUTOFF_STEP) as usize;
    let mut lambdas = Vec::with_capacity(2 * steps + 1);
    for k in 0..=steps {
        let l = k as f64 * CUTOFF_STEP;
        lambdas.push(Complex64::new(l, 0.0));
        lambdas.push(Complex64::new(-l, 0.0));
    }
    let bank = KernelBank::new(params, *f.grid(), &lambdas)?;
    let wa = measure_weights(params, f.grid());
    let a = forward_with_bank(f, &wa, &bank);
    let b = forward_with_bank(&f.reflect(), &wa, &bank);
    let power = 2.0 * params.alpha() + 2.0 + extra_power;
    let envelope: Vec<f64> = (0..=steps)
        .map(|k| {
            let l = k as f64 * CUTOFF_STEP;
            let s = a[2 * k].norm() + a[2 * k + 1].norm() + b[2 * k].norm() + b[2 * k + 1].norm();
            s.powf(exponent) * (1.0 + l).powf(power)
        })
        .collect();
    let max = envelope.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(CUTOFF_STEP);
    }
    let peak = envelope.iter().position(|&e| e == max).unwrap_or(0);
    const RUN: usize = 6;
    (peak..=steps.saturating_sub(RUN))
        .find(|&k| envelope[k..k + RUN].iter().all(|&e| e <= tol * max))
        .map(|k| k.max(1) as f64 * CUTOFF_STEP)
        .ok_or_else(|| {
            Error::Truncation(format!("transform has not decayed below {tol:e} (relative) by |lambda| = {MAX_CUTOFF}"))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlancherelReport {
    /// `||f||^2_{2,mu}`.
    pub spatial_energy: f64,
    /// `int_0^inf (|H f|^2 + |H f^|^2)` against the symmetric density.
    pub spectral_energy_symmetric: f64,
    /// Real part of `int_R H f(l) conj(H f^(-l))` against the asymmetric density.
    pub spectral_energy_asymmetric: f64,
    pub relative_gap_symmetric: f64,
    pub relative_gap_asymmetric: f64,
    /// The larger of the two gaps.
    pub relative_gap: f64,
    /// Spectral cutoff used for both integrals.
    pub cutoff: f64,
}

/// Both spectral forms of the Plancherel identity next to the spatial energy.
pub fn plancherel_energy(params: &Parameters, f: &GridFunction, spec: &QuadratureSpec) -> Result<PlancherelReport> {
    check_spatial_truncation(params, f, DEFAULT_TRUNCATION_TOL)?;
    let spatial = spatial_energy(params, f);
    if f.is_zero() {
        return Ok(PlancherelReport {
            spatial_energy: 0.0,
            spectral_energy_symmetric: 0.0,
            spectral_energy_asymmetric: 0.0,
            relative_gap_symmetric: 0.0,
            relative_gap_asymmetric: 0.0,
            relative_gap: 0.0,
            cutoff: 0.0,
        });
    }
    let cutoff = spectral_cutoff(params, f, 2.0, 0.0, DEFAULT_CUTOFF_TOL)?;
    let fr = f.reflect();
    let symmetric = integrate_batched(
        |ls| {
            let lambdas: Vec<Complex64> = ls.iter().map(|&l| Complex64::new(l, 0.0)).collect();
            let a = forward_many(params, f, &lambdas)?;
            let b = forward_many(params, &fr, &lambdas)?;
            Ok(ls
                .iter()
                .zip(a.iter().zip(&b))
                .map(|(&l, (x, y))| Complex64::new((x.norm_sqr() + y.norm_sqr()) * plancherel_densities(params, l).symmetric, 0.0))
                .collect())
        },
        0.0,
        cutoff,
        spec,
    )?
    .value
    .re;
    let asymmetric = integrate_batched(
        |ls| {
            let plus: Vec<Complex64> = ls.iter().map(|&l| Complex64::new(l, 0.0)).collect();
            let minus: Vec<Complex64> = ls.iter().map(|&l| Complex64::new(-l, 0.0)).collect();
            let a = forward_many(params, f, &plus)?;
            let b = forward_many(params, &fr, &minus)?;
            Ok(ls
                .iter()
                .zip(a.iter().zip(&b))
                .map(|(&l, (x, y))| x * y.conj() * plancherel_densities(params, l).asymmetric)
                .collect())
        },
        -cutoff,
        cutoff,
        spec,
    )?
    .value
    .re;
    let gap = |s: f64| (spatial - s).abs() / spatial;
    let (gs, ga) = (gap(symmetric), gap(asymmetric));
    Ok(PlancherelReport {
        spatial_energy: spatial,
        spectral_energy_symmetric: symmetric,
        spectral_energy_asymmetric: asymmetric,
        relative_gap_symmetric: gs,
        relative_gap_asymmetric: ga,
        relative_gap: gs.max(ga),
        cutoff,
    })
}

/// `int_0^inf l^{4n} (|H f|^2 + |H f^|^2)` against the symmetric density,
/// which equals `||L^n f||^2_{2,mu}`.
pub fn spectral_moment(params: &Parameters, f: &GridFunction, n: u32, spec: &QuadratureSpec) -> Result<f64> {
    check_spatial_truncation(params, f, DEFAULT_TRUNCATION_TOL)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let cutoff = spectral_cutoff(params, f, 2.0, 4.0 * n as f64, DEFAULT_CUTOFF_TOL)?;
    let fr = f.reflect();
    let e = integrate_batched(
        |ls| {
            let lambdas: Vec<Complex64> = ls.iter().map(|&l| Complex64::new(l, 0.0)).collect();
            let a = forward_many(params, f, &lambdas)?;
            let b = forward_many(params, &fr, &lambdas)?;
            Ok(ls
                .iter()
                .zip(a.iter().zip(&b))
                .map(|(&l, (x, y))| {
                    let d = plancherel_densities(params, l).symmetric;
                    Complex64::new(l.powi(4 * n as i32) * (x.norm_sqr() + y.norm_sqr()) * d, 0.0)
                })
                .collect())
        },
        0.0,
        cutoff,
        spec,
    )?;
    Ok(e.value.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripValue {
    pub value: Complex64Ser,
    /// `||f||_{p,mu} ||G_lambda||_{q,mu}`.
    pub bound: f64,
    pub holds: bool,
}

/// A complex number that serializes as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex64Ser(pub Complex64);

impl Serialize for Complex64Ser {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

/// `||G_lambda||_{q,mu}` for `lambda` inside the strip of `p`.
pub fn g_norm(params: &Parameters, lambda: Complex64, p: LebesgueExponent, spec: &QuadratureSpec) -> Result<f64> {
    let eta = lambda.im;
    let half = strip_halfwidth(params, p);
    if !(eta.abs() < half) {
        return Err(Error::OutsideStrip { eta, half_width: half });
    }
    let g = OpdamG::new(*params, lambda);
    if p.is_one() {
        // |G| decays like e^{(|eta| - rho)|x|}
        let kappa = params.rho() - eta.abs();
        let reach = (40.0 / kappa).min(200.0);
        let n = 4001;
        let mut sup: f64 = 0.0;
        for k in 0..n {
            let x = -reach + 2.0 * reach * k as f64 / (n - 1) as f64;
            sup = sup.max(g.eval(x)?.norm());
        }
        return Ok(sup);
    }
    let q = p.q();
    let kappa = params.rho() * (q - 2.0) - q * eta.abs();
    let reach = ((36.0 + q * (1.0 + 36.0 / kappa).ln()) / kappa).min(200.0);
    let integrand = |x: f64| -> Complex64 {
        match g.eval(x) {
            Ok(v) if v.norm() > 0.0 && x != 0.0 => Complex64::new((q * v.norm().ln() + log_weight_a(params, x)).exp(), 0.0),
            Ok(_) => Complex64::new(0.0, 0.0),
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    let left = integrate(integrand, -reach, 0.0, spec)?;
    let right = integrate(integrand, 0.0, reach, spec)?;
    let total = left.value.re + right.value.re;
    if !total.is_finite() {
        return Err(Error::SeriesNonConvergence {
            terms: 0,
            residual: f64::NAN,
        });
    }
    Ok(total.powf(1.0 / q))
}

/// `H f(xi + i eta)` together with the bound `||f||_{p,mu} ||G_{xi+i eta}||_{q,mu}`.
pub fn strip_eval(
    params: &Parameters,
    f: &GridFunction,
    xi: f64,
    eta: f64,
    p: LebesgueExponent,
    spec: &QuadratureSpec,
) -> Result<StripValue> {
    let half = strip_halfwidth(params, p);
    if !(eta.abs() < half) {
        return Err(Error::OutsideStrip { eta, half_width: half });
    }
    let lambda = Complex64::new(xi, eta);
    let value = forward(params, f, lambda)?;
    let bound = spatial_norm(params, f, p.p()) * g_norm(params, -lambda, p, spec)?;
    Ok(StripValue {
        value: Complex64Ser(value),
        bound,
        holds: value.norm() <= bound * (1.0 + 1e-6),
    })
}

/// `||H f||_{q, nu~} / ||f||_{p,mu}` with the modulus density
/// `|1 - rho/(i l)| 2^{2 rho} / (8 pi |c|^2)`; the sup norm for `p = 1`.
pub fn hy_ratio(params: &Parameters, f: &GridFunction, p: LebesgueExponent, spec: &QuadratureSpec) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_spatial_truncation(params, f, DEFAULT_TRUNCATION_TOL)?;
    let denom = spatial_norm(params, f, p.p());
    let q = p.q();
    // |H f|^q against the density; the sup norm needs |H f| alone
    let cutoff = if p.is_one() {
        spectral_cutoff(params, f, 1.0, -2.0 * params.alpha() - 2.0, DEFAULT_CUTOFF_TOL)?
    } else {
        spectral_cutoff(params, f, q, 0.0, DEFAULT_CUTOFF_TOL)?
    };
    let numer = if p.is_one() {
        let n = (8.0 * cutoff).ceil() as usize * 2 + 1;
        let grid = SpectralGrid::symmetric(cutoff, n)?;
        let values = forward_on(params, f, grid)?;
        values.max_abs()
    } else {
        let e = integrate_batched(
            |ls| {
                let lambdas: Vec<Complex64> = ls.iter().map(|&l| Complex64::new(l, 0.0)).collect();
                let a = forward_many(params, f, &lambdas)?;
                Ok(ls
                    .iter()
                    .zip(&a)
                    .map(|(&l, v)| Complex64::new(v.norm().powf(q) * plancherel_densities(params, l).asymmetric_modulus, 0.0))
                    .collect())
            },
            -cutoff,
            cutoff,
            spec,
        )?;
        e.value.re.powf(1.0 / q)
    };
    Ok(numer / denom)
}
