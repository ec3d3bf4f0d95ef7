//! Parameter records, sampling grids and sampled functions.
//!
//! Every record here is an immutable value. Spatial grids are uniform,
//! symmetric and have an odd number of nodes, so `0` is always a node and
//! the reflection `x -> -x` maps nodes onto nodes exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The multiplicity pair `(alpha, beta)` together with its derived data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    alpha: f64,
    beta: f64,
    rho: f64,
    k1: f64,
    k2: f64,
}

impl Parameters {
    /// Validates `alpha >= beta >= -1/2` and `alpha > -1/2`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameters(
                "alpha and beta must be finite".into(),
            ));
        }
        if alpha <= -0.5 {
            return Err(Error::InvalidParameters("alpha must exceed -1/2".into()));
        }
        if alpha < beta {
            return Err(Error::InvalidParameters("alpha must be >= beta".into()));
        }
        if beta < -0.5 {
            return Err(Error::InvalidParameters("beta must be >= -1/2".into()));
        }
        Ok(Self {
            alpha,
            beta,
            rho: alpha + beta + 1.0,
            k1: alpha - beta,
            k2: beta + 0.5,
        })
    }

    /// Builds the record from Cherednik's root multiplicities `(k1, k2)`.
    pub fn from_multiplicities(k1: f64, k2: f64) -> Result<Self> {
        Self::new(k1 + k2 - 0.5, k2 - 0.5)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `alpha + beta + 1`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Multiplicity of the simple root, `alpha - beta`.
    pub fn k1(&self) -> f64 {
        self.k1
    }

    /// Multiplicity of the doubled root, `beta + 1/2`.
    pub fn k2(&self) -> f64 {
        self.k2
    }

    /// The pair `(alpha + 1, beta + 1)`, which appears in the derivative of
    /// the Jacobi function. Always valid when `self` is.
    pub fn shifted(&self) -> Parameters {
        Parameters::new(self.alpha + 1.0, self.beta + 1.0)
            .expect("shifting a valid pair keeps it valid")
    }
}

/// Free-function form of [`Parameters::new`].
pub fn validate_parameters(alpha: f64, beta: f64) -> Result<Parameters> {
    Parameters::new(alpha, beta)
}

/// Uniform symmetric grid on `[-half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    half_width: f64,
    points: usize,
    spacing: f64,
}

impl SpatialGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid("half_width must be positive".into()));
        }
        if points < 3 || points % 2 == 0 {
            return Err(Error::InvalidGrid(format!(
                "point count must be odd and >= 3, got {points}"
            )));
        }
        Ok(Self {
            half_width,
            points,
            spacing: 2.0 * half_width / (points - 1) as f64,
        })
    }

    /// Grid on `[-half_width, half_width]` whose spacing does not exceed `max_spacing`.
    pub fn with_spacing(half_width: f64, max_spacing: f64) -> Result<Self> {
        let half = (half_width / max_spacing).ceil().max(1.0) as usize;
        Self::new(half_width, 2 * half + 1)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the node at the origin.
    pub fn center(&self) -> usize {
        (self.points - 1) / 2
    }

    /// Node `i`, computed as an integer multiple of the spacing so that
    /// `node(mirror(i)) == -node(i)` holds bit for bit.
    pub fn node(&self, i: usize) -> f64 {
        let k = i as i64 - self.center() as i64;
        k as f64 * self.spacing
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.points - 1 - i
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.node(i))
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.spacing; self.points];
        w[0] *= 0.5;
        w[self.points - 1] *= 0.5;
        w
    }
}

/// Complex samples of a function on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.points()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        let values = self.values.iter().rev().copied().collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise `a * self + b * other`; grids must agree.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("grids differ".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| a * u + b * v)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus at the two grid edges.
    pub fn edge_abs(&self) -> f64 {
        self.values[0].norm().max(self.values[self.values.len() - 1].norm())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// Smallest interval containing every node where `|f| > threshold * max|f|`.
    /// Returns `None` for the zero function.
    pub fn support_bounds(&self, threshold: f64) -> Option<(f64, f64)> {
        let cut = threshold * self.max_abs();
        let first = self.values.iter().position(|v| v.norm() > cut)?;
        let last = self.values.iter().rposition(|v| v.norm() > cut)?;
        let lo = first.saturating_sub(1);
        let hi = (last + 1).min(self.values.len() - 1);
        Some((self.grid.node(lo), self.grid.node(hi)))
    }

    /// Four-point Lagrange interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let h = self.grid.spacing();
        let x0 = -self.grid.half_width();
        let n = self.values.len();
        let s = (x - x0) / h;
        if !(s >= 0.0) || s > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = (s.floor() as usize).min(n - 2);
        let start = i.saturating_sub(1).min(n - 4);
        let t = s - start as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != j {
                    w *= (t - m as f64) / (j as f64 - m as f64);
                }
            }
            acc += self.values[start + j] * w;
        }
        acc
    }
}

/// Grid of spectral points `xi + i * imag_offset`, `xi` uniform in `[lambda_min, lambda_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    lambda_min: f64,
    lambda_max: f64,
    points: usize,
    imag_offset: f64,
}

impl SpectralGrid {
    pub fn new(lambda_min: f64, lambda_max: f64, points: usize, imag_offset: f64) -> Result<Self> {
        if !(lambda_min < lambda_max) {
            return Err(Error::InvalidGrid(
                "lambda_min must be below lambda_max".into(),
            ));
        }
        if points < 2 {
            return Err(Error::InvalidGrid("need at least two spectral points".into()));
        }
        if !imag_offset.is_finite() {
            return Err(Error::InvalidGrid("imag_offset must be finite".into()));
        }
        Ok(Self {
            lambda_min,
            lambda_max,
            points,
            imag_offset,
        })
    }

    /// Symmetric real-axis grid on `[-cutoff, cutoff]` with an odd point count.
    pub fn symmetric(cutoff: f64, points: usize) -> Result<Self> {
        let points = if points % 2 == 0 { points + 1 } else { points };
        Self::new(-cutoff, cutoff, points, 0.0)
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn imag_offset(&self) -> f64 {
        self.imag_offset
    }

    pub fn spacing(&self) -> f64 {
        (self.lambda_max - self.lambda_min) / (self.points - 1) as f64
    }

    pub fn real_node(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.lambda_max
        } else {
            self.lambda_min + i as f64 * self.spacing()
        }
    }

    pub fn node(&self, i: usize) -> Complex64 {
        Complex64::new(self.real_node(i), self.imag_offset)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.points).map(move |i| self.node(i))
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.points];
        w[0] *= 0.5;
        w[self.points - 1] *= 0.5;
        w
    }

    /// Largest `|Re lambda|` on the grid.
    pub fn extent(&self) -> f64 {
        self.lambda_min.abs().max(self.lambda_max.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    grid: SpectralGrid,
    values: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(grid: SpectralGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a spectral grid of {} points",
                values.len(),
                grid.points()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: SpectralGrid, g: impl Fn(Complex64) -> Complex64) -> Self {
        let values = grid.nodes().map(g).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }
}

/// A Lebesgue exponent `p` in `[1, 2]` with its conjugate `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueExponent {
    p: f64,
    q: f64,
}

impl LebesgueExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::InvalidExponent(format!("p = {p} is outside [1, 2]")));
        }
        let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The conjugate exponent; `f64::INFINITY` for `p = 1`.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_one(&self) -> bool {
        self.p == 1.0
    }
}

/// Half-width `(2/p - 1) rho` of the holomorphy strip of the transform on `L^p`.
/// A zero width (at `p = 2`) means the strip degenerates to the real axis.
pub fn strip_halfwidth(params: &Parameters, p: LebesgueExponent) -> f64 {
    (2.0 / p.p() - 1.0) * params.rho()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_parameters() {
        let p = validate_parameters(0.5, -0.5).unwrap();
        assert_eq!(p.rho(), 1.0);
        assert_eq!(p.k1(), 1.0);
        assert_eq!(p.k2(), 0.0);
    }

    #[test]
    fn parameter_rejections_name_the_constraint() {
        let e = validate_parameters(-0.5, -0.5).unwrap_err();
        assert!(e.to_string().contains("alpha must exceed -1/2"), "{e}");
        let e = validate_parameters(1.0, 2.0).unwrap_err();
        assert!(e.to_string().contains("alpha must be >= beta"), "{e}");
        let e = validate_parameters(0.0, -0.7).unwrap_err();
        assert!(e.to_string().contains("beta must be >= -1/2"), "{e}");
        assert!(validate_parameters(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn multiplicity_round_trip() {
        let p = Parameters::new(2.3, 0.7).unwrap();
        let q = Parameters::from_multiplicities(p.k1(), p.k2()).unwrap();
        assert!((q.alpha() - 2.3).abs() < 1e-15 && (q.beta() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn strip_widths() {
        let p = Parameters::new(0.5, -0.5).unwrap();
        assert_eq!(strip_halfwidth(&p, LebesgueExponent::new(1.0).unwrap()), 1.0);
        assert_eq!(strip_halfwidth(&p, LebesgueExponent::new(2.0).unwrap()), 0.0);
        // rho = 2.5
        let p = Parameters::new(1.0, 0.5).unwrap();
        let w = strip_halfwidth(&p, LebesgueExponent::new(1.25).unwrap());
        assert!((w - 1.5).abs() < 1e-15);
    }

    #[test]
    fn exponent_conjugates() {
        let e = LebesgueExponent::new(1.0).unwrap();
        assert!(e.q().is_infinite());
        let e = LebesgueExponent::new(1.5).unwrap();
        assert!((1.0 / e.p() + 1.0 / e.q() - 1.0).abs() < 1e-15);
        assert!(LebesgueExponent::new(2.5).is_err());
        assert!(LebesgueExponent::new(0.9).is_err());
    }

    #[test]
    fn grid_is_exactly_symmetric() {
        let g = SpatialGrid::new(3.7, 101).unwrap();
        assert_eq!(g.node(g.center()), 0.0);
        for i in 0..g.points() {
            assert_eq!(g.node(g.mirror(i)), -g.node(i));
        }
        assert!(SpatialGrid::new(1.0, 10).is_err());
        assert!(SpatialGrid::new(1.0, 1).is_err());
        assert!(SpatialGrid::new(-1.0, 11).is_err());
    }

    #[test]
    fn grid_function_length_is_checked() {
        let g = SpatialGrid::new(1.0, 5).unwrap();
        assert!(GridFunction::new(g, vec![Complex64::new(0.0, 0.0); 4]).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_cubics() {
        let g = SpatialGrid::new(2.0, 41).unwrap();
        let f = GridFunction::from_real_fn(g, |x| x * x * x - 2.0 * x + 1.0);
        for &x in &[-1.93, -0.051, 0.0, 0.77, 1.999] {
            let want = x * x * x - 2.0 * x + 1.0;
            assert!((f.interpolate(x).re - want).abs() < 1e-12, "x={x}");
        }
        assert_eq!(f.interpolate(2.5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn spectral_grid_validation() {
        assert!(SpectralGrid::new(1.0, 1.0, 5, 0.0).is_err());
        assert!(SpectralGrid::new(0.0, 1.0, 1, 0.0).is_err());
        let g = SpectralGrid::new(-2.0, 2.0, 5, 0.3).unwrap();
        assert_eq!(g.node(1), Complex64::new(-1.0, 0.3));
        assert_eq!(g.node(4).re, 2.0);
    }
}
