//! Test functions shared by the examples, the command line and the tests.

use num_complex::Complex64;
use serde::Serialize;

use crate::model::{GridFunction, SpatialGrid, SpectralFunction, SpectralGrid};

/// `exp(-s / (1 - u^2))` with `u = (x - center) / radius`, zero for `|u| >= 1`.
pub fn bump(x: f64, center: f64, radius: f64, sharpness: f64) -> f64 {
    let u = (x - center) / radius;
    if u.abs() >= 1.0 {
        return 0.0;
    }
    (-sharpness / (1.0 - u * u)).exp()
}

/// [`bump`] rescaled to peak value one: `exp(-s u^2 / (1 - u^2))`.
pub fn unit_bump(x: f64, center: f64, radius: f64, sharpness: f64) -> f64 {
    let u = (x - center) / radius;
    if u.abs() >= 1.0 {
        return 0.0;
    }
    (-sharpness * u * u / (1.0 - u * u)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `e^{-x^2}`.
    Gaussian,
    /// `x e^{-x^2}`.
    OddGaussian,
    /// `e^{-x^2} (1 + x/2)`.
    MixedGaussian,
    /// Unit bump on `[-2.5, 2.5]`, sharpness 10.
    Bump,
    /// `x` times the bump on `[-2.5, 2.5]`.
    OddBump,
    /// Unit bump on `[-1.8, 2.6]`, sharpness 12.
    ShiftedBump,
}

impl TestFunction {
    pub const FAMILY: [TestFunction; 6] = [
        TestFunction::Gaussian,
        TestFunction::OddGaussian,
        TestFunction::MixedGaussian,
        TestFunction::Bump,
        TestFunction::OddBump,
        TestFunction::ShiftedBump,
    ];

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Gaussian => (-x * x).exp(),
            TestFunction::OddGaussian => x * (-x * x).exp(),
            TestFunction::MixedGaussian => (-x * x).exp() * (1.0 + 0.5 * x),
            TestFunction::Bump => unit_bump(x, 0.0, 2.5, 10.0),
            TestFunction::OddBump => x * unit_bump(x, 0.0, 2.5, 10.0),
            TestFunction::ShiftedBump => unit_bump(x, 0.4, 2.2, 12.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Gaussian => "gaussian",
            TestFunction::OddGaussian => "odd_gaussian",
            TestFunction::MixedGaussian => "mixed_gaussian",
            TestFunction::Bump => "bump",
            TestFunction::OddBump => "odd_bump",
            TestFunction::ShiftedBump => "shifted_bump",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::FAMILY.iter().copied().find(|f| f.name() == name)
    }

    pub fn sample(&self, grid: SpatialGrid) -> GridFunction {
        GridFunction::from_real_fn(grid, |x| self.eval(x))
    }
}

/// Spatial grid wide enough for the Gaussians at a given `rho`: the weighted
/// edge value `e^{2 rho X - X^2}` sits far below `1e-10`.
pub fn spatial_grid_for(rho: f64, spacing: f64) -> SpatialGrid {
    // X^2 - 2 rho X >= 30
    let x = (rho + (rho * rho + 30.0).sqrt()).max(6.0).ceil();
    SpatialGrid::with_spacing(x, spacing).expect("positive width and spacing")
}

/// Smooth spectral bump supported in `[-radius, radius]`.
pub fn spectral_bump(grid: SpectralGrid, radius: f64, sharpness: f64) -> SpectralFunction {
    SpectralFunction::from_fn(grid, |l| Complex64::new(bump(l.re, 0.0, radius, sharpness), 0.0))
}

/// `e^{-l^2/2}` on a spectral grid.
pub fn spectral_gaussian(grid: SpectralGrid) -> SpectralFunction {
    SpectralFunction::from_fn(grid, |l| Complex64::new((-0.5 * l.re * l.re).exp(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_support() {
        assert_eq!(bump(1.5, 0.0, 1.5, 1.0), 0.0);
        assert_eq!(bump(-2.0, 0.0, 1.5, 1.0), 0.0);
        assert!((bump(0.0, 0.0, 1.5, 1.0) - (-1f64).exp()).abs() < 1e-15);
        assert!(bump(1.4999, 0.0, 1.5, 1.0) < 1e-300);
        assert_eq!(unit_bump(0.4, 0.4, 2.2, 12.0), 1.0);
        assert!((unit_bump(1.0, 0.0, 2.0, 3.0) - bump(1.0, 0.0, 2.0, 3.0) * 3f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn parities() {
        for x in [0.3, 1.1] {
            assert_eq!(TestFunction::OddBump.eval(-x), -TestFunction::OddBump.eval(x));
            assert_eq!(TestFunction::Gaussian.eval(-x), TestFunction::Gaussian.eval(x));
        }
        for f in TestFunction::FAMILY {
            assert_eq!(TestFunction::from_name(f.name()), Some(f));
        }
    }

    #[test]
    fn grid_width() {
        let g = spatial_grid_for(4.0, 0.01);
        let x = g.half_width();
        assert!(2.0 * 4.0 * x - x * x < -30.0);
    }
}
