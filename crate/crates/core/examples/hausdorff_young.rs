//! Hausdorff-Young ratios over the test family, and the transform inside the strip.

use opdam::catalog::{spatial_grid_for, TestFunction};
use opdam::quadrature::QuadratureSpec;
use opdam::transform::{hy_ratio, strip_eval};
use opdam::{strip_halfwidth, LebesgueExponent, Parameters};

fn main() -> opdam::Result<()> {
    let params = Parameters::new(1.0, 0.25)?;
    let spec = QuadratureSpec::default().with_tol(1e-8);
    let grid = spatial_grid_for(params.rho(), 0.01);
    for p in [1.0, 1.2, 1.5] {
        let e = LebesgueExponent::new(p)?;
        let ratios = TestFunction::FAMILY
            .iter()
            .map(|f| hy_ratio(&params, &f.sample(grid), e, &spec))
            .collect::<opdam::Result<Vec<f64>>>()?;
        let c = ratios.iter().cloned().fold(0.0, f64::max);
        println!("p = {p}: ratios {ratios:.4?}  max {c:.4}");
    }

    let e = LebesgueExponent::new(1.5)?;
    let f = TestFunction::MixedGaussian.sample(grid);
    let eta = 0.9 * strip_halfwidth(&params, e);
    for xi in [0.0, 1.0, 4.0] {
        let v = strip_eval(&params, &f, xi, eta, e, &spec)?;
        println!("H f({xi} + {eta:.3}i) = {:.6}, bound {:.6}", v.value.0, v.bound);
    }
    Ok(())
}
