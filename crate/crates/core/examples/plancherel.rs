//! Spatial energy of `e^{-x^2}(1 + x/2)` against both spectral forms.

use opdam::catalog::{spatial_grid_for, TestFunction};
use opdam::quadrature::QuadratureSpec;
use opdam::transform::plancherel_energy;
use opdam::Parameters;

fn main() -> opdam::Result<()> {
    for (a, b) in [(0.5, -0.5), (1.0, 0.25), (2.3, 0.7)] {
        let params = Parameters::new(a, b)?;
        let f = TestFunction::MixedGaussian.sample(spatial_grid_for(params.rho(), 0.01));
        let r = plancherel_energy(&params, &f, &QuadratureSpec::default().with_tol(1e-8))?;
        println!(
            "({a}, {b}): ||f||^2 = {:.12}  symmetric {:.12}  asymmetric {:.12}  cutoff {}",
            r.spatial_energy, r.spectral_energy_symmetric, r.spectral_energy_asymmetric, r.cutoff
        );
    }
    Ok(())
}
