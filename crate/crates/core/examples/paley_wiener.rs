//! Support radius from spectral moments, exponential type, and the membership table.

use num_complex::Complex64;
use opdam::catalog::{bump, spatial_grid_for, spectral_bump, spectral_gaussian, TestFunction};
use opdam::paley_wiener::{exponential_type, pw_membership, spectral_radius};
use opdam::quadrature::QuadratureSpec;
use opdam::{GridFunction, Parameters, SpatialGrid, SpectralGrid};

fn main() -> opdam::Result<()> {
    let params = Parameters::new(1.0, 0.25)?;

    let g = spectral_bump(SpectralGrid::symmetric(2.5, 1001)?, 2.0, 0.1);
    let r = spectral_radius(&params, &g, 64)?;
    for &(n, v) in r.moment_sequence.iter().filter(|(n, _)| n.is_power_of_two()) {
        println!("bump on [-2, 2]: r_{n} = {v:.6}");
    }
    let gauss = spectral_radius(&params, &spectral_gaussian(SpectralGrid::symmetric(40.0, 4001)?), 64)?;
    println!("gaussian: r_64 = {:.4}, diverging = {}", gauss.estimate, gauss.diverging);

    let grid = SpatialGrid::with_spacing(2.0, 0.002)?;
    let f = GridFunction::from_real_fn(grid, |x| bump(x, 0.0, 1.5, 0.01));
    let t = exponential_type(&params, &f, (5.0, 15.0), 21)?;
    println!("bump on [-1.5, 1.5]: fitted type {:.4}, finite {}", t.r_fit, t.finite_type);

    let f = |x: f64| Complex64::new(TestFunction::Bump.eval(x), 0.0);
    let report = pw_membership(
        &params,
        &f,
        spatial_grid_for(params.rho(), 0.01),
        1e-3,
        2,
        2,
        2,
        &QuadratureSpec::default().with_tol(1e-8),
    )?;
    for e in &report.table {
        println!("||(1+|x|)^{} L^{} f|| = {:.6e} resolved {}", e.m, e.n, e.value, e.resolved);
    }
    println!("spectral {:?}, flags {:?}", report.spectral, report.flags);
    Ok(())
}
