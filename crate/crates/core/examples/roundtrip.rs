//! Forward and inverse transform of every built-in test function.

use opdam::catalog::{spatial_grid_for, TestFunction};
use opdam::transform::{roundtrip, spectral_cutoff, DEFAULT_CUTOFF_TOL};
use opdam::{Parameters, SpectralGrid};

fn main() -> opdam::Result<()> {
    let params = Parameters::new(1.0, 0.25)?;
    let grid = spatial_grid_for(params.rho(), 0.01);
    for func in TestFunction::FAMILY {
        let f = func.sample(grid);
        let cutoff = spectral_cutoff(&params, &f, 1.0, 0.0, DEFAULT_CUTOFF_TOL)?;
        let spectral = SpectralGrid::symmetric(cutoff, 2 * (cutoff / 0.05).ceil() as usize + 1)?;
        let (_, err) = roundtrip(&params, &f, spectral)?;
        println!("{:<15} cutoff {cutoff:>5}  relative L2 error {err:.3e}", func.name());
    }
    Ok(())
}
