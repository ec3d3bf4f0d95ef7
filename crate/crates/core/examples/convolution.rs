//! Calibrates the product kernel, checks the product formula and convolves two bumps.

use num_complex::Complex64;
use opdam::catalog::bump;
use opdam::convolution::{convolve_on, kernel_k, KernelContext};
use opdam::special::OpdamG;
use opdam::transform::forward;
use opdam::{GridFunction, Parameters, SpatialGrid};

fn main() -> opdam::Result<()> {
    let params = Parameters::new(1.0, 0.25)?;
    let ctx = KernelContext::calibrated(&params, 1e-10)?;
    println!("M = {:.15} (chi degree {})", ctx.m, ctx.chi_degree);

    for z in [-1.5, -0.9, 0.5, 1.7] {
        println!("K(0.7, 1.1, {z}) = {:.10}", kernel_k(&ctx, 0.7, 1.1, z)?);
    }

    let lambda = Complex64::new(1.5, 0.0);
    let g = OpdamG::new(params, lambda);
    let (x, y) = (1.2, -0.6);
    println!(
        "G(x) G(y) = {:.10}, int G dmu_(x,y) = {:.10}",
        g.eval(x)? * g.eval(y)?,
        ctx.product_integral(x, y, lambda)?
    );

    let grid = SpatialGrid::with_spacing(2.0, 0.01)?;
    let f = GridFunction::from_real_fn(grid, |x| bump(x, 0.1, 0.9, 0.3));
    let h = GridFunction::from_real_fn(grid, |x| bump(x, -0.2, 0.8, 0.3));
    let fh = convolve_on(&ctx, &f, &h, SpatialGrid::with_spacing(2.0, 0.025)?)?;
    for l in [0.0, 2.0, 5.0] {
        let l = Complex64::new(l, 0.0);
        println!(
            "H(f*g)({}) = {:.8}, Hf Hg = {:.8}",
            l.re,
            forward(&params, &fh, l)?,
            forward(&params, &f, l)? * forward(&params, &h, l)?
        );
    }
    Ok(())
}
