//! Evaluates `G_lambda` and checks `T G_lambda = i lambda G_lambda` numerically.

use num_complex::Complex64;
use opdam::ops::apply_t;
use opdam::special::{jacobi_phi, OpdamG};
use opdam::Parameters;

fn main() -> opdam::Result<()> {
    let params = Parameters::new(1.0, 0.25)?;
    let lambda = Complex64::new(2.0, 0.0);
    let g = OpdamG::new(params, lambda);
    let f = |x: f64| g.eval(x).unwrap();

    println!("{:>6} {:>24} {:>12}", "x", "G_lambda(x)", "residual");
    for x in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
        let t = apply_t(&f, &params, x, 1e-3)?;
        let residual = (t - Complex64::i() * lambda * f(x)).norm();
        println!("{x:>6.2} {:>24.12} {residual:>12.2e}", f(x));
    }

    // rank one: phi_l(x) = sin(l x) / (l sinh x)
    let rank_one = Parameters::new(0.5, -0.5)?;
    let (l, x) = (3.0f64, 1.2f64);
    let phi = jacobi_phi(&rank_one, Complex64::new(l, 0.0), x)?;
    println!("phi = {:.15}, closed form = {:.15}", phi.re, (l * x).sin() / (l * x.sinh()));
    Ok(())
}
