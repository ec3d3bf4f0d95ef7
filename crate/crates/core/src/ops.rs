//! The differential-difference operator `T`, the Laplacian `L = T^2`,
//! parity splitting and the antiderivative `J`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{GridFunction, Parameters, SpatialGrid};
use crate::quadrature::cumulative_integral;

/// `(f_e, f_o)` with `f_e(x) = (f(x) + f(-x))/2` and `f_o(x) = (f(x) - f(-x))/2`,
/// paired node by node.
pub fn parity_split(f: &GridFunction) -> (GridFunction, GridFunction) {
    let grid = *f.grid();
    let v = f.values();
    let mut even = Vec::with_capacity(v.len());
    let mut odd = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        let r = v[grid.mirror(i)];
        even.push((v[i] + r) * 0.5);
        odd.push((v[i] - r) * 0.5);
    }
    (
        GridFunction::new(grid, even).expect("same grid"),
        GridFunction::new(grid, odd).expect("same grid"),
    )
}

fn guard(x: f64, h: f64, band: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::InvalidGrid(format!("step h = {h} must be positive")));
    }
    if x.abs() < band {
        return Err(Error::SingularRegion { x, band });
    }
    Ok(())
}

fn coefficient(params: &Parameters, x: f64) -> f64 {
    0.5 * ((2.0 * params.alpha() + 1.0) / x.tanh() + (2.0 * params.beta() + 1.0) * x.tanh())
}

/// `T f(x) = f'(x) + [(2a+1) coth x + (2b+1) tanh x] (f(x) - f(-x))/2 - rho f(-x)`,
/// with `f'` from a fourth-order central difference of step `h`.
///
/// Refuses `|x| < 10 h`, where `coth` is singular.
pub fn apply_t<F: Fn(f64) -> Complex64>(f: &F, params: &Parameters, x: f64, h: f64) -> Result<Complex64> {
    guard(x, h, 10.0 * h)?;
    let d = (-f(x + 2.0 * h) + f(x + h) * 8.0 - f(x - h) * 8.0 + f(x - 2.0 * h)) / (12.0 * h);
    let (fx, fm) = (f(x), f(-x));
    Ok(d + (fx - fm) * coefficient(params, x) - fm * params.rho())
}

/// The same operator written with Cherednik's multiplicities:
/// `f' + {2k1/(1 - e^{-2x}) + 4k2/(1 - e^{-4x})}(f(x) - f(-x)) - (k1 + 2k2) f(x)`.
pub fn apply_t_cherednik<F: Fn(f64) -> Complex64>(f: &F, k1: f64, k2: f64, x: f64, h: f64) -> Result<Complex64> {
    guard(x, h, 10.0 * h)?;
    let d = (-f(x + 2.0 * h) + f(x + h) * 8.0 - f(x - h) * 8.0 + f(x - 2.0 * h)) / (12.0 * h);
    let (fx, fm) = (f(x), f(-x));
    let c = 2.0 * k1 / (-(-2.0 * x).exp_m1()) + 4.0 * k2 / (-(-4.0 * x).exp_m1());
    Ok(d + (fx - fm) * c - fx * (k1 + 2.0 * k2))
}

/// `L^n f(x) = T^{2n} f(x)` by nested differencing.
///
/// `f` is sampled once on the lattice `{s x + k h : s = +-1, |k| <= 4n}`,
/// which is closed under the reflection and the difference stencils, and `T`
/// is applied `2n` times on shrinking sublattices. The result equals `2n`
/// nested calls of [`apply_t`] at a fraction of the cost.
pub fn apply_l<F: Fn(f64) -> Complex64>(f: &F, params: &Parameters, x: f64, h: f64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Ok(f(x));
    }
    apply_t_power(f, params, x, h, 2 * n)
}

/// `T^m f(x)` by the lattice scheme of [`apply_l`].
pub fn apply_t_power<F: Fn(f64) -> Complex64>(f: &F, params: &Parameters, x: f64, h: f64, m: usize) -> Result<Complex64> {
    guard(x, h, 10.0 * h + 4.0 * (m.max(1) - 1) as f64 * h)?;
    if m == 0 {
        return Ok(f(x));
    }
    let reach = 2 * m as i64;
    let width = (2 * reach + 1) as usize;
    let at = |s: usize, k: i64| -> f64 {
        let sign = if s == 0 { 1.0 } else { -1.0 };
        sign * x + k as f64 * h
    };
    // values[s][k + reach] holds the current iterate at s x + k h, with the
    // convention that s = 1 carries the point -x + k h
    let mut values: Vec<Vec<Complex64>> = (0..2)
        .map(|s| (-reach..=reach).map(|k| f(at(s, k))).collect())
        .collect();
    for level in 1..=m as i64 {
        let r = reach - 2 * level;
        let mut next = vec![vec![Complex64::new(0.0, 0.0); width]; 2];
        for s in 0..2 {
            for k in -r..=r {
                let i = (k + reach) as usize;
                let y = at(s, k);
                let v = &values[s];
                let d = (-v[i + 2] + v[i + 1] * 8.0 - v[i - 1] * 8.0 + v[i - 2]) / (12.0 * h);
                // -y = (-s) x - k h
                let mirror = values[1 - s][(-k + reach) as usize];
                next[s][i] = d + (v[i] - mirror) * coefficient(params, y) - mirror * params.rho();
            }
        }
        values = next;
    }
    Ok(values[0][reach as usize])
}

/// `L^n f` sampled on every node of `grid`. Nodes inside the guard band are
/// filled by cubic interpolation across the band from the nearest admissible
/// nodes on either side.
pub fn apply_l_on_grid<F: Fn(f64) -> Complex64 + Sync>(
    f: &F,
    params: &Parameters,
    grid: SpatialGrid,
    h: f64,
    n: usize,
) -> Result<GridFunction> {
    use rayon::prelude::*;
    let band = 10.0 * h + 4.0 * (2 * n - 1) as f64 * h;
    let nodes: Vec<f64> = grid.nodes().collect();
    let raw: Vec<Option<Complex64>> = nodes
        .par_iter()
        .map(|&x| if x.abs() < band { Ok(None) } else { apply_l(f, params, x, h, n).map(Some) })
        .collect::<Result<_>>()?;
    let c = grid.center();
    let gap = (0..=c).take_while(|&j| raw[c + j].is_none()).count();
    if gap + 2 > c {
        return Err(Error::InvalidGrid("grid too coarse for the operator guard band".into()));
    }
    let xs = [nodes[c - gap - 1], nodes[c - gap], nodes[c + gap], nodes[c + gap + 1]];
    let ys = [
        raw[c - gap - 1].unwrap(),
        raw[c - gap].unwrap(),
        raw[c + gap].unwrap(),
        raw[c + gap + 1].unwrap(),
    ];
    let interp = |x: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    w *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += ys[i] * w;
        }
        acc
    };
    let values = raw
        .into_iter()
        .zip(&nodes)
        .map(|(v, &x)| v.unwrap_or_else(|| interp(x)))
        .collect();
    GridFunction::new(grid, values)
}

/// `J f_o(x) = int_{-inf}^x f_o(t) dt` for odd `f_o`; the result is even.
pub fn antiderivative_j(f_o: &GridFunction) -> Result<GridFunction> {
    let (even, _) = parity_split(f_o);
    let scale = f_o.max_abs();
    let residual = if scale > 0.0 { even.max_abs() / scale } else { 0.0 };
    if residual >= 1e-10 {
        return Err(Error::ParityViolation(residual));
    }
    Ok(cumulative_integral(f_o).function)
}
