//! Special functions: log-Gamma, Gauss hypergeometric series, Jacobi
//! functions, the eigenfunctions `G_lambda`, the c-function, the weight and
//! the Plancherel densities.

mod gamma;
mod hyper;
mod jacobi;
mod plancherel;
mod zeta;

pub use gamma::log_gamma;
pub use hyper::hyp2f1;
pub use jacobi::{jacobi_phi, opdam_g, JacobiPhi, OpdamG};
pub(crate) use zeta::zeta_negative;
pub use plancherel::{
    c_abs_sq_inverse, c_function, c_function_alt, log_weight_a, plancherel_constant, plancherel_densities,
    weight_a, CFunctionValue, PlancherelDensities,
};
