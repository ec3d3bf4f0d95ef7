//! The Cherednik–Opdam transform on the real line.
//!
//! The crate evaluates the eigenfunctions `G_lambda` of the
//! differential-difference operator `T`, the forward and inverse transforms,
//! the Plancherel energies, the product-formula kernel with the associated
//! translation and convolution, and estimators for the real Paley–Wiener
//! support radius. See the `examples/` directory for one program per
//! capability.

pub mod error;
pub mod model;
pub mod ops;
pub mod quadrature;
pub mod special;
pub mod transform;
pub mod convolution;
pub mod catalog;
pub mod paley_wiener;
pub mod cli;

pub use error::{Error, Result};
pub use model::{
    strip_halfwidth, validate_parameters, GridFunction, LebesgueExponent, Parameters, SpatialGrid, SpectralFunction,
    SpectralGrid,
};
