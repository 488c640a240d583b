//! Singular rank-one perturbations of the three-dimensional Laplacian.
//!
//! `specfun` and `quad` are generic over [`real::Real`]; the aliases below fix
//! them to `f64`, the precision used by every other module.

pub mod point;
pub mod real;
pub mod specfun;
pub mod quad;
pub mod nevanlinna;
pub mod positivity;
pub mod kernels;
pub mod matrix_oracle;
pub mod spectral_traces;

pub use nevanlinna::{Channel, ExtensionConfig, SpectralPoint};

pub type Complex = num_complex::Complex64;
pub type RayPoint = specfun::RayPoint<f64>;
pub type QuadConfig = quad::QuadConfig<f64>;
pub type QuadResult = quad::QuadResult<f64>;
pub type QuadError = quad::QuadError<f64>;
