//! Numerics for the Gaussian random matrix ensemble with an external source
//! near the cusp point: the spectral curve, λ-functions, Pearcey integrals and
//! kernel, the finite-n kernel, gap probabilities and the model RH problem.
//!
//! Generic helpers (quadrature rules, real eigen/LU solvers, series
//! arithmetic) are written against [`Real`]; the complex-analytic layers use
//! the `f64` aliases below.

pub mod acceptance;
pub mod cubic;
pub mod cusp_kernel;
pub mod error;
pub mod finite_ensemble;
pub mod lambda_map;
pub mod linalg;
pub mod pearcey_fn;
pub mod quad;
pub mod rh_model;
pub mod scalar;
pub mod sd_contour;
pub mod series;
pub mod spectral_surface;

pub use error::{Error, Result};
pub use scalar::Real;

/// Working real type of the complex-analytic layers.
pub type R = f64;
/// Working complex type.
pub type C64 = num_complex::Complex<f64>;

pub use spectral_surface::{make_curve, BranchValues, Side, SpectralCurve};
