//! Potential theory on cone-like domains.
//!
//! Image Green kernels, the fractional Laplacian, the scaling-spheres comparison engine,
//! blow-up rescaling and a fixed-point solver for Lane-Emden type integral equations.

pub mod blowup;
pub mod cli;
pub mod error;
pub mod field;
pub mod geometry;
pub mod kernels;
pub mod point;
pub mod quadrature;
pub mod scaling_spheres;
pub mod solver;

pub use error::{Error, Result};
pub use field::{Field, FnField, GridFunction, Interp};
pub use point::Point;
