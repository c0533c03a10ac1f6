//! Monic symmetric determinantal representations `det(I + x1 A1 + x2 A2)` of
//! bivariate polynomials, built from orthostochastic matrices.

pub mod bpoly;
pub mod cli;
pub mod cubic;
pub mod error;
pub mod exterior;
pub mod rangeset;
pub mod relax;
pub mod smallnum;
pub mod solve;
pub mod spectral;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use tol::Tolerances;
