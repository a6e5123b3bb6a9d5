//! Numerical toolkit for Toeplitz operators on weighted Bergman spaces of the
//! unit ball: kernels and special functions, pulled-back metric geometry,
//! block Hessian determinants, finite-α spectra and their Szegő limits.

// `!(x > y)` comparisons are used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bergman;
pub mod charts;
pub mod error;
pub mod geometry;
pub mod hessdet;
pub mod linalg;
pub mod quadrature;
pub mod special;
pub mod szego;
pub mod toeplitz;

pub use error::{Error, Result};
