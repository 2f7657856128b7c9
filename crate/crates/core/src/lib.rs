//! Exact Mellin transforms, mod-Gaussian expansions and Monte Carlo
//! validation for log-determinants and log-characteristic polynomials of
//! β-ensembles.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod cgf;
pub mod error;
pub mod predict;
pub mod sampler;
pub mod specfun;
pub mod summation;
pub mod upsilon;

pub use error::{Error, Result};
pub use num_complex::Complex64;
