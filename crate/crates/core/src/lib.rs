//! Bound states and low-energy scattering for the strongly attractive
//! inverse-square potential −μ/(2x²), regularized inside a cutoff x₀ by an
//! Eckart shell.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundstates;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod roots;
pub mod scattering;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
