//! Grassmann–Berezin engine, partition functions and regularised
//! determinants for a one-dimensional fermionic state sum model.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod grassmann;
pub mod linalg;
pub mod report;
pub mod spectral;
pub mod statesum;
pub mod zetareg;

pub use error::{Error, Result};
