//! Tanaka-Webster calculus on the CR sphere and the Heisenberg group.

// Tensor code indexes several arrays by the same frame index; the negated
// comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod adapted_metric;
pub mod conformal;
pub mod contact;
pub mod engine;
pub mod jerison_lee;
pub mod jets;
pub mod yamabe;

pub use error::{Error, Result};
