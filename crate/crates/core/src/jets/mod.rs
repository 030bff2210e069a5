//! Forward-mode differentiation by truncated multivariate Taylor arithmetic.

mod cjet;
mod jet;
pub mod layout;
pub mod linalg;

pub use cjet::CJet;
pub use jet::{Jet, EPS_DIV};

use thiserror::Error;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("derivative of order {requested} requested from a jet of order {order}")]
    OrderExceeded { requested: usize, order: usize },
    #[error("division by (near) zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("singular linear system")]
    Singular,
}
