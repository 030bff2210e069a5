use thiserror::Error;

use crate::jets::JetError;
use crate::yamabe::MinimizeOutcome;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("inadmissible chart point: {0}")]
    InadmissiblePoint(String),
    #[error("degenerate contact form: {0}")]
    Degenerate(String),
    #[error("Levi form is not positive definite")]
    NotPseudoconvex,
    #[error("jet order {have} is too low, {needed} required for {what}")]
    InsufficientOrder { needed: usize, have: usize, what: &'static str },
    #[error("conformal factor must be positive, got {0}")]
    NonPositive(f64),
    #[error("invalid factor: {0}")]
    Factor(String),
    #[error("expression parse error: {0}")]
    Parse(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("hypotheses not satisfied: {0}")]
    Hypothesis(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("optimizer did not converge after {iterations} iterations (best {best})")]
    NotConverged { iterations: usize, best: f64, outcome: Box<MinimizeOutcome> },
    #[error("samples do not fit the extremal family (residual {0})")]
    NotInFamily(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
