//! Pointwise Tanaka-Webster calculus.

pub mod checks;
pub mod covjet;
pub mod state;
pub mod tensor;

pub use checks::{bianchi_residual, classify, commutation_residual, r0_residual, Classification, TorsionDerivatives};
pub use covjet::CovJet;
pub use state::{solve_connection, Curvature, PHState};
pub use tensor::Tensor;
