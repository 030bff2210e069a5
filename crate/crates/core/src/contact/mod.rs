//! Contact models, conformal factors and unitary frames.

pub mod expr;
pub mod factor;
pub mod frame;
pub mod model;
pub mod sampling;

pub use factor::{ConformalFactor, FactorSpec};
pub use frame::{eval_theta, reeb_field, unitary_frame, unitary_frame_with_gauge, FrameData};
pub use model::{ContactModel, ModelKind};
pub use sampling::sample_points;
