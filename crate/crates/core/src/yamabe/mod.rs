//! Quadrature, the CR Yamabe quotient and a minimizer over positive functions.

pub mod basis;
pub mod fit;
pub mod functional;
pub mod optimize;
pub mod quadrature;

pub use basis::{BasisFunction, FunctionBasis};
pub use fit::{fit_family, FamilyFit};
pub use functional::{
    horizontal_gradient_sqr, integrate, sharp_constant, sobolev_gap, standard_density, volume, volume_density,
    volume_density_from_chart, yamabe_quotient, FactorFunction, SobolevGap, SphereFunction, YamabeValue,
};
pub use optimize::{minimize_yamabe, MinimizeOutcome, OptimizerConfig, TraceEntry};
pub use quadrature::{sphere_area, QuadratureRule, RuleKind};
