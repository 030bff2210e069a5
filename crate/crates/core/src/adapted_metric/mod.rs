//! Adapted Riemannian metric of a pseudohermitian structure.

pub mod formulas;
pub mod metric;

pub use formulas::{
    calibrate_levi_scale, calibrate_reading, connd_residual, cuv_residuals, einstein_residual, hess_residuals,
    hf_residual, obata_reduction, rica_residuals, ConnectionComparison, ConnectionReading, CurvatureComparison,
    FrameContext, HessResiduals, ReadingCalibration, RicciComparison, ScaleCalibration, ScaleCandidate, LEVI_CANDIDATES,
};
pub use metric::{christoffel_oracle, hessian_asymmetry, AdaptedMetric, CurvatureSymmetry, LeviCivita, LEVI_SCALE};
