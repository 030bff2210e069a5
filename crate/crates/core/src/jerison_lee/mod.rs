//! Jerison-Lee components for a pair `theta`, `theta~ = phi^-1 theta`, the
//! divergence identity they satisfy when both structures have scalar
//! curvature `m(m+1)/2` and `theta~` is Einstein, and the reductions that
//! follow from it.

mod components;
mod obata;
mod pair;

pub use components::{
    components, einstein_reduction_residuals, identity_residual, lemma_residuals, vanishing_system_residuals,
    EinsteinResiduals, JLComponents, LemmaResiduals, VanishingResiduals,
};
pub use obata::{crh_residuals, family_mean, recover_affine, AffineFit, CrhResiduals, FamilyParams, ObataData};
pub use pair::{family_scale, integrated_divergence, HypothesisReport, IntegratedDivergence, JlPair, JlPoint};
