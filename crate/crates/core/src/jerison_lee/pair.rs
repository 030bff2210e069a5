use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::components::components;
use crate::contact::{ConformalFactor, ContactModel, FactorSpec};
use crate::engine::{classify, Classification, CovJet, PHState, TorsionDerivatives};
use crate::error::{Error, Result};
use crate::yamabe::functional::{chart_at, standard_density};
use crate::yamabe::QuadratureRule;

/// `theta = theta_factor * model form` and `theta~ = phi^-1 theta`.
#[derive(Clone, Debug)]
pub struct JlPair {
    pub model: ContactModel,
    pub theta: FactorSpec,
    pub phi: FactorSpec,
}

/// Everything the component formulas need at one point.
#[derive(Clone, Debug)]
pub struct JlPoint {
    pub state: PHState,
    pub phi: CovJet,
    pub torsion: TorsionDerivatives,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub target: f64,
    pub theta_scalar_mean: f64,
    pub theta_scalar_std: f64,
    pub tilde: Classification,
    pub tilde_scalar_mean: f64,
    pub holds: bool,
}

/// Scale `c` for which `c |cosh t + sinh t <zeta, xi>|^-2 theta_c` has scalar
/// curvature `m(m+1)/2`, read off at one point.
pub fn family_scale(m: usize, t: f64, xi: &[Complex64]) -> Result<f64> {
    let sphere = ContactModel::sphere(m)?;
    let unit = ConformalFactor::new(FactorSpec::jl_family(1.0, t, xi))?;
    let p = vec![0.0; sphere.dim()];
    let r = PHState::new(&sphere, &unit, &p, 3)?.scalar_curvature()?;
    Ok(r / (0.5 * (m * (m + 1)) as f64))
}

impl JlPair {
    pub fn new(model: ContactModel, theta: FactorSpec, phi: FactorSpec) -> Self {
        JlPair { model, theta, phi }
    }

    /// `theta = phi theta_c` with `phi` the normalized family member, so that
    /// `theta~ = theta_c`. Returns the pair and the scale used.
    pub fn family_over_standard(m: usize, t: f64, xi: &[Complex64]) -> Result<(Self, f64)> {
        let c = family_scale(m, t, xi)?;
        let phi = FactorSpec::jl_family(c, t, xi);
        Ok((JlPair::new(ContactModel::sphere(m)?, phi.clone(), phi), c))
    }

    /// `theta = theta_c` and `theta~` the normalized family member.
    pub fn standard_over_family(m: usize, t: f64, xi: &[Complex64]) -> Result<(Self, f64)> {
        let c = family_scale(m, t, xi)?;
        let phi = FactorSpec::jl_family(c, t, xi).inverse();
        Ok((JlPair::new(ContactModel::sphere(m)?, FactorSpec::one(), phi), c))
    }

    pub fn tilde(&self) -> FactorSpec {
        self.theta.times(&self.phi.inverse())
    }

    pub fn point(&self, p: &[f64], order: usize) -> Result<JlPoint> {
        let state = PHState::new(&self.model, &ConformalFactor::new(self.theta.clone())?, p, order)?;
        let phi_jet = ConformalFactor::new(self.phi.clone())?.eval(&self.model, p, order)?;
        let phi = CovJet::new(&state, &phi_jet, 2)?;
        let torsion = TorsionDerivatives::new(&state)?;
        Ok(JlPoint { state, phi, torsion })
    }

    /// Scalar curvature of both structures against `m(m+1)/2` and the
    /// Einstein condition for `theta~`, over `points`.
    pub fn hypotheses(&self, points: &[Vec<f64>], tol: f64) -> Result<HypothesisReport> {
        if points.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let m = self.model.m();
        let target = 0.5 * (m * (m + 1)) as f64;
        let theta = ConformalFactor::new(self.theta.clone())?;
        let tilde = ConformalFactor::new(self.tilde())?;
        let mut scalars = Vec::with_capacity(points.len());
        let mut tilde_states = Vec::with_capacity(points.len());
        for p in points {
            scalars.push(PHState::new(&self.model, &theta, p, 3)?.scalar_curvature()?);
            tilde_states.push(PHState::new(&self.model, &tilde, p, 3)?);
        }
        let mean = scalars.iter().sum::<f64>() / scalars.len() as f64;
        let std = (scalars.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / scalars.len() as f64).sqrt();
        let class = classify(&tilde_states, tol)?;
        let mut tilde_sum = 0.0;
        for s in &tilde_states {
            tilde_sum += s.scalar_curvature()?;
        }
        let tilde_mean = tilde_sum / tilde_states.len() as f64;
        let scale = tol * (1.0 + target);
        let holds = class.einstein
            && (mean - target).abs() <= scale
            && std <= scale
            && (tilde_mean - target).abs() <= scale;
        Ok(HypothesisReport {
            target,
            theta_scalar_mean: mean,
            theta_scalar_std: std,
            tilde: class,
            tilde_scalar_mean: tilde_mean,
            holds,
        })
    }

    /// As [`hypotheses`](Self::hypotheses), failing with
    /// [`Error::Hypothesis`] when they do not hold.
    pub fn require_hypotheses(&self, points: &[Vec<f64>], tol: f64) -> Result<HypothesisReport> {
        let r = self.hypotheses(points, tol)?;
        if !r.holds {
            return Err(Error::Hypothesis(format!(
                "R = {:.3e} +- {:.1e}, R~ = {:.3e} (target {}), theta~ {}",
                r.theta_scalar_mean,
                r.theta_scalar_std,
                r.tilde_scalar_mean,
                r.target,
                r.tilde.label()
            )));
        }
        Ok(r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratedDivergence {
    /// `int lhs dv_theta`.
    pub integral: f64,
    /// `int |lhs| dv_theta`, for scale.
    pub absolute: f64,
    pub nodes: usize,
}

/// Quadrature of the divergence side of the identity over the sphere for
/// `theta = theta_factor * theta_c`. Vanishes for any positive `phi`.
pub fn integrated_divergence(rule: &QuadratureRule, theta: &FactorSpec, phi: &FactorSpec) -> Result<IntegratedDivergence> {
    let m = rule.m;
    let tf = ConformalFactor::new(theta.clone())?;
    let pf = ConformalFactor::new(phi.clone())?;
    let sums = rule.try_integrate_many(2, |z| {
        let (model, p) = chart_at(m, z)?;
        let state = PHState::new(&model, &tf, &p, 4)?;
        let phi_cov = CovJet::new(&state, &pf.eval(&model, &p, 4)?, 2)?;
        let td = TorsionDerivatives::new(&state)?;
        let c = components(&state, &phi_cov, &td)?;
        let dens = tf.eval(&model, &p, 0)?.value().powi(m as i32 + 1) * standard_density(m);
        Ok(vec![c.lhs * dens, c.lhs.abs() * dens])
    })?;
    Ok(IntegratedDivergence { integral: sums[0], absolute: sums[1], nodes: rule.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi() -> Vec<Complex64> {
        vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]
    }

    #[test]
    fn family_scale_is_one() {
        assert!((family_scale(1, 0.7, &xi()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypotheses_hold_for_both_orientations() {
        let pts = vec![vec![0.1, 0.2, -0.3], vec![-0.4, 0.3, 0.5]];
        let (a, _) = JlPair::standard_over_family(1, 0.5, &xi()).unwrap();
        let (b, _) = JlPair::family_over_standard(1, 0.5, &xi()).unwrap();
        assert!(a.require_hypotheses(&pts, 1e-8).is_ok());
        assert!(b.require_hypotheses(&pts, 1e-8).is_ok());
    }

    #[test]
    fn hypotheses_fail_for_random_factor() {
        let pair = JlPair::new(ContactModel::sphere(1).unwrap(), FactorSpec::one(), FactorSpec::random_trig(4));
        let r = pair.hypotheses(&[vec![0.1, 0.2, -0.3]], 1e-8).unwrap();
        assert!(!r.holds);
        assert!(matches!(pair.require_hypotheses(&[vec![0.1, 0.2, -0.3]], 1e-8), Err(Error::Hypothesis(_))));
    }
}
