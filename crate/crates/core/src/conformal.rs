//! Transformation laws under `theta~ = phi^-1 theta` and their direct check.
//!
//! The primitive direction is `theta~ = phi^-1 theta`. A structure written as
//! `theta = phi theta~` uses the same laws with `FactorSpec::inverse`.
//!
//! Predicted tensor components are those of `theta~`'s invariants evaluated on
//! the `theta`-unitary frame `T_a`; the `theta~`-unitary frame is
//! `phi^{1/2} T_a` up to a unitary change. The scalar law uses
//! `R~ = phi R + (m+1) Lap_b phi - (m+1)(m+2) phi^-1 |dphi|^2`, the form that
//! follows from `-(2(m+1)/m) Lap_b f + R f = R~ f^{(m+2)/m}` with
//! `f = phi^{-m/2}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contact::{ConformalFactor, ContactModel, FactorSpec};
use crate::engine::{CovJet, PHState};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pointwise invariants `(A_ab, B_ab-bar, R)` in some unitary frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Invariants {
    pub torsion: Vec<Vec<Complex64>>,
    pub traceless: Vec<Vec<Complex64>>,
    pub scalar: f64,
}

impl Invariants {
    pub fn of(state: &PHState) -> Result<Self> {
        let c = state.curvature()?;
        Ok(Invariants {
            torsion: values(&state.torsion),
            traceless: values(&c.traceless),
            scalar: c.scalar.value(),
        })
    }

    /// Components in the frame `T'_a = sum_b u_ab T_b`.
    pub fn in_frame(&self, u: &[Vec<Complex64>]) -> Invariants {
        let m = u.len();
        let mut a = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        let mut b = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        a[i][j] += u[i][k] * u[j][l] * self.torsion[k][l];
                        b[i][j] += u[i][k] * u[j][l].conj() * self.traceless[k][l];
                    }
                }
            }
        }
        Invariants { torsion: a, traceless: b, scalar: self.scalar }
    }

    /// Largest componentwise deviation, scaled by `1 + largest magnitude`.
    pub fn deviation(&self, other: &Invariants) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (x, y) in self.torsion.iter().flatten().zip(other.torsion.iter().flatten()) {
            worst = worst.max((x - y).norm());
            scale = scale.max(x.norm()).max(y.norm());
        }
        for (x, y) in self.traceless.iter().flatten().zip(other.traceless.iter().flatten()) {
            worst = worst.max((x - y).norm());
            scale = scale.max(x.norm()).max(y.norm());
        }
        worst = worst.max((self.scalar - other.scalar).abs());
        scale = scale.max(self.scalar.abs()).max(other.scalar.abs());
        worst / (1.0 + scale)
    }
}

fn values(x: &[Vec<crate::jets::CJet>]) -> Vec<Vec<Complex64>> {
    x.iter().map(|r| r.iter().map(|c| c.value()).collect()).collect()
}

/// Invariants of `phi^-1 theta` predicted from `theta`'s state and the
/// covariant derivatives of `phi` (depth at least 2).
pub fn transform_invariants(state: &PHState, phi: &CovJet) -> Result<Invariants> {
    let m = state.m();
    let mf = m as f64;
    let p = phi.value.value();
    if !(p > 0.0) {
        return Err(Error::NonPositive(p));
    }
    if phi.depth() < 2 {
        return Err(Error::InsufficientOrder { needed: 2, have: phi.depth(), what: "transformation laws" });
    }
    let base = Invariants::of(state)?;
    let inv = 1.0 / p;
    let grad = phi.grad_sqr();
    let mut trace = Complex64::new(0.0, 0.0);
    for g in 1..=m {
        trace += phi.d2(g, g + m);
    }
    let mut torsion = base.torsion.clone();
    let mut traceless = base.traceless.clone();
    for a in 1..=m {
        for b in 1..=m {
            torsion[a - 1][b - 1] -= I * inv * phi.d2(a, b);
            let mut v = (mf + 2.0) * (inv * phi.d2(a, b + m) - inv * inv * phi.d1(a) * phi.d1(b + m));
            if a == b {
                v -= (mf + 2.0) / mf * (inv * trace - inv * inv * grad);
            }
            traceless[a - 1][b - 1] += v;
        }
    }
    let scalar = p * base.scalar + (mf + 1.0) * phi.sublaplacian()? - (mf + 1.0) * (mf + 2.0) * inv * grad;
    Ok(Invariants { torsion, traceless, scalar })
}

/// `u_ab = phi^{-1/2} theta^b(T~_a)`: the `theta~` frame written over
/// `phi^{1/2} T_b`.
pub fn frame_change(theta: &PHState, tilde: &PHState, phi: f64) -> Vec<Vec<Complex64>> {
    let m = theta.m();
    let s = phi.sqrt();
    (1..=m)
        .map(|a| {
            (1..=m)
                .map(|b| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (w, v) in theta.frame.coframe[b].iter().zip(&tilde.frame.vectors[a]) {
                        acc += w.value() * v.value();
                    }
                    acc / s
                })
                .collect()
        })
        .collect()
}

/// Largest `|u u^* - 1|`.
pub fn unitarity_defect(u: &[Vec<Complex64>]) -> f64 {
    let m = u.len();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..m {
                s += u[i][k] * u[j][k].conj();
            }
            if i == j {
                s -= 1.0;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

/// Law versus direct recomputation at one point.
#[derive(Clone, Debug)]
pub struct PointComparison {
    pub predicted: Invariants,
    pub direct: Invariants,
    pub frame: Vec<Vec<Complex64>>,
    pub deviation: f64,
}

/// `theta = base * model form`, `theta~ = phi^-1 theta`.
pub fn compare_at(
    model: &ContactModel,
    base: &FactorSpec,
    phi: &FactorSpec,
    p: &[f64],
    order: usize,
) -> Result<PointComparison> {
    let theta = PHState::new(model, &ConformalFactor::new(base.clone())?, p, order)?;
    let phi_jet = ConformalFactor::new(phi.clone())?.eval(model, p, order)?;
    let cov = CovJet::new(&theta, &phi_jet, 2)?;
    let predicted = transform_invariants(&theta, &cov)?;
    let tilde_factor = ConformalFactor::new(base.times(&phi.inverse()))?;
    let tilde = PHState::new(model, &tilde_factor, p, order)?;
    let u = frame_change(&theta, &tilde, phi_jet.value());
    let direct = Invariants::of(&tilde)?;
    let s = phi_jet.value().sqrt();
    let v: Vec<Vec<Complex64>> = u.iter().map(|r| r.iter().map(|x| x * s).collect()).collect();
    let mapped = predicted.in_frame(&v);
    let deviation = mapped.deviation(&direct);
    Ok(PointComparison { predicted, direct, frame: u, deviation })
}

/// Summary of [`compare_at`] over a point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawSummary {
    pub points: usize,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    pub max_frame_defect: f64,
}

pub fn direct_vs_law_residual(
    model: &ContactModel,
    base: &FactorSpec,
    phi: &FactorSpec,
    points: &[Vec<f64>],
    order: usize,
) -> Result<LawSummary> {
    if points.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut max_deviation: f64 = 0.0;
    let mut sum = 0.0;
    let mut max_frame_defect: f64 = 0.0;
    for p in points {
        let c = compare_at(model, base, phi, p, order)?;
        max_deviation = max_deviation.max(c.deviation);
        sum += c.deviation;
        max_frame_defect = max_frame_defect.max(unitarity_defect(&c.frame));
    }
    Ok(LawSummary {
        points: points.len(),
        max_deviation,
        mean_deviation: sum / points.len() as f64,
        max_frame_defect,
    })
}

/// Residual of `-(2(m+1)/m) Lap_b f + R f - R~ f^{(m+2)/m}` with `R~` computed
/// directly on `f^{2/m} theta`, scaled by `1 + largest term`.
pub fn scalar_transform_residual(
    model: &ContactModel,
    base: &FactorSpec,
    f: &FactorSpec,
    p: &[f64],
    order: usize,
) -> Result<f64> {
    let m = model.m() as f64;
    let theta = PHState::new(model, &ConformalFactor::new(base.clone())?, p, order)?;
    let fj = ConformalFactor::new(f.clone())?.eval(model, p, order)?;
    let fv = fj.value();
    let cov = CovJet::new(&theta, &fj, 2)?;
    let tilde = PHState::new(model, &ConformalFactor::new(base.times(&f.powf(2.0 / m)))?, p, order)?;
    let lap = -(2.0 * (m + 1.0) / m) * cov.sublaplacian()?;
    let lhs = theta.scalar_curvature()? * fv;
    let rhs = tilde.scalar_curvature()? * fv.powf((m + 2.0) / m);
    let scale = lap.abs().max(lhs.abs()).max(rhs.abs());
    Ok((lap + lhs - rhs).abs() / (1.0 + scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factor_changes_nothing() {
        let h = ContactModel::heisenberg(1).unwrap();
        let c = compare_at(&h, &FactorSpec::random_trig(2), &FactorSpec::one(), &[0.1, 0.2, 0.3], 4).unwrap();
        assert!(c.deviation < 1e-14);
        assert!(c.predicted.deviation(&Invariants::of(
            &PHState::new(&h, &ConformalFactor::new(FactorSpec::random_trig(2)).unwrap(), &[0.1, 0.2, 0.3], 4).unwrap()
        ).unwrap()) < 1e-15);
    }

    #[test]
    fn constant_factor_on_sphere() {
        let s = ContactModel::sphere(1).unwrap();
        let c = compare_at(&s, &FactorSpec::one(), &FactorSpec::Constant { value: 3.0 }, &[0.2, -0.4, 0.5], 4).unwrap();
        assert!((c.predicted.scalar - 3.0).abs() < 1e-10);
        assert!(c.deviation < 1e-10);
    }

    #[test]
    fn random_factor_law_matches_direct() {
        let h = ContactModel::heisenberg(2).unwrap();
        let c = compare_at(&h, &FactorSpec::one(), &FactorSpec::random_trig(21), &[0.3, 0.1, -0.2, 0.4, 0.6], 4)
            .unwrap();
        assert!(c.deviation < 1e-8, "{}", c.deviation);
        assert!(unitarity_defect(&c.frame) < 1e-12);
    }

    #[test]
    fn scalar_law_for_random_f() {
        let h = ContactModel::heisenberg(1).unwrap();
        let r = scalar_transform_residual(&h, &FactorSpec::one(), &FactorSpec::random_trig(6), &[0.2, 0.1, -0.3], 4)
            .unwrap();
        assert!(r < 1e-8, "{r}");
    }
}
