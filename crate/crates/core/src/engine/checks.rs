//! Identity residuals and structure classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::covjet::CovJet;
use super::state::PHState;
use super::tensor::Tensor;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// First and second covariant derivatives of the torsion tensor.
#[derive(Clone, Debug)]
pub struct TorsionDerivatives {
    pub m: usize,
    /// `A_{ab,c}` over all frame indices.
    pub first: Tensor,
    /// `A_{ab,cd}`; absent when the jet order is too low.
    pub second: Option<Tensor>,
}

impl TorsionDerivatives {
    pub fn new(state: &PHState) -> Result<Self> {
        let a = state.torsion_tensor();
        if a.order() == 0 {
            return Err(Error::InsufficientOrder { needed: 3, have: state.order(), what: "torsion derivative" });
        }
        let first = state.covariant_derivative(&a)?;
        let second = if first.order() > 0 { Some(state.covariant_derivative(&first)?) } else { None };
        Ok(TorsionDerivatives { m: state.m(), first, second })
    }

    /// `A_{ab,c-bar}` with holomorphic 1-based `a, b, c`.
    pub fn antiholomorphic(&self, a: usize, b: usize, c: usize) -> Complex64 {
        self.first.get(&[a, b, c + self.m]).value()
    }

    /// Divergence `sum_b A_{ab,b-bar}` as a jet, 1-based `a`.
    pub fn divergence_jet(&self, a: usize) -> crate::jets::CJet {
        let mut acc = self.first.get(&[a, 1, 1 + self.m]).clone();
        for b in 2..=self.m {
            acc = &acc + self.first.get(&[a, b, b + self.m]);
        }
        acc
    }

    pub fn divergence(&self, a: usize) -> Complex64 {
        self.divergence_jet(a).value()
    }

    /// `sum_ab A_{ab,b-bar a-bar}`.
    pub fn double_divergence(&self) -> Result<Complex64> {
        let s = self.second.as_ref().ok_or(Error::InsufficientOrder {
            needed: 4,
            have: 3,
            what: "second torsion derivative",
        })?;
        let m = self.m;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 1..=m {
            for b in 1..=m {
                acc += s.get(&[a, b, b + m, a + m]).value();
            }
        }
        Ok(acc)
    }
}

/// Largest `|f_{a,b-bar} - f_{b-bar,a} - i delta_ab f_0|`.
pub fn commutation_residual(c: &CovJet) -> Result<f64> {
    if c.depth() < 2 {
        return Err(Error::InsufficientOrder { needed: 2, have: c.depth(), what: "commutation check" });
    }
    let m = c.m;
    let f0 = c.d1(0);
    let mut worst: f64 = 0.0;
    for a in 1..=m {
        for b in 1..=m {
            let mut r = c.d2(a, b + m) - c.d2(b + m, a);
            if a == b {
                r -= I * f0;
            }
            worst = worst.max(r.norm());
        }
    }
    Ok(worst)
}

/// `2 Re sum A_{ab,b-bar a-bar} - R_0`.
pub fn r0_residual(state: &PHState, td: &TorsionDerivatives) -> Result<f64> {
    let r0 = state.frame_derivative_real(&state.curvature()?.scalar, 0)?.value().re;
    Ok(2.0 * td.double_divergence()?.re - r0)
}

/// Per `a`: `B_{a b-bar, b} - (1 - 1/m) R_a + i (m - 1) A_{ab,b-bar}`.
pub fn bianchi_residual(state: &PHState, td: &TorsionDerivatives) -> Result<Vec<Complex64>> {
    let m = state.m();
    let curv = state.curvature()?;
    let b = state.hermitian_tensor(&curv.traceless);
    if b.order() == 0 {
        return Err(Error::InsufficientOrder { needed: 4, have: state.order(), what: "Bianchi identity" });
    }
    let db = state.covariant_derivative(&b)?;
    let mf = m as f64;
    (1..=m)
        .map(|a| {
            let mut div = Complex64::new(0.0, 0.0);
            for c in 1..=m {
                div += db.get(&[a, c + m, c]).value();
            }
            let ra = state.frame_derivative_real(&curv.scalar, a)?.value();
            Ok(div - (1.0 - 1.0 / mf) * ra + I * (mf - 1.0) * td.divergence(a))
        })
        .collect()
}

/// Structure flags over a batch of points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub torsion_free: bool,
    pub pseudo_einstein: bool,
    pub constant_scalar: bool,
    pub einstein: bool,
    pub max_torsion: f64,
    pub max_traceless: f64,
    pub scalar_std: f64,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        if self.einstein {
            "einstein"
        } else if self.pseudo_einstein {
            "pseudo-einstein"
        } else if self.torsion_free {
            "torsion-free"
        } else {
            "none"
        }
    }
}

pub fn classify(states: &[PHState], tol: f64) -> Result<Classification> {
    if states.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut max_torsion: f64 = 0.0;
    let mut max_traceless: f64 = 0.0;
    let mut scalars = Vec::with_capacity(states.len());
    for s in states {
        max_torsion = max_torsion.max(s.torsion_norm_sqr().sqrt());
        max_traceless = max_traceless.max(s.traceless_norm_sqr()?.sqrt());
        scalars.push(s.scalar_curvature()?);
    }
    let mean = scalars.iter().sum::<f64>() / scalars.len() as f64;
    let var = scalars.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / scalars.len() as f64;
    let scalar_std = var.sqrt();
    let torsion_free = max_torsion <= tol;
    let pseudo_einstein = max_traceless <= tol;
    let constant_scalar = scalar_std <= tol * (1.0 + mean.abs());
    Ok(Classification {
        torsion_free,
        pseudo_einstein,
        constant_scalar,
        einstein: torsion_free && pseudo_einstein && constant_scalar,
        max_torsion,
        max_traceless,
        scalar_std,
    })
}

/// Frame-independent scalars `(R, |A|^2, |B|^2)` for gauge comparisons.
pub fn gauge_scalars(state: &PHState) -> Result<[f64; 3]> {
    Ok([state.scalar_curvature()?, state.torsion_norm_sqr(), state.traceless_norm_sqr()?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{ConformalFactor, ContactModel, FactorSpec};

    fn state(m: usize, seed: u64, p: &[f64]) -> PHState {
        let h = ContactModel::heisenberg(m).unwrap();
        let f = ConformalFactor::new(FactorSpec::random_trig(seed)).unwrap();
        PHState::new(&h, &f, p, 4).unwrap()
    }

    #[test]
    fn commutation_holds_for_random_factor() {
        let s = state(2, 8, &[0.2, -0.1, 0.4, 0.3, -0.5]);
        let f = s.frame.theta[4].clone();
        let c = CovJet::new(&s, &f, 2).unwrap();
        assert!(commutation_residual(&c).unwrap() < 1e-9);
    }

    #[test]
    fn bianchi_and_r0_hold_for_random_factor() {
        let s = state(2, 12, &[0.1, 0.2, -0.3, 0.05, 0.4]);
        let td = TorsionDerivatives::new(&s).unwrap();
        for r in bianchi_residual(&s, &td).unwrap() {
            assert!(r.norm() < 1e-8, "{r}");
        }
        let r0 = r0_residual(&s, &td).unwrap();
        assert!(r0.abs() < 1e-8, "{r0}");
    }

    #[test]
    fn m1_bianchi_is_trivial() {
        let s = state(1, 3, &[0.1, 0.2, -0.3]);
        let td = TorsionDerivatives::new(&s).unwrap();
        assert!(bianchi_residual(&s, &td).unwrap()[0].norm() < 1e-12);
    }

    #[test]
    fn classify_rejects_empty_batch() {
        assert!(matches!(classify(&[], 1e-8), Err(Error::EmptyBatch)));
    }
}
