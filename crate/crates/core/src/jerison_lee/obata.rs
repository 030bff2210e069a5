//! `u = log phi`, its conjugate `v` and `f = e^{u/2} cos(v/2) - c` for the
//! extremal family, with the identities `f` satisfies.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contact::{ContactModel, FactorSpec};
use crate::engine::{CovJet, PHState};
use crate::error::{Error, Result};
use crate::jets::{CJet, Jet};
use crate::yamabe::QuadratureRule;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `theta = theta_c`, `phi = (c |w|^-2)^-1 = |w|^2 / c` with
/// `w = cosh t + sinh t <zeta, xi>`, so `e^{(u + i v)/2} = w / sqrt(c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub c: f64,
    pub t: f64,
    pub xi: Vec<[f64; 2]>,
}

impl FamilyParams {
    pub fn new(c: f64, t: f64, xi: &[Complex64]) -> Self {
        FamilyParams { c, t, xi: xi.iter().map(|z| [z.re, z.im]).collect() }
    }

    fn xi(&self) -> Vec<Complex64> {
        self.xi.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }

    /// `phi` as a factor descriptor.
    pub fn phi(&self) -> FactorSpec {
        FactorSpec::jl_family(self.c, self.t, &self.xi()).inverse()
    }

    fn w_value(&self, zeta: &[Complex64]) -> Complex64 {
        let s: Complex64 = zeta.iter().zip(self.xi()).map(|(z, x)| z * x.conj()).sum();
        self.t.cosh() + self.t.sinh() * s
    }

    fn w_jet(&self, model: &ContactModel, p: &[f64], order: usize) -> Result<CJet> {
        let amb = model.ambient(p, order)?;
        let mut w = amb[0].splat(Complex64::new(self.t.cosh(), 0.0));
        for (z, x) in amb.iter().zip(self.xi()) {
            w = &w + &z.scale_c(x.conj() * self.t.sinh());
        }
        Ok(w)
    }
}

/// Mean of `e^{u/2} cos(v/2)` against `dv_{theta_c}`.
pub fn family_mean(rule: &QuadratureRule, params: &FamilyParams) -> f64 {
    let s = params.c.sqrt();
    let total: f64 = rule.weights.iter().sum();
    rule.integrate(|z| params.w_value(z).re / s) / total
}

#[derive(Clone, Debug)]
pub struct ObataData {
    pub u: Jet,
    pub v: Jet,
    pub f: Jet,
    /// `e^{u/2} sin(v/2)`.
    pub s: Jet,
    pub v0: f64,
    pub c_mean: f64,
    pub u_cov: CovJet,
    pub v_cov: CovJet,
    pub f_cov: CovJet,
    /// `T s`.
    pub s0: f64,
}

impl ObataData {
    /// At a point of `state` (which must be `theta_c` on `model`).
    pub fn new(state: &PHState, model: &ContactModel, p: &[f64], params: &FamilyParams, c_mean: f64) -> Result<Self> {
        let order = state.order();
        if order < 3 {
            return Err(Error::InsufficientOrder { needed: 3, have: order, what: "conjugate function" });
        }
        let w = params.w_jet(model, p, order)?;
        let lw = w.ln().map_err(|_| Error::Precondition("conjugate function undefined at this point".into()))?;
        let u = lw.re.scale(2.0).add_scalar(-params.c.ln());
        let v = lw.im.scale(2.0);
        let half = u.scale(0.5).exp();
        let f = (&half * &v.scale(0.5).cos()).add_scalar(-c_mean);
        let s = &half * &v.scale(0.5).sin();
        let u_cov = CovJet::new(state, &u, 2)?;
        let v_cov = CovJet::new(state, &v, 2)?;
        let f_cov = CovJet::new(state, &f, 2)?;
        let v0 = v_cov.d1(0).re;
        let s0 = state.frame_derivative_real(&s, 0)?.value().re;
        Ok(ObataData { u, v, f, s, v0, c_mean, u_cov, v_cov, f_cov, s0 })
    }

    /// `chi = (1/2) (e^{u/2} sin(v/2))_0`.
    pub fn chi(&self) -> f64 {
        0.5 * self.s0
    }

    /// `e^{(u + i v)/2}` at the point.
    pub fn holomorphic_value(&self) -> Complex64 {
        (0.5 * self.u.value()).exp() * Complex64::from_polar(1.0, 0.5 * self.v.value())
    }

    /// Largest `|v_a + i u_a|` and `|v_0 + (1/2 e^{-u} - 1/2 + |du|^2)|`.
    pub fn conjugate_residuals(&self) -> (f64, f64) {
        let m = self.u_cov.m;
        let cr = (1..=m).map(|a| (self.v_cov.d1(a) + I * self.u_cov.d1(a)).norm()).fold(0.0, f64::max);
        let v0 = self.v0 + (0.5 * (-self.u.value()).exp() - 0.5 + self.u_cov.grad_sqr());
        (cr, v0.abs())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrhResiduals {
    /// `f_{a,b}`.
    pub holomorphic_hessian: f64,
    /// `f_{a,b-bar} - (1/2)(-s_0 + i f_0) delta`.
    pub mixed_hessian: f64,
    /// `f_{0,a} - (i/2) f_a`.
    pub reeb_gradient: f64,
    /// `f_{0,0} + (1/2) s_0`.
    pub reeb_reeb: f64,
}

impl CrhResiduals {
    pub fn max(&self) -> f64 {
        self.holomorphic_hessian.max(self.mixed_hessian).max(self.reeb_gradient).max(self.reeb_reeb)
    }
}

pub fn crh_residuals(data: &ObataData) -> CrhResiduals {
    let f = &data.f_cov;
    let m = f.m;
    let mut r = CrhResiduals { holomorphic_hessian: 0.0, mixed_hessian: 0.0, reeb_gradient: 0.0, reeb_reeb: 0.0 };
    for a in 1..=m {
        for b in 1..=m {
            r.holomorphic_hessian = r.holomorphic_hessian.max(f.d2(a, b).norm());
            let delta = if a == b { 1.0 } else { 0.0 };
            let want = 0.5 * (-data.s0 + I * f.d1(0)) * delta;
            r.mixed_hessian = r.mixed_hessian.max((f.d2(a, b + m) - want).norm());
        }
        r.reeb_gradient = r.reeb_gradient.max((f.d2(0, a) - 0.5 * I * f.d1(a)).norm());
    }
    r.reeb_reeb = (f.d2(0, 0) + 0.5 * data.s0).norm();
    r
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub constant: [f64; 2],
    pub linear: Vec<[f64; 2]>,
    /// RMS of the fit error relative to the RMS of the values.
    pub residual: f64,
}

/// Complex least-squares fit `h(zeta) ~ lambda + sum a_j zeta_j`.
pub fn recover_affine(nodes: &[Vec<Complex64>], values: &[Complex64]) -> Result<AffineFit> {
    if nodes.is_empty() || nodes.len() != values.len() {
        return Err(Error::EmptyBatch);
    }
    let k = nodes[0].len() + 1;
    let a = DMatrix::from_fn(nodes.len(), k, |i, j| if j == 0 { Complex64::new(1.0, 0.0) } else { nodes[i][j - 1] });
    let b = DVector::from_column_slice(values);
    let x = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::Degenerate(format!("affine fit: {e}")))?;
    let err = (&a * &x - &b).norm();
    let scale = b.norm().max(f64::MIN_POSITIVE);
    Ok(AffineFit {
        constant: [x[0].re, x[0].im],
        linear: x.iter().skip(1).map(|z| [z.re, z.im]).collect(),
        residual: err / scale,
    })
}
