use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{CovJet, PHState, Tensor, TorsionDerivatives};
use crate::error::{Error, Result};
use crate::jets::{CJet, Jet};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pointwise Jerison-Lee quantities, holomorphic indices from 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JLComponents {
    /// `D_ab = -i A_ab`.
    pub d: Vec<Vec<Complex64>>,
    /// `E_ab-bar = -B_ab-bar / (m + 2)`.
    pub e: Vec<Vec<Complex64>>,
    /// `D_a = phi^-1 phi_b-bar D_ab`.
    pub d_vec: Vec<Complex64>,
    /// `E_a = phi^-1 phi_b E_ab-bar`.
    pub e_vec: Vec<Complex64>,
    /// `U_a = -(2 / (m + 2)) i A_{ab,b-bar}`.
    pub u_vec: Vec<Complex64>,
    /// `1/2 + phi/2 + phi^-1 |dphi|^2 + i phi_0`.
    pub g: Complex64,
    /// `Re (g D_a + g-bar E_a - 3 i phi_0 U_a)_{,a-bar}`.
    pub lhs: f64,
    /// The sum of squares on the other side of the identity.
    pub rhs: f64,
    /// `lhs - rhs`.
    pub residual: f64,
    /// `lhs` in the expanded form, after substituting the divergences of
    /// `D_a` and `E_a` and `Re i U_{a,a-bar} = 0`.
    pub lhs_expanded: f64,
}

struct Assembled {
    m: usize,
    d: Vec<Vec<CJet>>,
    e: Vec<Vec<CJet>>,
    d_vec: Vec<CJet>,
    e_vec: Vec<CJet>,
    u_vec: Vec<CJet>,
    g: CJet,
    /// `g` at the highest order the gradient allows.
    g_full: CJet,
}

fn require_order(state: &PHState, needed: usize, what: &'static str) -> Result<()> {
    if state.order() < needed {
        return Err(Error::InsufficientOrder { needed, have: state.order(), what });
    }
    Ok(())
}

fn g_jet(phi: &CovJet) -> Result<CJet> {
    let grad = phi.level(1);
    let k = grad.order();
    let p = phi.value.lower(k);
    let gs = phi.grad_sqr_jet();
    let re = &(&p.scale(0.5) + 0.5) + &(&p.recip()? * &gs);
    Ok(&CJet::from_real(re) + &grad.get(&[0]).mul_i())
}

fn assemble(state: &PHState, phi: &CovJet, td: &TorsionDerivatives) -> Result<Assembled> {
    require_order(state, 4, "Jerison-Lee components")?;
    let pv = phi.value.value();
    if !(pv > 0.0) {
        return Err(Error::NonPositive(pv));
    }
    let m = state.m();
    let mf = m as f64;
    let lo = td.first.order();
    let curv = state.curvature()?;
    let grad: Vec<CJet> = (0..state.dim()).map(|a| phi.level(1).get(&[a]).lower(lo)).collect();
    let pinv = phi.value.lower(lo).recip()?;
    let d: Vec<Vec<CJet>> =
        (0..m).map(|a| (0..m).map(|b| state.torsion[a][b].lower(lo).scale_c(-I)).collect()).collect();
    let e: Vec<Vec<CJet>> =
        (0..m).map(|a| (0..m).map(|b| curv.traceless[a][b].lower(lo).scale(-1.0 / (mf + 2.0))).collect()).collect();
    let zero = CJet::zero(lo, state.dim());
    let mut d_vec = Vec::with_capacity(m);
    let mut e_vec = Vec::with_capacity(m);
    let mut u_vec = Vec::with_capacity(m);
    for a in 0..m {
        let mut dv = zero.clone();
        let mut ev = zero.clone();
        for b in 0..m {
            dv = &dv + &(&grad[b + 1 + m] * &d[a][b]);
            ev = &ev + &(&grad[b + 1] * &e[a][b]);
        }
        d_vec.push(dv.mul_real(&pinv));
        e_vec.push(ev.mul_real(&pinv));
        u_vec.push(td.divergence_jet(a + 1).scale_c(-2.0 * I / (mf + 2.0)));
    }
    let g_full = g_jet(phi)?;
    Ok(Assembled { m, d, e, d_vec, e_vec, u_vec, g: g_full.lower(lo), g_full })
}

fn vals(v: &[CJet]) -> Vec<Complex64> {
    v.iter().map(|c| c.value()).collect()
}

fn mat(v: &[Vec<CJet>]) -> Vec<Vec<Complex64>> {
    v.iter().map(|r| vals(r)).collect()
}

/// All components and both sides of the identity at one point. Needs jet
/// order 4 and `phi` derivatives to depth 2.
pub fn components(state: &PHState, phi: &CovJet, td: &TorsionDerivatives) -> Result<JLComponents> {
    let asm = assemble(state, phi, td)?;
    let m = asm.m;
    let n = state.dim();
    let p = phi.value.value();
    let pinv = 1.0 / p;
    let g = asm.g.value();

    // Divergence of the (1,0)-form X_a = g D_a + g-bar E_a - 3 i phi_0 U_a.
    let phi0 = phi.level(1).get(&[0]).lower(asm.g.order());
    let x: Vec<CJet> = (0..m)
        .map(|a| {
            let t1 = &asm.g * &asm.d_vec[a];
            let t2 = &asm.g.conj() * &asm.e_vec[a];
            let t3 = (&phi0 * &asm.u_vec[a]).mul_i().scale(3.0);
            &(&t1 + &t2) - &t3
        })
        .collect();
    let zero = CJet::zero(asm.g.order(), n);
    let form = Tensor::from_fn(n, 1, |idx| if (1..=m).contains(&idx[0]) { x[idx[0] - 1].clone() } else { zero.clone() });
    let dx = state.covariant_derivative(&form)?;
    let lhs: f64 = (1..=m).map(|a| dx.get(&[a, a + m]).value().re).sum();

    let d = mat(&asm.d);
    let e = mat(&asm.e);
    let dv = vals(&asm.d_vec);
    let ev = vals(&asm.e_vec);
    let uv = vals(&asm.u_vec);
    let grad: Vec<Complex64> = (0..n).map(|a| phi.d1(a)).collect();
    let sum_de: f64 = d.iter().flatten().chain(e.iter().flatten()).map(|z| z.norm_sqr()).sum();
    let mut rhs = (0.5 + 0.5 * p) * sum_de;
    for a in 0..m {
        rhs += p * ((dv[a] - uv[a]).norm_sqr() + (uv[a] + ev[a] - dv[a]).norm_sqr() + (uv[a] + ev[a]).norm_sqr());
        for b in 0..m {
            for c in 0..m {
                rhs += p * (pinv * grad[c + 1 + m] * d[a][b] + pinv * grad[b + 1] * e[a][c]).norm_sqr();
            }
        }
    }

    let gs = phi.grad_sqr();
    let mut lhs2 = (0.5 + 0.5 * p + pinv * gs) * sum_de;
    for a in 0..m {
        let ab = a + 1 + m;
        let g_bar_a = state.frame_derivative(&asm.g_full, ab, 0)?.value();
        let gc_bar_a = state.frame_derivative(&asm.g_full.conj(), ab, 0)?.value();
        lhs2 += 1.5 * pinv * (g * uv[a] * grad[ab]).re - pinv * (g * dv[a] * grad[ab]).re;
        lhs2 += (g_bar_a * dv[a] + gc_bar_a * ev[a] - 3.0 * I * phi.d2(0, ab) * uv[a]).re;
    }

    Ok(JLComponents {
        d,
        e,
        d_vec: dv,
        e_vec: ev,
        u_vec: uv,
        g,
        lhs,
        rhs,
        residual: lhs - rhs,
        lhs_expanded: lhs2,
    })
}

/// `lhs - rhs` of the identity at one point.
pub fn identity_residual(state: &PHState, phi: &CovJet, td: &TorsionDerivatives) -> Result<f64> {
    Ok(components(state, phi, td)?.residual)
}

/// Residuals of the consequences of `A~ = 0`, `B~ = 0`, `R = R~ = m(m+1)/2`,
/// each the largest absolute deviation over indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EinsteinResiduals {
    /// `A_ab - i phi^-1 phi_{a,b}`.
    pub torsion: f64,
    /// `B_ab-bar + (m+2)(phi^-1 phi_{a,b-bar} - phi^-2 phi_a phi_b-bar) - ((m+2)/m)(...) delta`.
    pub traceless: f64,
    /// `phi_{c,c-bar} - (m/4 - (m/4) phi + ((m+2)/2) phi^-1 |dphi|^2 + (m/2) i phi_0)`.
    pub trace: f64,
    /// `D_ab - phi^-1 phi_{a,b}`.
    pub d: f64,
    /// `E_ab-bar - (phi^-1 phi_{a,b-bar} - phi^-2 phi_a phi_b-bar - (1/2)(...) delta)`.
    pub e: f64,
}

pub fn einstein_reduction_residuals(state: &PHState, phi: &CovJet) -> Result<EinsteinResiduals> {
    if phi.depth() < 2 {
        return Err(Error::InsufficientOrder { needed: 2, have: phi.depth(), what: "Einstein reductions" });
    }
    let m = state.m();
    let mf = m as f64;
    let p = phi.value.value();
    let pinv = 1.0 / p;
    let curv = state.curvature()?;
    let gs = phi.grad_sqr();
    let phi0 = phi.d1(0);
    let trace: Complex64 = (1..=m).map(|c| phi.d2(c, c + m)).sum();
    let mut out = EinsteinResiduals { torsion: 0.0, traceless: 0.0, trace: 0.0, d: 0.0, e: 0.0 };
    for a in 1..=m {
        for b in 1..=m {
            let delta = if a == b { 1.0 } else { 0.0 };
            let aab = state.torsion[a - 1][b - 1].value();
            let bab = curv.traceless[a - 1][b - 1].value();
            let hess = phi.d2(a, b);
            let mixed = pinv * phi.d2(a, b + m) - pinv * pinv * phi.d1(a) * phi.d1(b + m);
            out.torsion = out.torsion.max((aab - I * pinv * hess).norm());
            let fb = bab + (mf + 2.0) * mixed - (mf + 2.0) / mf * (pinv * trace - pinv * pinv * gs) * delta;
            out.traceless = out.traceless.max(fb.norm());
            out.d = out.d.max((-I * aab - pinv * hess).norm());
            let e = -bab / (mf + 2.0);
            let fe = e - mixed + 0.5 * (0.5 * pinv - 0.5 + pinv * pinv * gs + I * pinv * phi0) * delta;
            out.e = out.e.max(fe.norm());
        }
    }
    let fr = trace - (mf / 4.0 - mf / 4.0 * p + (mf + 2.0) / 2.0 * pinv * gs + mf / 2.0 * I * phi0);
    out.trace = fr.norm();
    Ok(out)
}

/// Residuals of the first-order identities used to expand the left side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaResiduals {
    /// `U_a - phi^-1 (i phi_{0,a} + phi (D_a - E_a) + (1/2) phi^-1 g-bar phi_a)`.
    pub u: f64,
    /// `i phi_{0,a-bar} - phi (D_a-bar - U_a-bar - E_a-bar) - (1/2) phi^-1 g phi_a-bar`.
    pub phi0: f64,
    /// `g_a-bar - phi^-1 g phi_a-bar - phi (2 D_a-bar - U_a-bar)`.
    pub g: f64,
    /// `g-bar_a-bar - phi (2 E_a-bar + U_a-bar)`.
    pub g_conj: f64,
    /// Frame derivative of the assembled `g` against its chain-rule expansion.
    pub g_two_path: f64,
}

pub fn lemma_residuals(state: &PHState, phi: &CovJet, td: &TorsionDerivatives) -> Result<LemmaResiduals> {
    let asm = assemble(state, phi, td)?;
    let m = asm.m;
    let p = phi.value.value();
    let pinv = 1.0 / p;
    let g = asm.g.value();
    let gs = phi.grad_sqr();
    let mut out = LemmaResiduals { u: 0.0, phi0: 0.0, g: 0.0, g_conj: 0.0, g_two_path: 0.0 };
    for a in 0..m {
        let (ah, ab) = (a + 1, a + 1 + m);
        let (d, e, u) = (asm.d_vec[a].value(), asm.e_vec[a].value(), asm.u_vec[a].value());
        let ua = pinv * (I * phi.d2(0, ah) + p * (d - e) + 0.5 * pinv * g.conj() * phi.d1(ah));
        out.u = out.u.max((u - ua).norm());
        let p0 = I * phi.d2(0, ab) - p * (d.conj() - u.conj() - e.conj()) - 0.5 * pinv * g * phi.d1(ab);
        out.phi0 = out.phi0.max(p0.norm());
        let g_bar = state.frame_derivative(&asm.g_full, ab, 0)?.value();
        let gc_bar = state.frame_derivative(&asm.g_full.conj(), ab, 0)?.value();
        out.g = out.g.max((g_bar - pinv * g * phi.d1(ab) - p * (2.0 * d.conj() - u.conj())).norm());
        out.g_conj = out.g_conj.max((gc_bar - p * (2.0 * e.conj() + u.conj())).norm());
        let mut chain = (0.5 - pinv * pinv * gs) * phi.d1(ab) + I * phi.d2(0, ab);
        for b in 1..=m {
            chain += pinv * (phi.d2(b, ab) * phi.d1(b + m) + phi.d1(b) * phi.d2(b + m, ab));
        }
        out.g_two_path = out.g_two_path.max((g_bar - chain).norm());
    }
    Ok(out)
}

/// The systems satisfied when `D = E = U = 0`, in `phi` and in `u = log phi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingResiduals {
    /// `phi_{a,b}`, `phi_{a,b-bar} - ...`, `phi_{0,a} - ...`.
    pub phi: [f64; 3],
    /// `u_{a,b} + u_a u_b`, `u_{a,b-bar} - ...`, `u_{0,a} - ...`.
    pub u: [f64; 3],
}

pub fn vanishing_system_residuals(state: &PHState, phi: &CovJet) -> Result<VanishingResiduals> {
    if phi.depth() < 2 {
        return Err(Error::InsufficientOrder { needed: 2, have: phi.depth(), what: "vanishing system" });
    }
    let m = state.m();
    let p = phi.value.value();
    let pinv = 1.0 / p;
    let gs = phi.grad_sqr();
    let phi0 = phi.d1(0);
    let log: Jet = phi.value.ln()?;
    let u = CovJet::new(state, &log, 2)?;
    let ugs = u.grad_sqr();
    let u0 = u.d1(0);
    let emu = (-log.value()).exp();
    let mut r = VanishingResiduals { phi: [0.0; 3], u: [0.0; 3] };
    for a in 1..=m {
        for b in 1..=m {
            let delta = if a == b { 1.0 } else { 0.0 };
            r.phi[0] = r.phi[0].max(phi.d2(a, b).norm());
            let mixed = phi.d2(a, b + m)
                - pinv * phi.d1(a) * phi.d1(b + m)
                - 0.5 * (0.5 - 0.5 * p + pinv * gs + I * phi0) * delta;
            r.phi[1] = r.phi[1].max(mixed.norm());
            r.u[0] = r.u[0].max((u.d2(a, b) + u.d1(a) * u.d1(b)).norm());
            let umixed = u.d2(a, b + m) - 0.5 * (0.5 * emu - 0.5 + ugs + I * u0) * delta;
            r.u[1] = r.u[1].max(umixed.norm());
        }
        let t = phi.d2(0, a) - 0.5 * I * (0.5 + 0.5 * pinv + pinv * pinv * gs - I * pinv * phi0) * phi.d1(a);
        r.phi[2] = r.phi[2].max(t.norm());
        let ut = u.d2(0, a) + 0.5 * u0 * u.d1(a) - 0.5 * I * (0.5 + 0.5 * emu + ugs) * u.d1(a);
        r.u[2] = r.u[2].max(ut.norm());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::FactorSpec;
    use crate::jerison_lee::JlPair;

    const P: [f64; 3] = [0.2, -0.3, 0.4];

    fn xi(m: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); m + 1];
        v[0] = Complex64::new(0.8, 0.0);
        v[m] += Complex64::new(0.0, 0.6);
        v
    }

    #[test]
    fn unit_factor_on_sphere_is_trivial() {
        let pair = JlPair::new(crate::contact::ContactModel::sphere(1).unwrap(), FactorSpec::one(), FactorSpec::one());
        let pt = pair.point(&P, 4).unwrap();
        let c = components(&pt.state, &pt.phi, &pt.torsion).unwrap();
        assert!(c.lhs.abs() < 1e-12 && c.rhs.abs() < 1e-12);
        assert!((c.g - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn identity_holds_on_family() {
        let (pair, _) = JlPair::family_over_standard(1, 0.7, &xi(1)).unwrap();
        let pt = pair.point(&P, 4).unwrap();
        let c = components(&pt.state, &pt.phi, &pt.torsion).unwrap();
        assert!(c.residual.abs() < 1e-7, "{}", c.residual);
        assert!((c.lhs_expanded - c.lhs).abs() < 1e-7);
        let e = einstein_reduction_residuals(&pt.state, &pt.phi).unwrap();
        assert!(e.torsion.max(e.traceless).max(e.trace).max(e.d).max(e.e) < 1e-8);
        let l = lemma_residuals(&pt.state, &pt.phi, &pt.torsion).unwrap();
        assert!(l.u.max(l.phi0).max(l.g).max(l.g_conj).max(l.g_two_path) < 1e-8);
    }

    #[test]
    fn identity_fails_for_unrelated_pair() {
        let pair = JlPair::new(
            crate::contact::ContactModel::sphere(1).unwrap(),
            FactorSpec::random_trig(5),
            FactorSpec::random_trig(9),
        );
        let pt = pair.point(&P, 4).unwrap();
        let c = components(&pt.state, &pt.phi, &pt.torsion).unwrap();
        assert!(c.residual.abs() > 1e-6, "{}", c.residual);
        let e = einstein_reduction_residuals(&pt.state, &pt.phi).unwrap();
        assert!(e.torsion > 1e-4);
    }

    #[test]
    fn components_need_order_four() {
        let (pair, _) = JlPair::family_over_standard(1, 0.3, &xi(1)).unwrap();
        assert!(pair.point(&P, 3).and_then(|pt| components(&pt.state, &pt.phi, &pt.torsion)).is_err());
    }
}
