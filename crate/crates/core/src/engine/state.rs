//! Tanaka-Webster connection, torsion and curvature at a point.
//!
//! With `omega_b^a(T_c) = conn[b][a][c]` and the coframe dual to the frame, the
//! structure equation `dtheta^a = theta^b ^ omega_b^a + theta ^ tau^a`,
//! `tau^a = conj(A_ac) theta^c-bar`, gives
//!
//! * `conn[g][a][0]     = -dtheta^a(T, T_g)`
//! * `conn[g][a][d-bar] =  dtheta^a(T_g, T_d-bar)`
//! * `conn[g][a][d]     = -conj(dtheta^g(T_a, T_d-bar))` (unitarity)
//! * `A_ad              =  conj(dtheta^a(T, T_d-bar))`
//!
//! The remaining components of `dtheta^a` are not used for the extraction and
//! are checked by [`PHState::structure_residual`].

use num_complex::Complex64;

use super::tensor::{self, Tensor, TwoForm};
use crate::contact::frame::bar_index;
use crate::contact::{unitary_frame, unitary_frame_with_gauge, ConformalFactor, ContactModel, FrameData};
use crate::error::{Error, Result};
use crate::jets::{CJet, Jet};

/// Curvature data, one jet order below the connection.
#[derive(Clone, Debug)]
pub struct Curvature {
    /// `Pi_b^a = d omega_b^a - omega_b^c ^ omega_c^a` as chart 2-forms, `[b][a]`.
    pub forms: Vec<Vec<TwoForm>>,
    /// `R_{a b-bar r s-bar} = Pi_a^b(T_r, T_s-bar)`, indices `[a][b][r][s]` from 0.
    pub riemann: Vec<Vec<Vec<Vec<CJet>>>>,
    pub ricci: Vec<Vec<CJet>>,
    pub scalar: Jet,
    /// `R_{a b-bar} - (R/m) delta_ab`.
    pub traceless: Vec<Vec<CJet>>,
}

/// Point-local pseudohermitian state.
#[derive(Clone, Debug)]
pub struct PHState {
    pub frame: FrameData,
    /// `conn[a][b][c]`: coefficient of `T_b` in `nabla_{T_c} T_a`, frame
    /// indices; `None` where the connection has no component.
    conn: Vec<Vec<Vec<Option<CJet>>>>,
    /// `conn` lowered to each order `0..=K-2`.
    conn_levels: Vec<Vec<Vec<Vec<Option<CJet>>>>>,
    /// `A_{ab}` for holomorphic `a, b` (0-based).
    pub torsion: Vec<Vec<CJet>>,
    pub curvature: Option<Curvature>,
    /// `dtheta^a` for every frame index, chart 2-forms at the connection order.
    dcoframe: Vec<TwoForm>,
    /// Frame vectors lowered to each order `0..=K-1`.
    frame_by_order: Vec<Vec<Vec<CJet>>>,
}

impl PHState {
    /// Frame, connection and (when the order allows) curvature in the
    /// Cholesky gauge.
    pub fn new(model: &ContactModel, factor: &ConformalFactor, p: &[f64], order: usize) -> Result<Self> {
        let frame = unitary_frame(model, factor, p, order)?;
        Self::from_frame(frame)
    }

    pub fn with_gauge(
        model: &ContactModel,
        factor: &ConformalFactor,
        p: &[f64],
        order: usize,
        gauge: &[Vec<Complex64>],
    ) -> Result<Self> {
        let frame = unitary_frame_with_gauge(model, factor, p, order, Some(gauge))?;
        Self::from_frame(frame)
    }

    pub fn from_frame(frame: FrameData) -> Result<Self> {
        let mut s = solve_connection(frame)?;
        if s.order() >= 3 {
            s.compute_curvature()?;
        }
        Ok(s)
    }

    pub fn m(&self) -> usize {
        self.frame.m
    }

    pub fn dim(&self) -> usize {
        self.frame.nvars()
    }

    /// Jet order of `theta`.
    pub fn order(&self) -> usize {
        self.frame.order
    }

    /// Jet order of connection and torsion.
    pub fn connection_order(&self) -> usize {
        self.order() - 2
    }

    pub fn bar(&self, a: usize) -> usize {
        bar_index(self.m(), a)
    }

    pub fn conn(&self, a: usize, b: usize, c: usize) -> Option<&CJet> {
        self.conn[a][b][c].as_ref()
    }

    pub fn vectors_at(&self, order: usize) -> &[Vec<CJet>] {
        &self.frame_by_order[order]
    }

    pub fn curvature(&self) -> Result<&Curvature> {
        self.curvature.as_ref().ok_or(Error::InsufficientOrder {
            needed: 3,
            have: self.order(),
            what: "curvature",
        })
    }

    pub fn scalar_curvature(&self) -> Result<f64> {
        Ok(self.curvature()?.scalar.value())
    }

    /// `sum |A_ab|^2` at the point.
    pub fn torsion_norm_sqr(&self) -> f64 {
        self.torsion.iter().flatten().map(|c| c.value().norm_sqr()).sum()
    }

    pub fn traceless_norm_sqr(&self) -> Result<f64> {
        Ok(self.curvature()?.traceless.iter().flatten().map(|c| c.value().norm_sqr()).sum())
    }

    /// `T_c f`, at order `out` (at most `f.order() - 1`).
    pub fn frame_derivative(&self, f: &CJet, c: usize, out: usize) -> Result<CJet> {
        let n = self.dim();
        if f.order() == 0 || out >= f.order() || out > self.order() - 1 {
            return Err(Error::InsufficientOrder { needed: out + 1, have: f.order(), what: "frame derivative" });
        }
        let v = &self.frame_by_order[out][c];
        let mut acc = CJet::zero(out, n);
        for (i, vi) in v.iter().enumerate() {
            let d = f.derivative(i)?.lower(out);
            acc = &acc + &(&d * vi);
        }
        Ok(acc)
    }

    /// `T_c f` for a real jet.
    pub fn frame_derivative_real(&self, f: &Jet, c: usize) -> Result<CJet> {
        let out = (f.order().saturating_sub(1)).min(self.order() - 1);
        self.frame_derivative(&CJet::from_real(f.clone()), c, out)
    }

    /// Appends one covariant differentiation slot:
    /// `S_{I,c} = T_c S_I - sum_slots sum_b conn[a_slot][b][c] S_{I(slot -> b)}`.
    pub fn covariant_derivative(&self, t: &Tensor) -> Result<Tensor> {
        let s = t.order();
        if s == 0 {
            return Err(Error::InsufficientOrder { needed: 1, have: 0, what: "covariant derivative" });
        }
        let rank = t.rank();
        let cap = if rank == 0 { self.order() - 1 } else { self.connection_order() };
        let out = (s - 1).min(cap);
        let n = self.dim();
        let mut err = None;
        let res = Tensor::from_fn(n, rank + 1, |idx| {
            let (base, c) = idx.split_at(rank);
            let c = c[0];
            let mut v = match self.frame_derivative(t.get(base), c, out) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    return CJet::zero(out, n);
                }
            };
            let mut moved = base.to_vec();
            if rank == 0 {
                return v;
            }
            let gamma = &self.conn_levels[out];
            for slot in 0..rank {
                let a = base[slot];
                for b in 0..n {
                    if let Some(g) = &gamma[a][b][c] {
                        moved[slot] = b;
                        v = &v - &(g * &t.get(&moved).lower(out));
                    }
                }
                moved[slot] = a;
            }
            v
        });
        match err {
            Some(e) => Err(e),
            None => Ok(res),
        }
    }

    /// Torsion as a real rank-2 tensor: `A(T_a, T_b) = A_ab`, conjugates on
    /// barred pairs, zero elsewhere.
    pub fn torsion_tensor(&self) -> Tensor {
        let m = self.m();
        let k = self.connection_order();
        let n = self.dim();
        Tensor::from_fn(n, 2, |idx| {
            let (a, b) = (idx[0], idx[1]);
            if (1..=m).contains(&a) && (1..=m).contains(&b) {
                self.torsion[a - 1][b - 1].clone()
            } else if a > m && b > m {
                self.torsion[a - m - 1][b - m - 1].conj()
            } else {
                CJet::zero(k, n)
            }
        })
    }

    /// Hermitian tensor `H(T_a, T_b-bar) = h_ab`, `H(T_a-bar, T_b) = conj(h_ab)`.
    pub fn hermitian_tensor(&self, h: &[Vec<CJet>]) -> Tensor {
        let m = self.m();
        let n = self.dim();
        let k = h[0][0].order();
        Tensor::from_fn(n, 2, |idx| {
            let (a, b) = (idx[0], idx[1]);
            if (1..=m).contains(&a) && b > m {
                h[a - 1][b - m - 1].clone()
            } else if a > m && (1..=m).contains(&b) {
                h[a - m - 1][b - 1].conj()
            } else {
                CJet::zero(k, n)
            }
        })
    }

    /// Largest coefficient of `dtheta^a - (theta^b ^ omega_b^a + theta ^ tau^a)`.
    pub fn structure_residual(&self) -> f64 {
        let m = self.m();
        let k = self.connection_order();
        let cof: Vec<Vec<CJet>> = self.frame.coframe.iter().map(|r| tensor::lower_vec(r, k)).collect();
        let omega = self.connection_forms(k);
        let mut worst: f64 = 0.0;
        for a in 1..=m {
            let mut rebuilt = tensor::wedge(&cof[0], &self.tau_form(a, &cof));
            for b in 1..=m {
                tensor::add_assign(&mut rebuilt, &tensor::wedge(&cof[b], &omega[b - 1][a - 1]));
            }
            let mut diff = self.dcoframe[a].clone();
            tensor::sub_assign(&mut diff, &rebuilt);
            worst = worst.max(tensor::form_max_abs(&diff));
        }
        worst
    }

    /// `tau^a = sum_c conj(A_ac) theta^c-bar`.
    fn tau_form(&self, a: usize, cof: &[Vec<CJet>]) -> Vec<CJet> {
        let m = self.m();
        let n = self.dim();
        let k = cof[0][0].order();
        let mut out = vec![CJet::zero(k, n); n];
        for c in 1..=m {
            let coef = self.torsion[a - 1][c - 1].conj().lower(k);
            for (o, w) in out.iter_mut().zip(&cof[c + m]) {
                *o = &*o + &(&coef * w);
            }
        }
        out
    }

    /// `omega_b^a = sum_c conn[b][a][c] theta^c`, `[b-1][a-1]`.
    fn connection_forms(&self, k: usize) -> Vec<Vec<Vec<CJet>>> {
        let m = self.m();
        let n = self.dim();
        let cof: Vec<Vec<CJet>> = self.frame.coframe.iter().map(|r| tensor::lower_vec(r, k)).collect();
        (1..=m)
            .map(|b| {
                (1..=m)
                    .map(|a| {
                        let mut w = vec![CJet::zero(k, n); n];
                        for c in 0..n {
                            if let Some(g) = &self.conn[b][a][c] {
                                let g = g.lower(k);
                                for (wi, ci) in w.iter_mut().zip(&cof[c]) {
                                    *wi = &*wi + &(&g * ci);
                                }
                            }
                        }
                        w
                    })
                    .collect()
            })
            .collect()
    }

    /// Largest `|omega_b^a(T_c) + conj(omega_a^b(T_c-bar))|` (values).
    pub fn unitarity_residual(&self) -> f64 {
        let m = self.m();
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in 1..=m {
            for b in 1..=m {
                for c in 0..n {
                    let x = self.conn[b][a][c].as_ref().map_or(Complex64::new(0.0, 0.0), |g| g.value());
                    let y = self.conn[a][b][self.bar(c)].as_ref().map_or(Complex64::new(0.0, 0.0), |g| g.value());
                    worst = worst.max((x + y.conj()).norm());
                }
            }
        }
        worst
    }

    /// Largest `|A_ab - A_ba|` (values).
    pub fn torsion_symmetry_residual(&self) -> f64 {
        let m = self.m();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                worst = worst.max((self.torsion[a][b].value() - self.torsion[b][a].value()).norm());
            }
        }
        worst
    }

    fn compute_curvature(&mut self) -> Result<()> {
        let m = self.m();
        let k = self.connection_order();
        if k == 0 {
            return Err(Error::InsufficientOrder { needed: 3, have: self.order(), what: "curvature" });
        }
        let omega = self.connection_forms(k);
        let kc = k - 1;
        let omega_low: Vec<Vec<Vec<CJet>>> =
            omega.iter().map(|r| r.iter().map(|w| tensor::lower_vec(w, kc)).collect()).collect();
        let mut forms = Vec::with_capacity(m);
        for b in 0..m {
            let mut row = Vec::with_capacity(m);
            for a in 0..m {
                let mut pi = tensor::exterior_derivative(&omega[b][a])?;
                for c in 0..m {
                    tensor::sub_assign(&mut pi, &tensor::wedge(&omega_low[b][c], &omega_low[c][a]));
                }
                row.push(pi);
            }
            forms.push(row);
        }
        let vecs = &self.frame_by_order[kc];
        let mut riemann = vec![vec![vec![vec![CJet::zero(kc, self.dim()); m]; m]; m]; m];
        for a in 0..m {
            for b in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        riemann[a][b][r][s] = tensor::eval_form(&forms[a][b], &vecs[r + 1], &vecs[s + 1 + m]);
                    }
                }
            }
        }
        let mut ricci = vec![vec![CJet::zero(kc, self.dim()); m]; m];
        for r in 0..m {
            for s in 0..m {
                for a in 0..m {
                    ricci[r][s] = &ricci[r][s] + &riemann[a][a][r][s];
                }
            }
        }
        let mut scalar = Jet::zero(kc, self.dim());
        for r in 0..m {
            scalar = &scalar + &ricci[r][r].re;
        }
        let mean = scalar.scale(1.0 / m as f64);
        let mut traceless = ricci.clone();
        for (r, row) in traceless.iter_mut().enumerate() {
            row[r] = &row[r] - &CJet::from_real(mean.clone());
        }
        self.curvature = Some(Curvature { forms, riemann, ricci, scalar, traceless });
        Ok(())
    }
}

/// Reads connection and torsion off the frame's structure equations.
pub fn solve_connection(frame: FrameData) -> Result<PHState> {
    let order = frame.order;
    if order < 2 {
        return Err(Error::InsufficientOrder { needed: 2, have: order, what: "connection" });
    }
    let m = frame.m;
    let n = frame.nvars();
    let k = order - 2;
    let frame_by_order: Vec<Vec<Vec<CJet>>> =
        (0..order).map(|o| frame.vectors.iter().map(|v| tensor::lower_vec(v, o)).collect()).collect();
    let dcoframe: Vec<TwoForm> = frame
        .coframe
        .iter()
        .map(|row| tensor::exterior_derivative(row))
        .collect::<Result<_>>()?;
    let vk = &frame_by_order[k];
    let d = |a: usize, x: usize, y: usize| tensor::eval_form(&dcoframe[a], &vk[x], &vk[y]);

    let mut conn: Vec<Vec<Vec<Option<CJet>>>> = vec![vec![vec![None; n]; n]; n];
    let mut torsion = vec![vec![CJet::zero(k, n); m]; m];
    for a in 1..=m {
        for g in 1..=m {
            conn[g][a][0] = Some(-d(a, 0, g));
            for dd in 1..=m {
                conn[g][a][dd + m] = Some(d(a, g, dd + m));
                conn[g][a][dd] = Some(-d(g, a, dd + m).conj());
            }
            torsion[a - 1][g - 1] = d(a, 0, g + m).conj();
        }
    }
    // barred block: conn[a-bar][b-bar][c] = conj(conn[a][b][c-bar])
    for a in 1..=m {
        for b in 1..=m {
            for c in 0..n {
                let cb = bar_index(m, c);
                conn[a + m][b + m][c] = conn[a][b][cb].as_ref().map(CJet::conj);
            }
        }
    }
    let conn_levels = (0..=k)
        .map(|o| {
            conn.iter()
                .map(|x| x.iter().map(|y| y.iter().map(|g| g.as_ref().map(|g| g.lower(o))).collect()).collect())
                .collect()
        })
        .collect();
    Ok(PHState { frame, conn, conn_levels, torsion, curvature: None, dcoframe, frame_by_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::FactorSpec;

    #[test]
    fn heisenberg_is_flat() {
        let h = ContactModel::heisenberg(2).unwrap();
        let s = PHState::new(&h, &ConformalFactor::one(), &[0.3, -0.2, 0.1, 0.4, 0.7], 4).unwrap();
        assert!(s.torsion_norm_sqr() < 1e-28);
        let c = s.curvature().unwrap();
        for x in c.riemann.iter().flatten().flatten().flatten() {
            assert!(x.value().norm() < 1e-13);
        }
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    if let Some(g) = s.conn(a, b, c) {
                        assert!(g.value().norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_ricci_is_half_m_plus_one() {
        for m in [1usize, 2] {
            let sph = ContactModel::sphere(m).unwrap();
            let p: Vec<f64> = (0..2 * m + 1).map(|i| 0.3 - 0.17 * i as f64).collect();
            let s = PHState::new(&sph, &ConformalFactor::one(), &p, 3).unwrap();
            let c = s.curvature().unwrap();
            for a in 0..m {
                for b in 0..m {
                    let target = if a == b { (m as f64 + 1.0) / 2.0 } else { 0.0 };
                    assert!((c.ricci[a][b].value() - target).norm() < 1e-10, "m={m}: {:?}", c.ricci[a][b].value());
                }
            }
            assert!(s.torsion_norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn random_factor_satisfies_structure_equations() {
        let h = ContactModel::heisenberg(2).unwrap();
        let f = ConformalFactor::new(FactorSpec::random_trig(4)).unwrap();
        let s = PHState::new(&h, &f, &[0.1, 0.3, -0.2, 0.5, 0.25], 4).unwrap();
        assert!(s.structure_residual() < 1e-10, "{}", s.structure_residual());
        assert!(s.unitarity_residual() < 1e-10);
        assert!(s.torsion_symmetry_residual() < 1e-10);
        assert!(s.torsion_norm_sqr() > 1e-6);
    }

    #[test]
    fn constant_rescaling_keeps_torsion_zero() {
        let h = ContactModel::heisenberg(1).unwrap();
        let f = ConformalFactor::new(FactorSpec::Constant { value: 2.5 }).unwrap();
        let s = PHState::new(&h, &f, &[0.4, 0.1, -0.6], 3).unwrap();
        assert!(s.torsion_norm_sqr() < 1e-28);
    }
}
