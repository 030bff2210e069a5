//! The adapted metric and its Levi-Civita data from chart formulas.
//!
//! `g = theta (x) theta + s sum_a (theta^a (x) theta^a-bar + theta^a-bar (x) theta^a)`
//! in chart components. Christoffel symbols, curvature and Hessians below use
//! only these components and their derivatives, not the Tanaka-Webster data.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::PHState;
use crate::error::{Error, Result};
use crate::jets::{linalg, Jet, JetError};

/// Levi-part scale selected by [`super::calibrate_levi_scale`].
pub const LEVI_SCALE: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct AdaptedMetric {
    pub m: usize,
    pub levi_scale: f64,
    /// Chart components at the frame order of the state.
    pub components: Vec<Vec<Jet>>,
}

impl AdaptedMetric {
    pub fn build(state: &PHState) -> Self {
        Self::with_scale(state, LEVI_SCALE)
    }

    pub fn with_scale(state: &PHState, levi_scale: f64) -> Self {
        let f = &state.frame;
        let m = f.m;
        let n = f.nvars();
        let k = f.frame_order();
        let th: Vec<Jet> = f.theta.iter().map(|c| c.lower(k)).collect();
        let mut g = vec![vec![Jet::zero(k, n); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut levi = Jet::zero(k, n);
                for a in 1..=m {
                    let b = a + m;
                    let pair = &(&f.coframe[a][i] * &f.coframe[b][j]) + &(&f.coframe[b][i] * &f.coframe[a][j]);
                    levi = &levi + &pair.re;
                }
                let v = &(&th[i] * &th[j]) + &levi.scale(levi_scale);
                g[j][i] = v.clone();
                g[i][j] = v;
            }
        }
        AdaptedMetric { m, levi_scale, components: g }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn order(&self) -> usize {
        self.components[0][0].order()
    }

    pub fn values(&self) -> Vec<Vec<f64>> {
        self.components.iter().map(|r| r.iter().map(Jet::value).collect()).collect()
    }

    /// `g(X, Y)` for complex chart vectors, bilinear.
    pub fn apply(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        bilinear(&self.values(), x, y)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let v = self.values();
        let a = DMatrix::from_fn(n, n, |i, j| v[i][j]);
        a.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `|g(T, T) - 1|` and the largest `|g(T, T_a)|`.
    pub fn reeb_defects(&self, state: &PHState) -> [f64; 2] {
        let vecs = frame_values(state);
        let unit = (self.apply(&vecs[0], &vecs[0]) - 1.0).norm();
        let orth = (1..vecs.len()).map(|a| self.apply(&vecs[0], &vecs[a]).norm()).fold(0.0, f64::max);
        [unit, orth]
    }
}

pub(crate) fn frame_values(state: &PHState) -> Vec<Vec<Complex64>> {
    state.frame.vectors.iter().map(|v| v.iter().map(|c| c.value()).collect()).collect()
}

pub(crate) fn bilinear(g: &[Vec<f64>], x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, row) in g.iter().enumerate() {
        for (j, gij) in row.iter().enumerate() {
            acc += x[i] * y[j] * gij;
        }
    }
    acc
}

/// Levi-Civita connection and curvature of a chart metric at one point.
///
/// `riemann[l][i][j][k]` is the `d_l` component of `R(d_i, d_j) d_k` with
/// `R(X, Y) = [D_X, D_Y] - D_[X,Y]`; the 4-form is `R(X, Y, Z, W) = g(R(X, Y) W, Z)`.
#[derive(Clone, Debug)]
pub struct LeviCivita {
    pub n: usize,
    pub metric: Vec<Vec<f64>>,
    pub inverse: Vec<Vec<f64>>,
    /// `Gamma^k_ij` as `[k][i][j]`, two orders below the metric.
    pub christoffel: Vec<Vec<Vec<Jet>>>,
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    pub ricci: Vec<Vec<f64>>,
    /// `d_k g_ij` as `[k][i][j]`.
    metric_derivatives: Vec<Vec<Vec<f64>>>,
}

/// Standard chart formulas applied to the metric jets.
pub fn christoffel_oracle(metric: &AdaptedMetric) -> Result<LeviCivita> {
    LeviCivita::from_components(&metric.components)
}

impl LeviCivita {
    pub fn from_components(g: &[Vec<Jet>]) -> Result<Self> {
        let n = g.len();
        let k = g[0][0].order();
        if k < 2 {
            return Err(Error::InsufficientOrder { needed: 2, have: k, what: "metric curvature" });
        }
        let ginv = linalg::invert(g.to_vec(), |d| Jet::constant(if d { 1.0 } else { 0.0 }, k, n)).map_err(|e| match e {
            JetError::Singular => Error::Degenerate("singular metric".into()),
            other => other.into(),
        })?;
        let mut dg = vec![vec![vec![Jet::zero(k - 1, n); n]; n]; n];
        for (l, dl) in dg.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    dl[i][j] = g[i][j].derivative(l)?;
                }
            }
        }
        let ginv_low: Vec<Vec<Jet>> = ginv.iter().map(|r| r.iter().map(|c| c.lower(k - 1)).collect()).collect();
        let mut first_kind = vec![vec![vec![Jet::zero(k - 1, n); n]; n]; n];
        for (l, fl) in first_kind.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    fl[i][j] = (&(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j]).scale(0.5);
                }
            }
        }
        let mut christoffel = vec![vec![vec![Jet::zero(k - 1, n); n]; n]; n];
        for (kk, ck) in christoffel.iter_mut().enumerate() {
            for i in 0..n {
                for j in i..n {
                    let mut acc = Jet::zero(k - 1, n);
                    for (l, fl) in first_kind.iter().enumerate() {
                        acc = acc.fma(&ginv_low[kk][l], &fl[i][j]);
                    }
                    ck[j][i] = acc.clone();
                    ck[i][j] = acc;
                }
            }
        }
        let gam = |k: usize, i: usize, j: usize| christoffel[k][i][j].value();
        let mut dgam = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for (d, dd) in dgam.iter_mut().enumerate() {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        dd[l][i][j] = christoffel[l][i][j].derivative(d)?.value();
                    }
                }
            }
        }
        let mut riemann = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for (l, rl) in riemann.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    for kk in 0..n {
                        let mut v = dgam[i][l][j][kk] - dgam[j][l][i][kk];
                        for p in 0..n {
                            v += gam(l, i, p) * gam(p, j, kk) - gam(l, j, p) * gam(p, i, kk);
                        }
                        rl[i][j][kk] = v;
                    }
                }
            }
        }
        let mut ricci = vec![vec![0.0; n]; n];
        for (j, rj) in ricci.iter_mut().enumerate() {
            for (kk, r) in rj.iter_mut().enumerate() {
                *r = (0..n).map(|i| riemann[i][i][j][kk]).sum();
            }
        }
        let metric_derivatives = dg
            .iter()
            .map(|dl| dl.iter().map(|r| r.iter().map(Jet::value).collect()).collect())
            .collect();
        Ok(LeviCivita {
            n,
            metric: g.iter().map(|r| r.iter().map(Jet::value).collect()).collect(),
            inverse: ginv.iter().map(|r| r.iter().map(Jet::value).collect()).collect(),
            christoffel,
            riemann,
            ricci,
            metric_derivatives,
        })
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.christoffel[k][i][j].value()
    }

    /// `g(R(X, Y) W, Z)`.
    pub fn curvature(&self, x: &[Complex64], y: &[Complex64], z: &[Complex64], w: &[Complex64]) -> Complex64 {
        let n = self.n;
        let mut rw = vec![Complex64::new(0.0, 0.0); n];
        for (l, r) in rw.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let xy = x[i] * y[j];
                    if xy == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..n {
                        *r += xy * w[k] * self.riemann[l][i][j][k];
                    }
                }
            }
        }
        bilinear(&self.metric, &rw, z)
    }

    pub fn ricci_apply(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        bilinear(&self.ricci, x, y)
    }

    pub fn metric_apply(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        bilinear(&self.metric, x, y)
    }

    /// `D^2 u_ij = d_i d_j u - Gamma^k_ij d_k u`.
    pub fn hessian(&self, u: &Jet) -> Result<Vec<Vec<f64>>> {
        let n = self.n;
        if u.order() < 2 {
            return Err(Error::InsufficientOrder { needed: 2, have: u.order(), what: "Riemannian Hessian" });
        }
        let grad: Vec<Jet> = (0..n).map(|i| u.derivative(i)).collect::<std::result::Result<_, _>>()?;
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut v = grad[j].derivative(i)?.value();
                for (k, gk) in grad.iter().enumerate() {
                    v -= self.gamma(k, i, j) * gk.value();
                }
                h[i][j] = v;
            }
        }
        Ok(h)
    }

    /// `g^ij D^2 u_ij`.
    pub fn laplacian(&self, hess: &[Vec<f64>]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += self.inverse[i][j] * hess[i][j];
            }
        }
        acc
    }

    /// `D_X Y` for a constant vector `x` and a vector field `y` given by jets.
    pub fn covariant(&self, x: &[Complex64], y: &[crate::jets::CJet]) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, o) in out.iter_mut().enumerate() {
            for i in 0..n {
                if x[i] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                *o += x[i] * y[k].derivative(i)?.value();
                for j in 0..n {
                    *o += x[i] * y[j].value() * self.gamma(k, i, j);
                }
            }
        }
        Ok(out)
    }

    /// Largest `|d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il|`.
    pub fn compatibility_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = self.metric_derivatives[k][i][j];
                    for l in 0..n {
                        v -= self.gamma(l, k, i) * self.metric[l][j] + self.gamma(l, k, j) * self.metric[i][l];
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }

    /// Fully lowered `R(d_i, d_j, d_z, d_k)`.
    fn lowered(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let n = self.n;
        let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for (i, ri) in r.iter_mut().enumerate() {
            for (j, rij) in ri.iter_mut().enumerate() {
                for (z, rijz) in rij.iter_mut().enumerate() {
                    for (k, v) in rijz.iter_mut().enumerate() {
                        *v = (0..n).map(|l| self.metric[z][l] * self.riemann[l][i][j][k]).sum();
                    }
                }
            }
        }
        r
    }

    pub fn symmetry(&self) -> CurvatureSymmetry {
        let n = self.n;
        let r = self.lowered();
        let mut s = CurvatureSymmetry { first_pair: 0.0, last_pair: 0.0, pair_exchange: 0.0, bianchi: 0.0, ricci: 0.0 };
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for z in 0..n {
                    for k in 0..n {
                        let v = r[i][j][z][k];
                        scale = scale.max(v.abs());
                        s.first_pair = s.first_pair.max((v + r[j][i][z][k]).abs());
                        s.last_pair = s.last_pair.max((v + r[i][j][k][z]).abs());
                        s.pair_exchange = s.pair_exchange.max((v - r[z][k][i][j]).abs());
                        // R(X,Y)W + R(Y,W)X + R(W,X)Y paired with Z
                        s.bianchi = s.bianchi.max((v + r[j][k][z][i] + r[k][i][z][j]).abs());
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                scale = scale.max(self.ricci[i][j].abs());
                s.ricci = s.ricci.max((self.ricci[i][j] - self.ricci[j][i]).abs());
            }
        }
        let d = 1.0 + scale;
        s.first_pair /= d;
        s.last_pair /= d;
        s.pair_exchange /= d;
        s.bianchi /= d;
        s.ricci /= d;
        s
    }
}

/// Scaled violations of the classical curvature symmetries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSymmetry {
    pub first_pair: f64,
    pub last_pair: f64,
    pub pair_exchange: f64,
    pub bianchi: f64,
    pub ricci: f64,
}

impl CurvatureSymmetry {
    pub fn max(&self) -> f64 {
        self.first_pair.max(self.last_pair).max(self.pair_exchange).max(self.bianchi).max(self.ricci)
    }
}

/// Largest `|H_ij - H_ji|`.
pub fn hessian_asymmetry(h: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..h.len() {
        for j in 0..h.len() {
            worst = worst.max((h[i][j] - h[j][i]).abs());
        }
    }
    worst
}
