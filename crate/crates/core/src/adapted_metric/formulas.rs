//! Tanaka-Webster expressions for the adapted metric's connection, Hessian
//! and curvature, compared with the chart oracle.
//!
//! Test vectors are given by constant coefficients over the frame
//! `{T, T_a, T_a-bar}`; real bilinear forms act on them complex-bilinearly.
//! `A` is the torsion endomorphism `tau X = nabla_T X - [T, X]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::metric::{bilinear, frame_values, AdaptedMetric, LeviCivita};
use crate::engine::{CovJet, PHState, TorsionDerivatives};
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::jerison_lee::ObataData;
use crate::yamabe::QuadratureRule;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Frame data seen through the oracle metric.
#[derive(Clone, Debug)]
pub struct FrameContext {
    pub m: usize,
    pub n: usize,
    /// Chart values of the frame vectors.
    pub vectors: Vec<Vec<Complex64>>,
    pub coframe: Vec<Vec<Complex64>>,
    /// `g(T_a, T_b)`.
    pub gram: Vec<Vec<Complex64>>,
    /// `tau T_c = sum_b tau[c][b] T_b`.
    pub tau: Vec<Vec<Complex64>>,
    dtheta: Vec<Vec<f64>>,
}

impl FrameContext {
    pub fn new(state: &PHState, lc: &LeviCivita) -> Result<Self> {
        let m = state.m();
        let n = state.dim();
        let vectors = frame_values(state);
        let coframe: Vec<Vec<Complex64>> =
            state.frame.coframe.iter().map(|w| w.iter().map(|c| c.value()).collect()).collect();
        let gram = (0..n).map(|a| (0..n).map(|b| lc.metric_apply(&vectors[a], &vectors[b])).collect()).collect();
        let reeb = &state.frame.vectors[0];
        let mut tau = vec![vec![ZERO; n]; n];
        for c in 1..n {
            let tc = &state.frame.vectors[c];
            let mut bracket = vec![ZERO; n];
            for (k, b) in bracket.iter_mut().enumerate() {
                for i in 0..n {
                    *b += vectors[0][i] * tc[k].derivative(i)?.value() - vectors[c][i] * reeb[k].derivative(i)?.value();
                }
            }
            for b in 0..n {
                let along: Complex64 = (0..n).map(|k| coframe[b][k] * bracket[k]).sum();
                let conn = state.conn(c, b, 0).map_or(ZERO, |g| g.value());
                tau[c][b] = conn - along;
            }
        }
        let dtheta = state.frame.dtheta.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
        Ok(FrameContext { m, n, vectors, coframe, gram, tau, dtheta })
    }

    pub fn basis(&self, a: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.n];
        v[a] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn to_chart(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.n];
        for (a, xa) in x.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(&self.vectors[a]) {
                *o += xa * v;
            }
        }
        out
    }

    pub fn to_frame(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.coframe.iter().map(|w| w.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn inner(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let mut acc = ZERO;
        for a in 0..self.n {
            for b in 0..self.n {
                acc += x[a] * self.gram[a][b] * y[b];
            }
        }
        acc
    }

    pub fn j(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.m;
        (0..self.n)
            .map(|a| if a == 0 { ZERO } else if a <= m { I * x[a] } else { -I * x[a] })
            .collect()
    }

    pub fn torsion(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.n];
        for (c, xc) in x.iter().enumerate() {
            for (o, t) in out.iter_mut().zip(&self.tau[c]) {
                *o += xc * t;
            }
        }
        out
    }

    pub fn dtheta(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let (cx, cy) = (self.to_chart(x), self.to_chart(y));
        let mut acc = ZERO;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += cx[i] * cy[j] * self.dtheta[i][j];
            }
        }
        acc
    }

    /// `g(tau ., tau .)` traced with the inverse frame Gram matrix.
    pub fn torsion_norm_sqr(&self) -> f64 {
        let n = self.n;
        let g = nalgebra::DMatrix::from_fn(n, n, |a, b| self.gram[a][b]);
        let inv = g.try_inverse().unwrap_or_else(|| nalgebra::DMatrix::zeros(n, n));
        let mut acc = ZERO;
        for a in 0..n {
            for b in 0..n {
                acc += inv[(a, b)] * self.inner(&self.tau[a], &self.tau[b]);
            }
        }
        acc.re
    }

    /// Frame components of a chart bilinear form.
    pub fn frame_form(&self, h: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| bilinear(h, &self.vectors[a], &self.vectors[b])).collect())
            .collect()
    }

    /// Real horizontal test vectors: `T_a + T_a-bar`, their `J` images and two
    /// fixed mixtures.
    pub fn horizontal_tests(&self) -> Vec<Vec<Complex64>> {
        let m = self.m;
        let mut out = Vec::new();
        for a in 1..=m {
            let mut e = vec![ZERO; self.n];
            e[a] = Complex64::new(1.0, 0.0);
            e[a + m] = Complex64::new(1.0, 0.0);
            out.push(self.j(&e));
            out.push(e);
        }
        for s in [0.7, -1.3] {
            let mut v = vec![ZERO; self.n];
            for a in 1..=m {
                let c = Complex64::new((s * a as f64).cos(), (s * (a as f64 + 0.5)).sin());
                v[a] = c;
                v[a + m] = c.conj();
            }
            out.push(v);
        }
        out
    }
}

fn scaled(diff: f64, size: f64) -> f64 {
    diff / (1.0 + size)
}

/// Readings of the connection comparison formula: `phi = j_sign * J` and
/// `omega = omega_scale * dtheta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReading {
    pub j_sign: f64,
    pub omega_scale: f64,
}

impl ConnectionReading {
    pub const SELECTED: ConnectionReading = ConnectionReading { j_sign: 1.0, omega_scale: 1.0 };

    pub fn candidates() -> Vec<ConnectionReading> {
        let mut out = Vec::new();
        for j_sign in [1.0, -1.0] {
            for omega_scale in [1.0, -1.0, 0.5, -0.5, 2.0, -2.0] {
                out.push(ConnectionReading { j_sign, omega_scale });
            }
        }
        out
    }
}

/// `D_{T_c} T_a` minus the formula, per frame pair `[c][a]`, in frame
/// coefficients.
#[derive(Clone, Debug)]
pub struct ConnectionComparison {
    pub reading: ConnectionReading,
    pub diff: Vec<Vec<Vec<Complex64>>>,
    pub size: f64,
}

impl ConnectionComparison {
    pub fn new(state: &PHState, lc: &LeviCivita, ctx: &FrameContext, reading: ConnectionReading) -> Result<Self> {
        let n = ctx.n;
        let mut diff = vec![vec![vec![ZERO; n]; n]; n];
        let mut size: f64 = 0.0;
        for c in 0..n {
            for a in 0..n {
                let lhs = ctx.to_frame(&lc.covariant(&ctx.vectors[c], &state.frame.vectors[a])?);
                let (x, y) = (ctx.basis(c), ctx.basis(a));
                let mut rhs: Vec<Complex64> =
                    (0..n).map(|b| state.conn(a, b, c).map_or(ZERO, |g| g.value())).collect();
                let (theta_y, theta_x) = (y[0], x[0]);
                let ax = ctx.torsion(&x);
                let (jx, jy) = (ctx.j(&x), ctx.j(&y));
                for b in 0..n {
                    rhs[b] += theta_y * ax[b] + 0.5 * reading.j_sign * (theta_y * jx[b] + theta_x * jy[b]);
                }
                rhs[0] -= ctx.inner(&ax, &y) + 0.5 * reading.omega_scale * ctx.dtheta(&x, &y);
                for b in 0..n {
                    diff[c][a][b] = lhs[b] - rhs[b];
                    size = size.max(lhs[b].norm());
                }
            }
        }
        Ok(ConnectionComparison { reading, diff, size })
    }

    /// Scaled max-norm of the difference on `(X, Y)`.
    pub fn residual(&self, x: &[Complex64], y: &[Complex64]) -> f64 {
        let n = x.len();
        let mut worst: f64 = 0.0;
        for b in 0..n {
            let mut v = ZERO;
            for c in 0..n {
                for a in 0..n {
                    v += x[c] * y[a] * self.diff[c][a][b];
                }
            }
            worst = worst.max(v.norm());
        }
        scaled(worst, self.size)
    }

    /// Largest residual over all frame pairs.
    pub fn max_residual(&self) -> f64 {
        let worst = self.diff.iter().flatten().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        scaled(worst, self.size)
    }
}

pub fn connd_residual(
    state: &PHState,
    lc: &LeviCivita,
    reading: ConnectionReading,
    x: &[Complex64],
    y: &[Complex64],
) -> Result<f64> {
    let ctx = FrameContext::new(state, lc)?;
    Ok(ConnectionComparison::new(state, lc, &ctx, reading)?.residual(x, y))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadingCalibration {
    pub reading: ConnectionReading,
    pub residual: f64,
    pub candidates: Vec<(ConnectionReading, f64)>,
}

/// Picks the reading with the smallest residual over all frame pairs.
pub fn calibrate_reading(state: &PHState, lc: &LeviCivita) -> Result<ReadingCalibration> {
    let ctx = FrameContext::new(state, lc)?;
    let mut candidates = Vec::new();
    for r in ConnectionReading::candidates() {
        candidates.push((r, ConnectionComparison::new(state, lc, &ctx, r)?.max_residual()));
    }
    let (reading, residual) = *candidates
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty candidate set");
    Ok(ReadingCalibration { reading, residual, candidates })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessResiduals {
    /// `D^2u(T,T) - u_{0,0}`.
    pub reeb_reeb: f64,
    /// `D^2u(T,T_a) - u_{a,0} + (i/2) u_a`.
    pub reeb_horizontal: f64,
    /// `D^2u(T_a,T_b) - u_{a,b} - A_ab u_0`.
    pub holomorphic: f64,
    /// `D^2u(T_a,T_b-bar) - u_{a,b-bar} + (i/2) delta_ab u_0`.
    pub mixed: f64,
    /// Chart Laplacian minus `u_{0,0} + Lap_b u`.
    pub trace: f64,
    /// `|D^2u_ij - D^2u_ji|`.
    pub asymmetry: f64,
}

impl HessResiduals {
    pub fn max(&self) -> f64 {
        [self.reeb_reeb, self.reeb_horizontal, self.holomorphic, self.mixed, self.trace]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn hess_residuals(lc: &LeviCivita, state: &PHState, u: &Jet) -> Result<HessResiduals> {
    let m = state.m();
    let ctx = FrameContext::new(state, lc)?;
    let h = lc.hessian(u)?;
    let hf = ctx.frame_form(&h);
    let cov = CovJet::new(state, u, 2)?;
    let u0 = cov.d1(0);
    let size = hf.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let mut r = HessResiduals {
        reeb_reeb: scaled((hf[0][0] - cov.d2(0, 0)).norm(), size),
        reeb_horizontal: 0.0,
        holomorphic: 0.0,
        mixed: 0.0,
        trace: 0.0,
        asymmetry: super::metric::hessian_asymmetry(&h),
    };
    for a in 1..=m {
        let d = hf[0][a] - (cov.d2(a, 0) - 0.5 * I * cov.d1(a));
        r.reeb_horizontal = r.reeb_horizontal.max(scaled(d.norm(), size));
        for b in 1..=m {
            let d = hf[a][b] - (cov.d2(a, b) + state.torsion[a - 1][b - 1].value() * u0);
            r.holomorphic = r.holomorphic.max(scaled(d.norm(), size));
            let delta = if a == b { 1.0 } else { 0.0 };
            let d = hf[a][b + m] - (cov.d2(a, b + m) - 0.5 * I * delta * u0);
            r.mixed = r.mixed.max(scaled(d.norm(), size));
        }
    }
    let chart = lc.laplacian(&h);
    let split = cov.d2(0, 0).re + cov.sublaplacian()?;
    r.trace = scaled((chart - split).abs(), chart.abs().max(split.abs()));
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCandidate {
    pub scale: f64,
    /// Worst mixed display `D^2u(T_a, T_b-bar)` alone.
    pub mixed: f64,
    /// Worst over the four Hessian displays.
    pub all: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCalibration {
    pub scale: f64,
    pub residual: f64,
    /// Whether every other candidate misses by more than `1e-6`.
    pub unique: bool,
    /// Whether the mixed display alone would separate the candidates.
    pub mixed_separates: bool,
    pub candidates: Vec<ScaleCandidate>,
}

pub const LEVI_CANDIDATES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Chooses the Levi-part scale for which the Hessian displays hold on every
/// `(state, u)` case. The mixed display does not depend on the scale, so the
/// choice rests on the `D^2u(T, T_a)` display.
pub fn calibrate_levi_scale(cases: &[(PHState, Jet)]) -> Result<ScaleCalibration> {
    if cases.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut candidates = Vec::new();
    for s in LEVI_CANDIDATES {
        let mut c = ScaleCandidate { scale: s, mixed: 0.0, all: 0.0 };
        for (state, u) in cases {
            let lc = super::metric::christoffel_oracle(&AdaptedMetric::with_scale(state, s))?;
            let r = hess_residuals(&lc, state, u)?;
            c.mixed = c.mixed.max(r.mixed);
            c.all = c.all.max(r.reeb_reeb).max(r.reeb_horizontal).max(r.holomorphic).max(r.mixed);
        }
        candidates.push(c);
    }
    let best = candidates.iter().min_by(|a, b| a.all.total_cmp(&b.all)).expect("non-empty").clone();
    let unique = candidates.iter().all(|c| c.scale == best.scale || c.all > 1e-6);
    let mixed_separates = candidates.iter().all(|c| c.scale == best.scale || c.mixed > 1e-6);
    Ok(ScaleCalibration { scale: best.scale, residual: best.all, unique, mixed_separates, candidates })
}

/// `(D_Z A)(X, Y)` from the torsion derivatives, bilinear in frame coefficients.
fn torsion_derivative(td: &TorsionDerivatives, z: &[Complex64], x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let n = x.len();
    let mut acc = ZERO;
    for a in 0..n {
        for b in 0..n {
            let xy = x[a] * y[b];
            if xy == ZERO {
                continue;
            }
            for (c, zc) in z.iter().enumerate() {
                if *zc != ZERO {
                    acc += xy * zc * td.first.get(&[a, b, c]).value();
                }
            }
        }
    }
    acc
}

/// Tanaka-Webster `g(R(X, Y) W, Z)` from the curvature forms.
fn tw_curvature(state: &PHState, ctx: &FrameContext, x: &[Complex64], y: &[Complex64], z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    let m = ctx.m;
    let forms = &state.curvature()?.forms;
    let (cx, cy) = (ctx.to_chart(x), ctx.to_chart(y));
    let conj = |v: &[Complex64]| v.iter().map(|c| c.conj()).collect::<Vec<_>>();
    let (bx, by) = (conj(&cx), conj(&cy));
    let eval = |d: &crate::engine::tensor::TwoForm, p: &[Complex64], q: &[Complex64]| {
        let mut acc = ZERO;
        for i in 0..ctx.n {
            for j in 0..ctx.n {
                acc += d[i][j].value() * p[i] * q[j];
            }
        }
        acc
    };
    let mut rw = vec![ZERO; ctx.n];
    for b in 1..=m {
        for a in 1..=m {
            let pi = &forms[b - 1][a - 1];
            rw[a] += w[b] * eval(pi, &cx, &cy);
            rw[a + m] += w[b + m] * eval(pi, &bx, &by).conj();
        }
    }
    Ok(ctx.inner(&rw, z))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureComparison {
    /// `R^(X,Y,X,Y)` display.
    pub horizontal: f64,
    /// `R^(X,T,Y,T)` display.
    pub vertical: f64,
    /// `R^(X,Y,Z,T)` display.
    pub mixed: f64,
}

impl CurvatureComparison {
    pub fn max(&self) -> f64 {
        self.horizontal.max(self.vertical).max(self.mixed)
    }
}

pub fn cuv_residuals(state: &PHState, lc: &LeviCivita) -> Result<CurvatureComparison> {
    let ctx = FrameContext::new(state, lc)?;
    let td = TorsionDerivatives::new(state)?;
    let tests = ctx.horizontal_tests();
    let t = ctx.basis(0);
    let ct = ctx.to_chart(&t);
    let oracle = |x: &[Complex64], y: &[Complex64], z: &[Complex64], w: &[Complex64]| {
        lc.curvature(&ctx.to_chart(x), &ctx.to_chart(y), &ctx.to_chart(z), &ctx.to_chart(w))
    };
    let mut r = CurvatureComparison { horizontal: 0.0, vertical: 0.0, mixed: 0.0 };
    for x in &tests {
        let ax = ctx.torsion(x);
        for y in &tests {
            let ay = ctx.torsion(y);
            let lhs = oracle(x, y, x, y);
            let rhs = tw_curvature(state, &ctx, x, y, x, y)? - 0.75 * ctx.inner(&ctx.j(x), y).powi(2)
                + ctx.inner(&ax, y).powi(2)
                - ctx.inner(&ax, x) * ctx.inner(&ay, y);
            r.horizontal = r.horizontal.max(scaled((lhs - rhs).norm(), lhs.norm().max(rhs.norm())));

            let lhs = lc.curvature(&ctx.to_chart(x), &ct, &ctx.to_chart(y), &ct);
            let rhs = -torsion_derivative(&td, &t, x, y) - ctx.inner(&ax, &ay) + ctx.inner(&ax, &ctx.j(y))
                + 0.25 * ctx.inner(x, y);
            r.vertical = r.vertical.max(scaled((lhs - rhs).norm(), lhs.norm().max(rhs.norm())));

            for z in &tests {
                let lhs = oracle(x, y, z, &t);
                let rhs = torsion_derivative(&td, x, y, z) - torsion_derivative(&td, y, x, z);
                r.mixed = r.mixed.max(scaled((lhs - rhs).norm(), lhs.norm().max(rhs.norm())));
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RicciComparison {
    /// `Ric(X, X)` display.
    pub horizontal: f64,
    /// `Ric(X, T)` display.
    pub mixed: f64,
    /// `Ric(T, T) = m/2 - |A|^2`.
    pub reeb: f64,
    /// `|A|^2` as the `g`-norm of the torsion endomorphism.
    pub torsion_norm_sqr: f64,
}

impl RicciComparison {
    pub fn max(&self) -> f64 {
        self.horizontal.max(self.mixed).max(self.reeb)
    }
}

pub fn rica_residuals(state: &PHState, lc: &LeviCivita) -> Result<RicciComparison> {
    let m = state.m();
    let mf = m as f64;
    let ctx = FrameContext::new(state, lc)?;
    let td = TorsionDerivatives::new(state)?;
    let ricci = &state.curvature()?.ricci;
    let t = ctx.basis(0);
    let ric = |x: &[Complex64], y: &[Complex64]| lc.ricci_apply(&ctx.to_chart(x), &ctx.to_chart(y));
    let norm_a = ctx.torsion_norm_sqr();
    let mut coefficient_sets: Vec<Vec<Complex64>> = Vec::new();
    for a in 0..m {
        let mut c = vec![ZERO; m];
        c[a] = Complex64::new(1.0, 0.0);
        coefficient_sets.push(c.clone());
        c[a] = I;
        coefficient_sets.push(c);
    }
    coefficient_sets.push((0..m).map(|a| Complex64::new(0.4 + a as f64, 0.9 - 0.3 * a as f64)).collect());

    let mut div = vec![ZERO; ctx.n];
    for b in 1..=m {
        let d = td.divergence(b);
        div[b + m] += 0.5 * d;
        div[b] += 0.5 * d.conj();
    }

    let mut r = RicciComparison { horizontal: 0.0, mixed: 0.0, reeb: 0.0, torsion_norm_sqr: norm_a };
    for c in &coefficient_sets {
        let mut x = vec![ZERO; ctx.n];
        for a in 1..=m {
            x[a] = c[a - 1];
            x[a + m] = c[a - 1].conj();
        }
        let mut herm = ZERO;
        let mut quad = ZERO;
        for a in 1..=m {
            for b in 1..=m {
                herm += ricci[a - 1][b - 1].value() * c[a - 1] * c[b - 1].conj();
                quad += state.torsion[a - 1][b - 1].value() * c[a - 1] * c[b - 1];
            }
        }
        let ax = ctx.torsion(&x);
        let rhs = 2.0 * herm + I * (mf - 1.0) * (quad - quad.conj()) - 0.5 * ctx.inner(&x, &x)
            - torsion_derivative(&td, &t, &x, &x)
            + ctx.inner(&ax, &ctx.j(&x));
        let lhs = ric(&x, &x);
        r.horizontal = r.horizontal.max(scaled((lhs - rhs).norm(), lhs.norm().max(rhs.norm())));

        let lhs = ric(&x, &t);
        let rhs = 2.0 * ctx.inner(&x, &div);
        r.mixed = r.mixed.max(scaled((lhs - rhs).norm(), lhs.norm().max(rhs.norm())));
    }
    let lhs = ric(&t, &t);
    let rhs = 0.5 * mf - norm_a;
    r.reeb = scaled((lhs.re - rhs).abs() + lhs.im.abs(), lhs.norm().max(rhs.abs()));
    Ok(r)
}

/// Largest frame component of `Ric - (m/2) g`.
pub fn einstein_residual(state: &PHState, lc: &LeviCivita) -> Result<f64> {
    let ctx = FrameContext::new(state, lc)?;
    let half = 0.5 * state.m() as f64;
    let ric = ctx.frame_form(&lc.ricci);
    let mut worst: f64 = 0.0;
    for a in 0..ctx.n {
        for b in 0..ctx.n {
            worst = worst.max((ric[a][b] - half * ctx.gram[a][b]).norm());
        }
    }
    Ok(worst)
}

/// Largest frame component of `D^2 f + chi g`, `chi = (1/2)(e^{u/2} sin(v/2))_0`.
pub fn hf_residual(data: &ObataData, state: &PHState, lc: &LeviCivita) -> Result<f64> {
    let ctx = FrameContext::new(state, lc)?;
    let h = ctx.frame_form(&lc.hessian(&data.f)?);
    let chi = data.chi();
    let mut worst: f64 = 0.0;
    for a in 0..ctx.n {
        for b in 0..ctx.n {
            worst = worst.max((h[a][b] + chi * ctx.gram[a][b]).norm());
        }
    }
    Ok(worst)
}

/// Relative tolerance on the quadrature mean of `u`.
pub const MEAN_TOL: f64 = 1e-8;

/// `max |chi - c^2 u|` over samples at the rule's nodes, after checking that
/// `u` has mean zero.
pub fn obata_reduction(u: &[f64], chi: &[f64], c: f64, rule: &QuadratureRule) -> Result<f64> {
    if u.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if u.len() != chi.len() || u.len() != rule.len() {
        return Err(Error::Precondition("samples must match the quadrature nodes".into()));
    }
    let total: f64 = rule.weights.iter().sum();
    let mean = rule.weights.iter().zip(u).map(|(w, x)| w * x).sum::<f64>() / total;
    let size = u.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if mean.abs() > MEAN_TOL * (1.0 + size) {
        return Err(Error::Precondition(format!("mean of u is {mean:e}, not zero")));
    }
    Ok(u.iter().zip(chi).map(|(x, y)| (y - c * c * x).abs()).fold(0.0, f64::max))
}
