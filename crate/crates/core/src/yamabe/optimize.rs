//! Projected gradient descent on the Sobolev quotient in exponential
//! coordinates.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{FunctionBasis, NodeTable};
use super::functional::standard_density;
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Stop when `|grad Q| <= gradient_tol * Q`.
    pub gradient_tol: f64,
    /// Also stop when the quotient decreased by less than `value_tol * Q`
    /// over the last `stall_window` iterations.
    pub value_tol: f64,
    pub stall_window: usize,
    /// Sufficient-decrease constant of the backtracking search.
    pub armijo: f64,
    pub initial_step: f64,
    /// Standard deviation of the random starting coefficients.
    pub start_scale: f64,
    pub max_backtracks: usize,
    /// Hold the coefficients of the linear elements at zero. The quotient is
    /// invariant under the noncompact automorphism group of the sphere, and
    /// without this the iterates can slide along the extremal family until
    /// the rule no longer resolves them.
    pub balance: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 3000,
            gradient_tol: 1e-7,
            value_tol: 1e-8,
            stall_window: 50,
            armijo: 1e-4,
            initial_step: 1e-2,
            start_scale: 0.05,
            max_backtracks: 40,
            balance: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || !(self.gradient_tol > 0.0) || !(self.initial_step > 0.0) {
            return Err(Error::Config("optimizer needs positive iterations, tolerance and step".into()));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::Config("Armijo constant must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub value: f64,
    pub gradient_norm: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOutcome {
    pub coeffs: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
}

/// Quotient `Q = N / P^{2/p}` over a tabulated basis, with
/// `N = int a |grad_b f|^2 + b f^2`, `P = int f^p`, `p = 2(m+1)/m`.
pub struct SobolevQuotient<'a> {
    m: usize,
    table: &'a NodeTable,
    nodes: &'a [Vec<Complex64>],
    weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct QuotientEval {
    pub value: f64,
    pub power_integral: f64,
    pub gradient: Vec<f64>,
}

impl<'a> SobolevQuotient<'a> {
    pub fn new(rule: &'a QuadratureRule, table: &'a NodeTable) -> Self {
        let d = standard_density(rule.m);
        SobolevQuotient { m: rule.m, table, nodes: &rule.nodes, weights: rule.weights.iter().map(|w| w * d).collect() }
    }

    fn exponent(&self) -> f64 {
        2.0 * (self.m as f64 + 1.0) / self.m as f64
    }

    /// Value only.
    pub fn value(&self, c: &[f64]) -> (f64, f64) {
        let (n, p, _, _) = self.accumulate(c, false);
        (n / p.powf(2.0 / self.exponent()), p)
    }

    pub fn eval(&self, c: &[f64]) -> QuotientEval {
        let (n, p, dn, dp) = self.accumulate(c, true);
        let e = self.exponent();
        let d = p.powf(2.0 / e);
        let q = n / d;
        let dd = 2.0 * p.powf(2.0 / e - 1.0);
        let gradient = dn.iter().zip(&dp).map(|(a, b)| (a - q * dd * b) / d).collect();
        QuotientEval { value: q, power_integral: p, gradient }
    }

    /// `(N, P, dN/dc, (1/p) dP/dc)`.
    fn accumulate(&self, c: &[f64], with_grad: bool) -> (f64, f64, Vec<f64>, Vec<f64>) {
        let m = self.m as f64;
        let a = 2.0 * (m + 1.0) / m;
        let b = 0.5 * m * (m + 1.0);
        let e = self.exponent();
        let k = c.len();
        let parts: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = (0..self.nodes.len())
            .into_par_iter()
            .map(|i| {
                let y = &self.table.values[i];
                let gy = &self.table.gradients[i];
                let z = &self.nodes[i];
                let w = self.weights[i];
                let s: f64 = y.iter().zip(c).map(|(u, v)| u * v).sum();
                let f = s.exp();
                let mut g = vec![Complex64::new(0.0, 0.0); z.len()];
                for (gk, ck) in gy.iter().zip(c) {
                    for (gj, d) in g.iter_mut().zip(gk) {
                        *gj += d * *ck;
                    }
                }
                let zg: Complex64 = z.iter().zip(&g).map(|(a, b)| a * b).sum();
                let hg = g.iter().map(|x| x.norm_sqr()).sum::<f64>() - zg.norm_sqr();
                let f2 = f * f;
                let fp = f.powf(e);
                let n = w * (a * f2 * hg + b * f2);
                let p = w * fp;
                if !with_grad {
                    return (n, p, Vec::new(), Vec::new());
                }
                let mut dn = vec![0.0; k];
                let mut dp = vec![0.0; k];
                for j in 0..k {
                    let zh: Complex64 = z.iter().zip(&gy[j]).map(|(a, b)| a * b).sum();
                    let cross: f64 =
                        g.iter().zip(&gy[j]).map(|(x, h)| (x * h.conj()).re).sum::<f64>() - (zg * zh.conj()).re;
                    dn[j] = w * (a * (2.0 * f2 * y[j] * hg + 2.0 * f2 * cross) + 2.0 * b * f2 * y[j]);
                    dp[j] = w * fp * y[j];
                }
                (n, p, dn, dp)
            })
            .collect();
        let mut n = 0.0;
        let mut p = 0.0;
        let mut dn = vec![0.0; if with_grad { k } else { 0 }];
        let mut dp = dn.clone();
        for (a, b, c, d) in parts {
            n += a;
            p += b;
            for (x, y) in dn.iter_mut().zip(c) {
                *x += y;
            }
            for (x, y) in dp.iter_mut().zip(d) {
                *x += y;
            }
        }
        (n, p, dn, dp)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Rescales `f` (shifts the constant coefficient) so that `int f^p` equals
/// `target`.
fn project(q: &SobolevQuotient<'_>, c: &mut [f64], target: f64) {
    let (_, p) = q.value(c);
    c[0] += (target / p).ln() / q.exponent();
}

/// Minimizes the Sobolev quotient from `start` (or a seeded random start).
pub fn minimize_yamabe(
    rule: &QuadratureRule,
    basis: &FunctionBasis,
    config: &OptimizerConfig,
    start: Option<Vec<f64>>,
    seed: u64,
) -> Result<MinimizeOutcome> {
    config.validate()?;
    let table = basis.tabulate(rule);
    let q = SobolevQuotient::new(rule, &table);
    let mut c = match start {
        Some(c) => {
            if c.len() != basis.len() {
                return Err(Error::Precondition("start has the wrong number of coefficients".into()));
            }
            c
        }
        None => basis.random_coeffs(seed, config.start_scale),
    };
    let frozen = if config.balance { basis.linear_range() } else { 0..0 };
    c[frozen.clone()].iter_mut().for_each(|x| *x = 0.0);
    let eval = |c: &[f64]| {
        let mut e = q.eval(c);
        e.gradient[frozen.clone()].iter_mut().for_each(|x| *x = 0.0);
        e
    };
    let target = standard_density(rule.m) * rule.weights.iter().sum::<f64>();
    project(&q, &mut c, target);
    let mut cur = eval(&c);
    let mut trace = vec![TraceEntry { iteration: 0, value: cur.value, gradient_norm: norm(&cur.gradient), step: 0.0 }];
    let mut step = config.initial_step;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for it in 1..=config.max_iterations {
        let gn = norm(&cur.gradient);
        let stalled = trace.len() > config.stall_window
            && trace[trace.len() - 1 - config.stall_window].value - cur.value <= config.value_tol * cur.value;
        if gn <= config.gradient_tol * cur.value || stalled {
            return Ok(MinimizeOutcome { coeffs: c, value: cur.value, iterations: it - 1, trace });
        }
        if let Some((pc, pg)) = &prev {
            let s: Vec<f64> = c.iter().zip(pc).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = cur.gradient.iter().zip(pg).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|x| x * x).sum();
            if sy > 0.0 {
                step = ss / sy;
            }
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..config.max_backtracks {
            let mut trial: Vec<f64> = c.iter().zip(&cur.gradient).map(|(a, g)| a - t * g).collect();
            project(&q, &mut trial, target);
            let (v, _) = q.value(&trial);
            if v.is_finite() && v <= cur.value - config.armijo * t * gn * gn {
                accepted = Some(trial);
                break;
            }
            t *= 0.5;
        }
        let Some(next) = accepted else {
            // No decrease possible at working precision.
            return Ok(MinimizeOutcome { coeffs: c, value: cur.value, iterations: it - 1, trace });
        };
        prev = Some((c, cur.gradient.clone()));
        c = next;
        cur = eval(&c);
        trace.push(TraceEntry { iteration: it, value: cur.value, gradient_norm: norm(&cur.gradient), step: t });
    }
    let outcome = MinimizeOutcome { coeffs: c, value: cur.value, iterations: config.max_iterations, trace };
    Err(Error::NotConverged { iterations: config.max_iterations, best: cur.value, outcome: Box::new(outcome) })
}
