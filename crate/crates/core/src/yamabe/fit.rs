//! Least-squares fit of `c |cosh t + sinh t <zeta, xi>|^-2` to positive samples.
//!
//! The fit runs in the variables `(log c', b)` of `c' |1 + sum zeta_j b_j|^-2`
//! with `|b| < 1`, on log values; `t = atanh |b|`, `xi = conj(b) / |b|`,
//! `c = c' cosh^2 t`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFit {
    pub c: f64,
    pub t: f64,
    /// `None` when `t` is zero to working precision.
    pub xi: Option<Vec<[f64; 2]>>,
    /// Root-mean-square relative error of the fitted values.
    pub residual: f64,
}

impl FamilyFit {
    pub fn xi_complex(&self) -> Option<Vec<Complex64>> {
        self.xi.as_ref().map(|v| v.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

fn model_log(params: &[f64], z: &[Complex64]) -> (f64, Vec<f64>) {
    let n1 = z.len();
    let mut w = Complex64::new(1.0, 0.0);
    for j in 0..n1 {
        w += z[j] * Complex64::new(params[1 + 2 * j], params[2 + 2 * j]);
    }
    let w2 = w.norm_sqr();
    let mut jac = vec![0.0; params.len()];
    jac[0] = 1.0;
    for j in 0..n1 {
        jac[1 + 2 * j] = -2.0 * (w.conj() * z[j]).re / w2;
        jac[2 + 2 * j] = -2.0 * (w.conj() * z[j] * Complex64::new(0.0, 1.0)).re / w2;
    }
    (params[0] - w2.ln(), jac)
}

fn b_norm(params: &[f64]) -> f64 {
    params[1..].iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn cost(params: &[f64], nodes: &[Vec<Complex64>], logs: &[f64]) -> f64 {
    nodes.iter().zip(logs).map(|(z, l)| (model_log(params, z).0 - l).powi(2)).sum()
}

fn levenberg_marquardt(mut params: Vec<f64>, nodes: &[Vec<Complex64>], logs: &[f64]) -> Vec<f64> {
    let k = params.len();
    let mut lambda = 1e-3;
    let mut current = cost(&params, nodes, logs);
    for _ in 0..200 {
        let mut jtj = DMatrix::<f64>::zeros(k, k);
        let mut jtr = DVector::<f64>::zeros(k);
        for (z, l) in nodes.iter().zip(logs) {
            let (v, jac) = model_log(&params, z);
            let r = v - l;
            for a in 0..k {
                jtr[a] += jac[a] * r;
                for b in 0..k {
                    jtj[(a, b)] += jac[a] * jac[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut lhs = jtj.clone();
            for a in 0..k {
                lhs[(a, a)] += lambda * (1.0 + jtj[(a, a)]);
            }
            let Some(delta) = lhs.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = params.iter().zip(delta.iter()).map(|(p, d)| p + d).collect();
            if b_norm(&trial) < 1.0 {
                let c = cost(&trial, nodes, logs);
                if c < current {
                    let gain = current - c;
                    params = trial;
                    current = c;
                    lambda = (lambda * 0.3).max(1e-15);
                    improved = gain > 1e-30;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    params
}

/// Fits the family to `values` sampled at unit vectors `nodes`; errors with
/// [`Error::NotInFamily`] when the relative residual exceeds `threshold`.
pub fn fit_family(nodes: &[Vec<Complex64>], values: &[f64], threshold: f64) -> Result<FamilyFit> {
    if nodes.is_empty() || nodes.len() != values.len() {
        return Err(Error::EmptyBatch);
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonPositive(*v));
    }
    let n1 = nodes[0].len();
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mean_log = logs.iter().sum::<f64>() / logs.len() as f64;

    let mut starts = vec![vec![0.0; 1 + 2 * n1]];
    for j in 0..n1 {
        for (re, im) in [(0.5, 0.0), (-0.5, 0.0), (0.0, 0.5), (0.0, -0.5)] {
            let mut s = vec![0.0; 1 + 2 * n1];
            s[1 + 2 * j] = re;
            s[2 + 2 * j] = im;
            starts.push(s);
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mut s in starts {
        s[0] = mean_log;
        let p = levenberg_marquardt(s, nodes, &logs);
        let c = cost(&p, nodes, &logs);
        if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
            best = Some((c, p));
        }
    }
    let (_, p) = best.expect("at least one start");

    let rel: f64 = nodes
        .iter()
        .zip(values)
        .map(|(z, v)| ((model_log(&p, z).0.exp() - v) / v).powi(2))
        .sum::<f64>()
        / nodes.len() as f64;
    let residual = rel.sqrt();
    let bn = b_norm(&p);
    let t = bn.atanh();
    let c = p[0].exp() * t.cosh().powi(2);
    let xi = if bn < 1e-8 {
        None
    } else {
        Some((0..n1).map(|j| [p[1 + 2 * j] / bn, -p[2 + 2 * j] / bn]).collect())
    };
    if residual > threshold {
        return Err(Error::NotInFamily(residual));
    }
    Ok(FamilyFit { c, t, xi, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::sampling::sample_sphere;

    fn family(c: f64, t: f64, xi: &[Complex64], z: &[Complex64]) -> f64 {
        let s: Complex64 = z.iter().zip(xi).map(|(a, b)| a * b.conj()).sum();
        c / (t.cosh() + t.sinh() * s).norm_sqr()
    }

    #[test]
    fn recovers_family_parameters() {
        let xi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let nodes = sample_sphere(1, 200, 1);
        let vals: Vec<f64> = nodes.iter().map(|z| family(1.7, 0.6, &xi, z)).collect();
        let fit = fit_family(&nodes, &vals, 1e-6).unwrap();
        assert!(fit.residual < 1e-10);
        assert!((fit.c - 1.7).abs() < 1e-6 && (fit.t - 0.6).abs() < 1e-6);
        let got = fit.xi_complex().unwrap();
        for (a, b) in got.iter().zip(&xi) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn constant_has_free_direction() {
        let nodes = sample_sphere(1, 50, 2);
        let fit = fit_family(&nodes, &vec![1.0; 50], 1e-6).unwrap();
        assert!(fit.t < 1e-8 && (fit.c - 1.0).abs() < 1e-10 && fit.xi.is_none());
    }
}
