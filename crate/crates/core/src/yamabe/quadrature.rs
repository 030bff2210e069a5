//! Integration rules on the unit sphere of `C^{m+1}`.
//!
//! Coordinates `zeta_j = sqrt(s_j) e^{i a_j}` with `s` on the standard simplex
//! give the surface measure `2^-m ds_1 .. ds_m da_0 .. da_m`. The product rule
//! uses Gauss-Legendre in collapsed simplex coordinates and the trapezoid rule
//! in each angle.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact::sampling::sample_sphere;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RuleKind {
    /// `radial` Gauss points per simplex direction, `angular` points per circle.
    Product { radial: usize, angular: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub m: usize,
    pub kind: RuleKind,
    pub nodes: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

/// Surface area of the unit sphere in `C^{m+1}`: `2 pi^{m+1} / m!`.
pub fn sphere_area(m: usize) -> f64 {
    2.0 * PI.powi(m as i32 + 1) / factorial(m)
}

pub(crate) fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

impl QuadratureRule {
    pub fn product(m: usize, radial: usize, angular: usize) -> Result<Self> {
        if m == 0 || radial == 0 || angular == 0 {
            return Err(Error::Config("quadrature sizes must be positive".into()));
        }
        let gl = GaussLegendre::new(NonZeroUsize::new(radial).expect("radial > 0"));
        let pairs: Vec<(f64, f64)> = gl.iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();

        // Collapsed simplex: s_1 = u_1, s_k = (1 - u_1)...(1 - u_{k-1}) u_k.
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
        for _ in 0..m {
            let mut next = Vec::with_capacity(simplex.len() * radial);
            for (s, w) in &simplex {
                let rest = 1.0 - s.iter().sum::<f64>();
                for &(u, wu) in &pairs {
                    let mut s2 = s.clone();
                    s2.push(rest * u);
                    next.push((s2, w * wu * rest));
                }
            }
            simplex = next;
        }

        let step = TAU / angular as f64;
        let angle_count = angular.pow(m as u32 + 1);
        let angle_weight = step.powi(m as i32 + 1);
        let scale = 0.5f64.powi(m as i32);
        let mut nodes = Vec::with_capacity(simplex.len() * angle_count);
        let mut weights = Vec::with_capacity(simplex.len() * angle_count);
        for (s, w) in &simplex {
            let mut radii = Vec::with_capacity(m + 1);
            radii.push((1.0 - s.iter().sum::<f64>()).max(0.0).sqrt());
            radii.extend(s.iter().map(|x| x.sqrt()));
            let norm: f64 = radii.iter().map(|r| r * r).sum::<f64>().sqrt();
            for flat in 0..angle_count {
                let mut r = flat;
                let z: Vec<Complex64> = radii
                    .iter()
                    .map(|rad| {
                        let k = r % angular;
                        r /= angular;
                        Complex64::from_polar(rad / norm, step * k as f64)
                    })
                    .collect();
                nodes.push(z);
                weights.push(w * angle_weight * scale);
            }
        }
        Ok(QuadratureRule { m, kind: RuleKind::Product { radial, angular }, nodes, weights })
    }

    /// Equal-weight uniform samples.
    pub fn monte_carlo(m: usize, samples: usize, seed: u64) -> Result<Self> {
        if m == 0 || samples == 0 {
            return Err(Error::Config("Monte Carlo rule needs m >= 1 and samples >= 1".into()));
        }
        let nodes = sample_sphere(m, samples, seed);
        let w = sphere_area(m) / samples as f64;
        Ok(QuadratureRule { m, kind: RuleKind::MonteCarlo { samples, seed }, nodes, weights: vec![w; samples] })
    }

    /// Product rule with 16 Gauss points and 32 angles for `m = 1`; a
    /// coarser product rule above.
    pub fn standard(m: usize) -> Result<Self> {
        match m {
            1 => Self::product(1, 16, 32),
            _ => Self::product(m, 8, 12),
        }
    }

    /// Same construction at twice the resolution.
    pub fn refined(&self) -> Result<Self> {
        match &self.kind {
            RuleKind::Product { radial, angular } => Self::product(self.m, 2 * radial, 2 * angular),
            RuleKind::MonteCarlo { samples, seed } => Self::monte_carlo(self.m, 2 * samples, *seed),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Polynomial degree integrated exactly, if any.
    pub fn exact_degree(&self) -> Option<usize> {
        match self.kind {
            RuleKind::Product { radial, angular } => Some((2 * (2 * radial - self.m)).min(angular - 1)),
            RuleKind::MonteCarlo { .. } => None,
        }
    }

    /// `sum w_i f(zeta_i)` against the surface measure, evaluated in parallel
    /// and reduced in node order.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&[Complex64]) -> f64 + Sync,
    {
        let vals: Vec<f64> = self.nodes.par_iter().map(|z| f(z)).collect();
        vals.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// As [`integrate`](Self::integrate) for a fallible integrand; the first
    /// failing node (in node order) is reported.
    pub fn try_integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[Complex64]) -> Result<f64> + Sync,
    {
        let vals: Vec<Result<f64>> = self.nodes.par_iter().map(|z| f(z)).collect();
        let mut acc = 0.0;
        for (v, w) in vals.into_iter().zip(&self.weights) {
            acc += v? * w;
        }
        Ok(acc)
    }

    /// Several integrals of the same node values at once.
    pub fn try_integrate_many<F>(&self, k: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&[Complex64]) -> Result<Vec<f64>> + Sync,
    {
        let vals: Vec<Result<Vec<f64>>> = self.nodes.par_iter().map(|z| f(z)).collect();
        let mut acc = vec![0.0; k];
        for (v, w) in vals.into_iter().zip(&self.weights) {
            for (a, x) in acc.iter_mut().zip(v?) {
                *a += x * w;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_area() {
        for m in 1..=2 {
            let r = QuadratureRule::product(m, 6, 8).unwrap();
            let total: f64 = r.weights.iter().sum();
            assert!((total - sphere_area(m)).abs() < 1e-12 * sphere_area(m));
            assert!(r.nodes.iter().all(|z| (z.iter().map(|c| c.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn standard_rule_is_exact_to_degree_20() {
        let r = QuadratureRule::standard(1).unwrap();
        assert!(r.exact_degree().unwrap() >= 20);
        // |zeta_0|^4 |zeta_1|^6 integrates to 2 pi^2 2! 3! / 6!.
        let exact = 2.0 * PI * PI * 2.0 * 6.0 / 720.0;
        let got = r.integrate(|z| z[0].norm_sqr().powi(2) * z[1].norm_sqr().powi(3));
        assert!((got - exact).abs() < 1e-13, "{got} {exact}");
    }
}
