//! Real polynomial bases on the sphere and positive functions built from them.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::functional::{horizontal_gradient_sqr, SphereFunction};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};

/// Restrictions of real polynomials of degree `<= L` in `(Re zeta_j, Im zeta_j)`,
/// orthonormalized against the normalized surface measure of a rule.
///
/// The first element is the constant `1`. On `S^3` with `L = 4` there are 55
/// elements (the dimension of harmonics of degree `<= 4`).
#[derive(Clone, Debug)]
pub struct FunctionBasis {
    pub m: usize,
    pub degree: usize,
    exponents: Vec<Vec<u8>>,
    /// Row `k`: monomial coefficients of element `k`.
    coeffs: Vec<Vec<f64>>,
}

/// Element values and Wirtinger gradients at the nodes of a rule.
#[derive(Clone, Debug)]
pub struct NodeTable {
    pub values: Vec<Vec<f64>>,
    pub gradients: Vec<Vec<Vec<Complex64>>>,
}

fn exponent_list(vars: usize, degree: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0u8; vars];
        collect(&mut cur, 0, d, &mut out);
    }
    out
}

fn collect(cur: &mut Vec<u8>, pos: usize, left: usize, out: &mut Vec<Vec<u8>>) {
    if pos == cur.len() - 1 {
        cur[pos] = left as u8;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k as u8;
        collect(cur, pos + 1, left - k, out);
    }
    cur[pos] = 0;
}

fn real_coords(zeta: &[Complex64]) -> Vec<f64> {
    zeta.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn monomials(exps: &[Vec<u8>], x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = x.len();
    let mut vals = Vec::with_capacity(exps.len());
    let mut grads = Vec::with_capacity(exps.len());
    for e in exps {
        let v: f64 = e.iter().zip(x).map(|(&k, xi)| xi.powi(k as i32)).product();
        let g: Vec<f64> = (0..n)
            .map(|i| {
                if e[i] == 0 {
                    return 0.0;
                }
                let mut p = e[i] as f64 * x[i].powi(e[i] as i32 - 1);
                for (j, (&k, xj)) in e.iter().zip(x).enumerate() {
                    if j != i {
                        p *= xj.powi(k as i32);
                    }
                }
                p
            })
            .collect();
        vals.push(v);
        grads.push(g);
    }
    (vals, grads)
}

impl FunctionBasis {
    pub fn new(rule: &QuadratureRule, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Config("basis degree must be at least 1".into()));
        }
        if let Some(d) = rule.exact_degree() {
            if d < 2 * degree {
                return Err(Error::Config(format!("rule is exact to degree {d}, basis needs {}", 2 * degree)));
            }
        }
        let m = rule.m;
        let exps = exponent_list(2 * (m + 1), degree);
        let total: f64 = rule.weights.iter().sum();
        let w: Vec<f64> = rule.weights.iter().map(|x| x / total).collect();
        let table: Vec<Vec<f64>> =
            rule.nodes.iter().map(|z| monomials(&exps, &real_coords(z)).0).collect();
        let nm = exps.len();
        let inner = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).zip(&w).map(|((x, y), wi)| x * y * wi).sum() };

        let mut kept_vals: Vec<Vec<f64>> = Vec::new();
        let mut kept_coeffs: Vec<Vec<f64>> = Vec::new();
        for j in 0..nm {
            let mut vals: Vec<f64> = table.iter().map(|row| row[j]).collect();
            let mut coeff = vec![0.0; nm];
            coeff[j] = 1.0;
            let start = inner(&vals, &vals).sqrt();
            for _ in 0..2 {
                for (kv, kc) in kept_vals.iter().zip(&kept_coeffs) {
                    let r = inner(&vals, kv);
                    for (v, x) in vals.iter_mut().zip(kv) {
                        *v -= r * x;
                    }
                    for (c, x) in coeff.iter_mut().zip(kc) {
                        *c -= r * x;
                    }
                }
            }
            let norm = inner(&vals, &vals).sqrt();
            if norm <= 1e-9 * start {
                continue;
            }
            vals.iter_mut().for_each(|v| *v /= norm);
            coeff.iter_mut().for_each(|c| *c /= norm);
            kept_vals.push(vals);
            kept_coeffs.push(coeff);
        }
        Ok(FunctionBasis { m, degree, exponents: exps, coeffs: kept_coeffs })
    }

    /// Indices of the linear elements `Re zeta_j`, `Im zeta_j`.
    pub fn linear_range(&self) -> std::ops::Range<usize> {
        1..1 + 2 * (self.m + 1)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Element values and Wirtinger gradients `dY_k/dzeta_j` at a point.
    pub fn eval(&self, zeta: &[Complex64]) -> (Vec<f64>, Vec<Vec<Complex64>>) {
        let x = real_coords(zeta);
        let (mv, mg) = monomials(&self.exponents, &x);
        let n1 = self.m + 1;
        let mut vals = Vec::with_capacity(self.len());
        let mut grads = Vec::with_capacity(self.len());
        for row in &self.coeffs {
            let mut v = 0.0;
            let mut g = vec![0.0; 2 * n1];
            for (c, (val, grad)) in row.iter().zip(mv.iter().zip(&mg)) {
                if *c == 0.0 {
                    continue;
                }
                v += c * val;
                for (gi, di) in g.iter_mut().zip(grad) {
                    *gi += c * di;
                }
            }
            vals.push(v);
            grads.push((0..n1).map(|j| Complex64::new(0.5 * g[2 * j], -0.5 * g[2 * j + 1])).collect());
        }
        (vals, grads)
    }

    pub fn tabulate(&self, rule: &QuadratureRule) -> NodeTable {
        let (values, gradients) = rule.nodes.iter().map(|z| self.eval(z)).unzip();
        NodeTable { values, gradients }
    }

    pub fn element(&self, coeffs: Vec<f64>) -> Result<BasisFunction<'_>> {
        if coeffs.len() != self.len() {
            return Err(Error::Precondition(format!("expected {} coefficients, got {}", self.len(), coeffs.len())));
        }
        Ok(BasisFunction { basis: self, coeffs })
    }

    /// Seeded element with normal coefficients of standard deviation `scale`
    /// (the constant coefficient is zero).
    pub fn random_coeffs(&self, seed: u64, scale: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.len())
            .map(|k| {
                let x: f64 = StandardNormal.sample(&mut rng);
                if k == 0 {
                    0.0
                } else {
                    scale * x
                }
            })
            .collect()
    }
}

/// `f = exp(sum c_k Y_k)`.
#[derive(Clone, Debug)]
pub struct BasisFunction<'a> {
    pub basis: &'a FunctionBasis,
    pub coeffs: Vec<f64>,
}

impl BasisFunction<'_> {
    /// Value and Wirtinger gradient.
    pub fn eval(&self, zeta: &[Complex64]) -> (f64, Vec<Complex64>) {
        let (vals, grads) = self.basis.eval(zeta);
        let s: f64 = vals.iter().zip(&self.coeffs).map(|(y, c)| y * c).sum();
        let f = s.exp();
        let mut g = vec![Complex64::new(0.0, 0.0); self.basis.m + 1];
        for (gk, c) in grads.iter().zip(&self.coeffs) {
            for (gj, d) in g.iter_mut().zip(gk) {
                *gj += d * (c * f);
            }
        }
        (f, g)
    }
}

impl SphereFunction for BasisFunction<'_> {
    fn value_and_gradient(&self, zeta: &[Complex64]) -> Result<(f64, f64)> {
        let (f, g) = self.eval(zeta);
        Ok((f, horizontal_gradient_sqr(zeta, &g)))
    }
}
