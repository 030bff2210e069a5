//! Volume densities, the Yamabe quotient and the Sobolev gap on the sphere.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{factorial, QuadratureRule};
use crate::contact::{unitary_frame, ConformalFactor, ContactModel, FactorSpec};
use crate::engine::PHState;
use crate::error::{Error, Result};
use crate::jets::CJet;

/// Density of `theta_c ^ (dtheta_c)^m` against the surface measure:
/// `2 * 4^m * m!`.
pub fn standard_density(m: usize) -> f64 {
    2.0 * 4f64.powi(m as i32) * factorial(m)
}

/// Sharp constant `2 pi m (m + 1)`.
pub fn sharp_constant(m: usize) -> f64 {
    2.0 * PI * (m * (m + 1)) as f64
}

fn sphere(m: usize) -> Result<ContactModel> {
    ContactModel::sphere(m)
}

/// Model whose chart origin sits at `zeta`, and that origin.
pub fn chart_at(m: usize, zeta: &[Complex64]) -> Result<(ContactModel, Vec<f64>)> {
    let model = sphere(m)?.centred_at(zeta)?;
    let p = vec![0.0; model.dim()];
    Ok((model, p))
}

/// Density of `(phi theta_c) ^ d(phi theta_c)^m` at a node, from the factor
/// value: `phi^{m+1}` times [`standard_density`].
pub fn volume_density(factor: &ConformalFactor, m: usize, zeta: &[Complex64]) -> Result<f64> {
    let (model, p) = chart_at(m, zeta)?;
    let phi = factor.eval(&model, &p, 0)?.value();
    Ok(phi.powi(m as i32 + 1) * standard_density(m))
}

/// The same density computed from chart data: the top coefficient of
/// `theta ^ (dtheta)^m` (a Pfaffian expansion) divided by the Gram
/// determinant of the embedding.
pub fn volume_density_from_chart(factor: &ConformalFactor, m: usize, zeta: &[Complex64]) -> Result<f64> {
    let (model, p) = chart_at(m, zeta)?;
    let n = model.dim();
    let theta = crate::contact::eval_theta(&model, factor, &p, 1)?;
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = theta[j].derivative(i)?.value() - theta[i].derivative(j)?.value();
        }
    }
    let mut top = 0.0;
    for k in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        let sub: Vec<Vec<f64>> = keep.iter().map(|&i| keep.iter().map(|&j| d[i][j]).collect()).collect();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        top += sign * theta[k].value() * pfaffian(&sub);
    }
    top *= factorial(m);

    let amb = model.ambient(&p, 1)?;
    let mut jac = Vec::with_capacity(2 * amb.len());
    for z in &amb {
        jac.push((0..n).map(|i| z.re.derivative(i).map(|x| x.value())).collect::<std::result::Result<Vec<_>, _>>()?);
        jac.push((0..n).map(|i| z.im.derivative(i).map(|x| x.value())).collect::<std::result::Result<Vec<_>, _>>()?);
    }
    let gram = nalgebra::DMatrix::from_fn(n, n, |i, j| jac.iter().map(|row| row[i] * row[j]).sum::<f64>());
    let det = gram.determinant();
    if !(det > 0.0) {
        return Err(Error::Degenerate("embedding Jacobian is singular".into()));
    }
    Ok(top.abs() / det.sqrt())
}

/// Pfaffian of an even-dimensional antisymmetric matrix by row expansion.
pub fn pfaffian(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut acc = 0.0;
    for j in 1..n {
        if a[0][j] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&i| i != j).collect();
        let sub: Vec<Vec<f64>> = keep.iter().map(|&r| keep.iter().map(|&c| a[r][c]).collect()).collect();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * a[0][j] * pfaffian(&sub);
    }
    acc
}

/// `int g dv_theta` for `theta = factor * theta_c`.
pub fn integrate<F>(rule: &QuadratureRule, factor: &ConformalFactor, g: F) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<f64> + Sync,
{
    let m = rule.m;
    rule.try_integrate(|z| Ok(g(z)? * volume_density(factor, m, z)?))
}

pub fn volume(rule: &QuadratureRule, factor: &ConformalFactor) -> Result<f64> {
    integrate(rule, factor, |_| Ok(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YamabeValue {
    pub quotient: f64,
    pub volume: f64,
    pub total_scalar: f64,
}

/// `int R dv / (int dv)^{m/(m+1)}` with `R` from the engine at every node.
pub fn yamabe_quotient(rule: &QuadratureRule, factor: &FactorSpec) -> Result<YamabeValue> {
    let m = rule.m;
    let cf = ConformalFactor::new(factor.clone())?;
    let sums = rule.try_integrate_many(2, |z| {
        let (model, p) = chart_at(m, z)?;
        let state = PHState::new(&model, &cf, &p, 3)?;
        let phi = cf.eval(&model, &p, 0)?.value();
        let dens = phi.powi(m as i32 + 1) * standard_density(m);
        Ok(vec![state.scalar_curvature()? * dens, dens])
    })?;
    let (total_scalar, volume) = (sums[0], sums[1]);
    let mf = m as f64;
    Ok(YamabeValue { quotient: total_scalar / volume.powf(mf / (mf + 1.0)), volume, total_scalar })
}

/// A real function on the sphere with its horizontal gradient
/// `|grad_b f|^2 = 2 sum |T_a f|^2` for `theta_c`.
pub trait SphereFunction: Sync {
    fn value_and_gradient(&self, zeta: &[Complex64]) -> Result<(f64, f64)>;
}

/// `|grad_b f|^2 = |G|^2 - |zeta . G|^2` from the Wirtinger gradient
/// `G_j = df/dzeta_j`.
pub fn horizontal_gradient_sqr(zeta: &[Complex64], grad: &[Complex64]) -> f64 {
    let full: f64 = grad.iter().map(|g| g.norm_sqr()).sum();
    let radial: Complex64 = zeta.iter().zip(grad).map(|(z, g)| z * g).sum();
    full - radial.norm_sqr()
}

/// A factor descriptor viewed as a function; derivatives through the
/// `theta_c` unitary frame.
pub struct FactorFunction {
    pub m: usize,
    pub factor: ConformalFactor,
}

impl SphereFunction for FactorFunction {
    fn value_and_gradient(&self, zeta: &[Complex64]) -> Result<(f64, f64)> {
        let (model, p) = chart_at(self.m, zeta)?;
        let f = self.factor.eval(&model, &p, 1)?;
        let frame = unitary_frame(&model, &ConformalFactor::one(), &p, 2)?;
        let fc = CJet::from_real(f.clone());
        let mut acc = 0.0;
        for a in 1..=self.m {
            let mut tf = Complex64::new(0.0, 0.0);
            for (i, v) in frame.vectors[a].iter().enumerate() {
                tf += fc.derivative(i)?.value() * v.value();
            }
            acc += 2.0 * tf.norm_sqr();
        }
        Ok((f.value(), acc))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevGap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// `gap / rhs`.
    pub relative: f64,
}

/// `int (2(m+1)/m)|grad_b f|^2 + (m(m+1)/2) f^2 dv_c` minus
/// `2 pi m (m+1) (int |f|^{2(m+1)/m} dv_c)^{m/(m+1)}`.
pub fn sobolev_gap(rule: &QuadratureRule, f: &dyn SphereFunction) -> Result<SobolevGap> {
    let m = rule.m;
    let mf = m as f64;
    let p = 2.0 * (mf + 1.0) / mf;
    let dens = standard_density(m);
    let sums = rule.try_integrate_many(2, |z| {
        let (v, g) = f.value_and_gradient(z)?;
        Ok(vec![(p * g + 0.5 * mf * (mf + 1.0) * v * v) * dens, v.abs().powf(p) * dens])
    })?;
    let lhs = sums[0];
    let rhs = sharp_constant(m) * sums[1].powf(mf / (mf + 1.0));
    Ok(SobolevGap { lhs, rhs, gap: lhs - rhs, relative: (lhs - rhs) / rhs })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::sampling::sample_sphere;

    #[test]
    fn pfaffian_of_standard_form() {
        let a = vec![
            vec![0.0, 2.0, 0.0, 0.0],
            vec![-2.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 3.0],
            vec![0.0, 0.0, -3.0, 0.0],
        ];
        assert_eq!(pfaffian(&a), 6.0);
    }

    #[test]
    fn chart_density_matches_closed_form() {
        for m in 1..=2 {
            let f = ConformalFactor::new(FactorSpec::random_trig(4)).unwrap();
            for z in sample_sphere(m, 5, 3) {
                let a = volume_density(&f, m, &z).unwrap();
                let b = volume_density_from_chart(&f, m, &z).unwrap();
                assert!((a - b).abs() < 1e-10 * a, "{a} {b}");
            }
        }
    }
}
