//! Reeb field and unitary frames for `theta = factor * model form`.
//!
//! Exterior derivative convention: `dtheta(X, Y) = sum_ij D_ij X^i Y^j` with
//! `D_ij = d_i theta_j - d_j theta_i`, so `dx ^ dy (X, Y) = X^x Y^y - X^y Y^x`.

use num_complex::Complex64;

use super::factor::ConformalFactor;
use super::model::ContactModel;
use crate::error::{Error, Result};
use crate::jets::{linalg, CJet, Jet, JetError};

/// Frame, coframe and Levi data at a chart point.
///
/// Frame indices: `0` is the Reeb field, `1..=m` the unitary `T_a`, and
/// `m+1..=2m` their conjugates. The coframe uses the same indexing.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub m: usize,
    /// Jet order of `theta`; everything else is one order lower.
    pub order: usize,
    pub point: Vec<f64>,
    pub theta: Vec<Jet>,
    pub dtheta: Vec<Vec<Jet>>,
    pub reeb: Vec<Jet>,
    pub vectors: Vec<Vec<CJet>>,
    pub coframe: Vec<Vec<CJet>>,
    /// `-i dtheta(Z_a, conj Z_b)` for the background frame `Z_a`.
    pub levi: Vec<Vec<CJet>>,
}

/// Chart coefficients of `factor * model form`, order `order`.
pub fn eval_theta(model: &ContactModel, factor: &ConformalFactor, p: &[f64], order: usize) -> Result<Vec<Jet>> {
    let base = model.base_theta(p, order)?;
    if factor.spec().is_constant_one() {
        return Ok(base);
    }
    let f = factor.eval(model, p, order)?;
    Ok(base.iter().map(|c| c * &f).collect())
}

/// `D_ij = d_i theta_j - d_j theta_i`, one order lower than `theta`.
pub fn exterior_derivative(theta: &[Jet]) -> Result<Vec<Vec<Jet>>> {
    let n = theta.len();
    let k = theta[0].order();
    if k == 0 {
        return Err(Error::InsufficientOrder { needed: 1, have: 0, what: "exterior derivative" });
    }
    let mut d = vec![vec![Jet::zero(k - 1, n); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = &theta[j].derivative(i)? - &theta[i].derivative(j)?;
            d[j][i] = -&v;
            d[i][j] = v;
        }
    }
    Ok(d)
}

/// Solves `theta(T) = 1`, `dtheta(T, .) = 0` through `(D + theta theta^T)^T T = theta`.
pub fn reeb_field(theta: &[Jet], dtheta: &[Vec<Jet>]) -> Result<Vec<Jet>> {
    let n = theta.len();
    let k = dtheta[0][0].order();
    let th: Vec<Jet> = theta.iter().map(|c| c.lower(k)).collect();
    let a: Vec<Vec<Jet>> = (0..n)
        .map(|j| (0..n).map(|i| &dtheta[i][j] + &(&th[i] * &th[j])).collect())
        .collect();
    let b: Vec<Vec<Jet>> = th.iter().map(|c| vec![c.clone()]).collect();
    let x = linalg::solve(a, b).map_err(|e| match e {
        JetError::Singular => Error::Degenerate("Reeb system is singular".into()),
        other => other.into(),
    })?;
    Ok(x.into_iter().map(|mut r| r.swap_remove(0)).collect())
}

/// `sum_ij D_ij X^i Y^j` for complex chart vectors.
pub fn apply_two_form(d: &[Vec<Jet>], x: &[CJet], y: &[CJet]) -> CJet {
    let n = x.len();
    let mut acc = CJet::zero(x[0].order(), x[0].nvars());
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            acc = &acc + &(&x[i] * &y[j]).mul_real(&d[i][j]);
        }
    }
    acc
}

/// `sum_i w_i X^i`.
pub fn pair(w: &[CJet], x: &[CJet]) -> CJet {
    let mut acc = CJet::zero(x[0].order(), x[0].nvars());
    for (a, b) in w.iter().zip(x) {
        acc = &acc + &(a * b);
    }
    acc
}

impl FrameData {
    pub fn nvars(&self) -> usize {
        self.theta.len()
    }

    /// Order of frame and coframe jets.
    pub fn frame_order(&self) -> usize {
        self.order - 1
    }

    /// Frame index of the conjugate of `a`.
    pub fn bar(&self, a: usize) -> usize {
        bar_index(self.m, a)
    }

    /// Largest deviation of `theta^a(T_b)` from the identity (values only).
    pub fn duality_residual(&self) -> f64 {
        let n = self.nvars();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let v = pair(&self.coframe[a], &self.vectors[b]).value();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        // theta^0 must be theta itself
        for i in 0..n {
            let d = self.coframe[0][i].value() - Complex64::new(self.theta[i].value(), 0.0);
            worst = worst.max(d.norm());
        }
        worst
    }

    /// Coefficient residual of `dtheta = i sum theta^a ^ conj theta^a`, all jet
    /// coefficients included.
    pub fn levi_residual(&self) -> f64 {
        let n = self.nvars();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = CJet::zero(self.frame_order(), n);
                for a in 1..=self.m {
                    let b = self.bar(a);
                    let w = &(&self.coframe[a][i] * &self.coframe[b][j]) - &(&self.coframe[a][j] * &self.coframe[b][i]);
                    s = &s + &w;
                }
                let r = &CJet::from_real(self.dtheta[i][j].clone()) - &s.mul_i();
                worst = worst.max(r.max_abs());
            }
        }
        worst
    }

    /// `theta(T) - 1` and `dtheta(T, .)`, largest value.
    pub fn reeb_residual(&self) -> f64 {
        let n = self.nvars();
        let mut s = -1.0;
        for i in 0..n {
            s += self.theta[i].value() * self.reeb[i].value();
        }
        let mut worst = s.abs();
        for j in 0..n {
            let mut v = 0.0;
            for i in 0..n {
                v += self.dtheta[i][j].value() * self.reeb[i].value();
            }
            worst = worst.max(v.abs());
        }
        worst
    }
}

pub(crate) fn bar_index(m: usize, a: usize) -> usize {
    match a {
        0 => 0,
        a if a <= m => a + m,
        a => a - m,
    }
}

/// Unitary frame in the deterministic Cholesky gauge.
pub fn unitary_frame(model: &ContactModel, factor: &ConformalFactor, p: &[f64], order: usize) -> Result<FrameData> {
    unitary_frame_with_gauge(model, factor, p, order, None)
}

/// Same as [`unitary_frame`], with `T_a` replaced by `sum_b U_ab T_b` for a
/// constant unitary `U`.
pub fn unitary_frame_with_gauge(
    model: &ContactModel,
    factor: &ConformalFactor,
    p: &[f64],
    order: usize,
    gauge: Option<&[Vec<Complex64>]>,
) -> Result<FrameData> {
    if order < 1 {
        return Err(Error::InsufficientOrder { needed: 1, have: order, what: "unitary frame" });
    }
    let m = model.m();
    let n = model.dim();
    let theta = eval_theta(model, factor, p, order)?;
    let dtheta = exterior_derivative(&theta)?;
    let reeb = reeb_field(&theta, &dtheta)?;
    let k = order - 1;
    let z = model.cr_frame(p, k)?;
    let zbar: Vec<Vec<CJet>> = z.iter().map(|v| v.iter().map(CJet::conj).collect()).collect();

    let mut levi = vec![vec![CJet::zero(k, n); m]; m];
    for a in 0..m {
        for b in 0..m {
            // -i * dtheta(Z_a, conj Z_b)
            levi[a][b] = -apply_two_form(&dtheta, &z[a], &zbar[b]).mul_i();
        }
    }
    let chol = linalg::cholesky(&levi).map_err(|e| match e {
        JetError::Singular | JetError::Domain(_) => Error::NotPseudoconvex,
        other => other.into(),
    })?;
    let cinv = linalg::lower_triangular_inverse(&chol)?;

    let mut hol: Vec<Vec<CJet>> = (0..m)
        .map(|a| {
            (0..n)
                .map(|i| {
                    let mut acc = CJet::zero(k, n);
                    for (b, zb) in z.iter().enumerate() {
                        acc = &acc + &(&cinv[a][b] * &zb[i]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    if let Some(u) = gauge {
        hol = (0..m)
            .map(|a| {
                (0..n)
                    .map(|i| {
                        let mut acc = CJet::zero(k, n);
                        for (b, hb) in hol.iter().enumerate() {
                            acc = &acc + &hb[i].scale_c(u[a][b]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
    }

    let mut vectors = Vec::with_capacity(n);
    vectors.push(reeb.iter().map(|c| CJet::from_real(c.clone())).collect::<Vec<_>>());
    for h in &hol {
        vectors.push(h.clone());
    }
    for h in &hol {
        vectors.push(h.iter().map(CJet::conj).collect());
    }
    // Coframe rows are the rows of the inverse of [vectors as columns].
    let cols: Vec<Vec<CJet>> = (0..n).map(|i| (0..n).map(|c| vectors[c][i].clone()).collect()).collect();
    let proto = CJet::zero(k, n);
    let coframe = linalg::invert(cols, |diag| proto.splat(Complex64::new(if diag { 1.0 } else { 0.0 }, 0.0)))
        .map_err(|e| match e {
            JetError::Singular => Error::Degenerate("frame is not a basis".into()),
            other => other.into(),
        })?;

    Ok(FrameData { m, order, point: p.to_vec(), theta, dtheta, reeb, vectors, coframe, levi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::factor::FactorSpec;

    fn factor(spec: FactorSpec) -> ConformalFactor {
        ConformalFactor::new(spec).unwrap()
    }

    #[test]
    fn heisenberg_reeb_is_d_dt() {
        let h = ContactModel::heisenberg(2).unwrap();
        let p = [0.3, -0.1, 0.2, 0.5, 0.9];
        let f = unitary_frame(&h, &ConformalFactor::one(), &p, 3).unwrap();
        for (i, c) in f.reeb.iter().enumerate() {
            let target = if i == 4 { 1.0 } else { 0.0 };
            assert!((c.value() - target).abs() < 1e-15);
            assert!(c.coeffs()[1..].iter().all(|x| x.abs() < 1e-14));
        }
    }

    #[test]
    fn constant_factor_scales_reeb_and_frame() {
        let h = ContactModel::heisenberg(1).unwrap();
        let p = [0.2, 0.4, -0.3];
        let one = unitary_frame(&h, &ConformalFactor::one(), &p, 2).unwrap();
        let four = unitary_frame(&h, &factor(FactorSpec::Constant { value: 4.0 }), &p, 2).unwrap();
        assert!((four.reeb[2].value() - 0.25).abs() < 1e-15);
        for i in 0..3 {
            let a = one.vectors[1][i].value();
            let b = four.vectors[1][i].value();
            assert!((b - a * 0.5).norm() < 1e-15);
        }
    }

    #[test]
    fn random_factor_frame_is_normalised() {
        let h = ContactModel::heisenberg(2).unwrap();
        let f = factor(FactorSpec::random_trig(3));
        let fr = unitary_frame(&h, &f, &[0.1, 0.2, 0.3, -0.4, 0.5], 4).unwrap();
        assert!(fr.duality_residual() < 1e-12);
        assert!(fr.levi_residual() < 1e-10);
        assert!(fr.reeb_residual() < 1e-12);
    }

    #[test]
    fn sphere_frame_is_normalised() {
        let s = ContactModel::sphere(1).unwrap();
        let fr = unitary_frame(&s, &ConformalFactor::one(), &[0.7, -0.2, 1.1], 3).unwrap();
        assert!(fr.duality_residual() < 1e-12);
        assert!(fr.levi_residual() < 1e-10);
    }

    #[test]
    fn frame_is_deterministic() {
        let h = ContactModel::heisenberg(1).unwrap();
        let f = factor(FactorSpec::random_trig(5));
        let a = unitary_frame(&h, &f, &[0.1, 0.2, 0.3], 3).unwrap();
        let b = unitary_frame(&h, &f, &[0.1, 0.2, 0.3], 3).unwrap();
        for (x, y) in a.coframe.iter().flatten().zip(b.coframe.iter().flatten()) {
            assert_eq!(x.re.coeffs(), y.re.coeffs());
            assert_eq!(x.im.coeffs(), y.im.coeffs());
        }
    }
}
