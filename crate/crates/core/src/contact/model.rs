//! Chart-level models: the Heisenberg group and the sphere through the Cayley
//! transform.
//!
//! Chart coordinates are `(x_1, y_1, ..., x_m, y_m, t)` with `z_a = x_a + i y_a`.
//! The Heisenberg form is `dt + 2 sum (x dy - y dx)`; the sphere carries
//! `theta_c = i sum (zeta dzeta-bar - zeta-bar dzeta)`, whose pullback is
//! `lambda * theta_H` with `lambda = 4 / |i + w|^2`, `w = t + i|z|^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::{CJet, Jet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Heisenberg,
    Sphere,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "heisenberg" | "h" => Ok(ModelKind::Heisenberg),
            "sphere" | "sphere-cayley" | "s" => Ok(ModelKind::Sphere),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// A model together with a unitary post-rotation of the ambient sphere.
///
/// The rotation lets every sphere point be placed at the chart origin. On the
/// Heisenberg group the ambient coordinates are still the Cayley image, which
/// gives factors a common set of ambient variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactModel {
    kind: ModelKind,
    m: usize,
    rotation: Vec<Vec<Complex64>>,
}

impl ContactModel {
    pub fn new(kind: ModelKind, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("CR dimension must be at least 1".into()));
        }
        Ok(ContactModel { kind, m, rotation: identity(m + 1) })
    }

    pub fn heisenberg(m: usize) -> Result<Self> {
        Self::new(ModelKind::Heisenberg, m)
    }

    pub fn sphere(m: usize) -> Result<Self> {
        Self::new(ModelKind::Sphere, m)
    }

    /// Same model, with the ambient image rotated so that the chart origin maps
    /// to `zeta`.
    pub fn centred_at(&self, zeta: &[Complex64]) -> Result<Self> {
        if zeta.len() != self.m + 1 {
            return Err(Error::InadmissiblePoint("ambient point has wrong dimension".into()));
        }
        let norm: f64 = zeta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InadmissiblePoint("ambient point is not on the unit sphere".into()));
        }
        Ok(ContactModel { kind: self.kind, m: self.m, rotation: unitary_with_first_column(zeta) })
    }

    /// Applies an extra unitary on top of the current rotation.
    pub fn rotated(&self, u: &[Vec<Complex64>]) -> Self {
        let n = self.m + 1;
        let mut r = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    r[i][j] += u[i][k] * self.rotation[k][j];
                }
            }
        }
        ContactModel { kind: self.kind, m: self.m, rotation: r }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Chart dimension `2m + 1`.
    pub fn dim(&self) -> usize {
        2 * self.m + 1
    }

    pub fn rotation(&self) -> &[Vec<Complex64>] {
        &self.rotation
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::InadmissiblePoint(format!(
                "expected {} chart coordinates, got {}",
                self.dim(),
                p.len()
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InadmissiblePoint("non-finite coordinate".into()));
        }
        Ok(())
    }

    /// Seeded coordinate jets in chart order.
    pub fn coordinates(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.check_point(p)?;
        let n = self.dim();
        (0..n)
            .map(|i| Jet::seed_variable(i, p[i], order, n).map_err(Error::from))
            .collect()
    }

    /// Coefficients of the flat form `dt + 2 sum (x dy - y dx)`.
    pub fn heisenberg_theta(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        let xs = self.coordinates(p, order)?;
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        for a in 0..self.m {
            out.push(xs[2 * a + 1].scale(-2.0));
            out.push(xs[2 * a].scale(2.0));
        }
        out.push(xs[n - 1].splat(1.0));
        Ok(out)
    }

    /// `4 / (t^2 + (1 + |z|^2)^2)` on the sphere, `1` on the Heisenberg group.
    pub fn lambda(&self, p: &[f64], order: usize) -> Result<Jet> {
        let xs = self.coordinates(p, order)?;
        match self.kind {
            ModelKind::Heisenberg => Ok(xs[0].splat(1.0)),
            ModelKind::Sphere => {
                let n = self.dim();
                let r2 = radius_sqr(&xs, self.m);
                let t = &xs[n - 1];
                let d = &t.square() + &(&r2 + 1.0).square();
                Ok(d.recip()?.scale(4.0))
            }
        }
    }

    /// The model form: `theta_H` or `lambda * theta_H`.
    pub fn base_theta(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        let th = self.heisenberg_theta(p, order)?;
        match self.kind {
            ModelKind::Heisenberg => Ok(th),
            ModelKind::Sphere => {
                let lam = self.lambda(p, order)?;
                Ok(th.iter().map(|c| c * &lam).collect())
            }
        }
    }

    /// Rotated Cayley image `(zeta_0, ..., zeta_m)` as complex jets.
    pub fn ambient(&self, p: &[f64], order: usize) -> Result<Vec<CJet>> {
        let xs = self.coordinates(p, order)?;
        let n = self.dim();
        let r2 = radius_sqr(&xs, self.m);
        let t = &xs[n - 1];
        let denom = CJet::new(t.clone(), &r2 + 1.0)?;
        let inv = denom.recip()?;
        let num0 = CJet::new(-t, (-&r2) + 1.0)?;
        let mut raw = Vec::with_capacity(self.m + 1);
        raw.push(&num0 * &inv);
        for a in 0..self.m {
            let z = CJet::new(xs[2 * a].clone(), xs[2 * a + 1].clone())?;
            raw.push((&z * &inv).scale(2.0));
        }
        let zero = raw[0].splat(Complex64::new(0.0, 0.0));
        let mut out = Vec::with_capacity(self.m + 1);
        for row in &self.rotation {
            let mut acc = zero.clone();
            for (u, z) in row.iter().zip(&raw) {
                if *u != Complex64::new(0.0, 0.0) {
                    acc = &acc + &z.scale_c(*u);
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Pullback of `theta_c` computed from the ambient map itself.
    pub fn pullback_theta_c(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        let zeta = self.ambient(p, order + 1)?;
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Jet::zero(order, n);
            for z in &zeta {
                let dz = z.derivative(i)?;
                let zl = z.lower(order);
                // 2 Im(conj(zeta) d_i zeta)
                let im = &(&zl.re * &dz.im) - &(&zl.im * &dz.re);
                acc = &acc + &im.scale(2.0);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Background CR frame `Z_a = d/dz_a + i conj(z_a) d/dt`, chart components.
    pub fn cr_frame(&self, p: &[f64], order: usize) -> Result<Vec<Vec<CJet>>> {
        let xs = self.coordinates(p, order)?;
        let n = self.dim();
        let zero = CJet::zero(order, n);
        let mut frame = Vec::with_capacity(self.m);
        for a in 0..self.m {
            let mut v = vec![zero.clone(); n];
            v[2 * a] = zero.splat(Complex64::new(0.5, 0.0));
            v[2 * a + 1] = zero.splat(Complex64::new(0.0, -0.5));
            v[n - 1] = CJet::new(xs[2 * a + 1].clone(), xs[2 * a].clone())?;
            frame.push(v);
        }
        Ok(frame)
    }

    /// Chart point of an ambient sphere point (before this model's rotation is
    /// undone the point is mapped back by `rotation^*`).
    pub fn chart_of(&self, zeta: &[Complex64]) -> Result<Vec<f64>> {
        let n1 = self.m + 1;
        if zeta.len() != n1 {
            return Err(Error::InadmissiblePoint("ambient point has wrong dimension".into()));
        }
        let mut z = vec![Complex64::new(0.0, 0.0); n1];
        for (j, zj) in z.iter_mut().enumerate() {
            for (i, zi) in zeta.iter().enumerate() {
                *zj += self.rotation[i][j].conj() * zi;
            }
        }
        let one = Complex64::new(1.0, 0.0);
        if (one + z[0]).norm() < 1e-12 {
            return Err(Error::InadmissiblePoint("excluded point of the Cayley chart".into()));
        }
        let i = Complex64::new(0.0, 1.0);
        let w = i * (one - z[0]) / (one + z[0]);
        let mut p = Vec::with_capacity(2 * self.m + 1);
        for zj in &z[1..] {
            let za = i * zj / (one + z[0]);
            p.push(za.re);
            p.push(za.im);
        }
        p.push(w.re);
        Ok(p)
    }
}

fn radius_sqr(xs: &[Jet], m: usize) -> Jet {
    let mut r2 = xs[0].splat(0.0);
    for v in xs.iter().take(2 * m) {
        r2 = &r2 + &v.square();
    }
    r2
}

pub(crate) fn identity(n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

/// Unitary matrix whose first column is the unit vector `v`, completed by
/// Gram-Schmidt against the standard basis.
pub fn unitary_with_first_column(v: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = v.len();
    let mut cols: Vec<Vec<Complex64>> = vec![v.to_vec()];
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[k] = Complex64::new(1.0, 0.0);
        for c in &cols {
            let dot: Complex64 = c.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
            for (ei, ci) in e.iter_mut().zip(c) {
                *ei -= dot * ci;
            }
        }
        let nrm = e.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            cols.push(e.into_iter().map(|x| x / nrm).collect());
        }
    }
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_lands_on_sphere() {
        let s = ContactModel::sphere(2).unwrap();
        let p = [0.3, -0.2, 0.1, 0.5, 0.7];
        let z = s.ambient(&p, 1).unwrap();
        let nrm: f64 = z.iter().map(|c| c.value().norm_sqr()).sum();
        assert!((nrm - 1.0).abs() < 1e-14);
        let back = s.chart_of(&z.iter().map(|c| c.value()).collect::<Vec<_>>()).unwrap();
        for (a, b) in back.iter().zip(&p) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_at_origin_is_four() {
        let s = ContactModel::sphere(1).unwrap();
        assert!((s.lambda(&[0.0, 0.0, 0.0], 2).unwrap().value() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn pullback_matches_lambda_theta() {
        let s = ContactModel::sphere(1).unwrap();
        let p = [0.4, -0.9, 1.3];
        let a = s.pullback_theta_c(&p, 3).unwrap();
        let b = s.base_theta(&p, 3).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).max_abs() < 1e-12);
        }
    }

    #[test]
    fn centred_chart_maps_origin_to_point() {
        let s = ContactModel::sphere(1).unwrap();
        let zeta = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let c = s.centred_at(&zeta).unwrap();
        let img = c.ambient(&[0.0, 0.0, 0.0], 0).unwrap();
        assert!((img[0].value() - zeta[0]).norm() < 1e-14);
        assert!((img[1].value() - zeta[1]).norm() < 1e-14);
    }

    #[test]
    fn frame_is_horizontal() {
        let h = ContactModel::heisenberg(2).unwrap();
        let p = [0.1, 0.2, -0.3, 0.4, 0.5];
        let th = h.heisenberg_theta(&p, 1).unwrap();
        for z in h.cr_frame(&p, 1).unwrap() {
            let mut s = Complex64::new(0.0, 0.0);
            for (c, v) in th.iter().zip(&z) {
                s += c.value() * v.value();
            }
            assert!(s.norm() < 1e-15);
        }
    }
}
