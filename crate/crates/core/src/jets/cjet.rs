use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::jet::{mul_acc, Jet, EPS_DIV};
use super::JetError;

/// Complex-valued jet stored as a pair of real jets of one shape.
#[derive(Clone, Debug, PartialEq)]
pub struct CJet {
    pub re: Jet,
    pub im: Jet,
}

impl CJet {
    pub fn new(re: Jet, im: Jet) -> Result<CJet, JetError> {
        if re.order() != im.order() || re.nvars() != im.nvars() {
            return Err(JetError::ShapeMismatch("real and imaginary parts differ in shape".into()));
        }
        Ok(CJet { re, im })
    }

    pub fn from_real(re: Jet) -> CJet {
        let im = re.splat(0.0);
        CJet { re, im }
    }

    pub fn constant(value: Complex64, order: usize, nvars: usize) -> CJet {
        CJet {
            re: Jet::constant(value.re, order, nvars),
            im: Jet::constant(value.im, order, nvars),
        }
    }

    pub fn zero(order: usize, nvars: usize) -> CJet {
        CJet::constant(Complex64::new(0.0, 0.0), order, nvars)
    }

    pub fn order(&self) -> usize {
        self.re.order()
    }

    pub fn nvars(&self) -> usize {
        self.re.nvars()
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn splat(&self, v: Complex64) -> CJet {
        CJet { re: self.re.splat(v.re), im: self.re.splat(v.im) }
    }

    pub fn lower(&self, k: usize) -> CJet {
        CJet { re: self.re.lower(k), im: self.im.lower(k) }
    }

    pub fn try_lower(&self, k: usize) -> Result<CJet, JetError> {
        Ok(CJet { re: self.re.try_lower(k)?, im: self.im.try_lower(k)? })
    }

    pub fn conj(&self) -> CJet {
        CJet { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, s: f64) -> CJet {
        CJet { re: self.re.scale(s), im: self.im.scale(s) }
    }

    /// Multiplication by a complex constant.
    pub fn scale_c(&self, s: Complex64) -> CJet {
        CJet {
            re: &self.re.scale(s.re) - &self.im.scale(s.im),
            im: &self.re.scale(s.im) + &self.im.scale(s.re),
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> CJet {
        CJet { re: -&self.im, im: self.re.clone() }
    }

    pub fn mul_real(&self, r: &Jet) -> CJet {
        CJet { re: &self.re * r, im: &self.im * r }
    }

    pub fn add_c(&self, s: Complex64) -> CJet {
        CJet { re: self.re.add_scalar(s.re), im: self.im.add_scalar(s.im) }
    }

    pub fn try_add(&self, o: &CJet) -> Result<CJet, JetError> {
        Ok(CJet { re: self.re.try_add(&o.re)?, im: self.im.try_add(&o.im)? })
    }

    pub fn try_sub(&self, o: &CJet) -> Result<CJet, JetError> {
        Ok(CJet { re: self.re.try_sub(&o.re)?, im: self.im.try_sub(&o.im)? })
    }

    pub fn try_mul(&self, o: &CJet) -> Result<CJet, JetError> {
        if self.order() != o.order() || self.nvars() != o.nvars() {
            return Err(JetError::ShapeMismatch(format!(
                "complex product of orders {} and {}",
                self.order(),
                o.order()
            )));
        }
        let l = self.re.layout();
        let k = self.order();
        let n = self.re.coeffs().len();
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        mul_acc(l, k, self.re.coeffs(), o.re.coeffs(), &mut re);
        mul_acc(l, k, self.im.coeffs(), o.im.coeffs(), &mut tmp);
        re.iter_mut().zip(&tmp).for_each(|(a, b)| *a -= b);
        mul_acc(l, k, self.re.coeffs(), o.im.coeffs(), &mut im);
        mul_acc(l, k, self.im.coeffs(), o.re.coeffs(), &mut im);
        let nv = self.nvars();
        Ok(CJet {
            re: Jet::from_coeffs(re, k, nv)?,
            im: Jet::from_coeffs(im, k, nv)?,
        })
    }

    /// `|z|^2` as a real jet.
    pub fn norm_sqr(&self) -> Jet {
        &self.re.square() + &self.im.square()
    }

    pub fn recip(&self) -> Result<CJet, JetError> {
        if self.value().norm() <= EPS_DIV {
            return Err(JetError::DivisionByZero);
        }
        let inv = self.norm_sqr().recip()?;
        Ok(self.conj().mul_real(&inv))
    }

    pub fn try_div(&self, o: &CJet) -> Result<CJet, JetError> {
        self.try_mul(&o.recip()?)
    }

    pub fn exp(&self) -> CJet {
        let r = self.re.exp();
        CJet { re: &r * &self.im.cos(), im: &r * &self.im.sin() }
    }

    /// Principal logarithm; the branch is fixed by the value.
    pub fn ln(&self) -> Result<CJet, JetError> {
        let z0 = self.value();
        if z0.norm() <= EPS_DIV {
            return Err(JetError::Domain("log of zero".into()));
        }
        // log z = log z0 + sum (-1)^(k+1) (w / z0)^k / k with w = z - z0.
        let mut w = self.clone();
        w.re = w.re.add_scalar(-z0.re);
        w.im = w.im.add_scalar(-z0.im);
        let q = w.scale_c(z0.inv());
        let k = self.order();
        let mut acc = self.splat(Complex64::new(0.0, 0.0));
        for j in (1..=k).rev() {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            acc = acc.add_c(Complex64::new(sign / j as f64, 0.0));
            acc = &acc * &q;
        }
        Ok(acc.add_c(z0.ln()))
    }

    pub fn derivative(&self, var: usize) -> Result<CJet, JetError> {
        Ok(CJet { re: self.re.derivative(var)?, im: self.im.derivative(var)? })
    }

    pub fn max_abs(&self) -> f64 {
        self.re.max_abs().max(self.im.max_abs())
    }
}

impl Add<&CJet> for &CJet {
    type Output = CJet;
    fn add(self, rhs: &CJet) -> CJet {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub<&CJet> for &CJet {
    type Output = CJet;
    fn sub(self, rhs: &CJet) -> CJet {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul<&CJet> for &CJet {
    type Output = CJet;
    fn mul(self, rhs: &CJet) -> CJet {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, rhs: CJet) -> CJet {
        &self + &rhs
    }
}

impl Sub for CJet {
    type Output = CJet;
    fn sub(self, rhs: CJet) -> CJet {
        &self - &rhs
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, rhs: CJet) -> CJet {
        &self * &rhs
    }
}

impl Neg for &CJet {
    type Output = CJet;
    fn neg(self) -> CJet {
        CJet { re: -&self.re, im: -&self.im }
    }
}

impl Neg for CJet {
    type Output = CJet;
    fn neg(self) -> CJet {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_seed(order: usize) -> CJet {
        // z = x + i y at (0.3, -0.4)
        CJet::new(
            Jet::seed_variable(0, 0.3, order, 2).unwrap(),
            Jet::seed_variable(1, -0.4, order, 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn conjugation_flips_imaginary_part_only() {
        let z = z_seed(3);
        let c = z.conj();
        assert_eq!(c.re, z.re);
        assert_eq!(c.im, -&z.im);
    }

    #[test]
    fn log_exp_roundtrip() {
        let z = z_seed(4).add_c(Complex64::new(1.2, 0.5));
        let back = z.ln().unwrap().exp();
        assert!((&back - &z).max_abs() < 1e-13);
    }

    #[test]
    fn holomorphic_square_satisfies_cauchy_riemann() {
        let z = z_seed(3);
        let w = &z * &z;
        // d/dx Re = d/dy Im, d/dy Re = -d/dx Im
        let ux = w.re.derivative(0).unwrap();
        let vy = w.im.derivative(1).unwrap();
        let uy = w.re.derivative(1).unwrap();
        let vx = w.im.derivative(0).unwrap();
        assert!((&ux - &vy).max_abs() < 1e-15);
        assert!((&uy + &vx).max_abs() < 1e-15);
    }

    #[test]
    fn reciprocal_times_self() {
        let z = z_seed(4).add_c(Complex64::new(0.5, 0.1));
        let one = &z * &z.recip().unwrap();
        assert!((one.value() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(one.re.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
        assert!(one.im.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
    }
}
