use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::layout::{layout, JetLayout};
use super::JetError;

/// Guard against exact zero divisors only.
pub const EPS_DIV: f64 = 1e-300;

/// Truncated multivariate Taylor expansion of a real function at a point.
///
/// Coefficient `I` multiplies `(x - x0)^I`; the partial derivative is the
/// coefficient times `I!`.
#[derive(Clone)]
pub struct Jet {
    layout: &'static JetLayout,
    order: usize,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("nvars", &self.nvars())
            .field("coeffs", &self.c)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.nvars() == other.nvars() && self.c == other.c
    }
}

impl Jet {
    pub fn constant(value: f64, order: usize, nvars: usize) -> Jet {
        assert!(nvars >= 1, "a jet needs at least one variable");
        let l = layout(nvars, order);
        let mut c = vec![0.0; l.count(order)];
        c[0] = value;
        Jet { layout: l, order, c }
    }

    pub fn zero(order: usize, nvars: usize) -> Jet {
        Jet::constant(0.0, order, nvars)
    }

    /// The coordinate function `x_i` expanded at `x_i = x0`.
    pub fn seed_variable(i: usize, x0: f64, order: usize, nvars: usize) -> Result<Jet, JetError> {
        if i >= nvars {
            return Err(JetError::IndexOutOfRange { index: i, nvars });
        }
        let mut j = Jet::constant(x0, order, nvars);
        if order >= 1 {
            // Degree-one multi-indices follow the constant in descending
            // lexicographic order, so e_i sits at position 1 + i.
            j.c[1 + i] = 1.0;
        }
        Ok(j)
    }

    /// Builds a jet from raw coefficients in layout order.
    pub fn from_coeffs(coeffs: Vec<f64>, order: usize, nvars: usize) -> Result<Jet, JetError> {
        let l = layout(nvars, order);
        if coeffs.len() != l.count(order) {
            return Err(JetError::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                l.count(order),
                coeffs.len()
            )));
        }
        Ok(Jet { layout: l, order, c: coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars()
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn layout(&self) -> &'static JetLayout {
        self.layout
    }

    pub fn coeff(&self, index: &[u8]) -> Result<f64, JetError> {
        self.check_index(index)?;
        let idx = self.layout.index_of(index).ok_or(JetError::OrderExceeded {
            requested: index.iter().map(|&e| e as usize).sum(),
            order: self.order,
        })?;
        Ok(self.c[idx])
    }

    /// `I! * coeff[I]`.
    pub fn partial(&self, index: &[u8]) -> Result<f64, JetError> {
        self.check_index(index)?;
        let idx = self.layout.index_of(index).expect("checked above");
        Ok(self.c[idx] * self.layout.index_factorial(idx))
    }

    fn check_index(&self, index: &[u8]) -> Result<(), JetError> {
        if index.len() != self.nvars() {
            return Err(JetError::ShapeMismatch(format!(
                "multi-index has {} entries for {} variables",
                index.len(),
                self.nvars()
            )));
        }
        let deg: usize = index.iter().map(|&e| e as usize).sum();
        if deg > self.order {
            return Err(JetError::OrderExceeded { requested: deg, order: self.order });
        }
        Ok(())
    }

    /// Drops every coefficient of degree above `k`.
    pub fn lower(&self, k: usize) -> Jet {
        self.try_lower(k).expect("cannot raise the order of a jet")
    }

    pub fn try_lower(&self, k: usize) -> Result<Jet, JetError> {
        if k > self.order {
            return Err(JetError::OrderExceeded { requested: k, order: self.order });
        }
        Ok(Jet {
            layout: self.layout,
            order: k,
            c: self.c[..self.layout.count(k)].to_vec(),
        })
    }

    /// Constant with the same shape.
    pub fn splat(&self, value: f64) -> Jet {
        let mut c = vec![0.0; self.c.len()];
        c[0] = value;
        Jet { layout: self.layout, order: self.order, c }
    }

    fn same_shape(&self, other: &Jet) -> Result<(), JetError> {
        if self.order != other.order || self.nvars() != other.nvars() {
            return Err(JetError::ShapeMismatch(format!(
                "(order {}, nvars {}) vs (order {}, nvars {})",
                self.order,
                self.nvars(),
                other.order,
                other.nvars()
            )));
        }
        Ok(())
    }

    fn wider(&self, other: &Jet) -> &'static JetLayout {
        widest(self.layout, other.layout)
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_shape(other)?;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect();
        Ok(Jet { layout: self.wider(other), order: self.order, c })
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_shape(other)?;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| a - b).collect();
        Ok(Jet { layout: self.wider(other), order: self.order, c })
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_shape(other)?;
        let l = self.wider(other);
        let mut out = vec![0.0; self.c.len()];
        mul_acc(l, self.order, &self.c, &other.c, &mut out);
        Ok(Jet { layout: l, order: self.order, c: out })
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_shape(other)?;
        self.try_mul(&other.recip()?)
    }

    /// `self + a * b`, all of one shape.
    pub fn fma(&self, a: &Jet, b: &Jet) -> Jet {
        self.same_shape(a).and_then(|_| self.same_shape(b)).unwrap_or_else(|e| panic!("{e}"));
        let l = widest(widest(self.layout, a.layout), b.layout);
        let mut out = self.c.clone();
        mul_acc(l, self.order, &a.c, &b.c, &mut out);
        Jet { layout: l, order: self.order, c: out }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            layout: self.layout,
            order: self.order,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    pub fn square(&self) -> Jet {
        self * self
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let a0 = self.value();
        if a0.abs() <= EPS_DIV {
            return Err(JetError::DivisionByZero);
        }
        let inv = 1.0 / a0;
        let mut coef = Vec::with_capacity(self.order + 1);
        let mut p = inv;
        for _ in 0..=self.order {
            coef.push(p);
            p *= -inv;
        }
        Ok(self.compose(&coef))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut coef = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                f *= k as f64;
            }
            coef.push(e / f);
        }
        self.compose(&coef)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let a0 = self.value();
        if a0 <= 0.0 {
            return Err(JetError::Domain(format!("log of non-positive value {a0}")));
        }
        let mut coef = vec![a0.ln()];
        let mut p = 1.0;
        for k in 1..=self.order {
            p /= a0;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            coef.push(sign * p / k as f64);
        }
        Ok(self.compose(&coef))
    }

    /// `self^r` for a real exponent; requires a positive value.
    pub fn powf(&self, r: f64) -> Result<Jet, JetError> {
        let a0 = self.value();
        if a0 <= 0.0 {
            return Err(JetError::Domain(format!("real power of non-positive value {a0}")));
        }
        let mut coef = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        let base = a0.powf(r);
        let mut p = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                binom *= (r - (k as f64 - 1.0)) / k as f64;
                p /= a0;
            }
            coef.push(base * binom * p);
        }
        Ok(self.compose(&coef))
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        if self.value() <= 0.0 {
            return Err(JetError::Domain(format!("sqrt of non-positive value {}", self.value())));
        }
        self.powf(0.5)
    }

    /// Integer power by repeated multiplication; valid for any sign.
    pub fn powi(&self, n: u32) -> Jet {
        let mut out = self.splat(1.0);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        out
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&trig_coeffs(s, c, self.order))
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        // cos(a + x) = sin(a + pi/2 + x)
        self.compose(&trig_coeffs(c, -s, self.order))
    }

    /// `sum_k coef[k] * (self - value)^k`.
    pub(crate) fn compose(&self, coef: &[f64]) -> Jet {
        let mut shifted = self.clone();
        shifted.c[0] = 0.0;
        let top = coef.len().min(self.order + 1);
        let mut acc = self.splat(coef[top - 1]);
        for k in (0..top - 1).rev() {
            acc = &acc * &shifted;
            acc.c[0] += coef[k];
        }
        acc
    }

    /// `d/dx_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Result<Jet, JetError> {
        if var >= self.nvars() {
            return Err(JetError::IndexOutOfRange { index: var, nvars: self.nvars() });
        }
        if self.order == 0 {
            return Err(JetError::OrderExceeded { requested: 1, order: 0 });
        }
        let k = self.order - 1;
        let n = self.layout.count(k);
        let table = self.layout.deriv_table(var);
        let mut c = vec![0.0; n];
        for (i, slot) in c.iter_mut().enumerate() {
            let (up, f) = table[i];
            *slot = f * self.c[up as usize];
        }
        Ok(Jet { layout: self.layout, order: k, c })
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Evaluates the truncated polynomial at displacement `dx`.
    pub fn eval(&self, dx: &[f64]) -> f64 {
        let mut s = 0.0;
        for (idx, &c) in self.c.iter().enumerate() {
            let e = self.layout.exponent(idx);
            let mut t = c;
            for (v, &p) in e.iter().enumerate() {
                if p > 0 {
                    t *= dx[v].powi(p as i32);
                }
            }
            s += t;
        }
        s
    }
}

fn widest(a: &'static JetLayout, b: &'static JetLayout) -> &'static JetLayout {
    if a.max_order() >= b.max_order() {
        a
    } else {
        b
    }
}

fn trig_coeffs(s: f64, c: f64, order: usize) -> Vec<f64> {
    // Derivatives of sin at a: sin, cos, -sin, -cos, ...
    let cyc = [s, c, -s, -c];
    let mut out = Vec::with_capacity(order + 1);
    let mut f = 1.0;
    for k in 0..=order {
        if k > 0 {
            f *= k as f64;
        }
        out.push(cyc[k % 4] / f);
    }
    out
}

#[inline]
pub(crate) fn mul_acc(l: &JetLayout, order: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    let (li, ri, oi) = l.mul_triples(order);
    for ((&i, &j), &k) in li.iter().zip(ri).zip(oi) {
        out[k as usize] += a[i as usize] * b[j as usize];
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self.add_scalar(-rhs)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self.c.iter_mut().for_each(|x| *x *= rhs);
        self
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<f64> for &Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_jet(rng: &mut ChaCha8Rng, value: f64, order: usize, nvars: usize) -> Jet {
        let n = layout(nvars, order).count(order);
        let mut c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        c[0] = value;
        Jet::from_coeffs(c, order, nvars).unwrap()
    }

    #[test]
    fn square_of_seed() {
        let x = Jet::seed_variable(0, 3.0, 2, 1).unwrap();
        let y = x.square();
        assert_eq!(y.value(), 9.0);
        assert_eq!(y.partial(&[1]).unwrap(), 6.0);
        assert_eq!(y.partial(&[2]).unwrap(), 2.0);
    }

    #[test]
    fn order_zero_is_plain_scalar() {
        let x = Jet::seed_variable(0, 5.0, 0, 1).unwrap();
        assert_eq!(x.coeffs(), &[5.0]);
        assert!(matches!(x.partial(&[1]), Err(JetError::OrderExceeded { .. })));
        assert!(x.derivative(0).is_err());
    }

    #[test]
    fn independent_variable() {
        let y = Jet::seed_variable(1, 2.0, 3, 2).unwrap();
        assert_eq!(y.partial(&[1, 0]).unwrap(), 0.0);
        assert_eq!(y.partial(&[0, 1]).unwrap(), 1.0);
    }

    #[test]
    fn seed_out_of_range() {
        assert!(matches!(
            Jet::seed_variable(2, 0.0, 2, 2),
            Err(JetError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn mixed_fourth_partial() {
        let x = Jet::seed_variable(0, 1.0, 4, 2).unwrap();
        let y = Jet::seed_variable(1, 1.0, 4, 2).unwrap();
        let p = x.square() * y.square();
        assert!((p.partial(&[2, 2]).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let j = random_jet(&mut rng, 2.7, 4, 3);
        let back = j.ln().unwrap().exp();
        let err = (&back - &j).max_abs();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn pythagoras() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let j = random_jet(&mut rng, 0.4, 4, 2);
        let one = j.sin().square() + j.cos().square();
        assert!((one.value() - 1.0).abs() < 1e-15);
        assert!(one.coeffs()[1..].iter().all(|c| c.abs() <= 1e-14));
    }

    #[test]
    fn exp_derivatives_at_zero() {
        let x = Jet::seed_variable(0, 0.0, 4, 1).unwrap();
        assert!((x.exp().partial(&[4]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zeroth_partial_is_value() {
        let x = Jet::seed_variable(0, 0.3, 3, 2).unwrap();
        let f = x.sin();
        assert_eq!(f.partial(&[0, 0]).unwrap(), f.value());
    }

    #[test]
    fn division_guard_and_domain() {
        let z = Jet::zero(2, 2);
        assert!(matches!(z.recip(), Err(JetError::DivisionByZero)));
        assert!(matches!(z.ln(), Err(JetError::Domain(_))));
        assert!(matches!(z.add_scalar(-1.0).sqrt(), Err(JetError::Domain(_))));
    }

    #[test]
    fn mixing_shapes_is_an_error() {
        let a = Jet::constant(1.0, 2, 2);
        let b = Jet::constant(1.0, 3, 2);
        assert!(a.try_add(&b).is_err());
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn derivative_of_monomial() {
        let x = Jet::seed_variable(0, 2.0, 3, 2).unwrap();
        let y = Jet::seed_variable(1, -1.0, 3, 2).unwrap();
        let f = x.powi(2) * &y; // x^2 y
        let fx = f.derivative(0).unwrap(); // 2 x y
        assert_eq!(fx.order(), 2);
        assert!((fx.value() - (-4.0)).abs() < 1e-14);
        assert!((fx.partial(&[1, 0]).unwrap() - (-2.0)).abs() < 1e-14);
        assert!((fx.partial(&[0, 1]).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn powf_matches_sqrt_and_recip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let j = random_jet(&mut rng, 1.7, 4, 2);
        assert!((&j.powf(0.5).unwrap() - &j.sqrt().unwrap()).max_abs() < 1e-15);
        assert!((&j.powf(-1.0).unwrap() - &j.recip().unwrap()).max_abs() < 1e-13);
        assert!((&j.powf(3.0).unwrap() - &j.powi(3)).max_abs() < 1e-12);
    }
}
