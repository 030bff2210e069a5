//! Small dense linear algebra over jet scalars.
//!
//! Every routine runs the same pivot sequence the plain `f64` algorithm would
//! choose at the expansion point, so derivatives of the solution come along
//! for free.

use num_complex::Complex64;

use super::{CJet, Jet, JetError};

/// Field operations needed by the dense solvers.
pub trait JetScalar: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn recip(&self) -> Result<Self, JetError>;
    /// Magnitude of the value, used for pivoting.
    fn magnitude(&self) -> f64;
}

impl JetScalar for Jet {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn recip(&self) -> Result<Self, JetError> {
        Jet::recip(self)
    }
    fn magnitude(&self) -> f64 {
        self.value().abs()
    }
}

impl JetScalar for CJet {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn recip(&self) -> Result<Self, JetError> {
        CJet::recip(self)
    }
    fn magnitude(&self) -> f64 {
        self.value().norm()
    }
}

/// Solves `a * x = b` for a square `a` (row-major) and several right-hand
/// sides stored as the columns of `b`.
pub fn solve<T: JetScalar>(mut a: Vec<Vec<T>>, mut b: Vec<Vec<T>>) -> Result<Vec<Vec<T>>, JetError> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(JetError::ShapeMismatch("solve expects a square system".into()));
    }
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(|x| x.magnitude()))
        .fold(0.0f64, f64::max);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].magnitude().total_cmp(&a[j][col].magnitude()))
            .expect("non-empty range");
        if a[piv][col].magnitude() <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return Err(JetError::Singular);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip()?;
        for row in col + 1..n {
            let f = a[row][col].mul(&inv);
            for k in col..n {
                let t = f.mul(&a[col][k]);
                a[row][k] = a[row][k].sub(&t);
            }
            for k in 0..b[row].len() {
                let t = f.mul(&b[col][k]);
                b[row][k] = b[row][k].sub(&t);
            }
        }
    }
    let nrhs = b.first().map_or(0, |r| r.len());
    let mut x: Vec<Vec<Option<T>>> = vec![vec![None; nrhs]; n];
    for row in (0..n).rev() {
        let inv = a[row][row].recip()?;
        for k in 0..nrhs {
            let mut acc = b[row][k].clone();
            for j in row + 1..n {
                let xj = x[j][k].as_ref().expect("back substitution order");
                acc = acc.sub(&a[row][j].mul(xj));
            }
            x[row][k] = Some(acc.mul(&inv));
        }
    }
    Ok(x.into_iter()
        .map(|r| r.into_iter().map(|v| v.expect("filled")).collect())
        .collect())
}

/// Inverse of a square matrix.
pub fn invert<T: JetScalar>(a: Vec<Vec<T>>, identity: impl Fn(bool) -> T) -> Result<Vec<Vec<T>>, JetError> {
    let n = a.len();
    let b = (0..n)
        .map(|i| (0..n).map(|j| identity(i == j)).collect())
        .collect();
    solve(a, b)
}

/// Lower-triangular `c` with positive real diagonal and `a = c c^*`.
pub fn cholesky(a: &[Vec<CJet>]) -> Result<Vec<Vec<CJet>>, JetError> {
    let n = a.len();
    let proto = a[0][0].clone();
    let zero = proto.splat(Complex64::new(0.0, 0.0));
    let mut c = vec![vec![zero.clone(); n]; n];
    for j in 0..n {
        let mut d = a[j][j].re.clone();
        for k in 0..j {
            d = &d - &c[j][k].norm_sqr();
        }
        if d.value() <= 0.0 {
            return Err(JetError::Domain("matrix is not positive definite".into()));
        }
        let djj = d.sqrt()?;
        let inv = djj.recip()?;
        c[j][j] = CJet::from_real(djj);
        for i in j + 1..n {
            let mut s = a[i][j].clone();
            for k in 0..j {
                s = &s - &(&c[i][k] * &c[j][k].conj());
            }
            c[i][j] = s.mul_real(&inv);
        }
    }
    Ok(c)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_triangular_inverse(c: &[Vec<CJet>]) -> Result<Vec<Vec<CJet>>, JetError> {
    let n = c.len();
    let zero = c[0][0].splat(Complex64::new(0.0, 0.0));
    let mut inv = vec![vec![zero.clone(); n]; n];
    for i in 0..n {
        let d = c[i][i].recip()?;
        inv[i][i] = d.clone();
        for j in (0..i).rev() {
            let mut s = zero.clone();
            for k in j..i {
                s = &s + &(&c[i][k] * &inv[k][j]);
            }
            inv[i][j] = -&(&s * &d);
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_jet_system_and_differentiates_through_it() {
        // [[2 + x, 1], [1, 3]] u = [1, 0]
        let x = Jet::seed_variable(0, 0.0, 2, 1).unwrap();
        let one = x.splat(1.0);
        let a = vec![vec![&x + 2.0, one.clone()], vec![one.clone(), x.splat(3.0)]];
        let b = vec![vec![one.clone()], vec![x.splat(0.0)]];
        let sol = solve(a, b).unwrap();
        // u0 = 3 / (3 (2 + x) - 1) = 3 / (5 + 3x)
        let u0 = &sol[0][0];
        assert!((u0.value() - 0.6).abs() < 1e-15);
        assert!((u0.partial(&[1]).unwrap() - (-9.0 / 25.0)).abs() < 1e-14);
        assert!((u0.partial(&[2]).unwrap() - (2.0 * 27.0 / 125.0)).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_detected() {
        let one = Jet::constant(1.0, 1, 1);
        let a = vec![vec![one.clone(), one.clone()], vec![one.clone(), one.clone()]];
        let b = vec![vec![one.clone()], vec![one.clone()]];
        assert!(matches!(solve(a, b), Err(JetError::Singular)));
    }

    #[test]
    fn cholesky_reconstructs() {
        let c = |re: f64, im: f64| CJet::constant(Complex64::new(re, im), 1, 1);
        let a = vec![vec![c(4.0, 0.0), c(1.0, 1.0)], vec![c(1.0, -1.0), c(3.0, 0.0)]];
        let l = cholesky(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    s += l[i][k].value() * l[j][k].value().conj();
                }
                assert!((s - a[i][j].value()).norm() < 1e-14);
            }
        }
        let li = lower_triangular_inverse(&l).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    s += li[i][k].value() * l[k][j].value();
                }
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).norm() < 1e-14);
            }
        }
    }
}
