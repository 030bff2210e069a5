use num_complex::Complex64;

use super::state::PHState;
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::jets::{CJet, Jet};

/// Covariant derivatives of a real function up to a fixed depth.
///
/// `d2(a, b)` is `f_{a,b}`: differentiate along `T_a` first, then along `T_b`.
#[derive(Clone, Debug)]
pub struct CovJet {
    pub m: usize,
    pub value: Jet,
    pub levels: Vec<Tensor>,
}

impl CovJet {
    /// Derivatives up to `depth` covariant orders (`depth >= 1`).
    pub fn new(state: &PHState, f: &Jet, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Precondition("derivative depth must be at least 1".into()));
        }
        let mut levels = Vec::with_capacity(depth);
        let mut cur = Tensor::real_scalar(f);
        for _ in 0..depth {
            let next = state.covariant_derivative(&cur).map_err(|e| match e {
                Error::InsufficientOrder { have, .. } => Error::InsufficientOrder {
                    needed: depth,
                    have,
                    what: "covariant derivatives",
                },
                other => other,
            })?;
            levels.push(next.clone());
            cur = next;
        }
        Ok(CovJet { m: state.m(), value: f.clone(), levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &Tensor {
        &self.levels[k - 1]
    }

    pub fn jet(&self, idx: &[usize]) -> &CJet {
        self.levels[idx.len() - 1].get(idx)
    }

    pub fn at(&self, idx: &[usize]) -> Complex64 {
        self.jet(idx).value()
    }

    pub fn d1(&self, a: usize) -> Complex64 {
        self.at(&[a])
    }

    pub fn d2(&self, a: usize, b: usize) -> Complex64 {
        self.at(&[a, b])
    }

    pub fn d3(&self, a: usize, b: usize, c: usize) -> Complex64 {
        self.at(&[a, b, c])
    }

    pub fn bar(&self, a: usize) -> usize {
        crate::contact::frame::bar_index(self.m, a)
    }

    /// `|df|^2 = sum f_a f_a-bar` as a jet.
    pub fn grad_sqr_jet(&self) -> Jet {
        let t = &self.levels[0];
        let mut acc = Jet::zero(t.order(), self.value.nvars());
        for a in 1..=self.m {
            acc = &acc + &(t.get(&[a]) * t.get(&[self.bar(a)])).re;
        }
        acc
    }

    pub fn grad_sqr(&self) -> f64 {
        self.grad_sqr_jet().value()
    }

    /// `sum (f_{a,a-bar} + f_{a-bar,a})`.
    pub fn sublaplacian_jet(&self) -> Result<Jet> {
        if self.depth() < 2 {
            return Err(Error::InsufficientOrder { needed: 2, have: self.depth(), what: "sublaplacian" });
        }
        let t = &self.levels[1];
        let mut acc = Jet::zero(t.order(), self.value.nvars());
        for a in 1..=self.m {
            let b = self.bar(a);
            acc = &acc + &(t.get(&[a, b]) + t.get(&[b, a])).re;
        }
        Ok(acc)
    }

    pub fn sublaplacian(&self) -> Result<f64> {
        Ok(self.sublaplacian_jet()?.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{ConformalFactor, ContactModel};

    #[test]
    fn t_coordinate_on_heisenberg() {
        let h = ContactModel::heisenberg(1).unwrap();
        let s = PHState::new(&h, &ConformalFactor::one(), &[0.0, 0.0, 0.0], 3).unwrap();
        let t = h.coordinates(&[0.0, 0.0, 0.0], 3).unwrap()[2].clone();
        let c = CovJet::new(&s, &t, 2).unwrap();
        assert!((c.d1(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(c.d1(1).norm() < 1e-15);
        assert!(c.d1(2).norm() < 1e-15);
    }

    #[test]
    fn constant_function_has_no_derivatives() {
        let h = ContactModel::heisenberg(2).unwrap();
        let p = [0.1, 0.2, 0.3, 0.4, 0.5];
        let s = PHState::new(&h, &ConformalFactor::one(), &p, 4).unwrap();
        let f = Jet::constant(2.0, 4, 5);
        let c = CovJet::new(&s, &f, 3).unwrap();
        assert!(c.levels.iter().all(|t| t.comps().iter().all(|x| x.max_abs() == 0.0)));
        assert_eq!(c.grad_sqr(), 0.0);
    }

    #[test]
    fn depth_is_limited_by_order() {
        let h = ContactModel::heisenberg(1).unwrap();
        let s = PHState::new(&h, &ConformalFactor::one(), &[0.0, 0.0, 0.0], 2).unwrap();
        let f = Jet::seed_variable(0, 0.0, 2, 3).unwrap();
        assert!(matches!(CovJet::new(&s, &f, 3), Err(Error::InsufficientOrder { .. })));
    }
}
