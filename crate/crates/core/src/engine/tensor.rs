//! Dense frame-component tensors and chart 2-forms over complex jets.

use crate::jets::{CJet, Jet};

/// Covariant tensor with components in the frame `{T, T_a, T_a-bar}`.
///
/// Components are stored densely in row-major order over `n = 2m + 1` frame
/// indices. The last index is the most recent differentiation slot.
#[derive(Clone, Debug)]
pub struct Tensor {
    n: usize,
    rank: usize,
    comps: Vec<CJet>,
}

impl Tensor {
    pub fn scalar(f: CJet) -> Tensor {
        Tensor { n: f.nvars(), rank: 0, comps: vec![f] }
    }

    pub fn real_scalar(f: &Jet) -> Tensor {
        Tensor::scalar(CJet::from_real(f.clone()))
    }

    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> CJet) -> Tensor {
        let size = n.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut comps = Vec::with_capacity(size);
        for flat in 0..size {
            let mut r = flat;
            for k in (0..rank).rev() {
                idx[k] = r % n;
                r /= n;
            }
            comps.push(f(&idx));
        }
        Tensor { n, rank, comps }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &CJet {
        &self.comps[self.flat(idx)]
    }

    pub fn comps(&self) -> &[CJet] {
        &self.comps
    }
}

/// Antisymmetric chart 2-form `D_ij` with `w(X, Y) = sum D_ij X^i Y^j`.
pub type TwoForm = Vec<Vec<CJet>>;

pub fn exterior_derivative(form: &[CJet]) -> crate::Result<TwoForm> {
    let n = form.len();
    let k = form[0].order();
    if k == 0 {
        return Err(crate::Error::InsufficientOrder { needed: 1, have: 0, what: "exterior derivative" });
    }
    let mut d = vec![vec![CJet::zero(k - 1, n); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = &form[j].derivative(i)? - &form[i].derivative(j)?;
            d[j][i] = -&v;
            d[i][j] = v;
        }
    }
    Ok(d)
}

/// `(a ^ b)_ij = a_i b_j - a_j b_i`.
pub fn wedge(a: &[CJet], b: &[CJet]) -> TwoForm {
    let n = a.len();
    let mut d = vec![vec![CJet::zero(a[0].order(), n); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = &(&a[i] * &b[j]) - &(&a[j] * &b[i]);
            d[j][i] = -&v;
            d[i][j] = v;
        }
    }
    d
}

pub fn add_assign(acc: &mut TwoForm, w: &TwoForm) {
    for (ra, rw) in acc.iter_mut().zip(w) {
        for (a, b) in ra.iter_mut().zip(rw) {
            *a = &*a + b;
        }
    }
}

pub fn sub_assign(acc: &mut TwoForm, w: &TwoForm) {
    for (ra, rw) in acc.iter_mut().zip(w) {
        for (a, b) in ra.iter_mut().zip(rw) {
            *a = &*a - b;
        }
    }
}

/// `w(X, Y)`.
pub fn eval_form(d: &TwoForm, x: &[CJet], y: &[CJet]) -> CJet {
    let n = x.len();
    let mut acc = CJet::zero(d[0][0].order(), n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = &acc + &(&d[i][j] * &(&x[i] * &y[j]));
            }
        }
    }
    acc
}

pub fn lower_form(d: &TwoForm, k: usize) -> TwoForm {
    d.iter().map(|r| r.iter().map(|c| c.lower(k)).collect()).collect()
}

pub fn lower_vec(v: &[CJet], k: usize) -> Vec<CJet> {
    v.iter().map(|c| c.lower(k)).collect()
}

/// Largest coefficient of any entry.
pub fn form_max_abs(d: &TwoForm) -> f64 {
    d.iter().flatten().map(CJet::max_abs).fold(0.0, f64::max)
}
