//! Multi-index tables shared by every jet with the same number of variables.
//!
//! Multi-indices are stored in graded-lexicographic order, so the indices of
//! total degree `<= k` always form a prefix of the table. Lowering a jet's
//! order is therefore a truncation of its coefficient vector.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Debug)]
pub struct JetLayout {
    nvars: usize,
    max_order: usize,
    /// Flattened exponents, `nvars` entries per multi-index.
    exps: Vec<u8>,
    /// `counts[k]` = number of multi-indices with `|I| <= k`.
    counts: Vec<usize>,
    lookup: HashMap<Vec<u8>, usize>,
    /// Product table `(i, j, k)` with `I_i + I_j = I_k`, sorted by `k`.
    mul_lhs: Vec<u32>,
    mul_rhs: Vec<u32>,
    mul_out: Vec<u32>,
    /// `mul_bounds[k]` = number of product triples whose target has degree `<= k`.
    mul_bounds: Vec<usize>,
    /// `deriv[v][i]` = (index of `I_i + e_v`, `(I_i)_v + 1`) for `|I_i| < max_order`.
    deriv: Vec<Vec<(u32, f64)>>,
    factorials: Vec<f64>,
}

fn binomial(n: usize, k: usize) -> usize {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

impl JetLayout {
    fn build(nvars: usize, max_order: usize) -> Self {
        // Graded lexicographic enumeration: degree by degree, and within a
        // degree in descending lexicographic order of the exponent tuple.
        let mut all: Vec<Vec<u8>> = Vec::new();
        let mut counts = Vec::with_capacity(max_order + 1);
        for deg in 0..=max_order {
            let mut level = Vec::new();
            let mut cur = vec![0u8; nvars];
            compositions(deg, 0, &mut cur, &mut level);
            all.extend(level);
            counts.push(all.len());
        }
        debug_assert_eq!(all.len(), binomial(nvars + max_order, max_order));

        let lookup: HashMap<Vec<u8>, usize> =
            all.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let degree = |e: &[u8]| e.iter().map(|&x| x as usize).sum::<usize>();

        let mut triples: Vec<(u32, u32, u32)> = Vec::new();
        for (i, a) in all.iter().enumerate() {
            let da = degree(a);
            for (j, b) in all.iter().enumerate() {
                if da + degree(b) > max_order {
                    continue;
                }
                let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                triples.push((i as u32, j as u32, lookup[&s] as u32));
            }
        }
        triples.sort_by_key(|t| (t.2, t.0, t.1));
        let mut mul_bounds = Vec::with_capacity(max_order + 1);
        for k in 0..=max_order {
            mul_bounds.push(triples.partition_point(|t| (t.2 as usize) < counts[k]));
        }

        let mut deriv = vec![Vec::new(); nvars];
        let lower = if max_order == 0 { 0 } else { counts[max_order - 1] };
        for (v, table) in deriv.iter_mut().enumerate() {
            for e in all.iter().take(lower) {
                let mut up = e.clone();
                up[v] += 1;
                table.push((lookup[&up] as u32, (e[v] as f64) + 1.0));
            }
        }

        let mut factorials = vec![1.0f64; max_order + 2];
        for k in 1..factorials.len() {
            factorials[k] = factorials[k - 1] * k as f64;
        }

        JetLayout {
            nvars,
            max_order,
            exps: all.concat(),
            counts,
            lookup,
            mul_lhs: triples.iter().map(|t| t.0).collect(),
            mul_rhs: triples.iter().map(|t| t.1).collect(),
            mul_out: triples.iter().map(|t| t.2).collect(),
            mul_bounds,
            deriv,
            factorials,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of coefficients of a jet of order `k`.
    pub fn count(&self, k: usize) -> usize {
        self.counts[k]
    }

    pub fn exponent(&self, idx: usize) -> &[u8] {
        &self.exps[idx * self.nvars..(idx + 1) * self.nvars]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.lookup.get(exps).copied()
    }

    /// `I!` for the multi-index stored at `idx`.
    pub fn index_factorial(&self, idx: usize) -> f64 {
        self.exponent(idx)
            .iter()
            .map(|&e| self.factorials[e as usize])
            .product()
    }

    pub(crate) fn mul_triples(&self, order: usize) -> (&[u32], &[u32], &[u32]) {
        let n = self.mul_bounds[order];
        (&self.mul_lhs[..n], &self.mul_rhs[..n], &self.mul_out[..n])
    }

    pub(crate) fn deriv_table(&self, var: usize) -> &[(u32, f64)] {
        &self.deriv[var]
    }
}

fn compositions(remaining: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let n = cur.len();
    if pos + 1 == n {
        cur[pos] = remaining as u8;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e as u8;
        compositions(remaining - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

static LAYOUTS: OnceLock<Mutex<HashMap<usize, &'static JetLayout>>> = OnceLock::new();

/// Shared layout for `nvars` variables supporting at least `order`.
///
/// Tables are leaked on purpose: there is one per `(nvars, order)` upgrade,
/// and jets hold plain references to them. Tables built for a lower order
/// index identically to the prefix of a later, larger table.
pub fn layout(nvars: usize, order: usize) -> &'static JetLayout {
    let map = LAYOUTS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(l) = guard.get(&nvars) {
        if l.max_order >= order {
            return l;
        }
    }
    let built: &'static JetLayout = Box::leak(Box::new(JetLayout::build(nvars, order.max(5))));
    guard.insert(nvars, built);
    built
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomial() {
        for n in 1..=5 {
            let l = JetLayout::build(n, 4);
            for k in 0..=4 {
                assert_eq!(l.count(k), binomial(n + k, k));
            }
        }
    }

    #[test]
    fn graded_prefix() {
        let l = JetLayout::build(3, 4);
        for k in 0..=4 {
            for idx in 0..l.count(k) {
                let d: usize = l.exponent(idx).iter().map(|&e| e as usize).sum();
                assert!(d <= k);
            }
        }
        assert_eq!(l.exponent(0), &[0, 0, 0]);
    }
}
