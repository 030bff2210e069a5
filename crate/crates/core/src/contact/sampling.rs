use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::model::{ContactModel, ModelKind};

/// Half-width of the Heisenberg sampling box.
pub const HEISENBERG_BOX: f64 = 1.0;

/// Seeded chart points.
///
/// Heisenberg points are uniform in a box. Sphere points are uniform on the
/// sphere, rejected when `|1 + zeta_0| < margin` (distance to the point the
/// chart misses), then mapped back to the chart.
pub fn sample_points(model: &ContactModel, count: usize, seed: u64, margin: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        match model.kind() {
            ModelKind::Heisenberg => {
                out.push((0..model.dim()).map(|_| rng.random_range(-HEISENBERG_BOX..HEISENBERG_BOX)).collect());
            }
            ModelKind::Sphere => {
                let zeta = sphere_point(&mut rng, model.m() + 1);
                if let Ok(q) = model.chart_of(&zeta) {
                    if (Complex64::new(1.0, 0.0) + cayley_first(&q)).norm() >= margin {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

/// `zeta_0 = (i - w) / (i + w)` of the unrotated Cayley map.
fn cayley_first(p: &[f64]) -> Complex64 {
    let r2: f64 = p[..p.len() - 1].iter().map(|x| x * x).sum();
    let w = Complex64::new(p[p.len() - 1], r2);
    let i = Complex64::new(0.0, 1.0);
    (i - w) / (i + w)
}

/// Uniform point on the unit sphere of `C^n`.
pub fn sphere_point<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let r = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if r > 1e-8 {
            return v.into_iter().map(|z| z / r).collect();
        }
    }
}

/// Uniform ambient sphere points.
pub fn sample_sphere(m: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sphere_point(&mut rng, m + 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let h = ContactModel::heisenberg(1).unwrap();
        assert_eq!(sample_points(&h, 3, 7, 0.1), sample_points(&h, 3, 7, 0.1));
        assert!(sample_points(&h, 0, 7, 0.1).is_empty());
    }

    #[test]
    fn sphere_samples_keep_margin() {
        let s = ContactModel::sphere(2).unwrap();
        for p in sample_points(&s, 50, 11, 0.1) {
            let z = s.ambient(&p, 0).unwrap();
            let nrm: f64 = z.iter().map(|c| c.value().norm_sqr()).sum();
            assert!((nrm - 1.0).abs() < 1e-12);
            assert!((Complex64::new(1.0, 0.0) + z[0].value()).norm() >= 0.1 - 1e-12);
        }
    }
}
