use num_complex::Complex64;
use pseudoherm::contact::{sample_points, ConformalFactor, ContactModel, FactorSpec};
use pseudoherm::engine::PHState;
use pseudoherm::jerison_lee::{family_scale, identity_residual, vanishing_system_residuals, JlPair};

fn unit(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / n).collect()
}

fn xi(m: usize) -> Vec<Complex64> {
    unit(&(0..=m).map(|k| Complex64::new(1.0 + k as f64, 0.5 - k as f64)).collect::<Vec<_>>())
}

#[test]
fn scaled_family_has_constant_curvature() {
    for m in 1..=2 {
        for t in [0.2, 0.8] {
            let x = xi(m);
            let c = family_scale(m, t, &x).unwrap();
            let model = ContactModel::sphere(m).unwrap();
            let f = ConformalFactor::new(FactorSpec::jl_family(c, t, &x)).unwrap();
            for p in sample_points(&model, 4, 2, 0.2) {
                let s = PHState::new(&model, &f, &p, 3).unwrap();
                let r = s.scalar_curvature().unwrap();
                assert!((r - 0.5 * (m * (m + 1)) as f64).abs() < 1e-9, "{r}");
                assert!(s.torsion_norm_sqr() < 1e-18);
            }
        }
    }
}

#[test]
fn identity_and_vanishing_systems_on_the_family() {
    for m in 1..=2 {
        let x = xi(m);
        let (a, _) = JlPair::family_over_standard(m, 0.6, &x).unwrap();
        let (b, _) = JlPair::standard_over_family(m, 0.6, &x).unwrap();
        for pair in [a, b] {
            let points = sample_points(&pair.model, 3, 5, 0.2);
            assert!(pair.hypotheses(&points, 1e-8).unwrap().holds);
            for p in &points {
                let pt = pair.point(p, 4).unwrap();
                let r = identity_residual(&pt.state, &pt.phi, &pt.torsion).unwrap();
                assert!(r.abs() < 1e-7, "{r}");
                let v = vanishing_system_residuals(&pt.state, &pt.phi).unwrap();
                assert!(v.phi.iter().chain(&v.u).all(|r| *r < 1e-7), "{v:?}");
            }
        }
    }
}

#[test]
fn unrelated_factor_is_gated() {
    let model = ContactModel::sphere(1).unwrap();
    let f = FactorSpec::random_trig(3);
    let pair = JlPair::new(model.clone(), f.clone(), f);
    let points = sample_points(&model, 5, 1, 0.2);
    assert!(!pair.hypotheses(&points, 1e-8).unwrap().holds);
    assert!(pair.require_hypotheses(&points, 1e-8).is_err());
}
