use num_complex::Complex64;
use pseudoherm::contact::{sample_points, ConformalFactor, ContactModel, FactorSpec};
use pseudoherm::engine::checks::gauge_scalars;
use pseudoherm::engine::{bianchi_residual, commutation_residual, r0_residual, CovJet, PHState, TorsionDerivatives};

fn models() -> Vec<ContactModel> {
    vec![
        ContactModel::heisenberg(1).unwrap(),
        ContactModel::heisenberg(2).unwrap(),
        ContactModel::sphere(1).unwrap(),
        ContactModel::sphere(2).unwrap(),
    ]
}

#[test]
fn structure_identities_over_seeds() {
    for model in models() {
        for seed in 0..6u64 {
            let factor = ConformalFactor::new(FactorSpec::random_trig(seed)).unwrap();
            let probe = ConformalFactor::new(FactorSpec::random_trig(seed + 100)).unwrap();
            for p in sample_points(&model, 2, seed, 0.2) {
                let s = PHState::new(&model, &factor, &p, 4).unwrap();
                let td = TorsionDerivatives::new(&s).unwrap();
                let cov = CovJet::new(&s, &probe.eval(&model, &p, 4).unwrap(), 2).unwrap();
                assert!(commutation_residual(&cov).unwrap() < 1e-8);
                assert!(r0_residual(&s, &td).unwrap().abs() < 1e-8);
                for z in bianchi_residual(&s, &td).unwrap() {
                    assert!(z.norm() < 1e-8, "{:?} seed {seed}: {z}", model.kind());
                }
                assert!(s.structure_residual() < 1e-10);
            }
        }
    }
}

/// `f_{,a} = Z_a f` against central differences in the chart.
#[test]
fn first_covariant_derivatives_match_differences() {
    let h = 1e-6;
    for model in models() {
        let n = model.dim();
        for seed in 0..3u64 {
            let factor = ConformalFactor::new(FactorSpec::random_trig(seed)).unwrap();
            let f = ConformalFactor::new(FactorSpec::random_trig(seed + 40)).unwrap();
            for p in sample_points(&model, 3, seed + 9, 0.2) {
                let s = PHState::new(&model, &factor, &p, 3).unwrap();
                let cov = CovJet::new(&s, &f.eval(&model, &p, 3).unwrap(), 1).unwrap();
                let grad: Vec<f64> = (0..n)
                    .map(|i| {
                        let mut a = p.clone();
                        let mut b = p.clone();
                        a[i] += h;
                        b[i] -= h;
                        let fa = f.eval(&model, &a, 0).unwrap().value();
                        let fb = f.eval(&model, &b, 0).unwrap().value();
                        (fa - fb) / (2.0 * h)
                    })
                    .collect();
                let size = grad.iter().map(|g| g * g).sum::<f64>().sqrt().max(1e-3);
                for a in 0..n {
                    let fd: Complex64 = s.frame.vectors[a].iter().zip(&grad).map(|(v, g)| v.value() * g).sum();
                    let d = cov.d1(a);
                    assert!((d - fd).norm() <= 1e-5 * size.max(d.norm()), "{a}: {d} vs {fd}");
                }
            }
        }
    }
}

#[test]
fn invariants_do_not_depend_on_the_gauge() {
    let model = ContactModel::sphere(2).unwrap();
    let factor = ConformalFactor::new(FactorSpec::random_trig(5)).unwrap();
    let (a, b) = (0.7f64, 1.3f64);
    let e = Complex64::from_polar(1.0, b);
    let u = vec![
        vec![Complex64::new(a.cos(), 0.0), -e * a.sin()],
        vec![e.conj() * a.sin() * Complex64::i(), Complex64::i() * a.cos()],
    ];
    for p in sample_points(&model, 3, 2, 0.2) {
        let s0 = PHState::new(&model, &factor, &p, 4).unwrap();
        let s1 = PHState::with_gauge(&model, &factor, &p, 4, &u).unwrap();
        let (g0, g1) = (gauge_scalars(&s0).unwrap(), gauge_scalars(&s1).unwrap());
        for (x, y) in g0.iter().zip(&g1) {
            assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()), "{g0:?} {g1:?}");
        }
    }
}

#[test]
fn sphere_scalar_curvature_is_constant() {
    for m in 1..=3 {
        let model = ContactModel::sphere(m).unwrap();
        for p in sample_points(&model, 4, 11, 0.2) {
            let s = PHState::new(&model, &ConformalFactor::one(), &p, 3).unwrap();
            let r = s.scalar_curvature().unwrap();
            assert!((r - (m * (m + 1)) as f64 / 2.0).abs() < 1e-10, "m = {m}: {r}");
            assert!(s.torsion_norm_sqr() < 1e-20);
        }
    }
}
