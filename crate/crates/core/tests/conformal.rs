use pseudoherm::conformal::{direct_vs_law_residual, scalar_transform_residual};
use pseudoherm::contact::{sample_points, ConformalFactor, ContactModel, FactorSpec};
use pseudoherm::engine::PHState;

#[test]
fn law_matches_direct_on_heisenberg() {
    for m in 1..=2 {
        let model = ContactModel::heisenberg(m).unwrap();
        for seed in [3u64, 17] {
            let points = sample_points(&model, 4, seed, 0.2);
            let s = direct_vs_law_residual(&model, &FactorSpec::one(), &FactorSpec::random_trig(seed), &points, 4)
                .unwrap();
            assert!(s.max_deviation < 1e-8, "m = {m}, seed {seed}: {}", s.max_deviation);
            assert!(s.max_frame_defect < 1e-10);
            assert_eq!(s.points, 4);
        }
    }
}

#[test]
fn law_matches_direct_on_a_deformed_sphere() {
    let model = ContactModel::sphere(2).unwrap();
    let points = sample_points(&model, 3, 4, 0.2);
    let s = direct_vs_law_residual(&model, &FactorSpec::random_trig(1), &FactorSpec::random_trig(2), &points, 4)
        .unwrap();
    assert!(s.max_deviation < 1e-8, "{}", s.max_deviation);
}

#[test]
fn scalar_law_holds_for_products_and_powers() {
    let model = ContactModel::heisenberg(2).unwrap();
    let f = FactorSpec::random_trig(8).times(&FactorSpec::Expression { expr: "1 + 0.1 * x1^2".into() });
    for p in sample_points(&model, 3, 6, 0.2) {
        let r = scalar_transform_residual(&model, &FactorSpec::random_trig(9), &f, &p, 4).unwrap();
        assert!(r < 1e-8, "{r}");
    }
}

#[test]
fn constant_rescaling_divides_scalar_curvature() {
    let model = ContactModel::sphere(1).unwrap();
    let f = ConformalFactor::new(FactorSpec::Constant { value: 4.0 }).unwrap();
    for p in sample_points(&model, 3, 1, 0.2) {
        let r = PHState::new(&model, &f, &p, 3).unwrap().scalar_curvature().unwrap();
        assert!((r - 0.25).abs() < 1e-12, "{r}");
    }
}

#[test]
fn empty_batch_is_rejected() {
    let model = ContactModel::heisenberg(1).unwrap();
    assert!(direct_vs_law_residual(&model, &FactorSpec::one(), &FactorSpec::one(), &[], 4).is_err());
}
