use std::f64::consts::PI;

use num_complex::Complex64;
use pseudoherm::contact::{ConformalFactor, FactorSpec};
use pseudoherm::jerison_lee::family_scale;
use pseudoherm::yamabe::{
    fit_family, minimize_yamabe, sobolev_gap, volume, yamabe_quotient, FactorFunction, FunctionBasis,
    OptimizerConfig, QuadratureRule,
};
use pseudoherm::Error;

fn member(m: usize, t: f64, xi: &[Complex64]) -> FactorSpec {
    FactorSpec::jl_family(family_scale(m, t, xi).unwrap(), t, xi)
}

fn func(spec: FactorSpec) -> FactorFunction {
    FactorFunction { m: 1, factor: ConformalFactor::new(spec).unwrap() }
}

#[test]
fn standard_quotient_is_sharp() {
    let rule = QuadratureRule::standard(1).unwrap();
    let y = yamabe_quotient(&rule, &FactorSpec::one()).unwrap();
    assert!((y.quotient - 4.0 * PI).abs() < 1e-9 * 4.0 * PI);
    assert!((y.volume - 16.0 * PI * PI).abs() < 1e-9 * y.volume);
}

#[test]
fn quotient_is_invariant_under_scaling_and_rotation() {
    let rule = QuadratureRule::standard(1).unwrap();
    let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let s = 0.5f64.sqrt();
    let b = [Complex64::new(0.0, s), Complex64::new(-s, 0.0)];
    let ya = yamabe_quotient(&rule, &member(1, 0.4, &a)).unwrap().quotient;
    let yb = yamabe_quotient(&rule, &member(1, 0.4, &b)).unwrap().quotient;
    assert!((ya - yb).abs() < 1e-8 * ya, "{ya} {yb}");
    let f = FactorSpec::random_trig(2);
    let y1 = yamabe_quotient(&rule, &f).unwrap().quotient;
    let y2 = yamabe_quotient(&rule, &f.times(&FactorSpec::Constant { value: 3.0 })).unwrap().quotient;
    assert!((y1 - y2).abs() < 1e-10 * y1);
    assert!(y1 > 4.0 * PI);
}

#[test]
fn sobolev_gap_is_nonnegative_on_random_elements() {
    let rule = QuadratureRule::standard(1).unwrap();
    let basis = FunctionBasis::new(&rule, 4).unwrap();
    for seed in 0..40 {
        let e = basis.element(basis.random_coeffs(seed, 0.3)).unwrap();
        let g = sobolev_gap(&rule, &e).unwrap();
        assert!(g.relative >= -1e-6, "seed {seed}: {g:?}");
    }
}

#[test]
fn sobolev_gap_vanishes_on_constants_and_is_positive_off_the_family() {
    let rule = QuadratureRule::standard(1).unwrap();
    let one = sobolev_gap(&rule, &func(FactorSpec::one())).unwrap();
    assert!(one.relative.abs() < 1e-10, "{one:?}");
    let bump = sobolev_gap(&rule, &func(FactorSpec::Expression { expr: "1 + 0.1 * u1".into() })).unwrap();
    assert!(bump.gap > 0.0, "{bump:?}");
    let trig = sobolev_gap(&rule, &func(FactorSpec::random_trig(4))).unwrap();
    assert!(trig.relative > 1e-4, "{trig:?}");
}

#[test]
fn monte_carlo_volume_agrees_with_product_rule() {
    let f = ConformalFactor::new(FactorSpec::random_trig(7)).unwrap();
    let exact = volume(&QuadratureRule::standard(1).unwrap(), &f).unwrap();
    let mc = volume(&QuadratureRule::monte_carlo(1, 20_000, 3).unwrap(), &f).unwrap();
    assert!((mc - exact).abs() < 0.02 * exact, "{mc} {exact}");
}

#[test]
fn refining_the_rule_converges() {
    let coarse = QuadratureRule::product(2, 2, 4).unwrap();
    let mid = coarse.refined().unwrap();
    let fine = mid.refined().unwrap();
    assert!(fine.len() > mid.len());
    let f = ConformalFactor::new(FactorSpec::random_trig(1)).unwrap();
    let [a, b, c] = [&coarse, &mid, &fine].map(|r| volume(r, &f).unwrap());
    assert!((b - c).abs() < 1e-4 * c, "{b} {c}");
    assert!((b - c).abs() < 0.1 * (a - b).abs(), "{a} {b} {c}");
}

#[test]
fn random_factor_is_not_in_the_family() {
    let rule = QuadratureRule::product(1, 6, 12).unwrap();
    let f = ConformalFactor::new(FactorSpec::random_trig(5)).unwrap();
    let model = pseudoherm::contact::ContactModel::sphere(1).unwrap();
    let values: Vec<f64> = rule.nodes.iter().map(|z| f.value_at(&model, z).unwrap()).collect();
    assert!(matches!(fit_family(&rule.nodes, &values, 1e-2), Err(Error::NotInFamily(_))));

    let x = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let g = ConformalFactor::new(member(1, 0.3, &x)).unwrap();
    let values: Vec<f64> = rule.nodes.iter().map(|z| g.value_at(&model, z).unwrap()).collect();
    let fit = fit_family(&rule.nodes, &values, 1e-2).unwrap();
    assert!(fit.residual < 1e-8 && (fit.t.abs() - 0.3).abs() < 1e-6, "{fit:?}");
}

#[test]
fn descent_never_increases_the_quotient() {
    let rule = QuadratureRule::product(1, 6, 12).unwrap();
    let basis = FunctionBasis::new(&rule, 2).unwrap();
    let config = OptimizerConfig { max_iterations: 40, ..OptimizerConfig::default() };
    let outcome = match minimize_yamabe(&rule, &basis, &config, None, 3) {
        Ok(o) => o,
        Err(Error::NotConverged { outcome, .. }) => *outcome,
        Err(e) => panic!("{e}"),
    };
    assert!(outcome.trace.windows(2).all(|w| w[1].value <= w[0].value));
    assert!(outcome.value < outcome.trace[0].value);
}

#[test]
fn constant_start_is_already_optimal() {
    let rule = QuadratureRule::product(1, 6, 12).unwrap();
    let basis = FunctionBasis::new(&rule, 2).unwrap();
    let outcome =
        minimize_yamabe(&rule, &basis, &OptimizerConfig::default(), Some(vec![0.0; basis.len()]), 0).unwrap();
    assert_eq!(outcome.iterations, 0);
    assert!((outcome.value - 4.0 * PI).abs() < 1e-10);
}
