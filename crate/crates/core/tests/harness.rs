use pseudoherm::contact::{FactorSpec, ModelKind};
use pseudoherm::harness::{
    check_ids, parse_factor, parse_report, render, run_check_suite, ReportFormat, RunConfig, Suite, Verdict,
};

fn config(model: ModelKind, m: usize, factor: FactorSpec) -> RunConfig {
    RunConfig { model, m, factor, points: 4, ..RunConfig::default() }
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let c = config(ModelKind::Sphere, 1, FactorSpec::random_trig(2));
    for suite in [Suite::Transform, Suite::JerisonLee, Suite::Appendix, Suite::Yamabe] {
        let a = render(&run_check_suite(&c, suite).unwrap(), ReportFormat::Json).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| render(&run_check_suite(&c, suite).unwrap(), ReportFormat::Json).unwrap());
        assert_eq!(a, b, "{suite:?}");
    }
}

#[test]
fn every_record_is_anchored_and_listed() {
    let c = config(ModelKind::Sphere, 1, parse_factor("jl-family:0.5", 1).unwrap());
    let report = run_check_suite(&c, Suite::All).unwrap();
    let ids = check_ids(Suite::All);
    for r in &report.checks {
        assert!(!r.anchor.trim().is_empty(), "{}", r.id);
        for label in ["(JLE)", "(FA)", "(hf)", "Prop.", "eq."] {
            assert!(!r.anchor.contains(label), "{}: {}", r.id, r.anchor);
        }
        assert!(ids.contains(&r.id.as_str()), "{}", r.id);
    }
    assert!(report.passed(), "{:?}", report.checks.iter().filter(|c| c.verdict == Verdict::Fail).collect::<Vec<_>>());
}

#[test]
fn csv_and_json_forms_agree() {
    let c = config(ModelKind::Heisenberg, 2, FactorSpec::random_trig(4));
    let report = run_check_suite(&c, Suite::Transform).unwrap();
    let csv = render(&report, ReportFormat::CsvSummary).unwrap();
    assert_eq!(csv.lines().count(), report.checks.len() + 1);
    let json = render(&report, ReportFormat::Json).unwrap();
    assert_eq!(parse_report(&json).unwrap(), report);
}

#[test]
fn unrelated_factor_is_reported_as_informational() {
    let c = config(ModelKind::Sphere, 1, FactorSpec::random_trig(3));
    let report = run_check_suite(&c, Suite::JerisonLee).unwrap();
    let gate = report.meta.gate.as_ref().unwrap();
    assert!(!gate.holds && gate.message.contains("hypotheses not satisfied"));
    assert_eq!(report.check("divergence-identity").unwrap().verdict, Verdict::SkippedInformational);
    assert!(report.passed());
}

#[test]
fn invalid_config_is_an_error() {
    let c = RunConfig { m: 5, ..RunConfig::default() };
    assert!(run_check_suite(&c, Suite::Transform).is_err());
    let c = config(ModelKind::Heisenberg, 1, FactorSpec::one());
    assert!(run_check_suite(&c, Suite::Yamabe).is_err());
}
