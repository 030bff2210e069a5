use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ReportFormat;
use crate::contact::{FactorSpec, ModelKind};
use crate::error::{Error, Result};
use crate::yamabe::{FamilyFit, RuleKind, TraceEntry};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SkippedInformational,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::SkippedInformational => "skipped-informational",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The formula the check evaluates.
    pub anchor: String,
    pub points: usize,
    #[serde(with = "sci_opt")]
    pub max_residual: Option<f64>,
    #[serde(with = "sci_opt")]
    pub mean_residual: Option<f64>,
    #[serde(with = "sci")]
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl CheckRecord {
    /// Record from per-point residuals; fails on any non-finite value.
    pub fn measured(id: &str, anchor: &str, values: &[f64], tolerance: f64) -> Self {
        let finite = values.iter().all(|v| v.is_finite());
        let (max, mean) = if values.is_empty() || !finite {
            (None, None)
        } else {
            let max = values.iter().fold(0.0f64, |a, v| a.max(*v));
            (Some(max), Some(values.iter().sum::<f64>() / values.len() as f64))
        };
        let verdict = match max {
            Some(x) if finite && x <= tolerance => Verdict::Pass,
            _ => Verdict::Fail,
        };
        CheckRecord {
            id: id.to_string(),
            anchor: anchor.to_string(),
            points: values.len(),
            max_residual: max,
            mean_residual: mean,
            tolerance,
            verdict,
        }
    }

    /// A check that was not evaluated.
    pub fn skipped(id: &str, anchor: &str, tolerance: f64) -> Self {
        CheckRecord {
            id: id.to_string(),
            anchor: anchor.to_string(),
            points: 0,
            max_residual: None,
            mean_residual: None,
            tolerance,
            verdict: Verdict::SkippedInformational,
        }
    }

    /// Keeps the residuals but takes the record out of the verdict.
    pub fn informational(mut self) -> Self {
        self.verdict = Verdict::SkippedInformational;
        self
    }

    pub fn gated(self, open: bool) -> Self {
        if open {
            self
        } else {
            self.informational()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    #[serde(with = "sci")]
    pub levi_scale: f64,
    pub levi_scale_unique: bool,
    pub mixed_display_separates: bool,
    #[serde(with = "sci")]
    pub j_sign: f64,
    #[serde(with = "sci")]
    pub omega_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome {
    pub holds: bool,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSummary {
    pub degree: usize,
    pub start_seed: u64,
    pub iterations: usize,
    #[serde(with = "sci")]
    pub value: f64,
    pub fit: Option<FamilyFit>,
    pub trace: Vec<TraceEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub format_version: u32,
    pub suite: String,
    pub model: ModelKind,
    pub m: usize,
    pub factor: FactorSpec,
    pub seed: u64,
    pub jet_order: usize,
    pub points: usize,
    pub quadrature: Option<RuleKind>,
    pub gate: Option<GateOutcome>,
    pub calibration: Option<Calibration>,
    pub optimizer: Option<OptimizerSummary>,
    pub notes: Vec<String>,
}

impl Meta {
    pub fn new(suite: &str, config: &super::RunConfig) -> Self {
        Meta {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            format_version: FORMAT_VERSION,
            suite: suite.to_string(),
            model: config.model,
            m: config.m,
            factor: config.factor.clone(),
            seed: config.seed,
            jet_order: config.jet_order,
            points: config.points,
            quadrature: None,
            gate: None,
            calibration: None,
            optimizer: None,
            notes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub meta: Meta,
    pub checks: Vec<CheckRecord>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn new(meta: Meta, checks: Vec<CheckRecord>) -> Self {
        let verdict = overall(&checks);
        VerificationReport { meta, checks, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Process exit status for this report.
    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Pass iff every check that is not informational passes.
pub fn overall(checks: &[CheckRecord]) -> Verdict {
    if checks.iter().all(|c| c.verdict != Verdict::Fail) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

pub fn render_json(report: &VerificationReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Config(format!("serializing report: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn render_csv(report: &VerificationReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Config(format!("writing csv: {e}"));
    w.write_record(["check_id", "anchor", "points", "max_residual", "mean_residual", "tolerance", "verdict"])
        .map_err(err)?;
    for c in &report.checks {
        w.write_record([
            c.id.clone(),
            c.anchor.clone(),
            c.points.to_string(),
            c.max_residual.map(fmt17).unwrap_or_default(),
            c.mean_residual.map(fmt17).unwrap_or_default(),
            fmt17(c.tolerance),
            c.verdict.name().to_string(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

pub fn render(report: &VerificationReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => render_json(report),
        ReportFormat::CsvSummary => render_csv(report),
    }
}

/// Writes the report to `out`, or returns it for printing when `out` is `None`.
pub fn emit_report(report: &VerificationReport, format: ReportFormat, out: Option<&Path>) -> Result<String> {
    let text = render(report, format)?;
    if let Some(path) = out {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}

pub fn parse_report(text: &str) -> Result<VerificationReport> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("reading report: {e}")))
}

pub fn load_report(path: &Path) -> Result<VerificationReport> {
    parse_report(&std::fs::read_to_string(path)?)
}

/// Seventeen significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

mod sci {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if !x.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(super::fmt17(*x)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

mod sci_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::sci::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<f64>::deserialize(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::RunConfig;

    fn sample() -> VerificationReport {
        let checks = vec![
            CheckRecord::measured("a", "x = y", &[1e-12, 3.0e-11], 1e-8),
            CheckRecord::measured("b", "u = v", &[0.1], 1e-8).informational(),
            CheckRecord::skipped("c", "p = q", 1e-7),
        ];
        VerificationReport::new(Meta::new("transform", &RunConfig::default()), checks)
    }

    #[test]
    fn verdict_ignores_informational() {
        let r = sample();
        assert!(r.passed());
        let mut checks = r.checks.clone();
        checks.push(CheckRecord::measured("d", "s = t", &[1.0], 1e-3));
        assert_eq!(overall(&checks), Verdict::Fail);
        assert_eq!(CheckRecord::measured("e", "z", &[f64::NAN], 1.0).verdict, Verdict::Fail);
    }

    #[test]
    fn json_uses_seventeen_digits_and_round_trips() {
        let r = sample();
        let text = render_json(&r).unwrap();
        assert!(text.contains("1.5500000000000001e-11"), "{text}");
        assert!(text.contains("\"mean_residual\": null"));
        assert_eq!(parse_report(&text).unwrap(), r);
    }

    #[test]
    fn csv_has_a_row_per_check() {
        let text = render_csv(&sample()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(2).unwrap().ends_with("skipped-informational"));
    }
}
