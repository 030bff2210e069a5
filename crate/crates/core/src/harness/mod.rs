//! Configuration, suite orchestration and verification reports.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{default_rule, parse_factor, ReportFormat, RunConfig, Suite, Tolerances, MAX_JET_ORDER};
pub use report::{
    emit_report, load_report, overall, parse_report, render, CheckRecord, Meta, VerificationReport, Verdict,
};
pub use suites::{check_ids, probe_function, run_check_suite, run_optimizer, sample, sphere_ricci_defect};
