use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pseudoherm::contact::ModelKind;
use pseudoherm::harness::{
    emit_report, load_report, parse_factor, run_check_suite, run_optimizer, ReportFormat, RunConfig, Suite, Tolerances,
    VerificationReport,
};
use pseudoherm::Result;

#[derive(Parser)]
#[command(name = "pseudoherm", version, about = "Numerical checks of pseudohermitian identities on the CR sphere and Heisenberg group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite and write a verification report.
    Verify(RunArgs),
    /// Minimize the Yamabe quotient from a seeded random start.
    Optimize(RunArgs),
    /// Re-emit a saved JSON report, e.g. as a CSV summary.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    m: Option<usize>,
    /// `one`, `constant:V`, `random-trig:SEED[:AMP]`, `jl-family:T[:C]`,
    /// `expr:EXPR` or a JSON descriptor.
    #[arg(long)]
    factor: Option<String>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jet_order: Option<usize>,
    /// Replaces every tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.model {
            c.model = v;
        }
        if let Some(v) = self.m {
            c.m = v;
        }
        if let Some(v) = &self.factor {
            c.factor = parse_factor(v, c.m)?;
        }
        if let Some(v) = self.points {
            c.points = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.jet_order {
            c.jet_order = v;
        }
        if let Some(v) = self.tol {
            c.tolerances = Tolerances::uniform(v);
        }
        if let Some(v) = self.suite {
            c.suite = v;
        }
        if let Some(v) = self.out {
            c.out = Some(v);
        }
        if let Some(v) = self.format {
            c.format = v;
        }
        Ok(c)
    }
}

fn write(report: &VerificationReport, format: ReportFormat, out: Option<&std::path::Path>) -> Result<()> {
    let text = emit_report(report, format, out)?;
    if out.is_none() {
        std::io::stdout().write_all(text.as_bytes())?;
    } else {
        let failed: Vec<&str> =
            report.checks.iter().filter(|c| c.verdict.name() == "fail").map(|c| c.id.as_str()).collect();
        eprintln!("{}: {} checks, verdict {}", report.meta.suite, report.checks.len(), report.verdict.name());
        if !failed.is_empty() {
            eprintln!("failed: {}", failed.join(", "));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Verify(args) => {
            let config = args.resolve()?;
            let report = run_check_suite(&config, config.suite)?;
            write(&report, config.format, config.out.as_deref())?;
            Ok(report.exit_code())
        }
        Command::Optimize(args) => {
            let config = args.resolve()?;
            let report = run_optimizer(&config)?;
            write(&report, config.format, config.out.as_deref())?;
            Ok(report.exit_code())
        }
        Command::Report { input, format, out } => {
            let report = load_report(&input)?;
            write(&report, format, out.as_deref())?;
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
