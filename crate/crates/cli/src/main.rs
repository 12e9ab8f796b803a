//! Batch front-end: load a scenario file, dispatch the requested check,
//! write a JSON or CSV report, and exit with a CI-friendly code:
//! 0 = all checks pass, 1 = property violation found, 2 = budget
//! exhausted or indeterminate, 3 = input error.

mod commands;
mod csvout;
mod scenario;

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use scenario::ScenarioFile;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Scenario(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Scenario(m) => write!(f, "scenario error: {m}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Kind {
    #[value(name = "c-axioms")]
    CAxioms,
    Doag,
    Trace,
    Classify,
    Separated,
    #[value(name = "in-search")]
    InSearch,
    Counterexample,
    Inequality,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::CAxioms => "c-axioms",
            Kind::Doag => "doag",
            Kind::Trace => "trace",
            Kind::Classify => "classify",
            Kind::Separated => "separated",
            Kind::InSearch => "in-search",
            Kind::Counterexample => "counterexample",
            Kind::Inequality => "inequality",
        }
    }

    fn default_out(self) -> &'static str {
        match self {
            Kind::Counterexample => "cx-report.json",
            Kind::CAxioms => "c-axioms-report.json",
            Kind::Doag => "doag-report.json",
            Kind::Trace => "trace-report.json",
            Kind::Classify => "classify-report.json",
            Kind::Separated => "separated-report.json",
            Kind::InSearch => "in-search-report.json",
            Kind::Inequality => "inequality-report.json",
        }
    }
}

/// Exact checks in valued fields, scenario in, report out.
#[derive(Parser, Debug)]
#[command(name = "valfield", version, disable_help_subcommand = true)]
struct Args {
    /// Which check to run; must match the scenario's `kind`.
    #[arg(value_enum)]
    kind: Kind,
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Report path; defaults to `<kind>-report.json` in the working
    /// directory (`cx-report.json` for the counterexample).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for all randomized confirmations.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the scenario's round budget.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("valfield: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(args: &Args) -> Result<i32, CliError> {
    let threads = parse_threads()?;
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.scenario.display())))?;
    let file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| CliError::Scenario(e.to_string()))?;
    if file.version != "1" {
        return Err(CliError::Scenario(format!(
            "unsupported scenario version `{}`",
            file.version
        )));
    }
    if file.kind != args.kind.name() {
        return Err(CliError::Scenario(format!(
            "scenario kind `{}` does not match subcommand `{}`",
            file.kind,
            args.kind.name()
        )));
    }
    let mut budgets = file.budgets;
    if let Some(b) = args.budget {
        budgets.rounds = b;
    }
    let mut ctx = commands::Ctx {
        budgets,
        rng: ChaCha8Rng::seed_from_u64(args.seed),
    };
    let (body, code) = match args.kind {
        Kind::CAxioms => commands::run_c_axioms(file.payload, &mut ctx)?,
        Kind::Doag => commands::run_doag(file.payload, &mut ctx)?,
        Kind::Trace => commands::run_trace(file.payload, &mut ctx)?,
        Kind::Classify => commands::run_classify(file.payload, &mut ctx)?,
        Kind::Separated => commands::run_separated(file.payload, &mut ctx)?,
        Kind::InSearch => commands::run_in_search(file.payload, &mut ctx)?,
        Kind::Counterexample => commands::run_counterexample(file.payload, &mut ctx)?,
        Kind::Inequality => commands::run_inequality(file.payload, &mut ctx)?,
    };
    let report = json!({
        "tool": "valfield",
        "toolVersion": env!("CARGO_PKG_VERSION"),
        "kind": args.kind.name(),
        "seed": args.seed,
        "threadsCap": threads,
        "budgets": ctx.budgets,
        "exitCode": code,
        "report": body,
    });
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(args.kind.default_out()));
    match args.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Scenario(e.to_string()))?;
            text.push('\n');
            write_atomic(&out, text.as_bytes())?;
        }
        Format::Csv => {
            let rows = csvout::to_rows(args.kind.name(), &report);
            write_atomic(&out, csvout::render(&rows).as_bytes())?;
        }
    }
    println!("{}: exit {code}, report {}", args.kind.name(), out.display());
    Ok(code)
}

/// Parallelism cap from the environment. The engine is sequential, so any
/// positive cap is honored; the value is recorded in the report.
fn parse_threads() -> Result<usize, CliError> {
    match std::env::var("VALFIELD_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Scenario(format!("invalid VALFIELD_THREADS `{v}`"))),
    }
}

/// Writes through a temporary sibling and renames into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
