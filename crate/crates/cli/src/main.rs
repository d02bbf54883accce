//! `qkrec`: run the reconstruction pipeline, invariant suites and table checks.
//!
//! Exit codes: 0 success, 1 failed computation or failing check, 2 malformed
//! input (JSON syntax or schema errors, reported with line and column).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qkrec_core::checks::{run_suite, DEFAULT_SEED, SUITES};
use qkrec_core::correlators::{validate_table, CorrelatorTable, PointBackend};
use qkrec_core::report::{f1_report, tau_report, to_json};
use qkrec_core::spec::RunSpec;
use qkrec_core::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "qkrec", version, about = "Exact genus-1 reconstruction of permutation-equivariant quantum K-invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the fixed point tau and its iterates.
    Tau {
        #[arg(long)]
        spec: PathBuf,
        /// Write the report here instead of the spec's `output` or stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compute the full genus-1 potential with its decomposition.
    F1 {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a named invariant suite.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Truncation order (suite-specific default).
        #[arg(long)]
        order: Option<u32>,
    },
    /// Correlator table utilities.
    Table {
        #[command(subcommand)]
        command: TableCommand,
    },
}

#[derive(Subcommand)]
enum TableCommand {
    /// Check string and dilaton equations among the rows of a table.
    Validate { file: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(context: &str, err: Error) -> Self {
        let code = match err {
            Error::Json(_) | Error::Parse(_) => 2,
            _ => 1,
        };
        let message = match &err {
            Error::Json(e) if e.is_syntax() || e.is_eof() || e.is_data() => format!(
                "{context}: malformed JSON at line {}, column {}: {e}",
                e.line(),
                e.column()
            ),
            _ => format!("{context}: {err}"),
        };
        Self { code, message }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_spec(path: &Path) -> Result<RunSpec, Failure> {
    RunSpec::load(path).map_err(|e| Failure::new(&format!("spec {}", path.display()), e))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::new(&format!("writing {}", p.display()), e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Tau { spec, output } => run_spec(&spec, output, false),
        Command::F1 { spec, output } => run_spec(&spec, output, true),
        Command::Check { suite, seed, order } => {
            let report = run_suite(&suite, seed, order).map_err(|e| Failure::new(&format!("suite {suite}"), e))?;
            print!("{}", to_json(&report));
            for i in report.instances.iter().filter(|i| !i.passed) {
                eprintln!("FAIL {}: {}", i.name, i.detail);
            }
            eprintln!("{suite}: {} passed, {} failed", report.passed, report.failed);
            Ok(report.all_passed)
        }
        Command::Table {
            command: TableCommand::Validate { file },
        } => {
            let ctx = format!("table {}", file.display());
            let table = CorrelatorTable::load(&file).map_err(|e| Failure::new(&ctx, e))?;
            let report = validate_table(&table, &PointBackend::default());
            let ok = report.violations.is_empty();
            let out = json!({
                "table": file.display().to_string(),
                "sha256": table.checksum(),
                "entries": table.len(),
                "checked": report.checked,
                "skipped": report.skipped,
                "violations": report.violations,
                "valid": ok,
            });
            print!("{}", to_json(&out));
            Ok(ok)
        }
    }
}

fn run_spec(path: &Path, output: Option<PathBuf>, full: bool) -> Result<bool, Failure> {
    let spec = load_spec(path)?;
    let ctx = format!("spec {}", path.display());
    let (input, backend, tables) = spec.prepare(path.parent()).map_err(|e| Failure::new(&ctx, e))?;
    let text = if full {
        to_json(&f1_report(&backend, &input, &tables).map_err(|e| Failure::new(&ctx, e))?)
    } else {
        to_json(&tau_report(&backend, &input, &tables).map_err(|e| Failure::new(&ctx, e))?)
    };
    let out = output.or_else(|| {
        spec.output
            .as_ref()
            .map(|o| path.parent().map_or_else(|| o.clone(), |d| d.join(o)))
    });
    emit(&text, out.as_deref())?;
    Ok(true)
}
