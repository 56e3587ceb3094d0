use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use weylscope::commands::{cmd_analyze, cmd_spectrum, cmd_verify_algebra, load_metric, saved_report_passed};
use weylscope::error::CliError;
use weylscope::points::PointsArg;
use weylscope::report::{render, Format, Report};

#[derive(Parser)]
#[command(name = "weylscope", version, about = "Conformal curvature diagnostics for chart metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct MetricArgs {
    /// Metric definition JSON, or a builtin catalog key.
    #[arg(long)]
    spec: String,
    /// `spec`, `grid`, `grid:K`, `lattice:K`, `random:N`, or `x1,..,xn;...`.
    #[arg(long, default_value = "spec")]
    points: PointsArg,
    /// Seed for `random:N` points. WEYLSCOPE_SEED takes precedence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the default check tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature and C-space diagnostics at sample points.
    Analyze(MetricArgs),
    /// Weyl spectra and symmetry-space dimensions of a 4-dimensional metric.
    Spectrum(MetricArgs),
    /// Seeded property suites over random algebraic Weyl tensors.
    VerifyAlgebra {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// One or more dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "4")]
        dim: Vec<usize>,
        /// Use one tolerance for every suite.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Re-render a saved JSON report.
    Report {
        path: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

fn seed_override(seed: u64) -> Result<u64, CliError> {
    match std::env::var("WEYLSCOPE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Args(format!("WEYLSCOPE_SEED='{v}' is not an unsigned integer"))),
        Err(_) => Ok(seed),
    }
}

fn emit(value: &Value, output: &Output) -> Result<(), CliError> {
    let text = render(value, output.format)?;
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(mut report: Report, started: Instant, output: &Output) -> Result<bool, CliError> {
    report.timing.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    emit(&report.to_value(), output)?;
    for f in &report.failures {
        eprintln!("FAILED {f}");
    }
    Ok(report.passed)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let started = Instant::now();
    match cli.command {
        Command::Analyze(a) => {
            let loaded = load_metric(&a.spec)?;
            let report = cmd_analyze(&loaded, &a.points, seed_override(a.seed)?, a.tol)?;
            finish(report, started, &a.output)
        }
        Command::Spectrum(a) => {
            let loaded = load_metric(&a.spec)?;
            let report = cmd_spectrum(&loaded, &a.points, seed_override(a.seed)?, a.tol)?;
            finish(report, started, &a.output)
        }
        Command::VerifyAlgebra {
            seed,
            count,
            dim,
            tol,
            output,
        } => {
            let report = cmd_verify_algebra(seed_override(seed)?, count, &dim, tol)?;
            finish(report, started, &output)
        }
        Command::Report { path, output } => {
            let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Json {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let passed = saved_report_passed(&value)?;
            emit(&value, &output)?;
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
