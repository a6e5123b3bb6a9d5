mod commands;
mod golden;
mod params;
mod report;

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Failure, Outcome};
use params::{FileConfig, Params};

/// Spectra of Toeplitz operators on weighted Bergman spaces: reference
/// tables, α-scans, chart classification and determinant checks.
#[derive(Debug, Parser)]
#[command(name = "szegolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, ValueEnum)]
enum Command {
    /// Counts in [16/15, 16/9] for r = 1/2, checked against the reference table.
    Table1,
    /// Counts in [2/5, 3/5] for r = 1/√2, checked against the reference table.
    Table2,
    /// Scaled traces, Schatten norms (--p) or interval counts (--t1/--t2) over an α grid.
    Scan,
    /// Classify a built-in chart as isotropic, co-isotropic or neither.
    Classify,
    /// Evaluate a block Hessian determinant three ways for a random metric pair.
    Hessdet,
    /// Compare the numerical Q transform with the monomial rule.
    Qcheck,
    /// Compare the composition-trace quadrature with eigenvalue sums.
    TraceCompare,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SZEGOLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("SZEGOLAB_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    configure_threads()?;
    let (file_command, params) = match &cli.params.config {
        Some(path) => {
            let file = FileConfig::load(path).map_err(|e| Failure::Usage(e.to_string()))?;
            (file.command, cli.params.or(file.params))
        }
        None => (None, cli.params),
    };
    let command = match (cli.command, file_command) {
        (Some(c), _) => c,
        (None, Some(name)) => Command::from_str(&name, true)
            .map_err(|_| Failure::Usage(format!("unknown command '{name}' in config")))?,
        (None, None) => return Err(Failure::Usage("no command given (try --help)".into())),
    };
    let outcome = match command {
        Command::Table1 => commands::table(&golden::TABLE1, &params),
        Command::Table2 => commands::table(&golden::TABLE2, &params),
        Command::Scan => commands::scan(&params),
        Command::Classify => commands::classify_chart(&params),
        Command::Hessdet => commands::hessdet(&params),
        Command::Qcheck => commands::qcheck(&params),
        Command::TraceCompare => commands::trace_compare(&params),
    }?;
    match &params.out {
        Some(path) => fs::write(path, &outcome.text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", outcome.text),
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            for f in &outcome.failures {
                eprintln!("error: {}", f.message());
            }
            let code = outcome.failures.iter().map(Failure::exit_code).max().unwrap_or(0);
            ExitCode::from(code as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
