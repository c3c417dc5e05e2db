use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use modecay::{emit, execute, CliError, Command, Format, Options, Source};

/// Decay of an unstable state under weak modulation of its coupling to a
/// continuum: rates, sweeps, optimization and validation.
#[derive(Debug, Parser)]
#[command(name = "modecay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Use a shipped preset instead of a configuration file.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for sweeps.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Fail (exit 3) when the weak-coupling validity condition is violated.
    #[arg(long, global = true)]
    strict_validity: bool,
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let source = Source::from_flags(cli.config, cli.preset)?;
    let options = Options {
        format: cli.format,
        strict_validity: cli.strict_validity,
    };
    let (output, configured) = execute(cli.command, source, options)?;
    for w in &output.warnings {
        eprintln!("{w}");
    }
    emit(&output.text, cli.out.or(configured).as_deref())?;
    Ok(output.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
