//! Command-line front end for the `modecay-core` decay-rate engine:
//! configuration files, presets, unit conversion, and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod presets;
pub mod units;

use std::path::{Path, PathBuf};

pub use commands::{Format, Options, Output};
pub use config::Config;
pub use error::{CliError, CliResult};

/// The subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Survival curve t, Q, R, P and validity on the configured time grid.
    Rate,
    /// Long-time R/R_GR over a parameter range.
    Sweep,
    /// Modulation parameters that minimize or maximize decay.
    Optimize,
    /// Compare the exact amplitude with the rate formula.
    Validate,
    /// List the shipped presets, or print one with --preset.
    ListPresets,
}

/// Where the configuration comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Preset(String),
}

impl Source {
    pub fn from_flags(config: Option<PathBuf>, preset: Option<String>) -> CliResult<Option<Self>> {
        match (config, preset) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either --config or --preset, not both".into())),
            (Some(p), None) => Ok(Some(Source::File(p))),
            (None, Some(n)) => Ok(Some(Source::Preset(n))),
            (None, None) => Ok(None),
        }
    }

    pub fn load(&self) -> CliResult<Config> {
        match self {
            Source::File(p) => Config::from_path(p),
            Source::Preset(n) => presets::load(n),
        }
    }
}

/// Runs one command and returns its output and the path it should go to
/// (`None` for stdout).
pub fn execute(command: Command, source: Option<Source>, options: Options) -> CliResult<(Output, Option<PathBuf>)> {
    if command == Command::ListPresets {
        let show = match &source {
            Some(Source::Preset(n)) => Some(n.as_str()),
            Some(Source::File(_)) => return Err(CliError::Usage("list-presets takes no --config".into())),
            None => None,
        };
        return Ok((commands::list_presets(show, options.format)?, None));
    }
    let source = source.ok_or_else(|| CliError::Usage("a --config file or --preset is required".into()))?;
    let config = source.load()?;
    let out = config.output().1;
    let output = match command {
        Command::Rate => commands::rate(&config, options)?,
        Command::Sweep => commands::sweep(&config, options)?,
        Command::Optimize => commands::optimize_cmd(&config, options)?,
        Command::Validate => commands::validate(&config, options)?,
        Command::ListPresets => unreachable!(),
    };
    Ok((output, out))
}

/// Writes `text` to `path`, or to stdout.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                // A closed pipe (e.g. `| head`) is the reader's choice, not a failure.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                }),
            }
        }
    }
}
