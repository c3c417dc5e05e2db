//! Shipped experiment presets. Each is an ordinary configuration file,
//! embedded at build time; copy one out with `list-presets` and `--config`
//! to perturb it.

use std::path::PathBuf;

use crate::config::Config;
use crate::error::{CliError, CliResult};

/// `(name, file contents)` of every preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1b", include_str!("../presets/fig1b.toml")),
    ("fig2-qze", include_str!("../presets/fig2-qze.toml")),
    ("fig2-aze", include_str!("../presets/fig2-aze.toml")),
    ("unmodulated", include_str!("../presets/unmodulated.toml")),
    ("weak-coupling", include_str!("../presets/weak-coupling.toml")),
    ("strong-coupling", include_str!("../presets/strong-coupling.toml")),
];

pub fn source(name: &str) -> CliResult<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!("unknown preset '{name}' (available: {})", names.join(", ")))
        })
}

/// Loads a preset; relative paths in it resolve against the working
/// directory.
pub fn load(name: &str) -> CliResult<Config> {
    Config::parse(&format!("preset {name}"), source(name)?, PathBuf::new())
}
