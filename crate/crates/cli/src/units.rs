//! Conversion between physical units and the engine's dimensionless ones.
//!
//! The configuration chooses a reference frequency `s` (physical frequency
//! per internal unit). A quantity of dimension `frequency^p` converts as
//! `x_internal = x_physical / s^p`; times have `p = -1`.

use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Dimension exponents of the quantities the CLI handles.
pub mod dim {
    pub const TIME: i32 = -1;
    pub const FREQUENCY: i32 = 1;
    /// `G(ω)` and rates.
    pub const SPECTRAL: i32 = 1;
    pub const NONE: i32 = 0;
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    /// Physical frequency corresponding to one internal unit.
    #[serde(default = "one")]
    pub frequency: f64,
    /// Label of the physical time unit, echoed in reports.
    #[serde(default)]
    pub time_label: Option<String>,
}

fn one() -> f64 {
    1.0
}

impl Default for Units {
    fn default() -> Self {
        Units {
            frequency: 1.0,
            time_label: None,
        }
    }
}

impl Units {
    pub fn new(frequency: f64) -> CliResult<Self> {
        let u = Units {
            frequency,
            time_label: None,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.frequency > 0.0 && self.frequency.is_finite() {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "units.frequency must be positive and finite, got {}",
                self.frequency
            )))
        }
    }

    pub fn to_internal(&self, x: f64, power: i32) -> f64 {
        x / self.frequency.powi(power)
    }

    pub fn to_physical(&self, x: f64, power: i32) -> f64 {
        x * self.frequency.powi(power)
    }
}
