//! Experiment configuration: one declarative TOML file per run.
//!
//! Every quantity is given in physical units and converted with the
//! `[units]` reference frequency. Relative file paths are resolved against
//! the configuration file's directory.

use std::path::{Path, PathBuf};

use modecay_core::optimize::{Band, BandObjective, ControlProblem, Family, Goal, SchemeTemplate};
use modecay_core::spectra::SpectrumModel;
use modecay_core::{Complex64, CouplingSpectrum, Modulation};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::format::{read_harmonics, read_pairs, read_text};
use crate::units::{dim, Units};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub units: Units,
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub modulation: Option<ModulationSection>,
    #[serde(default)]
    pub times: Option<TimesSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub optimize: Option<OptimizeSection>,
    #[serde(default)]
    pub validate: Option<ValidateSection>,
    #[serde(default)]
    pub output: Option<OutputSection>,
    #[serde(default)]
    pub lattice: Option<LatticeSection>,
}

/// Tilted optical-lattice parameters, for reporting the tunneling time scale.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    /// Lattice acceleration `a`.
    pub acceleration: f64,
    /// Lattice period `d`.
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumSection {
    BandEdge {
        strength: f64,
        gamma: f64,
        #[serde(default)]
        cutoff: Option<f64>,
        resonance: f64,
    },
    Lorentzian {
        weight: f64,
        center: f64,
        width: f64,
        resonance: f64,
    },
    Flat {
        level: f64,
        #[serde(default)]
        cutoff: Option<f64>,
        resonance: f64,
    },
    LatticePeak {
        weight: f64,
        peak: f64,
        #[serde(default)]
        rise: Option<f64>,
        #[serde(default)]
        fall: Option<f64>,
        resonance: f64,
    },
    Tabulated {
        file: PathBuf,
        resonance: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModulationSection {
    Constant {
        #[serde(default)]
        amplitude: Option<f64>,
    },
    Monochromatic {
        #[serde(default)]
        amplitude: Option<f64>,
        detuning: f64,
    },
    Pm {
        phase: f64,
        period: f64,
    },
    Am {
        on: f64,
        period: f64,
    },
    Quasiperiodic {
        /// `[ω_k, Re ε_k, Im ε_k]` rows.
        #[serde(default)]
        harmonics: Option<Vec<[f64; 3]>>,
        #[serde(default)]
        file: Option<PathBuf>,
    },
    RandomLorentzian {
        shift: f64,
        width: f64,
        intensity: f64,
    },
    Measurement {
        interval: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesSection {
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    /// Interpret the grid as total coupling times `Q` rather than clock times.
    #[serde(default)]
    pub coupling: bool,
    /// `window` (finite-window rate, default) or `longtime`.
    #[serde(default)]
    pub method: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// `section.key` of a numeric configuration entry, or `period` together
    /// with `schemes`.
    pub parameter: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    /// Schemes sharing the swept period: `pm:<phase>`, `am:<duty>`,
    /// `measurement`.
    #[serde(default)]
    pub schemes: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    /// `pm`, `am`, `monochromatic` or `free-harmonics`.
    pub family: String,
    #[serde(default)]
    pub goal: Option<String>,
    #[serde(default)]
    pub phase: Option<[f64; 2]>,
    #[serde(default)]
    pub period: Option<[f64; 2]>,
    #[serde(default)]
    pub on: Option<[f64; 2]>,
    #[serde(default)]
    pub detuning: Option<[f64; 2]>,
    #[serde(default)]
    pub frequencies: Option<Vec<f64>>,
    /// `[ω_a, P]` rows.
    #[serde(default)]
    pub band: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub band_file: Option<PathBuf>,
    /// `survival` (default) or `rate`.
    #[serde(default)]
    pub objective: Option<String>,
    /// Survival horizon `t*`.
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub truncation: Option<u64>,
    #[serde(default)]
    pub validity_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

/// A parsed configuration with its source, kept for parameter sweeps.
#[derive(Debug, Clone)]
pub struct Config {
    pub name: String,
    pub file: ConfigFile,
    raw: toml::Table,
    base: PathBuf,
}

impl Config {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&path.display().to_string(), &text, base)
    }

    /// Parses configuration text; relative paths resolve against `base`.
    pub fn parse(name: &str, text: &str, base: PathBuf) -> CliResult<Self> {
        let raw: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        Self::from_table(name.to_string(), raw, base)
    }

    fn from_table(name: String, raw: toml::Table, base: PathBuf) -> CliResult<Self> {
        let file: ConfigFile = raw
            .clone()
            .try_into()
            .map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        file.units.validate()?;
        Ok(Config { name, file, raw, base })
    }

    /// A copy with `section.key` set to `value` (physical units).
    pub fn with_value(&self, key: &str, value: f64) -> CliResult<Self> {
        let (section, field) = key
            .split_once('.')
            .ok_or_else(|| CliError::Config(format!("sweep parameter '{key}' must be 'section.key'")))?;
        let mut raw = self.raw.clone();
        let table = raw
            .get_mut(section)
            .and_then(toml::Value::as_table_mut)
            .ok_or_else(|| CliError::Config(format!("no [{section}] section to sweep")))?;
        match table.get(field) {
            Some(toml::Value::Float(_)) | Some(toml::Value::Integer(_)) => {}
            _ => return Err(CliError::Config(format!("'{key}' is not a numeric entry"))),
        }
        table.insert(field.to_string(), toml::Value::Float(value));
        Self::from_table(self.name.clone(), raw, self.base.clone())
    }

    pub fn units(&self) -> &Units {
        &self.file.units
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base.join(path)
        }
    }

    fn freq(&self, x: f64) -> f64 {
        self.units().to_internal(x, dim::FREQUENCY)
    }

    fn time(&self, x: f64) -> f64 {
        self.units().to_internal(x, dim::TIME)
    }

    pub fn spectrum(&self) -> CliResult<CouplingSpectrum> {
        let u = self.units();
        let model = match &self.file.spectrum {
            SpectrumSection::BandEdge { strength, gamma, cutoff, resonance } => {
                let base = CouplingSpectrum::band_edge(u.to_internal(*strength, 0) / u.frequency.sqrt(), self.freq(*gamma), self.freq(*resonance))?;
                return Ok(match cutoff {
                    Some(c) => base.with_band_cutoff(self.freq(*c))?,
                    None => base,
                });
            }
            SpectrumSection::Lorentzian { weight, center, width, resonance } => {
                return Ok(CouplingSpectrum::lorentzian(
                    u.to_internal(*weight, 2),
                    self.freq(*center),
                    self.freq(*width),
                    self.freq(*resonance),
                )?)
            }
            SpectrumSection::Flat { level, cutoff, resonance } => {
                return Ok(CouplingSpectrum::flat(
                    u.to_internal(*level, dim::SPECTRAL),
                    cutoff.map_or(f64::INFINITY, |c| self.freq(c)),
                    self.freq(*resonance),
                )?)
            }
            SpectrumSection::LatticePeak { weight, peak, rise, fall, resonance } => (
                SpectrumModel::LatticePeak {
                    weight: u.to_internal(*weight, dim::SPECTRAL),
                    peak: self.freq(*peak),
                    rise: rise.unwrap_or(2.0),
                    fall: fall.unwrap_or(2.0),
                },
                *resonance,
            ),
            SpectrumSection::Tabulated { file, resonance } => {
                let points = read_pairs(&self.resolve(file))?
                    .into_iter()
                    .map(|(w, g)| (self.freq(w), u.to_internal(g, dim::SPECTRAL)))
                    .collect();
                return Ok(CouplingSpectrum::tabulated(points, self.freq(*resonance))?);
            }
        };
        Ok(CouplingSpectrum::new(model.0, self.freq(model.1))?)
    }

    pub fn modulation(&self) -> CliResult<Modulation> {
        let section = self
            .file
            .modulation
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [modulation] section".into()))?;
        Ok(match section {
            ModulationSection::Constant { amplitude } => {
                Modulation::new(modecay_core::modulation::Scheme::Constant {
                    amplitude: Complex64::new(amplitude.unwrap_or(1.0), 0.0),
                })?
            }
            ModulationSection::Monochromatic { amplitude, detuning } => {
                Modulation::monochromatic(Complex64::new(amplitude.unwrap_or(1.0), 0.0), self.freq(*detuning))?
            }
            ModulationSection::Pm { phase, period } => Modulation::impulsive_pm(*phase, self.time(*period))?,
            ModulationSection::Am { on, period } => Modulation::on_off_am(self.time(*on), self.time(*period))?,
            ModulationSection::Quasiperiodic { harmonics, file } => {
                let list = match (harmonics, file) {
                    (Some(h), None) => h.iter().map(|r| (r[0], Complex64::new(r[1], r[2]))).collect(),
                    (None, Some(f)) => read_harmonics(&self.resolve(f))?,
                    _ => {
                        return Err(CliError::Config(
                            "quasiperiodic modulation needs exactly one of 'harmonics' or 'file'".into(),
                        ))
                    }
                };
                Modulation::quasiperiodic(list.into_iter().map(|(w, e)| (self.freq(w), e)).collect())?
            }
            ModulationSection::RandomLorentzian { shift, width, intensity } => {
                Modulation::random_lorentzian(self.freq(*shift), self.freq(*width), *intensity)?
            }
            ModulationSection::Measurement { interval } => Modulation::measurement_sinc(self.time(*interval))?,
        })
    }

    /// The configured time grid in internal units, as clock times (coupling
    /// times are converted through the fluence of `modulation`).
    pub fn times(&self, modulation: &Modulation) -> CliResult<Vec<f64>> {
        let section = self
            .file
            .times
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [times] section".into()))?;
        let grid = grid(
            "times",
            section.values.as_deref(),
            section.start,
            section.stop,
            section.count,
        )?;
        let grid: Vec<f64> = grid.into_iter().map(|t| self.time(t)).collect();
        if grid.iter().any(|&t| t < 0.0) {
            return Err(CliError::Config("times must be ≥ 0".into()));
        }
        if section.coupling {
            grid.iter().map(|&q| clock_time(modulation, q)).collect()
        } else {
            Ok(grid)
        }
    }

    pub fn longtime(&self) -> CliResult<bool> {
        match self.file.times.as_ref().and_then(|t| t.method.as_deref()) {
            None | Some("window") => Ok(false),
            Some("longtime") => Ok(true),
            Some(other) => Err(CliError::Config(format!(
                "unknown times.method '{other}' (expected window or longtime)"
            ))),
        }
    }

    pub fn sweep(&self) -> CliResult<(&SweepSection, Vec<f64>)> {
        let s = self
            .file
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [sweep] section".into()))?;
        let values = grid("sweep", s.values.as_deref(), s.start, s.stop, s.count)?;
        Ok((s, values))
    }

    /// Scheme templates of a shared-period sweep.
    pub fn sweep_schemes(&self, names: &[String]) -> CliResult<Vec<SchemeTemplate>> {
        names
            .iter()
            .map(|name| {
                let (kind, arg) = match name.split_once(':') {
                    Some((k, a)) => (k, Some(a)),
                    None => (name.as_str(), None),
                };
                let number = |a: Option<&str>| {
                    a.and_then(|a| a.parse::<f64>().ok())
                        .ok_or_else(|| CliError::Config(format!("scheme '{name}' needs a numeric argument")))
                };
                match kind {
                    "pm" => Ok(SchemeTemplate::Pm { phase: number(arg)? }),
                    "am" => Ok(SchemeTemplate::Am { duty: number(arg)? }),
                    "measurement" if arg.is_none() => Ok(SchemeTemplate::Measurement),
                    _ => Err(CliError::Config(format!(
                        "unknown scheme '{name}' (expected pm:<phase>, am:<duty> or measurement)"
                    ))),
                }
            })
            .collect()
    }

    pub fn control_problem(&self) -> CliResult<ControlProblem> {
        let o = self
            .file
            .optimize
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [optimize] section".into()))?;
        let spectrum = self.spectrum()?;
        let goal = match o.goal.as_deref() {
            None | Some("minimize") => Goal::Minimize,
            Some("maximize") => Goal::Maximize,
            Some(other) => return Err(CliError::Config(format!("unknown goal '{other}'"))),
        };
        let need = |b: Option<[f64; 2]>, key: &str| {
            b.map(|[lo, hi]| (lo, hi))
                .ok_or_else(|| CliError::Config(format!("optimize.{key} box is required for this family")))
        };
        let times = |(lo, hi): (f64, f64)| (self.time(lo), self.time(hi));
        let family = match o.family.as_str() {
            "pm" => Family::Pm {
                phase: need(o.phase, "phase")?,
                period: times(need(o.period, "period")?),
            },
            "am" => Family::Am {
                on: times(need(o.on, "on")?),
                period: times(need(o.period, "period")?),
            },
            "monochromatic" => {
                let (lo, hi) = need(o.detuning, "detuning")?;
                Family::Monochromatic {
                    detuning: (self.freq(lo), self.freq(hi)),
                }
            }
            "free-harmonics" => Family::FreeHarmonics {
                frequencies: o
                    .frequencies
                    .as_ref()
                    .ok_or_else(|| CliError::Config("optimize.frequencies is required for free-harmonics".into()))?
                    .iter()
                    .map(|&w| self.freq(w))
                    .collect(),
            },
            other => return Err(CliError::Config(format!("unknown family '{other}'"))),
        };
        let mut problem = ControlProblem::new(spectrum, goal, family);
        let band = match (&o.band, &o.band_file) {
            (Some(rows), None) => Some(rows.iter().map(|r| (r[0], r[1])).collect::<Vec<_>>()),
            (None, Some(f)) => Some(read_pairs(&self.resolve(f))?),
            (None, None) => None,
            (Some(_), Some(_)) => return Err(CliError::Config("give either optimize.band or optimize.band_file".into())),
        };
        if let Some(points) = band {
            let points = points.into_iter().map(|(w, p)| (self.freq(w), p)).collect();
            problem = problem.with_band(Band::new(points)?);
        }
        match o.objective.as_deref() {
            None | Some("survival") => {
                if let Some(h) = o.horizon {
                    problem.band_objective = BandObjective::SurvivalAveraged { time: self.time(h) };
                }
            }
            Some("rate") => problem.band_objective = BandObjective::RateAveraged,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "unknown objective '{other}' (expected survival or rate)"
                )))
            }
        }
        if let Some(g) = o.grid {
            problem.grid = g;
        }
        if let Some(k) = o.truncation {
            problem.truncation = k;
        }
        if let Some(v) = o.validity_limit {
            problem.validity_limit = v;
        }
        Ok(problem)
    }

    /// `T = ω_g d/(πa)` in physical time units, for lattice spectra with a
    /// `[lattice]` section.
    pub fn tunneling_time(&self) -> Option<f64> {
        match (&self.file.spectrum, &self.file.lattice) {
            (SpectrumSection::LatticePeak { peak, .. }, Some(l)) => {
                Some(peak * l.spacing / (std::f64::consts::PI * l.acceleration))
            }
            _ => None,
        }
    }

    pub fn validate_section(&self) -> ValidateSection {
        self.file.validate.clone().unwrap_or(ValidateSection {
            horizon: None,
            step: None,
            tolerance: None,
            samples: None,
        })
    }

    /// Output format and path from the `[output]` section.
    pub fn output(&self) -> (Option<&str>, Option<PathBuf>) {
        match &self.file.output {
            Some(o) => (o.format.as_deref(), o.path.as_ref().map(|p| self.resolve(p))),
            None => (None, None),
        }
    }
}

/// An explicit list or an inclusive linear grid.
fn grid(section: &str, values: Option<&[f64]>, start: Option<f64>, stop: Option<f64>, count: Option<usize>) -> CliResult<Vec<f64>> {
    let grid = match (values, start, stop, count) {
        (Some(v), None, None, None) => v.to_vec(),
        (None, Some(a), Some(b), Some(n)) => match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n)
                .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
                .collect(),
        },
        _ => {
            return Err(CliError::Config(format!(
                "[{section}] needs either 'values' or all of 'start', 'stop', 'count'"
            )))
        }
    };
    if grid.is_empty() {
        return Err(CliError::Usage(format!("[{section}] range is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Config(format!("[{section}] values must be finite")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!("[{section}] values must be strictly increasing")));
    }
    Ok(grid)
}

/// The earliest clock time at which the fluence reaches `q`.
pub fn clock_time(modulation: &Modulation, q: f64) -> CliResult<f64> {
    if q == 0.0 {
        return Ok(0.0);
    }
    let mut hi = q.max(1e-300);
    let mut tries = 0;
    while modulation.fluence(hi)? < q {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(CliError::Config(format!("coupling time {q} is never reached")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modulation.fluence(mid)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
