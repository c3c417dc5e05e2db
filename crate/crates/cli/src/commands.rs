//! The subcommands. Each returns its rendered output; the binary decides
//! where to write it.

use modecay_core::optimize::{compare_schemes, optimize, scheme_rate, ControlResult};
use modecay_core::rate::{longtime_curve, modulation_validity, survival_curve, Method, Validity};
use modecay_core::volterra::{compare_with_universal, default_step, solve, MAX_STEPS};
use modecay_core::{Error as CoreError, HarmonicDecomposition};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::format::{csv, json_number as jn, json_rows, number, pretty};
use crate::presets::PRESETS;
use crate::units::dim;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(name: &str) -> CliResult<Self> {
        match name {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("unknown output format '{other}' (expected csv or json)"))),
        }
    }
}

/// Rendered output of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    /// Diagnostics for stderr.
    pub warnings: Vec<String>,
    /// Process exit status.
    pub status: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            warnings: Vec::new(),
            status: 0,
        }
    }
}

/// Options shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Options {
    pub format: Option<Format>,
    pub strict_validity: bool,
}

impl Options {
    fn format(&self, config: &Config, default: Format) -> CliResult<Format> {
        match (self.format, config.output().0) {
            (Some(f), _) => Ok(f),
            (None, Some(name)) => Format::parse(name),
            (None, None) => Ok(default),
        }
    }

    /// Warns about a flagged validity, or fails in strict mode.
    fn check(&self, validity: &Validity, warnings: &mut Vec<String>) -> CliResult<()> {
        if validity.is_flagged() {
            if self.strict_validity {
                return Err(CliError::Validity {
                    ratio: validity.ratio,
                    tier: validity.tier.name(),
                });
            }
            let edge = if validity.edge_degenerate {
                " (a harmonic sits on a spectral edge)"
            } else {
                ""
            };
            warnings.push(format!(
                "warning: R·t_c = {} exceeds 0.1{edge}; the weak-coupling rate formula is not reliable here",
                number(validity.ratio)
            ));
        }
        Ok(())
    }
}

fn validity_json(v: &Validity, config: &Config) -> Value {
    let u = config.units();
    json!({
        "ratio": jn(v.ratio),
        "tier": v.tier.name(),
        "rate": jn(u.to_physical(v.rate, dim::SPECTRAL)),
        "correlation_time": jn(u.to_physical(v.correlation_time, dim::TIME)),
        "edge_degenerate": v.edge_degenerate,
    })
}

/// Survival curve `t, Q, R, P, validity` on the configured time grid.
pub fn rate(config: &Config, options: Options) -> CliResult<Output> {
    let spectrum = config.spectrum()?;
    let modulation = config.modulation()?;
    let times = config.times(&modulation)?;
    let curve = if config.longtime()? {
        let h = HarmonicDecomposition::from_modulation(&modulation, modecay_core::modulation::DEFAULT_TRUNCATION)?;
        let mut curve = longtime_curve(&spectrum, &h, &times)?;
        // Report the scheme's own fluence rather than ε_c²t.
        for s in &mut curve.samples {
            let q = modulation.fluence(s.time)?;
            s.fluence = q;
            s.survival = s.rate.map_or(1.0, |r| (-r * q).exp());
        }
        curve
    } else {
        survival_curve(&spectrum, &modulation, &times)?
    };
    let mut warnings = Vec::new();
    options.check(&curve.validity, &mut warnings)?;
    let u = config.units();
    let header = ["t", "Q", "R", "P", "validity"];
    let ratio = curve.validity.ratio;
    let format = options.format(config, Format::Csv)?;
    let text = match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = curve
                .samples
                .iter()
                .map(|s| {
                    vec![
                        number(u.to_physical(s.time, dim::TIME)),
                        number(u.to_physical(s.fluence, dim::TIME)),
                        s.rate.map_or(String::new(), |r| number(u.to_physical(r, dim::SPECTRAL))),
                        number(s.survival),
                        number(ratio),
                    ]
                })
                .collect();
            csv(&header, &rows)
        }
        Format::Json => {
            let rows: Vec<Vec<Value>> = curve
                .samples
                .iter()
                .map(|s| {
                    vec![
                        jn(u.to_physical(s.time, dim::TIME)),
                        jn(u.to_physical(s.fluence, dim::TIME)),
                        s.rate.map_or(Value::Null, |r| jn(u.to_physical(r, dim::SPECTRAL))),
                        jn(s.survival),
                        jn(ratio),
                    ]
                })
                .collect();
            pretty(&json!({
                "config": config.name,
                "method": match curve.method {
                    Method::FiniteWindow => "finite-window",
                    Method::LongTimeHarmonic => "long-time",
                    Method::StationaryRandom => "stationary",
                },
                "validity": validity_json(&curve.validity, config),
                "rows": json_rows(&header, &rows),
            }))
        }
    };
    Ok(Output {
        text,
        warnings,
        status: 0,
    })
}

/// One sweep point: the scheme label (if any), the swept value in
/// physical units, the rate in internal units, `R/R_GR` and `R·t_c`.
#[derive(Clone)]
struct SweepPoint {
    scheme: Option<String>,
    value: f64,
    rate: f64,
    ratio: f64,
    validity: Validity,
}

/// Long-time `R/R_GR` over a parameter range.
pub fn sweep(config: &Config, options: Options) -> CliResult<Output> {
    let (section, values) = config.sweep()?;
    let points: Vec<SweepPoint> = match &section.schemes {
        Some(names) => {
            if section.parameter != "period" {
                return Err(CliError::Config(
                    "a scheme comparison sweeps the shared 'period'".into(),
                ));
            }
            let templates = config.sweep_schemes(names)?;
            let spectrum = config.spectrum()?;
            let per_value: Vec<CliResult<Vec<SweepPoint>>> = values
                .par_iter()
                .map(|&v| {
                    let tau = config.units().to_internal(v, dim::TIME);
                    let table = compare_schemes(&spectrum, &templates, &[tau])?;
                    table
                        .rows
                        .iter()
                        .map(|row| {
                            let validity = modulation_validity(&spectrum, &row.scheme.at(tau)?)?;
                            Ok(SweepPoint {
                                scheme: Some(row.scheme.label()),
                                value: v,
                                rate: row.rates[0],
                                ratio: row.ratios[0],
                                validity,
                            })
                        })
                        .collect()
                })
                .collect();
            let mut by_value = Vec::new();
            for p in per_value {
                by_value.push(p?);
            }
            // Group rows by scheme, each in increasing period.
            (0..templates.len())
                .flat_map(|i| by_value.iter().map(move |row| row[i].clone()))
                .collect()
        }
        None => {
            let results: Vec<CliResult<SweepPoint>> = values
                .par_iter()
                .map(|&v| {
                    let c = config.with_value(&section.parameter, v)?;
                    let spectrum = c.spectrum()?;
                    let modulation = c.modulation()?;
                    let rate = scheme_rate(&spectrum, &modulation)?;
                    let gr = spectrum.golden_rule_rate();
                    Ok(SweepPoint {
                        scheme: None,
                        value: v,
                        rate,
                        ratio: if gr > 0.0 { rate / gr } else { f64::NAN },
                        validity: modulation_validity(&spectrum, &modulation)?,
                    })
                })
                .collect();
            results.into_iter().collect::<CliResult<_>>()?
        }
    };
    let mut warnings = Vec::new();
    let mut flagged = Vec::new();
    for p in &points {
        options.check(&p.validity, &mut flagged)?;
    }
    if !flagged.is_empty() {
        let worst = points.iter().map(|p| p.validity.ratio).fold(0.0, f64::max);
        warnings.push(format!(
            "warning: {} of {} points have R·t_c above 0.1 (largest {}); their rates are not reliable",
            flagged.len(),
            points.len(),
            number(worst)
        ));
    }
    let u = config.units();
    let with_scheme = section.schemes.is_some();
    let header: Vec<&str> = if with_scheme {
        vec!["scheme", section.parameter.as_str(), "rate", "ratio", "validity"]
    } else {
        vec![section.parameter.as_str(), "rate", "ratio", "validity"]
    };
    let text = match options.format(config, Format::Csv)? {
        Format::Csv => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| {
                    let mut row = Vec::with_capacity(5);
                    if let Some(s) = &p.scheme {
                        row.push(format!("\"{s}\""));
                    }
                    row.extend([
                        number(p.value),
                        number(u.to_physical(p.rate, dim::SPECTRAL)),
                        number(p.ratio),
                        number(p.validity.ratio),
                    ]);
                    row
                })
                .collect();
            csv(&header, &rows)
        }
        Format::Json => {
            let rows: Vec<Vec<Value>> = points
                .iter()
                .map(|p| {
                    let mut row = Vec::with_capacity(5);
                    if let Some(s) = &p.scheme {
                        row.push(Value::String(s.clone()));
                    }
                    row.extend([
                        jn(p.value),
                        jn(u.to_physical(p.rate, dim::SPECTRAL)),
                        jn(p.ratio),
                        jn(p.validity.ratio),
                    ]);
                    row
                })
                .collect();
            pretty(&json_rows(&header, &rows))
        }
    };
    Ok(Output {
        text,
        warnings,
        status: 0,
    })
}

/// Optimal modulation parameters as JSON (or `name,value` CSV).
pub fn optimize_cmd(config: &Config, options: Options) -> CliResult<Output> {
    let problem = config.control_problem()?;
    let format = options.format(config, Format::Json)?;
    let u = config.units().clone();
    match optimize(&problem) {
        Ok(result) => {
            let fields = result_fields(&result, &problem.family, config);
            let text = match format {
                Format::Json => pretty(&Value::Object(fields)),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = flatten("", &Value::Object(fields))
                        .into_iter()
                        .map(|(k, v)| vec![k, v])
                        .collect();
                    csv(&["name", "value"], &rows)
                }
            };
            let mut out = Output::ok(text);
            if result.excluded > 0 {
                out.warnings.push(format!(
                    "note: {} evaluated points exceeded the validity limit and were excluded",
                    result.excluded
                ));
            }
            Ok(out)
        }
        Err(CoreError::Infeasible { validity_map }) => {
            let names = problem.family.parameter_names();
            let map: Vec<Value> = validity_map
                .iter()
                .map(|(x, r)| {
                    let params: Map<String, Value> = x
                        .iter()
                        .enumerate()
                        .map(|(i, v)| {
                            let (name, value) = match names.get(i) {
                                Some(n) => (n.to_string(), physical_parameter(n, *v, &u)),
                                None => ("frequency".to_string(), u.to_physical(*v, dim::FREQUENCY)),
                            };
                            (name, jn(value))
                        })
                        .collect();
                    json!({ "parameters": params, "validity_ratio": jn(*r) })
                })
                .collect();
            let text = match format {
                Format::Json => pretty(&json!({ "error": "infeasible", "validity_map": map })),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = validity_map
                        .iter()
                        .map(|(x, r)| {
                            let mut row: Vec<String> = x.iter().map(|v| number(*v)).collect();
                            row.push(number(*r));
                            row
                        })
                        .collect();
                    let mut header: Vec<&str> = if names.is_empty() { vec!["frequency"] } else { names.to_vec() };
                    header.push("validity_ratio");
                    csv(&header, &rows)
                }
            };
            Ok(Output {
                text,
                warnings: vec![format!(
                    "error: every evaluated point has R·t_c above {}; nothing to optimize",
                    number(problem.validity_limit)
                )],
                status: 3,
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn physical_parameter(name: &str, value: f64, u: &crate::units::Units) -> f64 {
    match name {
        "period" | "on" => u.to_physical(value, dim::TIME),
        "detuning" => u.to_physical(value, dim::FREQUENCY),
        _ => value,
    }
}

fn result_fields(r: &ControlResult, family: &modecay_core::optimize::Family, config: &Config) -> Map<String, Value> {
    let u = config.units();
    let mut m = Map::new();
    m.insert("family".into(), Value::String(r.family.into()));
    let params: Map<String, Value> = family
        .parameter_names()
        .iter()
        .zip(&r.parameters)
        .map(|(n, v)| (n.to_string(), jn(physical_parameter(n, *v, u))))
        .collect();
    m.insert("parameters".into(), Value::Object(params));
    if let (Some(w), modecay_core::optimize::Family::FreeHarmonics { frequencies }) = (&r.weights, family) {
        let list: Vec<Value> = frequencies
            .iter()
            .zip(w)
            .map(|(f, w)| json!({ "frequency": jn(u.to_physical(*f, dim::FREQUENCY)), "weight": jn(*w) }))
            .collect();
        m.insert("weights".into(), Value::Array(list));
    }
    m.insert("rate".into(), jn(u.to_physical(r.value, dim::SPECTRAL)));
    m.insert("unmodulated_rate".into(), jn(u.to_physical(r.unmodulated, dim::SPECTRAL)));
    m.insert("improvement".into(), jn(r.improvement));
    m.insert("validity_ratio".into(), jn(r.validity_ratio));
    m.insert("evaluations".into(), Value::from(r.evaluations));
    m.insert("excluded".into(), Value::from(r.excluded));
    m
}

fn flatten(prefix: &str, v: &Value) -> Vec<(String, String)> {
    match v {
        Value::Object(map) => map
            .iter()
            .flat_map(|(k, v)| {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v)
            })
            .collect(),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .flat_map(|(i, v)| flatten(&format!("{prefix}.{i}"), v))
            .collect(),
        Value::String(s) => vec![(prefix.to_string(), s.clone())],
        other => vec![(prefix.to_string(), other.to_string())],
    }
}

/// Exact amplitude against the rate formula.
pub fn validate(config: &Config, options: Options) -> CliResult<Output> {
    let spectrum = config.spectrum()?;
    let modulation = config.modulation()?;
    let section = config.validate_section();
    let u = config.units().clone();
    let validity = modulation_validity(&spectrum, &modulation)?;
    let step = match section.step {
        Some(h) => u.to_internal(h, dim::TIME),
        None => default_step(&spectrum, &modulation)?,
    };
    let horizon = match section.horizon {
        Some(t) => u.to_internal(t, dim::TIME),
        None if validity.rate > 0.0 => 5.0 / validity.rate,
        None => 1000.0 * step,
    };
    let n = (horizon / step).round().max(1.0) as usize;
    if n > MAX_STEPS {
        return Err(CliError::Config(format!(
            "horizon/step = {n} exceeds the solver limit of {MAX_STEPS} steps"
        )));
    }
    let samples = section.samples.unwrap_or(201).clamp(2, n + 1);
    let mut indices: Vec<usize> = (0..samples).map(|i| (i * n + (samples - 1) / 2) / (samples - 1)).collect();
    indices.dedup();
    let times: Vec<f64> = indices.iter().map(|&i| i as f64 * step).collect();
    let trajectory = solve(&spectrum, &modulation, n as f64 * step, step)?;
    let curve = survival_curve(&spectrum, &modulation, &times)?;
    let tolerance = section.tolerance.unwrap_or(0.02);
    let report = compare_with_universal(&trajectory, &curve, tolerance)?;
    let mut warnings = Vec::new();
    options.check(&validity, &mut warnings)?;
    if !report.passed {
        warnings.push(format!(
            "note: maximum deviation {} exceeds the tolerance {}",
            number(report.max_relative),
            number(tolerance)
        ));
    }
    let fields = json!({
        "config": config.name,
        "modulation": modulation.name(),
        "step": jn(u.to_physical(step, dim::TIME)),
        "horizon": jn(u.to_physical(n as f64 * step, dim::TIME)),
        "max_relative_deviation": jn(report.max_relative),
        "mean_relative_deviation": jn(report.mean_relative),
        "worst_time": jn(u.to_physical(report.worst_time, dim::TIME)),
        "samples": report.samples,
        "tolerance": jn(tolerance),
        "passed": report.passed,
        "validity": validity_json(&validity, config),
    });
    let text = match options.format(config, Format::Json)? {
        Format::Json => pretty(&fields),
        Format::Csv => {
            let rows: Vec<Vec<String>> = flatten("", &fields).into_iter().map(|(k, v)| vec![k, v]).collect();
            csv(&["name", "value"], &rows)
        }
    };
    Ok(Output {
        text,
        warnings,
        status: 0,
    })
}

/// Names and descriptions of the shipped presets, or the full text of one.
pub fn list_presets(show: Option<&str>, format: Option<Format>) -> CliResult<Output> {
    if let Some(name) = show {
        return Ok(Output::ok(crate::presets::source(name)?.to_string()));
    }
    let entries: Vec<(&str, String)> = PRESETS
        .iter()
        .map(|(name, _)| {
            let c = crate::presets::load(name)?;
            Ok((*name, c.file.description.clone().unwrap_or_default()))
        })
        .collect::<CliResult<_>>()?;
    let text = match format {
        Some(Format::Json) => pretty(&Value::Array(
            entries
                .iter()
                .map(|(n, d)| json!({ "name": n, "description": d }))
                .collect(),
        )),
        Some(Format::Csv) => {
            let rows: Vec<Vec<String>> = entries
                .iter()
                .map(|(n, d)| vec![n.to_string(), format!("\"{}\"", d.replace('"', "\"\""))])
                .collect();
            csv(&["name", "description"], &rows)
        }
        None => {
            let width = entries.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
            entries
                .iter()
                .map(|(n, d)| format!("{n:width$}  {d}\n"))
                .collect()
        }
    };
    Ok(Output::ok(text))
}
