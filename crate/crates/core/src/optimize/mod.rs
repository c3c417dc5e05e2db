//! Choosing modulation parameters that suppress or enhance decay.
//!
//! Objectives are built on the long-time harmonic rate, optionally averaged
//! over a band of resonance frequencies `P(ω_a)`. Families with one or two
//! continuous parameters are searched by a deterministic grid scan followed
//! by bounded simplex refinement; free harmonic weights are solved exactly,
//! since their objective is linear on the weight simplex.

mod simplex;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
// Math methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure_finite, Error, Result};
use crate::modulation::{Harmonic, HarmonicDecomposition, Modulation, DEFAULT_TRUNCATION};
use crate::rate::{longtime_rate, universal_rate, validity_ratio, ACCEPTABLE_VALIDITY};
use crate::spectra::CouplingSpectrum;

pub use simplex::{minimize, Minimum};

/// Grid points per axis in the coarse scan.
pub const DEFAULT_GRID: usize = 64;
/// Relative tolerance of the simplex refinement.
pub const REFINE_TOLERANCE: f64 = 1e-4;
const REFINE_EVALUATIONS: usize = 2000;
const BAND_NORMALIZATION: f64 = 1e-9;

/// A spectral distribution `P(ω_a)` of resonance frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    points: Vec<(f64, f64)>,
}

impl Band {
    /// `(ω_a, weight)` pairs whose weights are non-negative and sum to 1
    /// within `10⁻⁹`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let total = Self::check(&points)?;
        if (total - 1.0).abs() > BAND_NORMALIZATION {
            return Err(Error::input(format!("band weights sum to {total}, expected 1")));
        }
        Ok(Band { points })
    }

    /// Like [`Band::new`] but rescales the weights to sum to 1.
    pub fn normalized(points: Vec<(f64, f64)>) -> Result<Self> {
        let total = Self::check(&points)?;
        if !(total > 0.0) {
            return Err(Error::input("band weights sum to zero"));
        }
        Ok(Band {
            points: points.into_iter().map(|(w, p)| (w, p / total)).collect(),
        })
    }

    /// All mass at one resonance.
    pub fn single(resonance: f64) -> Result<Self> {
        Self::new(alloc::vec![(resonance, 1.0)])
    }

    fn check(points: &[(f64, f64)]) -> Result<f64> {
        if points.is_empty() {
            return Err(Error::input("band must contain at least one point"));
        }
        let mut total = 0.0;
        for &(w, p) in points {
            ensure_finite(w, "band frequency")?;
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::input(format!("band weight must be finite and ≥ 0, got {p}")));
            }
            total += p;
        }
        Ok(total)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// How band members are combined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandObjective {
    /// `Σ_a P(ω_a) R(ω_a)`.
    RateAveraged,
    /// The exponent `-ln(Σ_a P(ω_a) e^{-R(ω_a) ε_c² t*}) / (ε_c² t*)` of the
    /// band-averaged survival at `t*`, expressed in rate units.
    SurvivalAveraged { time: f64 },
}

/// `Σ_a P(ω_a)·R(ω_a)` with `R` the long-time rate of `harmonics` and the
/// spectrum's resonance moved to each band point.
pub fn band_rate(spectrum: &CouplingSpectrum, harmonics: &HarmonicDecomposition, band: &Band) -> Result<f64> {
    band_objective(spectrum, harmonics, band, BandObjective::RateAveraged)
}

/// The band objective of `harmonics` under `objective`.
pub fn band_objective(
    spectrum: &CouplingSpectrum,
    harmonics: &HarmonicDecomposition,
    band: &Band,
    objective: BandObjective,
) -> Result<f64> {
    if band.points.is_empty() {
        return Err(Error::input("band must contain at least one point"));
    }
    let rates = band
        .points
        .iter()
        .map(|&(wa, p)| (p, longtime_rate(&spectrum.with_resonance(wa), harmonics).rate));
    Ok(combine(rates, harmonics.intensity(), objective))
}

fn combine(rates: impl Iterator<Item = (f64, f64)> + Clone, intensity: f64, objective: BandObjective) -> f64 {
    match objective {
        BandObjective::RateAveraged => rates.map(|(p, r)| p * r).sum(),
        BandObjective::SurvivalAveraged { time } => {
            let scale = intensity * time;
            if !(scale > 0.0) {
                // No decay over the horizon: the exponent reduces to the mean rate.
                return rates.map(|(p, r)| p * r).sum();
            }
            // Factor out the smallest rate so the sum cannot underflow.
            let r_min = rates.clone().map(|(_, r)| r).fold(f64::INFINITY, f64::min);
            let s: f64 = rates.map(|(p, r)| p * (-(r - r_min) * scale).exp()).sum();
            (r_min - s.ln() / scale).max(0.0)
        }
    }
}

/// Whether to suppress or enhance decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Minimize,
    Maximize,
}

/// The searchable modulation families, with their parameter boxes.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Impulsive phase modulation over `φ ∈ phase`, `τ ∈ period`.
    Pm { phase: (f64, f64), period: (f64, f64) },
    /// On-off amplitude modulation over `τ₁ ∈ on`, `τ₀ ∈ period`; points
    /// with `τ₁ > τ₀` are skipped.
    Am { on: (f64, f64), period: (f64, f64) },
    /// A single unit-amplitude harmonic at detuning `Δ ∈ detuning`.
    Monochromatic { detuning: (f64, f64) },
    /// Weights `|λ_k|²` on the simplex over fixed frequencies `ω_k`.
    FreeHarmonics { frequencies: Vec<f64> },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Pm { .. } => "pm",
            Family::Am { .. } => "am",
            Family::Monochromatic { .. } => "monochromatic",
            Family::FreeHarmonics { .. } => "free-harmonics",
        }
    }

    /// Names of the continuous parameters, in result order.
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            Family::Pm { .. } => &["phase", "period"],
            Family::Am { .. } => &["on", "period"],
            Family::Monochromatic { .. } => &["detuning"],
            Family::FreeHarmonics { .. } => &[],
        }
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        match self {
            Family::Pm { phase, period } => alloc::vec![*phase, *period],
            Family::Am { on, period } => alloc::vec![*on, *period],
            Family::Monochromatic { detuning } => alloc::vec![*detuning],
            Family::FreeHarmonics { .. } => Vec::new(),
        }
    }

    /// The modulation at parameter point `x`, or `None` if the point lies
    /// outside the family's domain.
    pub fn modulation(&self, x: &[f64]) -> Option<Modulation> {
        match self {
            Family::Pm { .. } => Modulation::impulsive_pm(x[0], x[1]).ok(),
            Family::Am { .. } => Modulation::on_off_am(x[0], x[1]).ok(),
            Family::Monochromatic { .. } => Modulation::monochromatic(Complex64::new(1.0, 0.0), x[0]).ok(),
            Family::FreeHarmonics { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Family::FreeHarmonics { frequencies } = self {
            if frequencies.is_empty() {
                return Err(Error::input("free-harmonic grid must not be empty"));
            }
            for &w in frequencies {
                ensure_finite(w, "harmonic frequency")?;
            }
            return Ok(());
        }
        for (name, (lo, hi)) in self.parameter_names().iter().zip(self.bounds()) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::input(format!("{name} box [{lo}, {hi}] is empty or not finite")));
            }
        }
        match self {
            Family::Pm { period, .. } | Family::Am { period, .. } if period.0 <= 0.0 => {
                Err(Error::input("period box must be positive"))
            }
            Family::Am { on, period } if on.0 <= 0.0 || on.0 > period.1 => {
                Err(Error::input("on-time box must be positive and admit τ₁ ≤ τ₀"))
            }
            _ => Ok(()),
        }
    }
}

/// A decay-control problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlProblem {
    pub spectrum: CouplingSpectrum,
    pub goal: Goal,
    pub family: Family,
    /// Resonance distribution; `None` uses the spectrum's own resonance.
    pub band: Option<Band>,
    pub band_objective: BandObjective,
    /// Grid points per axis in the coarse scan.
    pub grid: usize,
    /// Harmonics kept on each side of `k = 0` for PM and AM.
    pub truncation: u64,
    /// Points with `R·t_c` above this are excluded.
    pub validity_limit: f64,
}

impl ControlProblem {
    /// A problem with default settings: a 64-point grid per axis, 64
    /// harmonics per side, the `R·t_c ≤ 0.1` filter, and the
    /// survival-averaged objective at the unmodulated band lifetime.
    pub fn new(spectrum: CouplingSpectrum, goal: Goal, family: Family) -> Self {
        let mut problem = ControlProblem {
            spectrum,
            goal,
            family,
            band: None,
            band_objective: BandObjective::RateAveraged,
            grid: DEFAULT_GRID,
            truncation: DEFAULT_TRUNCATION,
            validity_limit: ACCEPTABLE_VALIDITY,
        };
        problem.band_objective = BandObjective::SurvivalAveraged {
            time: problem.default_horizon(),
        };
        problem
    }

    /// Sets the band and resets the survival horizon to its unmodulated
    /// lifetime.
    pub fn with_band(mut self, band: Band) -> Self {
        self.band = Some(band);
        if let BandObjective::SurvivalAveraged { .. } = self.band_objective {
            self.band_objective = BandObjective::SurvivalAveraged {
                time: self.default_horizon(),
            };
        }
        self
    }

    pub fn with_objective(mut self, objective: BandObjective) -> Self {
        self.band_objective = objective;
        self
    }

    fn band_or_single(&self) -> Band {
        self.band.clone().unwrap_or(Band {
            points: alloc::vec![(self.spectrum.resonance(), 1.0)],
        })
    }

    /// `1/R̄_GR` for the band, or the spectrum's time scale if it has no
    /// Golden-Rule decay.
    fn default_horizon(&self) -> f64 {
        let band = self.band_or_single();
        let rate: f64 = band
            .points
            .iter()
            .map(|&(wa, p)| p * self.spectrum.with_resonance(wa).golden_rule_rate())
            .sum();
        if rate > 0.0 {
            1.0 / rate
        } else {
            1.0 / self.spectrum.frequency_scale()
        }
    }

    /// Objective and worst `R·t_c` over the band for `harmonics`.
    fn evaluate(&self, band: &Band, harmonics: &HarmonicDecomposition) -> Result<(f64, f64)> {
        let mut worst: f64 = 0.0;
        let mut rates = Vec::with_capacity(band.points.len());
        for &(wa, p) in &band.points {
            let spectrum = self.spectrum.with_resonance(wa);
            let v = validity_ratio(&spectrum, harmonics)?;
            worst = worst.max(v.ratio);
            rates.push((p, v.rate));
        }
        let value = combine(rates.iter().copied(), harmonics.intensity(), self.band_objective);
        Ok((value, worst))
    }
}

/// Outcome of [`optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct ControlResult {
    pub family: &'static str,
    /// Best continuous parameters, ordered as [`Family::parameter_names`].
    pub parameters: Vec<f64>,
    /// Best weights for free harmonics (one entry per grid frequency).
    pub weights: Option<Vec<f64>>,
    /// The best modulation found.
    pub modulation: Modulation,
    /// Achieved objective: rate or band survival exponent.
    pub value: f64,
    /// The same objective for unmodulated coupling, `R_GR` for one level.
    pub unmodulated: f64,
    /// `value / unmodulated`; below 1 means suppression.
    pub improvement: f64,
    /// Worst `R·t_c` over the band at the best point.
    pub validity_ratio: f64,
    pub evaluations: usize,
    /// Points dropped by the validity filter.
    pub excluded: usize,
}

/// Solves a control problem.
pub fn optimize(problem: &ControlProblem) -> Result<ControlResult> {
    problem.family.validate()?;
    if problem.grid < 2 {
        return Err(Error::input("grid needs at least two points per axis"));
    }
    if !(problem.validity_limit > 0.0) {
        return Err(Error::input("validity limit must be positive"));
    }
    if let BandObjective::SurvivalAveraged { time } = problem.band_objective {
        if !(time > 0.0) || !time.is_finite() {
            return Err(Error::input(format!("survival horizon must be positive, got {time}")));
        }
    }
    let band = problem.band_or_single();
    let unmodulated = {
        let constant = HarmonicDecomposition::from_modulation(&Modulation::constant(1.0), 0)?;
        problem.evaluate(&band, &constant)?.0
    };
    match &problem.family {
        Family::FreeHarmonics { frequencies } => optimize_vertices(problem, &band, frequencies, unmodulated),
        _ => optimize_box(problem, &band, unmodulated),
    }
}

fn finish(value: f64, unmodulated: f64) -> f64 {
    if unmodulated > 0.0 {
        value / unmodulated
    } else if value == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn optimize_vertices(
    problem: &ControlProblem,
    band: &Band,
    frequencies: &[f64],
    unmodulated: f64,
) -> Result<ControlResult> {
    let sign = match problem.goal {
        Goal::Minimize => 1.0,
        Goal::Maximize => -1.0,
    };
    let mut map = Vec::with_capacity(frequencies.len());
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, &w) in frequencies.iter().enumerate() {
        let single = HarmonicDecomposition::new(
            alloc::vec![Harmonic {
                frequency: w,
                weight: Complex64::new(1.0, 0.0),
            }],
            1.0,
        )?;
        let mut worst: f64 = 0.0;
        for &(wa, _) in &band.points {
            worst = worst.max(validity_ratio(&problem.spectrum.with_resonance(wa), &single)?.ratio);
        }
        map.push((alloc::vec![w], worst));
        if worst > problem.validity_limit {
            continue;
        }
        let value = free_harmonic_value(&problem.spectrum, band, w);
        let better = match best {
            None => true,
            Some((j, v, _)) => {
                sign * value < sign * v || (value == v && w.abs() < frequencies[j].abs())
            }
        };
        if better {
            best = Some((k, value, worst));
        }
    }
    let excluded = map.iter().filter(|(_, r)| *r > problem.validity_limit).count();
    let Some((k, value, worst)) = best else {
        return Err(Error::Infeasible { validity_map: map });
    };
    let mut weights = alloc::vec![0.0; frequencies.len()];
    weights[k] = 1.0;
    Ok(ControlResult {
        family: problem.family.name(),
        parameters: Vec::new(),
        weights: Some(weights),
        modulation: Modulation::monochromatic(Complex64::new(1.0, 0.0), frequencies[k])?,
        value,
        unmodulated,
        improvement: finish(value, unmodulated),
        validity_ratio: worst,
        evaluations: frequencies.len(),
        excluded,
    })
}

/// `2π Σ_a P(ω_a) G(ω_a + ω_k)`: the linear free-harmonic objective at the
/// vertex `ω_k`.
pub fn free_harmonic_value(spectrum: &CouplingSpectrum, band: &Band, frequency: f64) -> f64 {
    TAU * band
        .points
        .iter()
        .map(|&(wa, p)| p * spectrum.g(wa + frequency))
        .sum::<f64>()
}

/// Bookkeeping of a box search.
#[derive(Default)]
struct Scan {
    evaluations: usize,
    map: Vec<(Vec<f64>, f64)>,
    failure: Option<Error>,
}

fn optimize_box(problem: &ControlProblem, band: &Band, unmodulated: f64) -> Result<ControlResult> {
    let bounds = problem.family.bounds();
    let sign = match problem.goal {
        Goal::Minimize => 1.0,
        Goal::Maximize => -1.0,
    };
    let mut state = Scan::default();
    let eval = |x: &[f64], state: &mut Scan| -> Option<(f64, f64)> {
        let modulation = problem.family.modulation(x)?;
        state.evaluations += 1;
        let result = HarmonicDecomposition::from_modulation(&modulation, problem.truncation)
            .and_then(|h| problem.evaluate(band, &h));
        match result {
            Ok((value, ratio)) => {
                state.map.push((x.to_vec(), ratio));
                Some((value, ratio))
            }
            Err(e) => {
                state.failure.get_or_insert(e);
                None
            }
        }
    };

    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            (0..problem.grid)
                .map(|i| {
                    if i + 1 == problem.grid {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (problem.grid - 1) as f64
                    }
                })
                .collect()
        })
        .collect();
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    let mut point = alloc::vec![0.0; bounds.len()];
    let total = axes.iter().map(Vec::len).product::<usize>();
    for index in 0..total {
        let mut rest = index;
        for (slot, axis) in point.iter_mut().zip(&axes).rev() {
            *slot = axis[rest % axis.len()];
            rest /= axis.len();
        }
        let Some((value, ratio)) = eval(&point, &mut state) else {
            continue;
        };
        if ratio > problem.validity_limit {
            continue;
        }
        if best.as_ref().map_or(true, |b| sign * value < sign * b.1) {
            best = Some((point.clone(), value, ratio));
        }
    }
    if let Some(e) = state.failure.take() {
        return Err(e);
    }
    let Some((start, grid_value, grid_ratio)) = best else {
        return Err(Error::Infeasible { validity_map: state.map });
    };

    let scale: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| ((hi - lo) / (problem.grid - 1) as f64).max(f64::EPSILON * lo.abs().max(1.0)))
        .collect();
    let mut refined_best = (start.clone(), grid_value, grid_ratio);
    minimize(
        |x| match eval(x, &mut state) {
            Some((value, ratio)) if ratio <= problem.validity_limit => {
                if sign * value < sign * refined_best.1 {
                    refined_best = (x.to_vec(), value, ratio);
                }
                sign * value
            }
            _ => f64::INFINITY,
        },
        &start,
        &scale,
        &bounds,
        REFINE_TOLERANCE,
        1e-15 * unmodulated.abs().max(f64::MIN_POSITIVE),
        REFINE_EVALUATIONS,
    );
    if let Some(e) = state.failure {
        return Err(e);
    }
    let excluded = state.map.iter().filter(|(_, r)| *r > problem.validity_limit).count();
    let (parameters, value, ratio) = refined_best;
    let modulation = problem
        .family
        .modulation(&parameters)
        .ok_or_else(|| Error::input("optimum left the family's domain"))?;
    Ok(ControlResult {
        family: problem.family.name(),
        parameters,
        weights: None,
        modulation,
        value,
        unmodulated,
        improvement: finish(value, unmodulated),
        validity_ratio: ratio,
        evaluations: state.evaluations,
        excluded,
    })
}

/// A scheme parameterized by the shared interval `τ` of a comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeTemplate {
    /// Impulsive PM with phase `φ` and period `τ`.
    Pm { phase: f64 },
    /// On-off AM with period `τ` and on-time `duty·τ`.
    Am { duty: f64 },
    /// Ideal measurements every `τ`.
    Measurement,
}

impl SchemeTemplate {
    pub fn at(&self, tau: f64) -> Result<Modulation> {
        match *self {
            SchemeTemplate::Pm { phase } => Modulation::impulsive_pm(phase, tau),
            SchemeTemplate::Am { duty } => Modulation::on_off_am(duty * tau, tau),
            SchemeTemplate::Measurement => Modulation::measurement_sinc(tau),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SchemeTemplate::Pm { phase } => format!("pm(phase={phase})"),
            SchemeTemplate::Am { duty } => format!("am(duty={duty})"),
            SchemeTemplate::Measurement => String::from("measurement"),
        }
    }
}

/// One row of [`compare_schemes`].
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeRow {
    pub scheme: SchemeTemplate,
    /// Long-time rate at each `τ`.
    pub rates: Vec<f64>,
    /// `R/R_GR` at each `τ` (NaN when `R_GR = 0`).
    pub ratios: Vec<f64>,
}

/// Rates of several schemes over a shared `τ` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeTable {
    pub taus: Vec<f64>,
    pub golden_rule: f64,
    pub rows: Vec<SchemeRow>,
}

/// Harmonic tail mass targeted by [`compare_schemes`].
pub const COMPARISON_TAIL: f64 = 1e-6;
const COMPARISON_MAX_TRUNCATION: u64 = 1 << 18;

/// Long-time rate of `modulation`: harmonic schemes are truncated once the
/// tail mass drops below [`COMPARISON_TAIL`], and the leftover mass is
/// closed with `G` at the outermost retained harmonics; stationary schemes
/// use the universal rate of their stationary spectrum.
pub fn scheme_rate(spectrum: &CouplingSpectrum, modulation: &Modulation) -> Result<f64> {
    if !modulation.is_time_domain() {
        return universal_rate(spectrum, &modulation.stationary_spectrum()?);
    }
    let mut truncation = DEFAULT_TRUNCATION;
    let h = loop {
        let h = HarmonicDecomposition::from_modulation(modulation, truncation)?;
        if h.tail_mass() <= COMPARISON_TAIL || truncation >= COMPARISON_MAX_TRUNCATION {
            break h;
        }
        truncation *= 4;
    };
    let rate = longtime_rate(spectrum, &h).rate;
    let tail = h.tail_mass();
    if tail == 0.0 {
        return Ok(rate);
    }
    let wa = spectrum.resonance();
    let (lo, hi) = h
        .entries()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e.frequency), hi.max(e.frequency))
        });
    Ok(rate + TAU * tail * 0.5 * (spectrum.g(wa + lo) + spectrum.g(wa + hi)))
}

/// `R/R_GR` for every scheme at every `τ`.
pub fn compare_schemes(spectrum: &CouplingSpectrum, schemes: &[SchemeTemplate], taus: &[f64]) -> Result<SchemeTable> {
    let golden_rule = spectrum.golden_rule_rate();
    let mut rows = Vec::with_capacity(schemes.len());
    for scheme in schemes {
        let mut rates = Vec::with_capacity(taus.len());
        for &tau in taus {
            rates.push(scheme_rate(spectrum, &scheme.at(tau)?)?);
        }
        let ratios = rates
            .iter()
            .map(|r| if golden_rule > 0.0 { r / golden_rule } else { f64::NAN })
            .collect();
        rows.push(SchemeRow {
            scheme: *scheme,
            rates,
            ratios,
        });
    }
    Ok(SchemeTable {
        taus: taus.to_vec(),
        golden_rule,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn band_edge(wa: f64) -> CouplingSpectrum {
        CouplingSpectrum::band_edge(1.0, 1.0, wa).unwrap()
    }

    fn pm(phase: f64, period: f64) -> HarmonicDecomposition {
        HarmonicDecomposition::from_modulation(&Modulation::impulsive_pm(phase, period).unwrap(), 64).unwrap()
    }

    #[test]
    fn band_weights_must_be_normalized() {
        assert!(Band::new(alloc::vec![(0.1, 0.5), (0.2, 0.4)]).is_err());
        assert!(Band::new(Vec::new()).is_err());
        assert!(Band::new(alloc::vec![(0.1, -0.5), (0.2, 1.5)]).is_err());
        let b = Band::normalized(alloc::vec![(0.1, 2.0), (0.2, 6.0)]).unwrap();
        assert_eq!(b.points(), &[(0.1, 0.25), (0.2, 0.75)]);
    }

    #[test]
    fn single_point_band_is_longtime_rate() {
        let s = band_edge(0.3);
        let h = pm(0.7, 3.0);
        let band = Band::single(0.3).unwrap();
        let direct = longtime_rate(&s, &h).rate;
        assert_eq!(band_rate(&s, &h, &band).unwrap(), direct);
        let surv = band_objective(&s, &h, &band, BandObjective::SurvivalAveraged { time: 50.0 }).unwrap();
        assert!((surv - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn flat_band_is_weight_independent() {
        let s = CouplingSpectrum::flat(0.2, f64::INFINITY, 0.0).unwrap();
        let h = HarmonicDecomposition::from_modulation(&Modulation::constant(1.0), 0).unwrap();
        for w in [0.1, 0.5, 0.9] {
            let band = Band::new(alloc::vec![(-3.0, w), (4.0, 1.0 - w)]).unwrap();
            let r = band_rate(&s, &h, &band).unwrap();
            assert!((r - TAU * 0.2).abs() < 1e-14, "{r}");
        }
    }

    #[test]
    fn band_shifted_below_edge_has_no_decay() {
        let s = band_edge(0.0);
        let band = Band::new(alloc::vec![(-0.05, 0.5), (0.05, 0.5)]).unwrap();
        let h = HarmonicDecomposition::from_modulation(
            &Modulation::monochromatic(Complex64::new(1.0, 0.0), -0.2).unwrap(),
            0,
        )
        .unwrap();
        assert_eq!(band_rate(&s, &h, &band).unwrap(), 0.0);
        // Unshifted, the upper member decays.
        let h0 = HarmonicDecomposition::from_modulation(&Modulation::constant(1.0), 0).unwrap();
        let direct = 0.5 * TAU * s.g(0.05);
        assert!((band_rate(&s, &h0, &band).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn survival_average_lies_below_rate_average() {
        // Jensen: −ln E[e^{−Rx}]/x ≤ E[R].
        let s = band_edge(0.0);
        let band = Band::new(alloc::vec![(0.05, 0.3), (0.5, 0.4), (2.0, 0.3)]).unwrap();
        let h = pm(PI, 2.0);
        let mean = band_rate(&s, &h, &band).unwrap();
        let surv = band_objective(&s, &h, &band, BandObjective::SurvivalAveraged { time: 5.0 }).unwrap();
        assert!(surv < mean && surv > 0.0, "{surv} vs {mean}");
        let short = band_objective(&s, &h, &band, BandObjective::SurvivalAveraged { time: 1e-6 }).unwrap();
        assert!((short - mean).abs() < 1e-5 * mean);
    }

    #[test]
    fn free_harmonics_shift_below_edge() {
        let s = CouplingSpectrum::band_edge(0.01, 1.0, 0.1).unwrap();
        let p = ControlProblem::new(
            s,
            Goal::Minimize,
            Family::FreeHarmonics {
                frequencies: alloc::vec![-0.2, 0.0, 0.2],
            },
        );
        let r = optimize(&p).unwrap();
        assert_eq!(r.weights.as_deref(), Some(&[1.0, 0.0, 0.0][..]));
        assert_eq!(r.value, 0.0);
        assert_eq!(r.improvement, 0.0);
    }

    #[test]
    fn free_harmonics_maximize_moves_onto_peak() {
        let delta = 0.3;
        let s = CouplingSpectrum::lorentzian(1e-5, 1.0, 0.05, 1.0 - delta).unwrap();
        let p = ControlProblem::new(
            s,
            Goal::Maximize,
            Family::FreeHarmonics {
                frequencies: alloc::vec![-0.3, -0.1, 0.0, 0.1, 0.3, 0.5],
            },
        )
        .with_objective(BandObjective::RateAveraged);
        let r = optimize(&p).unwrap();
        assert_eq!(r.weights.unwrap()[4], 1.0);
        assert!(r.improvement > 1.0);
    }

    #[test]
    fn free_harmonic_ties_prefer_gentlest_shift() {
        let s = CouplingSpectrum::band_edge(0.01, 1.0, 0.1).unwrap();
        let p = ControlProblem::new(
            s,
            Goal::Minimize,
            Family::FreeHarmonics {
                frequencies: alloc::vec![-0.9, -0.5, -0.3, 0.4],
            },
        );
        let r = optimize(&p).unwrap();
        assert_eq!(r.weights.unwrap(), alloc::vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn pm_optimum_prefers_small_phase_near_edge() {
        let s = CouplingSpectrum::band_edge(0.01, 1.0, 0.1).unwrap();
        let mut p = ControlProblem::new(
            s.clone(),
            Goal::Minimize,
            Family::Pm {
                phase: (0.02, PI),
                period: (1.0, 30.0),
            },
        )
        .with_objective(BandObjective::RateAveraged);
        p.grid = 24;
        let r = optimize(&p).unwrap();
        // Exhaustive oracle on a finer grid of the same objective.
        let mut oracle = f64::INFINITY;
        for i in 0..48 {
            for j in 0..48 {
                let phase = (0.02 + (PI - 0.02) * i as f64 / 47.0).min(PI);
                let period = 1.0 + 29.0 * j as f64 / 47.0;
                oracle = oracle.min(longtime_rate(&s, &pm(phase, period)).rate);
            }
        }
        assert!(r.value <= oracle * (1.0 + 1e-3) + 1e-12, "{} vs {oracle}", r.value);
        assert!(r.parameters[0] < 0.5, "{:?}", r.parameters);
        assert!(r.improvement < 0.05);
    }

    #[test]
    fn refinement_never_loses_to_grid() {
        let s = CouplingSpectrum::lorentzian(1e-3, 0.0, 0.5, 0.2).unwrap();
        for goal in [Goal::Minimize, Goal::Maximize] {
            let mut p = ControlProblem::new(
                s.clone(),
                goal,
                Family::Monochromatic {
                    detuning: (-2.0, 2.0),
                },
            );
            p.grid = 9;
            let r = optimize(&p).unwrap();
            for i in 0..9 {
                let d = -2.0 + 0.5 * i as f64;
                let h = HarmonicDecomposition::from_modulation(
                    &Modulation::monochromatic(Complex64::new(1.0, 0.0), d).unwrap(),
                    0,
                )
                .unwrap();
                let v = longtime_rate(&s, &h).rate;
                match goal {
                    Goal::Minimize => assert!(r.value <= v),
                    Goal::Maximize => assert!(r.value >= v),
                }
            }
            if goal == Goal::Maximize {
                // Onto the peak: ω_a + Δ = 0.
                assert!((r.parameters[0] + 0.2).abs() < 1e-3, "{:?}", r.parameters);
            }
        }
    }

    #[test]
    fn strong_coupling_is_infeasible() {
        let s = CouplingSpectrum::lorentzian(5.0, 0.0, 0.1, 0.0).unwrap();
        let mut p = ControlProblem::new(
            s,
            Goal::Minimize,
            Family::Monochromatic {
                detuning: (-0.05, 0.05),
            },
        );
        p.grid = 5;
        match optimize(&p) {
            Err(Error::Infeasible { validity_map }) => {
                assert_eq!(validity_map.len(), 5);
                assert!(validity_map.iter().all(|(_, r)| *r > 0.1));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn am_skips_points_with_on_time_beyond_period() {
        let s = CouplingSpectrum::lorentzian(0.01, 0.0, 1.0, 0.0).unwrap();
        let mut p = ControlProblem::new(
            s,
            Goal::Minimize,
            Family::Am {
                on: (0.5, 4.0),
                period: (1.0, 4.0),
            },
        );
        p.grid = 8;
        let r = optimize(&p).unwrap();
        assert!(r.parameters[0] <= r.parameters[1]);
        assert!(r.evaluations < 64 + REFINE_EVALUATIONS);
    }

    #[test]
    fn band_at_one_point_matches_single_level() {
        let s = band_edge(0.1);
        let family = Family::Pm {
            phase: (0.05, PI),
            period: (1.0, 10.0),
        };
        let mut a = ControlProblem::new(s.clone(), Goal::Minimize, family.clone());
        a.grid = 12;
        let b = a.clone().with_band(Band::single(0.1).unwrap());
        let (ra, rb) = (optimize(&a).unwrap(), optimize(&b).unwrap());
        assert_eq!(ra.parameters, rb.parameters);
        assert_eq!(ra.value, rb.value);
    }

    #[test]
    fn flat_spectrum_comparison_is_unity() {
        let s = CouplingSpectrum::flat(0.05, f64::INFINITY, 0.0).unwrap();
        let t = compare_schemes(
            &s,
            &[
                SchemeTemplate::Pm { phase: 0.1 },
                SchemeTemplate::Pm { phase: PI },
                SchemeTemplate::Am { duty: 0.3 },
                SchemeTemplate::Measurement,
            ],
            &[0.5, 2.0, 10.0],
        )
        .unwrap();
        for row in &t.rows {
            for r in &row.ratios {
                assert!((r - 1.0).abs() < 1e-6, "{:?}: {r}", row.scheme);
            }
        }
    }

    #[test]
    fn small_phase_wins_near_band_edge() {
        let s = band_edge(0.1);
        let t = compare_schemes(
            &s,
            &[
                SchemeTemplate::Pm { phase: 0.1 },
                SchemeTemplate::Pm { phase: PI },
                SchemeTemplate::Measurement,
            ],
            &[1.0, 2.0],
        )
        .unwrap();
        for j in 0..2 {
            assert!(t.rows[0].ratios[j] < t.rows[1].ratios[j]);
            assert!(t.rows[0].ratios[j] < t.rows[2].ratios[j]);
        }
    }

    #[test]
    fn large_phase_wins_at_symmetric_peak() {
        let s = CouplingSpectrum::lorentzian(0.01, 0.0, 1.0, 0.0).unwrap();
        let t = compare_schemes(
            &s,
            &[SchemeTemplate::Pm { phase: PI }, SchemeTemplate::Pm { phase: 0.1 }],
            &[0.2, 0.5, 1.0],
        )
        .unwrap();
        for j in 0..3 {
            assert!(t.rows[0].ratios[j] < t.rows[1].ratios[j], "τ = {}", t.taus[j]);
        }
    }
}
