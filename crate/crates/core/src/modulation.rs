//! Modulation functions `ε(t)` and the spectra derived from them.
//!
//! Sign convention: a quasiperiodic modulation is written
//! `ε(t) = Σ_k ε_k e^{-iω_k t}`, and the finite-window transform is
//! `ε_t(ω) = (2π)^{-1/2} ∫₀ᵗ ε(s) e^{iωs} ds`, so `F_t` peaks at the `ω_k`
//! and a harmonic at `ω_k` samples the reservoir at `ω_a + ω_k`. In
//! particular `Monochromatic(Δ)` is the single harmonic `ω₀ = Δ`, and
//! impulsive phase modulation with small `φ` acts as the shift `-φ/τ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
// Math methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::special::{geometric_phase_sum, phase_integral};

/// Default number of harmonics kept on each side of `k = 0`.
pub const DEFAULT_TRUNCATION: u64 = 64;

/// The modulation schemes.
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    /// `ε(t) = ε₀`.
    Constant { amplitude: Complex64 },
    /// `ε(t) = ε₀ e^{-iΔt}`.
    Monochromatic { amplitude: Complex64, detuning: f64 },
    /// `ε(t) = e^{i⌊t/τ⌋φ}`: phase jumps by `φ` every `τ`.
    ImpulsivePm { phase: f64, period: f64 },
    /// `ε = 1` on `[nτ₀, nτ₀ + τ₁)`, zero otherwise.
    OnOffAm { on: f64, period: f64 },
    /// `ε(t) = Σ_k ε_k e^{-iω_k t}` with distinct `ω_k`.
    Quasiperiodic { harmonics: Vec<(f64, Complex64)> },
    /// Stationary random phase modulation with a Lorentzian spectrum.
    RandomLorentzian { shift: f64, width: f64, intensity: f64 },
    /// Ideal projective measurements every `τ₁`.
    MeasurementSinc { interval: f64 },
}

/// A validated modulation scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulation {
    scheme: Scheme,
}

fn positive_finite(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::input(format!("{what} must be positive and finite, got {x}")))
    }
}

fn finite_complex(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::input(format!("{what} must be finite, got {z}")))
    }
}

impl Modulation {
    pub fn new(scheme: Scheme) -> Result<Self> {
        match &scheme {
            Scheme::Constant { amplitude } => {
                finite_complex(*amplitude, "ε₀")?;
            }
            Scheme::Monochromatic { amplitude, detuning } => {
                finite_complex(*amplitude, "ε₀")?;
                ensure_finite(*detuning, "Δ")?;
            }
            Scheme::ImpulsivePm { phase, period } => {
                ensure_finite(*phase, "φ")?;
                if !(*phase > -PI && *phase <= PI) {
                    return Err(Error::input(format!("φ must lie in (-π, π], got {phase}")));
                }
                positive_finite(*period, "τ")?;
            }
            Scheme::OnOffAm { on, period } => {
                positive_finite(*on, "τ₁")?;
                positive_finite(*period, "τ₀")?;
                if on > period {
                    return Err(Error::input(format!("need τ₁ ≤ τ₀, got τ₁ = {on}, τ₀ = {period}")));
                }
            }
            Scheme::Quasiperiodic { harmonics } => {
                for (w, e) in harmonics {
                    ensure_finite(*w, "ω_k")?;
                    finite_complex(*e, "ε_k")?;
                }
                let mut freqs: Vec<f64> = harmonics.iter().map(|h| h.0).collect();
                freqs.sort_by(f64::total_cmp);
                if freqs.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::input("quasiperiodic frequencies must be distinct"));
                }
            }
            Scheme::RandomLorentzian { shift, width, intensity } => {
                ensure_finite(*shift, "Δ")?;
                positive_finite(*width, "ν")?;
                positive_finite(*intensity, "ε_c²")?;
            }
            Scheme::MeasurementSinc { interval } => {
                positive_finite(*interval, "τ₁")?;
            }
        }
        Ok(Modulation { scheme })
    }

    pub fn constant(amplitude: f64) -> Self {
        Modulation {
            scheme: Scheme::Constant {
                amplitude: Complex64::new(amplitude, 0.0),
            },
        }
    }

    pub fn monochromatic(amplitude: Complex64, detuning: f64) -> Result<Self> {
        Self::new(Scheme::Monochromatic { amplitude, detuning })
    }

    pub fn impulsive_pm(phase: f64, period: f64) -> Result<Self> {
        Self::new(Scheme::ImpulsivePm { phase, period })
    }

    pub fn on_off_am(on: f64, period: f64) -> Result<Self> {
        Self::new(Scheme::OnOffAm { on, period })
    }

    pub fn quasiperiodic(harmonics: Vec<(f64, Complex64)>) -> Result<Self> {
        Self::new(Scheme::Quasiperiodic { harmonics })
    }

    pub fn random_lorentzian(shift: f64, width: f64, intensity: f64) -> Result<Self> {
        Self::new(Scheme::RandomLorentzian { shift, width, intensity })
    }

    pub fn measurement_sinc(interval: f64) -> Result<Self> {
        Self::new(Scheme::MeasurementSinc { interval })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn name(&self) -> &'static str {
        match self.scheme {
            Scheme::Constant { .. } => "constant",
            Scheme::Monochromatic { .. } => "monochromatic",
            Scheme::ImpulsivePm { .. } => "impulsive-pm",
            Scheme::OnOffAm { .. } => "on-off-am",
            Scheme::Quasiperiodic { .. } => "quasiperiodic",
            Scheme::RandomLorentzian { .. } => "random-lorentzian",
            Scheme::MeasurementSinc { .. } => "measurement",
        }
    }

    /// Whether `ε(t)` exists as a deterministic function of time.
    pub fn is_time_domain(&self) -> bool {
        !matches!(
            self.scheme,
            Scheme::RandomLorentzian { .. } | Scheme::MeasurementSinc { .. }
        )
    }

    fn unsupported(&self, operation: &'static str) -> Error {
        Error::Unsupported {
            operation,
            scheme: self.name(),
        }
    }

    /// `ε(t)` for `t ≥ 0`.
    pub fn eval_epsilon(&self, t: f64) -> Result<Complex64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::input(format!("time must be finite and ≥ 0, got {t}")));
        }
        Ok(match &self.scheme {
            Scheme::Constant { amplitude } => *amplitude,
            Scheme::Monochromatic { amplitude, detuning } => amplitude * Complex64::from_polar(1.0, -detuning * t),
            Scheme::ImpulsivePm { phase, period } => Complex64::from_polar(1.0, (t / period).floor() * phase),
            Scheme::OnOffAm { on, period } => {
                let (_, rest) = split_periods(t, *period);
                if rest < *on {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Scheme::Quasiperiodic { harmonics } => harmonics
                .iter()
                .map(|(w, e)| e * Complex64::from_polar(1.0, -w * t))
                .sum(),
            _ => return Err(self.unsupported("time-domain evaluation")),
        })
    }

    /// Fluence `Q(t) = ∫₀ᵗ|ε|²`. For the stationary schemes this is the
    /// ensemble fluence: `ε_c² t` (random) or `t` (measurements, which leave
    /// the coupling switched on).
    pub fn fluence(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::input(format!("time must be finite and ≥ 0, got {t}")));
        }
        Ok(match &self.scheme {
            Scheme::Constant { amplitude } | Scheme::Monochromatic { amplitude, .. } => amplitude.norm_sqr() * t,
            Scheme::ImpulsivePm { .. } => t,
            Scheme::OnOffAm { on, period } => {
                let (n, rest) = split_periods(t, *period);
                n as f64 * on + rest.min(*on)
            }
            Scheme::Quasiperiodic { harmonics } => {
                let mut q = 0.0;
                for (i, (wk, ek)) in harmonics.iter().enumerate() {
                    q += ek.norm_sqr() * t;
                    for (wl, el) in &harmonics[i + 1..] {
                        // k≠l pairs come in conjugate couples.
                        q += 2.0 * (ek * el.conj() * phase_integral(wl - wk, t)).re;
                    }
                }
                q.max(0.0)
            }
            Scheme::RandomLorentzian { intensity, .. } => intensity * t,
            Scheme::MeasurementSinc { .. } => t,
        })
    }

    /// Finite-window spectrum `F_t(ω) = |ε_t(ω)|²/Q(t)`. Stationary schemes
    /// return their `t`-independent spectrum.
    pub fn window_spectrum(&self, t: f64) -> Result<WindowSpectrum> {
        if !self.is_time_domain() {
            return self.stationary_spectrum();
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::input(format!("window time must be positive and finite, got {t}")));
        }
        let fluence = self.fluence(t)?;
        if !(fluence > 0.0) {
            return Err(Error::input("F_t is undefined when the fluence Q(t) vanishes"));
        }
        let transform = match &self.scheme {
            Scheme::Constant { amplitude } => Transform::Harmonics(vec![(0.0, *amplitude)]),
            Scheme::Monochromatic { amplitude, detuning } => Transform::Harmonics(vec![(*detuning, *amplitude)]),
            Scheme::Quasiperiodic { harmonics } => Transform::Harmonics(harmonics.clone()),
            Scheme::ImpulsivePm { phase, period } => {
                let (full, rest) = split_periods(t, *period);
                Transform::Pm {
                    phase: *phase,
                    period: *period,
                    full,
                    rest,
                }
            }
            Scheme::OnOffAm { on, period } => {
                let (full, rest) = split_periods(t, *period);
                Transform::Am {
                    on: *on,
                    period: *period,
                    full,
                    rest,
                }
            }
            _ => unreachable!(),
        };
        Ok(WindowSpectrum {
            time: t,
            kind: SpectrumKind::CoherentWindow,
            shape: Shape::Coherent(Window {
                transform,
                time: t,
                fluence,
            }),
        })
    }

    /// Stationary spectrum `F(ω)` of the random and measurement schemes.
    pub fn stationary_spectrum(&self) -> Result<WindowSpectrum> {
        match &self.scheme {
            Scheme::RandomLorentzian { shift, width, .. } => Ok(WindowSpectrum {
                time: f64::INFINITY,
                kind: SpectrumKind::StationaryRandom,
                shape: Shape::Lorentzian {
                    center: *shift,
                    width: *width,
                },
            }),
            Scheme::MeasurementSinc { interval } => Ok(WindowSpectrum {
                time: *interval,
                kind: SpectrumKind::Measurement,
                shape: Shape::Coherent(Window {
                    transform: Transform::Harmonics(vec![(0.0, Complex64::new(1.0, 0.0))]),
                    time: *interval,
                    fluence: *interval,
                }),
            }),
            _ => Err(self.unsupported("stationary spectrum")),
        }
    }

    /// Shortest time scale of `ε(t)`: the jump interval for PM, the shorter
    /// of the on and off stretches for AM, the fastest beat for harmonics.
    pub fn time_scale(&self) -> Option<f64> {
        match &self.scheme {
            Scheme::ImpulsivePm { period, .. } => Some(*period),
            Scheme::OnOffAm { on, period } => {
                let off = period - on;
                Some(if off > 0.0 { on.min(off) } else { *on })
            }
            Scheme::Monochromatic { detuning, .. } if *detuning != 0.0 => Some(TAU / detuning.abs()),
            Scheme::Quasiperiodic { harmonics } => {
                let fastest = harmonics.iter().map(|h| h.0.abs()).fold(0.0, f64::max);
                if fastest > 0.0 {
                    Some(TAU / fastest)
                } else {
                    None
                }
            }
            Scheme::MeasurementSinc { interval } => Some(*interval),
            _ => None,
        }
    }

    /// Times in `(0, horizon)` where `ε` jumps, for piecewise-constant schemes.
    pub(crate) fn jump_times(&self, horizon: f64) -> Option<Vec<f64>> {
        match &self.scheme {
            Scheme::Constant { .. } => Some(Vec::new()),
            Scheme::ImpulsivePm { period, .. } => {
                let mut out = Vec::new();
                let mut n = 1u64;
                while (n as f64) * period < horizon {
                    out.push(n as f64 * period);
                    n += 1;
                }
                Some(out)
            }
            Scheme::OnOffAm { on, period } => {
                let mut out = Vec::new();
                let mut n = 0u64;
                loop {
                    let start = n as f64 * period;
                    if start >= horizon {
                        break;
                    }
                    if n > 0 && on < period {
                        out.push(start);
                    }
                    let stop = start + on;
                    if stop < horizon && on < period {
                        out.push(stop);
                    }
                    n += 1;
                }
                Some(out)
            }
            _ => None,
        }
    }
}

/// `(⌊t/p⌋, t - ⌊t/p⌋p)` with the remainder clamped into `[0, p)`.
fn split_periods(t: f64, period: f64) -> (u64, f64) {
    let mut n = (t / period).floor();
    let mut rest = t - n * period;
    if rest >= period {
        n += 1.0;
        rest -= period;
    }
    if rest < 0.0 {
        n -= 1.0;
        rest += period;
    }
    (n.max(0.0) as u64, rest.max(0.0))
}

/// Result of [`chaotic_field_params`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticField {
    pub modulation: Modulation,
    /// `|χ|Ī / ν_B`; the Lorentzian form assumes this is small.
    pub broadband_ratio: f64,
    /// Set when `|χ|Ī ≪ ν_B` fails (ratio above 0.1).
    pub warning: bool,
}

/// Random-field modulation from a chaotic light field of polarizability `χ`,
/// mean intensity `Ī` and bandwidth `ν_B`: `Δ = χĪ`, `ν = χ²Ī²/ν_B`.
///
/// A vanishing `χĪ` gives a zero-width spectrum, which is returned as the
/// equivalent constant modulation.
pub fn chaotic_field_params(chi: f64, intensity: f64, bandwidth: f64) -> Result<ChaoticField> {
    ensure_finite(chi, "χ")?;
    ensure_finite(intensity, "Ī")?;
    positive_finite(bandwidth, "ν_B")?;
    let shift = chi * intensity;
    let width = shift * shift / bandwidth;
    let ratio = shift.abs() / bandwidth;
    let modulation = if shift == 0.0 {
        Modulation::constant(1.0)
    } else {
        Modulation::random_lorentzian(shift, width, 1.0)?
    };
    Ok(ChaoticField {
        modulation,
        broadband_ratio: ratio,
        warning: ratio > 0.1,
    })
}

/// One harmonic: frequency `ω_k` and normalized amplitude `λ_k = ε_k/ε_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub frequency: f64,
    pub weight: Complex64,
}

/// `{(ω_k, λ_k)}` with `ε_c² = Σ|ε_k|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicDecomposition {
    entries: Vec<Harmonic>,
    intensity: f64,
    spacing: f64,
}

impl HarmonicDecomposition {
    /// Builds a decomposition from explicit entries. Frequencies must be
    /// distinct and `Σ|λ_k|² ≤ 1`.
    pub fn new(entries: Vec<Harmonic>, intensity: f64) -> Result<Self> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::input(format!("ε_c² must be finite and ≥ 0, got {intensity}")));
        }
        let mut freqs = Vec::with_capacity(entries.len());
        let mut mass = 0.0;
        for h in &entries {
            ensure_finite(h.frequency, "ω_k")?;
            finite_complex(h.weight, "λ_k")?;
            freqs.push(h.frequency);
            mass += h.weight.norm_sqr();
        }
        if mass > 1.0 + 1e-9 {
            return Err(Error::input(format!("Σ|λ_k|² = {mass} exceeds 1")));
        }
        freqs.sort_by(f64::total_cmp);
        if freqs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::input("harmonic frequencies must be distinct"));
        }
        let spacing = freqs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        Ok(HarmonicDecomposition {
            entries,
            intensity,
            spacing,
        })
    }

    /// Harmonics `k = -K..=K` of a time-domain scheme.
    pub fn from_modulation(modulation: &Modulation, truncation: u64) -> Result<Self> {
        let k_max = truncation as i64;
        let (entries, intensity, spacing) = match modulation.scheme() {
            Scheme::Constant { amplitude } | Scheme::Monochromatic { amplitude, .. } => {
                let detuning = match modulation.scheme() {
                    Scheme::Monochromatic { detuning, .. } => *detuning,
                    _ => 0.0,
                };
                let c = amplitude.norm();
                let entries = if c > 0.0 {
                    vec![Harmonic {
                        frequency: detuning,
                        weight: amplitude / c,
                    }]
                } else {
                    Vec::new()
                };
                (entries, c * c, f64::INFINITY)
            }
            Scheme::ImpulsivePm { phase, period } => {
                // e^{i⌊t/τ⌋φ} = e^{iφt/τ} · e^{-iφ(t mod τ)/τ}; the periodic
                // factor has coefficients ∫₀¹ e^{i(2πk-φ)x}dx.
                let entries = (-k_max..=k_max)
                    .map(|k| {
                        let eta = TAU * k as f64 - phase;
                        Harmonic {
                            frequency: eta / period,
                            weight: phase_integral(eta, 1.0),
                        }
                    })
                    .collect();
                (entries, 1.0, TAU / period)
            }
            Scheme::OnOffAm { on, period } => {
                let duty = on / period;
                let scale = duty.sqrt();
                let entries = (-k_max..=k_max)
                    .map(|k| {
                        let w = TAU * k as f64 / period;
                        Harmonic {
                            frequency: w,
                            weight: phase_integral(w, *on) / (period * scale),
                        }
                    })
                    .collect();
                (entries, duty, TAU / period)
            }
            Scheme::Quasiperiodic { harmonics } => {
                let intensity: f64 = harmonics.iter().map(|h| h.1.norm_sqr()).sum();
                let c = intensity.sqrt();
                let entries: Vec<Harmonic> = if c > 0.0 {
                    harmonics
                        .iter()
                        .map(|&(frequency, e)| Harmonic {
                            frequency,
                            weight: e / c,
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                return HarmonicDecomposition::new(entries, intensity);
            }
            _ => return Err(modulation.unsupported("harmonic decomposition")),
        };
        Ok(HarmonicDecomposition {
            entries,
            intensity,
            spacing,
        })
    }

    pub fn entries(&self) -> &[Harmonic] {
        &self.entries
    }

    /// `ε_c²`.
    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    /// Minimum spacing `Ω` between retained frequencies (infinite for a
    /// single harmonic).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `Σ|λ_k|²` over the retained harmonics.
    pub fn captured_mass(&self) -> f64 {
        self.entries.iter().map(|h| h.weight.norm_sqr()).sum()
    }

    /// `1 - Σ|λ_k|²`, the weight lost to truncation.
    pub fn tail_mass(&self) -> f64 {
        if self.entries.is_empty() {
            0.0
        } else {
            (1.0 - self.captured_mass()).max(0.0)
        }
    }
}

/// What a [`WindowSpectrum`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    CoherentWindow,
    StationaryRandom,
    Measurement,
}

/// `√(2π)·ε_t(ω)` in closed form.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Transform {
    /// `Σ a_k e^{-iν_k s}` on `[0, t]`.
    Harmonics(Vec<(f64, Complex64)>),
    /// `full` complete phase segments of length `period`, then `rest`.
    Pm { phase: f64, period: f64, full: u64, rest: f64 },
    /// `full` complete on/off periods, then `rest` into the next one.
    Am { on: f64, period: f64, full: u64, rest: f64 },
}

/// A group of transform atoms `c_n e^{iω s_n}/(ω - ν)` with
/// `s_n = offset + n·step`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct AtomGroup {
    pub pole: f64,
    pub offset: f64,
    pub step: f64,
    pub coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Window {
    pub transform: Transform,
    pub time: f64,
    pub fluence: f64,
}

impl Window {
    fn amplitude(&self, w: f64) -> Complex64 {
        match &self.transform {
            Transform::Harmonics(list) => list.iter().map(|(nu, a)| a * phase_integral(w - nu, self.time)).sum(),
            Transform::Pm {
                phase,
                period,
                full,
                rest,
            } => {
                let theta = phase + w * period;
                let mut acc = phase_integral(w, *period) * geometric_phase_sum(theta, *full);
                if *rest > 0.0 {
                    let start = Complex64::from_polar(1.0, *full as f64 * phase + w * (*full as f64 * period));
                    acc += start * phase_integral(w, *rest);
                }
                acc
            }
            Transform::Am { on, period, full, rest } => {
                let mut acc = phase_integral(w, *on) * geometric_phase_sum(w * period, *full);
                let tail = rest.min(*on);
                if tail > 0.0 {
                    acc += Complex64::from_polar(1.0, w * (*full as f64 * period)) * phase_integral(w, tail);
                }
                acc
            }
        }
    }

    pub(crate) fn density(&self, w: f64) -> f64 {
        self.amplitude(w).norm_sqr() / (TAU * self.fluence)
    }

    /// Decomposition of `√(2π)ε_t(ω)` into pole atoms, exact for all `ω`
    /// away from the poles.
    pub(crate) fn atoms(&self) -> Vec<AtomGroup> {
        let i = Complex64::new(0.0, 1.0);
        match &self.transform {
            Transform::Harmonics(list) => {
                let mut out = Vec::with_capacity(2 * list.len());
                for &(nu, a) in list {
                    out.push(AtomGroup {
                        pole: nu,
                        offset: self.time,
                        step: 0.0,
                        coeffs: vec![-i * a * Complex64::from_polar(1.0, -nu * self.time)],
                    });
                    out.push(AtomGroup {
                        pole: nu,
                        offset: 0.0,
                        step: 0.0,
                        coeffs: vec![i * a],
                    });
                }
                out
            }
            Transform::Pm {
                phase,
                period,
                full,
                rest,
            } => {
                // Jumps at nτ for n < full (n = full too when a partial
                // segment follows); the atom weight is i·(ε_after - ε_before).
                let last = if *rest > 0.0 { *full } else { full.saturating_sub(1) };
                let mut coeffs = Vec::with_capacity(last as usize + 1);
                coeffs.push(i);
                let jump = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -phase);
                for n in 1..=last {
                    coeffs.push(i * Complex64::from_polar(1.0, n as f64 * phase) * jump);
                }
                let end = -i * Complex64::from_polar(1.0, last as f64 * phase);
                vec![
                    AtomGroup {
                        pole: 0.0,
                        offset: 0.0,
                        step: *period,
                        coeffs,
                    },
                    AtomGroup {
                        pole: 0.0,
                        offset: self.time,
                        step: *period,
                        coeffs: vec![end],
                    },
                ]
            }
            Transform::Am { on, period, full, rest } => {
                if on >= period {
                    return Window {
                        transform: Transform::Harmonics(vec![(0.0, Complex64::new(1.0, 0.0))]),
                        time: self.time,
                        fluence: self.fluence,
                    }
                    .atoms();
                }
                let rises = if *rest > 0.0 { full + 1 } else { *full };
                let falls = if *rest > *on { full + 1 } else { *full };
                let mut out = vec![
                    AtomGroup {
                        pole: 0.0,
                        offset: 0.0,
                        step: *period,
                        coeffs: vec![i; rises as usize],
                    },
                    AtomGroup {
                        pole: 0.0,
                        offset: *on,
                        step: *period,
                        coeffs: vec![-i; falls as usize],
                    },
                ];
                if *rest > 0.0 && *rest <= *on {
                    out.push(AtomGroup {
                        pole: 0.0,
                        offset: self.time,
                        step: *period,
                        coeffs: vec![-i],
                    });
                }
                out
            }
        }
    }

    /// Frequencies where `F_t` has its main peaks.
    pub(crate) fn peaks(&self, reach: f64) -> Vec<f64> {
        match &self.transform {
            Transform::Harmonics(list) => list.iter().map(|h| h.0).collect(),
            Transform::Pm { phase, period, .. } => {
                let k = (reach * period / TAU).ceil() as i64 + 1;
                (-k..=k)
                    .map(|k| (TAU * k as f64 - phase) / period)
                    .filter(|w| w.abs() <= reach)
                    .collect()
            }
            Transform::Am { period, .. } => {
                let k = ((reach * period / TAU).ceil() as i64 + 1).min(1 << 16);
                (-k..=k).map(|k| TAU * k as f64 / period).filter(|w| w.abs() <= reach).collect()
            }
        }
    }

    /// Half-width of the frequency range holding the non-tail part of
    /// `F_t`, measured from zero.
    pub(crate) fn reach(&self) -> f64 {
        let window = 64.0 * TAU / self.time;
        match &self.transform {
            Transform::Harmonics(list) => list.iter().map(|h| h.0.abs()).fold(0.0, f64::max) + window,
            Transform::Pm { period, .. } => (16.0 * TAU / period).max(window),
            Transform::Am { on, .. } => (16.0 * TAU / on).max(window),
        }
    }

    /// Candidate frequencies for the dominant peak, most likely first.
    fn dominant_candidates(&self) -> Vec<f64> {
        match &self.transform {
            Transform::Harmonics(list) => list.iter().map(|h| h.0).collect(),
            Transform::Pm { phase, period, .. } => {
                vec![-phase / period, (TAU - phase) / period, (-TAU - phase) / period]
            }
            Transform::Am { .. } => vec![0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Shape {
    Coherent(Window),
    Lorentzian { center: f64, width: f64 },
}

/// A normalized modulation spectrum: `F_t(ω)` for a finite window, or the
/// stationary `F(ω)` of a random or measurement scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpectrum {
    time: f64,
    kind: SpectrumKind,
    pub(crate) shape: Shape,
}

impl WindowSpectrum {
    /// Window length `t` (infinite for stationary random spectra, `τ₁` for
    /// measurements).
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    /// `Q(t)` used for normalization; `None` for stationary random spectra.
    pub fn fluence(&self) -> Option<f64> {
        match &self.shape {
            Shape::Coherent(w) => Some(w.fluence),
            Shape::Lorentzian { .. } => None,
        }
    }

    /// `F(ω)`.
    pub fn eval(&self, omega: f64) -> f64 {
        match &self.shape {
            Shape::Coherent(w) => w.density(omega),
            Shape::Lorentzian { center, width } => {
                let d = omega - center;
                width / (PI * (d * d + width * width))
            }
        }
    }

    pub fn sample(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&w| self.eval(w)).collect()
    }

    /// `√(2π)·ε_t(ω)`; `None` for stationary random spectra.
    pub fn amplitude(&self, omega: f64) -> Option<Complex64> {
        match &self.shape {
            Shape::Coherent(w) => Some(w.amplitude(omega)),
            Shape::Lorentzian { .. } => None,
        }
    }

    /// Half-width of the frequency range around zero that holds the peaks.
    pub fn reach(&self) -> f64 {
        match &self.shape {
            Shape::Coherent(w) => w.reach(),
            Shape::Lorentzian { center, width } => center.abs() + 64.0 * width,
        }
    }

    /// Frequency shift `Δ_t`: the principal-value mean `∫ωF/∫F` over the
    /// symmetric range `[-L, L]`, `L = reach()`.
    pub fn shift(&self) -> Result<f64> {
        match (&self.shape, self.kind) {
            (_, SpectrumKind::Measurement) => Ok(0.0),
            (Shape::Lorentzian { center, .. }, _) => Ok(*center),
            (Shape::Coherent(w), _) => {
                let reach = w.reach();
                let mut points = w.peaks(reach);
                points.push(-reach);
                points.push(reach);
                let panel = TAU / w.time;
                let tol = Tolerance::new(1e-13, 1e-10);
                let mass = integrate(|x| w.density(x), &points, panel, tol)?.value;
                let first = integrate(|x| x * w.density(x), &points, panel, tol)?.value;
                Ok(first / mass)
            }
        }
    }

    /// Width `ν_t`: full width at half maximum of the dominant peak.
    pub fn width(&self) -> Result<f64> {
        let w = match &self.shape {
            Shape::Lorentzian { width, .. } => return Ok(2.0 * width),
            Shape::Coherent(w) => w,
        };
        let lobe = TAU / w.time;
        let mut center = f64::NAN;
        let mut best = -1.0;
        for c in w.dominant_candidates() {
            let v = w.density(c);
            if v > best {
                best = v;
                center = c;
            }
        }
        // Golden-section refinement of the maximum within one lobe.
        let (mut a, mut b) = (center - 0.5 * lobe, center + 0.5 * lobe);
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = b - ratio * (b - a);
            let x2 = a + ratio * (b - a);
            if w.density(x1) < w.density(x2) {
                a = x1;
            } else {
                b = x2;
            }
        }
        let peak_at = 0.5 * (a + b);
        let half = 0.5 * w.density(peak_at).max(best);
        let crossing = |dir: f64| -> Result<f64> {
            let step = lobe / 64.0;
            let mut inside = peak_at;
            for _ in 0..(1 << 20) {
                let next = inside + dir * step;
                if w.density(next) < half {
                    let (mut lo, mut hi) = (inside, next);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        if w.density(mid) >= half {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    return Ok(0.5 * (lo + hi));
                }
                inside = next;
            }
            Err(Error::Quadrature {
                value: inside,
                estimate: f64::INFINITY,
            })
        };
        Ok(crossing(1.0)? - crossing(-1.0)?)
    }

    /// `∫F dω`, evaluated with the same machinery as the decay rate.
    pub fn total_mass(&self) -> Result<f64> {
        crate::rate::window_mass(self)
    }
}
