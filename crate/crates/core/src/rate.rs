//! Decay rates: the universal finite-time rate `R(t) = 2π∫G(ω+ω_a)F_t(ω)dω`,
//! the long-time harmonic rate, survival curves and the `R·t_c` validity
//! diagnostic.
//!
//! The overlap integral is split at `±W`. Inside, adaptive Gauss–Kronrod
//! panels no wider than one sinc lobe (`2π/t`) resolve `F_t`; every harmonic
//! peak and every edge or peak of `G` is a breakpoint. Outside, the window
//! transform is a finite sum of pole terms `c_m e^{iωs_m}/(ω-ν_m)`, so the
//! part of `G` that is constant (a flat spectrum) is integrated exactly with
//! sine and cosine integrals, and the decaying remainder of `G` is integrated
//! against the non-oscillating envelope `Σ|c_m|²/(ω-ν_m)²`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
// Math methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::modulation::{AtomGroup, HarmonicDecomposition, Modulation, Scheme, Shape, Window, WindowSpectrum};
use crate::quad::{integrate, Estimate, Tolerance};
use crate::special::pole_pair_tail;
use crate::spectra::{CouplingSpectrum, SpectrumModel};

/// `R·t_c` below this is a strong validity margin.
pub const STRONG_VALIDITY: f64 = 0.01;
/// `R·t_c` above this flags the weak-coupling rate as unreliable.
pub const ACCEPTABLE_VALIDITY: f64 = 0.1;

/// `G(ω_a + ω)` as seen by the overlap integral, with `ω` measured from the
/// resonance.
struct Profile<'a> {
    g: &'a dyn Fn(f64) -> f64,
    /// Edges and peaks of `G`, relative to `ω_a`.
    features: Vec<f64>,
    /// Half-width of the range where `G` has structure.
    reach: f64,
    /// `(level, end)` of the constant part on the positive and negative
    /// sides: `G = level` for `W < |ω| < end`.
    positive: (f64, f64),
    negative: (f64, f64),
}

impl<'a> Profile<'a> {
    fn of(spectrum: &CouplingSpectrum, g: &'a dyn Fn(f64) -> f64) -> Self {
        let wa = spectrum.resonance();
        let level = spectrum.asymptote();
        let (positive, negative) = match spectrum.model() {
            SpectrumModel::FlatCutoff { cutoff, .. } => ((level, cutoff - wa), (level, cutoff + wa)),
            _ => ((0.0, f64::INFINITY), (0.0, f64::INFINITY)),
        };
        Profile {
            g,
            features: spectrum.features().into_iter().map(|f| f - wa).collect(),
            reach: spectrum.reach(),
            positive,
            negative,
        }
    }
}

/// `R = 2π∫G(ω+ω_a)F(ω)dω` with the default tolerance (absolute `10⁻⁸`,
/// relative `10⁻⁶`).
pub fn universal_rate(spectrum: &CouplingSpectrum, window: &WindowSpectrum) -> Result<f64> {
    Ok(universal_rate_with(spectrum, window, Tolerance::default())?.value)
}

/// [`universal_rate`] with an explicit tolerance, returning the error
/// estimate.
pub fn universal_rate_with(
    spectrum: &CouplingSpectrum,
    window: &WindowSpectrum,
    tol: Tolerance,
) -> Result<Estimate<f64>> {
    let wa = spectrum.resonance();
    let g = |w: f64| spectrum.g(wa + w);
    let profile = Profile::of(spectrum, &g);
    let est = overlap(&profile, window, Tolerance::new(tol.abs / TAU, tol.rel))?;
    Ok(Estimate {
        value: TAU * est.value.max(0.0),
        error: TAU * est.error,
        evaluations: est.evaluations,
    })
}

/// `∫F dω` through the same quadrature and tail formulas as the rate.
pub(crate) fn window_mass(window: &WindowSpectrum) -> Result<f64> {
    let one = |_: f64| 1.0;
    let profile = Profile {
        g: &one,
        features: Vec::new(),
        reach: 0.0,
        positive: (1.0, f64::INFINITY),
        negative: (1.0, f64::INFINITY),
    };
    Ok(overlap(&profile, window, Tolerance::new(1e-12, 1e-10))?.value)
}

fn overlap(profile: &Profile<'_>, window: &WindowSpectrum, tol: Tolerance) -> Result<Estimate<f64>> {
    match &window.shape {
        Shape::Lorentzian { center, width } => lorentzian_overlap(profile, *center, *width, tol),
        Shape::Coherent(w) => coherent_overlap(profile, w, tol),
    }
}

/// `∫G(ω)·(ν/π)/((ω-Δ)²+ν²)dω` via `ω = Δ + ν tan θ`, which maps the line
/// onto `(-π/2, π/2)` with uniform weight `1/π`.
fn lorentzian_overlap(profile: &Profile<'_>, center: f64, width: f64, tol: Tolerance) -> Result<Estimate<f64>> {
    let half = 0.5 * PI;
    let mut points: Vec<f64> = profile
        .features
        .iter()
        .map(|f| ((f - center) / width).atan())
        .collect();
    points.push(-half);
    points.push(half);
    let g = profile.g;
    let est = integrate(
        |theta: f64| g(center + width * theta.tan()) / PI,
        &points,
        f64::INFINITY,
        Tolerance::new(0.01 * tol.abs, 0.01 * tol.rel),
    )?;
    Ok(est)
}

fn coherent_overlap(profile: &Profile<'_>, window: &Window, tol: Tolerance) -> Result<Estimate<f64>> {
    let lobe = TAU / window.time;
    let mut reach = window.reach().max(profile.reach);
    // Pull nearby features inside the near region; far ones are handled by
    // the tail formulas.
    let horizon = 4.0 * reach;
    for &f in &profile.features {
        if f.abs() <= horizon {
            reach = reach.max(f.abs() + lobe);
        }
    }
    for &(level, end) in &[profile.positive, profile.negative] {
        if level != 0.0 && end.is_finite() && end.abs() <= horizon {
            reach = reach.max(end.abs() + lobe);
        }
    }

    let mut points = window.peaks(reach);
    points.extend(profile.features.iter().copied().filter(|f| f.abs() < reach));
    points.push(0.0);
    points.push(-reach);
    points.push(reach);
    let g = profile.g;
    let near_tol = Tolerance::new(0.01 * tol.abs, 0.01 * tol.rel);
    let near = integrate(|w| g(w) * window.density(w), &points, lobe, near_tol)?;

    let atoms = window.atoms();
    let norm = 1.0 / (TAU * window.fluence);
    let pairs = pair_sums(&atoms);
    let mirrored: Vec<(f64, f64, f64, Complex64)> = pairs.iter().map(|&(a, b, d, c)| (-a, -b, -d, c)).collect();
    let simultaneous = 1e-12 * window.time;

    let mut value = near.value;
    let mut error = near.error;
    let mut evaluations = near.evaluations;
    for (side, (level, end), sign) in [(&pairs, profile.positive, 1.0), (&mirrored, profile.negative, -1.0)] {
        if level != 0.0 && end > reach {
            value += level * norm * constant_tail(side.iter(), reach, end);
        }
        // Remainder of G beyond W: exact against the non-oscillating
        // (same-time) pairs, plus the boundary term of the oscillating ones.
        let (steady, oscillating): (Vec<_>, Vec<_>) = side.iter().partition(|p| p.2.abs() <= simultaneous);
        let edge = remainder_at(profile, reach * (1.0 + 1e-12), sign);
        if edge != 0.0 {
            value += edge * norm * constant_tail(oscillating.iter().copied(), reach, f64::INFINITY);
        }
        let remainder = envelope_tail(profile, &steady, reach, sign, norm, near_tol)?;
        value += remainder.value;
        error += remainder.error;
        evaluations += remainder.evaluations;
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// `G(±ω) - level` on the tail side selected by `sign`.
fn remainder_at(profile: &Profile<'_>, omega: f64, sign: f64) -> f64 {
    let (level, end) = if sign > 0.0 { profile.positive } else { profile.negative };
    let g = (profile.g)(sign * omega);
    if omega < end {
        g - level
    } else {
        g
    }
}

/// Collapses `|Σ_m c_m e^{iωs_m}/(ω-ν_m)|²` into
/// `Σ A·e^{iωd}/((ω-a)(ω-b))` terms `(a, b, d, A)`, grouping atom pairs on a
/// common lattice by their index difference.
fn pair_sums(groups: &[AtomGroup]) -> Vec<(f64, f64, f64, Complex64)> {
    let mut out = Vec::new();
    for g in groups {
        for h in groups {
            let (lg, lh) = (g.coeffs.len(), h.coeffs.len());
            if lg == 0 || lh == 0 {
                continue;
            }
            let step = if lg > 1 { g.step } else { h.step };
            let shared = lg == 1 || lh == 1 || g.step == h.step;
            if shared {
                let base = g.offset - h.offset;
                let lo = -(lh as i64 - 1);
                let hi = lg as i64 - 1;
                for delta in lo..=hi {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let n_lo = (-delta).max(0) as usize;
                    let n_hi = (lh as i64).min(lg as i64 - delta) as usize;
                    for n in n_lo..n_hi {
                        acc += g.coeffs[(n as i64 + delta) as usize] * h.coeffs[n].conj();
                    }
                    if acc != Complex64::new(0.0, 0.0) {
                        let d = base + delta as f64 * step;
                        out.push((g.pole, h.pole, d, acc));
                    }
                }
            } else {
                for (i, cg) in g.coeffs.iter().enumerate() {
                    for (j, ch) in h.coeffs.iter().enumerate() {
                        let d = (g.offset + i as f64 * g.step) - (h.offset + j as f64 * h.step);
                        out.push((g.pole, h.pole, d, cg * ch.conj()));
                    }
                }
            }
        }
    }
    out
}

/// `∫_W^{end} |√(2π)ε_t(ω)|² dω` from the pair decomposition.
fn constant_tail<'p>(pairs: impl IntoIterator<Item = &'p (f64, f64, f64, Complex64)>, w: f64, end: f64) -> f64 {
    let mut acc = 0.0;
    for &(a, b, d, c) in pairs {
        let mut t = pole_pair_tail(w, a, b, d);
        if end.is_finite() {
            t -= pole_pair_tail(end, a, b, d);
        }
        acc += (c * t).re;
    }
    acc
}

/// `∫_W^∞ [G(±ω) - level]·env(ω) dω` where `env` collects the
/// non-oscillating pair terms `Re A/((ω-a)(ω-b))`, via `u = W/ω`.
fn envelope_tail(
    profile: &Profile<'_>,
    steady: &[&(f64, f64, f64, Complex64)],
    w: f64,
    sign: f64,
    norm: f64,
    tol: Tolerance,
) -> Result<Estimate<f64>> {
    let (_, end) = if sign > 0.0 { profile.positive } else { profile.negative };
    let integrand = |u: f64| {
        let omega = w / u;
        let r = remainder_at(profile, omega, sign);
        if r == 0.0 {
            return 0.0;
        }
        let env: f64 = steady.iter().map(|&&(a, b, _, c)| c.re / ((omega - a) * (omega - b))).sum();
        r * env * norm * w / (u * u)
    };
    let mut points = alloc::vec![0.0, 1.0];
    for &f in &profile.features {
        let f = sign * f;
        if f > w {
            points.push(w / f);
        }
    }
    if end.is_finite() && end > w {
        points.push(w / end);
    }
    integrate(integrand, &points, f64::INFINITY, tol)
}

/// Long-time rate `R = 2πΣ_k|λ_k|²G(ω_a+ω_k)` with a bound on the
/// contribution of truncated harmonics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongTimeRate {
    pub rate: f64,
    /// `1 - Σ|λ_k|²`.
    pub tail_mass: f64,
    /// `2π × tail mass × sup G`.
    pub truncation_bound: f64,
}

pub fn longtime_rate(spectrum: &CouplingSpectrum, harmonics: &HarmonicDecomposition) -> LongTimeRate {
    let wa = spectrum.resonance();
    let rate = TAU
        * harmonics
            .entries()
            .iter()
            .map(|h| h.weight.norm_sqr() * spectrum.g(wa + h.frequency))
            .sum::<f64>();
    let tail_mass = harmonics.tail_mass();
    LongTimeRate {
        rate,
        tail_mass,
        truncation_bound: TAU * tail_mass * spectrum.sup_g(),
    }
}

/// Qualitative reading of `R·t_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidityTier {
    /// `R·t_c < 0.01`.
    Strong,
    /// `R·t_c < 0.1`.
    Acceptable,
    /// Weak-coupling formula suspect.
    Flagged,
}

impl ValidityTier {
    pub fn of(ratio: f64) -> Self {
        if ratio < STRONG_VALIDITY {
            ValidityTier::Strong
        } else if ratio < ACCEPTABLE_VALIDITY {
            ValidityTier::Acceptable
        } else {
            ValidityTier::Flagged
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ValidityTier::Strong => "strong",
            ValidityTier::Acceptable => "acceptable",
            ValidityTier::Flagged => "flagged",
        }
    }
}

/// The `R·t_c ≪ 1` diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub ratio: f64,
    pub rate: f64,
    pub correlation_time: f64,
    pub tier: ValidityTier,
    /// Some probed frequency sits exactly on a spectral edge.
    pub edge_degenerate: bool,
}

impl Validity {
    fn new(rate: f64, correlation_time: f64, edge_degenerate: bool) -> Self {
        let ratio = rate * correlation_time;
        Validity {
            ratio,
            rate,
            correlation_time,
            tier: ValidityTier::of(ratio),
            edge_degenerate,
        }
    }

    pub fn is_flagged(&self) -> bool {
        self.tier == ValidityTier::Flagged
    }
}

/// `R·t_c` with `R` the long-time rate and `t_c` the correlation time over
/// the retained harmonics.
pub fn validity_ratio(spectrum: &CouplingSpectrum, harmonics: &HarmonicDecomposition) -> Result<Validity> {
    if harmonics.entries().is_empty() {
        return Ok(Validity::new(0.0, 0.0, false));
    }
    let rate = longtime_rate(spectrum, harmonics).rate;
    let tc = spectrum.correlation_time(harmonics)?;
    Ok(Validity::new(rate, tc.value, tc.edge_degenerate))
}

/// Validity of any modulation: harmonic schemes use [`validity_ratio`];
/// stationary schemes use their rate and `t_c = 1/ξ` at the spectrum's
/// centre.
pub fn modulation_validity(spectrum: &CouplingSpectrum, modulation: &Modulation) -> Result<Validity> {
    let wa = spectrum.resonance();
    match modulation.scheme() {
        Scheme::RandomLorentzian { shift, .. } => {
            let rate = universal_rate(spectrum, &modulation.stationary_spectrum()?)?;
            Ok(Validity::new(rate, 1.0 / spectrum.xi(wa + shift), false))
        }
        Scheme::MeasurementSinc { .. } => {
            let rate = universal_rate(spectrum, &modulation.stationary_spectrum()?)?;
            Ok(Validity::new(rate, 1.0 / spectrum.xi(wa), false))
        }
        _ => {
            let h = HarmonicDecomposition::from_modulation(modulation, crate::modulation::DEFAULT_TRUNCATION)?;
            validity_ratio(spectrum, &h)
        }
    }
}

/// How the rates of a [`DecayCurve`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FiniteWindow,
    LongTimeHarmonic,
    StationaryRandom,
}

/// One time point of a decay curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub time: f64,
    pub fluence: f64,
    /// `None` where `F_t` is undefined (`Q(t) = 0`).
    pub rate: Option<f64>,
    /// `P(t) = exp[-R(t)Q(t)]`.
    pub survival: f64,
}

/// Sampled `t ↦ (Q, R, P)` with validity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub samples: Vec<DecaySample>,
    pub validity: Validity,
    pub method: Method,
    pub spectrum: CouplingSpectrum,
    /// The modulation, when the curve was computed from one.
    pub modulation: Option<Modulation>,
}

fn check_times(times: &[f64]) -> Result<()> {
    for (i, &t) in times.iter().enumerate() {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::input(format!("time {t} must be finite and ≥ 0")));
        }
        if i > 0 && t <= times[i - 1] {
            return Err(Error::input("times must be strictly increasing"));
        }
    }
    Ok(())
}

/// Survival probability with the finite-window rate at every time (the
/// stationary spectrum for random and measurement schemes).
pub fn survival_curve(spectrum: &CouplingSpectrum, modulation: &Modulation, times: &[f64]) -> Result<DecayCurve> {
    check_times(times)?;
    let validity = modulation_validity(spectrum, modulation)?;
    let stationary = if modulation.is_time_domain() {
        None
    } else {
        Some(universal_rate(spectrum, &modulation.stationary_spectrum()?)?)
    };
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let fluence = modulation.fluence(t)?;
        let rate = if fluence > 0.0 {
            match stationary {
                Some(r) => Some(r),
                None => Some(universal_rate(spectrum, &modulation.window_spectrum(t)?)?),
            }
        } else {
            None
        };
        let survival = match rate {
            Some(r) => (-r * fluence).exp(),
            None => 1.0,
        };
        samples.push(DecaySample {
            time: t,
            fluence,
            rate,
            survival,
        });
    }
    Ok(DecayCurve {
        samples,
        validity,
        method: if stationary.is_some() {
            Method::StationaryRandom
        } else {
            Method::FiniteWindow
        },
        spectrum: spectrum.clone(),
        modulation: Some(modulation.clone()),
    })
}

/// Survival with the long-time rate: `P(t) = exp[-R ε_c² t]`.
pub fn longtime_curve(
    spectrum: &CouplingSpectrum,
    harmonics: &HarmonicDecomposition,
    times: &[f64],
) -> Result<DecayCurve> {
    check_times(times)?;
    let rate = longtime_rate(spectrum, harmonics).rate;
    let validity = validity_ratio(spectrum, harmonics)?;
    let samples = times
        .iter()
        .map(|&t| {
            let fluence = harmonics.intensity() * t;
            DecaySample {
                time: t,
                fluence,
                rate: if fluence > 0.0 { Some(rate) } else { None },
                survival: (-rate * fluence).exp(),
            }
        })
        .collect();
    Ok(DecayCurve {
        samples,
        validity,
        method: Method::LongTimeHarmonic,
        spectrum: spectrum.clone(),
        modulation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::Harmonic;
    use alloc::vec;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn schemes() -> Vec<Modulation> {
        vec![
            Modulation::constant(1.0),
            Modulation::monochromatic(Complex64::new(1.0, 0.0), 0.7).unwrap(),
            Modulation::impulsive_pm(0.1, 1.0).unwrap(),
            Modulation::impulsive_pm(PI, 1.0).unwrap(),
            Modulation::on_off_am(0.1, 1.0).unwrap(),
            Modulation::quasiperiodic(vec![(0.0, Complex64::new(0.6, 0.0)), (2.0, Complex64::new(0.0, 0.8))]).unwrap(),
            Modulation::random_lorentzian(0.4, 0.2, 1.0).unwrap(),
            Modulation::measurement_sinc(0.5).unwrap(),
        ]
    }

    #[test]
    fn flat_spectrum_gives_golden_rule_for_every_window() {
        let g0 = 0.37;
        let flat = CouplingSpectrum::flat(g0, f64::INFINITY, 0.3).unwrap();
        for m in schemes() {
            for &t in &[0.3, 3.0, 41.0] {
                let f = m.window_spectrum(t).unwrap();
                let r = universal_rate(&flat, &f).unwrap();
                assert!(rel(r, TAU * g0) < 1e-7, "{} t={t}: {r}", m.name());
            }
        }
    }

    #[test]
    fn flat_with_far_cutoff_uses_exact_tail() {
        // Cutoff far outside the near region: G = G₀ up to ±10⁴.
        let flat = CouplingSpectrum::flat(1.0 / TAU, 1e4, 0.0).unwrap();
        let f = Modulation::constant(1.0).window_spectrum(50.0).unwrap();
        let r = universal_rate(&flat, &f).unwrap();
        // Mass of the t = 50 sinc² beyond ±10⁴ is ≈ 2/(π t 10⁴).
        let expect = 1.0 - 2.0 / (PI * 50.0 * 1e4);
        assert!((r - expect).abs() < 1e-8, "{r} vs {expect}");
    }

    #[test]
    fn long_window_approaches_golden_rule() {
        let s = CouplingSpectrum::lorentzian(0.01, 0.0, 1.0, 0.3).unwrap();
        let f = Modulation::constant(1.0).window_spectrum(2000.0).unwrap();
        let r = universal_rate(&s, &f).unwrap();
        assert!(rel(r, s.golden_rule_rate()) < 2e-3);
    }

    #[test]
    fn measurement_zeno_suppression_near_edge() {
        let s = CouplingSpectrum::band_edge(1.0, 1.0, 0.1).unwrap();
        let rates: Vec<f64> = [0.01, 0.1, 1.0]
            .iter()
            .map(|&tau| universal_rate(&s, &Modulation::measurement_sinc(tau).unwrap().stationary_spectrum().unwrap()).unwrap())
            .collect();
        assert!(rates[0] < rates[1] && rates[1] < rates[2], "{rates:?}");
    }

    #[test]
    fn lorentzian_window_against_direct_quadrature() {
        let s = CouplingSpectrum::band_edge(1.0, 1.0, 0.1).unwrap();
        let f = Modulation::random_lorentzian(0.3, 0.05, 1.0).unwrap().stationary_spectrum().unwrap();
        let r = universal_rate(&s, &f).unwrap();
        // ω + ω_a > 0 only; integrate the Lorentzian over [-0.1, ∞) directly.
        let direct = integrate(
            |w: f64| s.g(0.1 + w) * f.eval(w),
            &[-0.1, 0.0, 0.3, 1.0, 10.0, 1e3, 1e6, 1e9],
            f64::INFINITY,
            Tolerance::new(1e-14, 1e-11),
        )
        .unwrap()
        .value;
        assert!(rel(r, TAU * direct) < 1e-6, "{r} vs {}", TAU * direct);
    }

    #[test]
    fn band_edge_overlap_matches_brute_force() {
        // Brute force with a very wide range and the envelope tail ignored.
        let s = CouplingSpectrum::band_edge(1.0, 1.0, 0.1).unwrap();
        let m = Modulation::impulsive_pm(PI, 1.0).unwrap();
        let t = 12.0;
        let f = m.window_spectrum(t).unwrap();
        let r = universal_rate(&s, &f).unwrap();
        let big = 4e4;
        let brute = integrate(
            |w: f64| s.g(0.1 + w) * f.eval(w),
            &[-0.1, 0.0, big],
            TAU / t,
            Tolerance::new(1e-13, 1e-11),
        )
        .unwrap()
        .value;
        // The part beyond `big` is positive and at most
        // ∫_big^∞ ω^{-1/2}·Σ|c|²/(2πQω²) with Σ|c|² = 2 + 4·11 jump weights.
        let rest = 46.0 / (TAU * t) * (2.0 / 3.0) * big.powf(-1.5);
        let gap = r - TAU * brute;
assert!(gap > -1e-7 * r && gap < TAU * rest + 5e-7 * r, "{r} vs {}", TAU * brute);
    }

    #[test]
    fn longtime_examples() {
        let s = CouplingSpectrum::band_edge(1.0, 1.0, 0.1).unwrap();
        let mono = HarmonicDecomposition::from_modulation(&Modulation::monochromatic(Complex64::new(1.0, 0.0), 0.5).unwrap(), 0).unwrap();
        let r = longtime_rate(&s, &mono);
        assert!(rel(r.rate, TAU * s.g(0.6)) < 1e-15);
        let kill = HarmonicDecomposition::from_modulation(&Modulation::monochromatic(Complex64::new(1.0, 0.0), -0.2).unwrap(), 0).unwrap();
        assert_eq!(longtime_rate(&s, &kill).rate, 0.0);
    }

    #[test]
    fn pm_longtime_matches_long_window() {
        let s = CouplingSpectrum::band_edge(1.0, 1.0, 0.1).unwrap();
        let m = Modulation::impulsive_pm(PI, 1.0).unwrap();
        let h = HarmonicDecomposition::from_modulation(&m, 4096).unwrap();
        let long = longtime_rate(&s, &h);
        let finite = universal_rate(&s, &m.window_spectrum(1000.0).unwrap()).unwrap();
        assert!(rel(finite, long.rate) < 0.01, "{finite} vs {}", long.rate);
        assert!(long.truncation_bound < 1e-3 * long.rate);
    }

    #[test]
    fn validity_examples() {
        let s = CouplingSpectrum::band_edge(1.0, 1.0, 0.1).unwrap();
        let h = HarmonicDecomposition::from_modulation(&Modulation::constant(1.0), 0).unwrap();
        let v = validity_ratio(&s, &h).unwrap();
        assert!((v.ratio - 18.06).abs() < 0.01);
        assert_eq!(v.tier, ValidityTier::Flagged);
        let weak = validity_ratio(&s.scaled(1e-3).unwrap(), &h).unwrap();
        assert!((weak.ratio - 0.01806).abs() < 1e-4);
        assert_eq!(weak.tier, ValidityTier::Acceptable);
        let below = validity_ratio(&s.with_resonance(-1.0), &h).unwrap();
        assert_eq!(below.ratio, 0.0);
    }

    #[test]
    fn survival_examples() {
        let flat = CouplingSpectrum::flat(0.05, f64::INFINITY, 0.0).unwrap();
        let curve = survival_curve(&flat, &Modulation::constant(1.0), &[0.0, 1.0, 2.5]).unwrap();
        assert_eq!(curve.samples[0].survival, 1.0);
        assert!(curve.samples[0].rate.is_none());
        for s in &curve.samples[1..] {
            assert!(rel(s.survival, (-TAU * 0.05 * s.time).exp()) < 1e-7);
        }
        assert_eq!(curve.method, Method::FiniteWindow);

        let off = Modulation::quasiperiodic(Vec::new()).unwrap();
        let curve = survival_curve(&flat, &off, &[0.0, 1.0, 5.0]).unwrap();
        assert!(curve.samples.iter().all(|s| s.survival == 1.0));
        assert_eq!(curve.validity.ratio, 0.0);
    }

    #[test]
    fn am_survival_is_frozen_while_off() {
        let s = CouplingSpectrum::lorentzian(0.02, 0.0, 1.0, 0.2).unwrap();
        let m = Modulation::on_off_am(1.0, 3.0).unwrap();
        let curve = survival_curve(&s, &m, &[4.2, 5.0, 5.9]).unwrap();
        let p = curve.samples[0].survival;
        for x in &curve.samples[1..] {
            assert!(rel(x.survival, p) < 1e-9);
        }
    }

    #[test]
    fn survival_rejects_unordered_times() {
        let flat = CouplingSpectrum::flat(0.05, 10.0, 0.0).unwrap();
        assert!(survival_curve(&flat, &Modulation::constant(1.0), &[1.0, 0.5]).is_err());
    }

    #[test]
    fn free_harmonics_longtime_is_weighted_sum() {
        let s = CouplingSpectrum::lorentzian(1.0, 0.0, 1.0, 0.0).unwrap();
        let h = HarmonicDecomposition::new(
            vec![
                Harmonic {
                    frequency: 0.0,
                    weight: Complex64::new(0.5f64.sqrt(), 0.0),
                },
                Harmonic {
                    frequency: 1.0,
                    weight: Complex64::new(0.0, 0.5f64.sqrt()),
                },
            ],
            1.0,
        )
        .unwrap();
        let r = longtime_rate(&s, &h).rate;
        assert!(rel(r, TAU * 0.5 * (1.0 + 0.5)) < 1e-15);
    }
}
