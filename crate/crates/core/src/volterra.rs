//! Direct solution of the exact amplitude equation
//! `α̇(t) = -∫₀ᵗ ε*(t)ε(t′)Φ(t-t′)e^{iω_a(t-t′)}α(t′)dt′`.
//!
//! The memory integral uses the trapezoid rule on a uniform grid and the
//! time step is the (implicit) trapezoid rule, so each step costs one scalar
//! linear solve and the scheme is second order. Jumps of a piecewise-constant
//! `ε` sit on grid points, and each grid interval uses the one-sided values
//! of `ε` on that interval. Nothing here depends on the rate engine.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
// Math methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::modulation::{HarmonicDecomposition, Modulation, Scheme, DEFAULT_TRUNCATION};
use crate::rate::{DecayCurve, ValidityTier};
use crate::spectra::CouplingSpectrum;

/// Largest grid the `O(N²)` solver accepts.
pub const MAX_STEPS: usize = 400_000;

/// Sampled amplitude `α(t)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    step: f64,
    samples: Vec<Complex64>,
    kernel: Vec<Complex64>,
    spectrum: CouplingSpectrum,
    modulation: Modulation,
}

impl AmplitudeTrajectory {
    pub fn step(&self) -> f64 {
        self.step
    }

    /// `(t_n, α(t_n))` for every grid point.
    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.samples.iter().enumerate().map(move |(n, a)| (n as f64 * self.step, *a))
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.samples
    }

    /// `Φ(nh)e^{iω_a nh}` on the grid.
    pub fn kernel(&self) -> &[Complex64] {
        &self.kernel
    }

    pub fn spectrum(&self) -> &CouplingSpectrum {
        &self.spectrum
    }

    pub fn modulation(&self) -> &Modulation {
        &self.modulation
    }

    pub fn horizon(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.step
    }

    /// `α` at grid time `t`, if `t` is a grid point.
    pub fn at(&self, t: f64) -> Option<Complex64> {
        let n = (t / self.step).round();
        if n < 0.0 || (t - n * self.step).abs() > 1e-9 * t.abs().max(self.step) {
            return None;
        }
        self.samples.get(n as usize).copied()
    }
}

/// Step-size requirements of a (spectrum, modulation) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLimits {
    /// Largest step that resolves modulation and kernel.
    pub max_step: f64,
    /// Grid period the jumps of `ε` must align with (`None` if smooth).
    pub alignment: Option<Alignment>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alignment {
    /// Jumps at multiples of `period`.
    Single { period: f64 },
    /// Jumps at `nτ₀` and `nτ₀ + τ₁`.
    Double { on: f64, period: f64 },
}

impl Alignment {
    fn aligned(&self, h: f64) -> bool {
        let is_multiple = |x: f64| {
            let m = (x / h).round();
            m >= 1.0 && (x - m * h).abs() <= 1e-9 * x
        };
        match *self {
            Alignment::Single { period } => is_multiple(period),
            Alignment::Double { on, period } => is_multiple(on) && (on == period || is_multiple(period - on)),
        }
    }

    /// Largest aligned step not exceeding `h`.
    fn align(&self, h: f64) -> Option<f64> {
        match *self {
            Alignment::Single { period } => Some(period / (period / h).ceil()),
            Alignment::Double { on, .. } => {
                let start = (on / h).ceil() as u64;
                (start..start + 1_000_000).map(|m| on / m as f64).find(|&c| self.aligned(c))
            }
        }
    }
}

/// Resolution requirements: `h ≤ τ/20` for the modulation, `h ≤ t_c/20`
/// and at least 20 samples per kernel oscillation.
pub fn step_limits(spectrum: &CouplingSpectrum, modulation: &Modulation) -> Result<StepLimits> {
    if !modulation.is_time_domain() {
        return Err(Error::Unsupported {
            operation: "amplitude equation",
            scheme: modulation.name(),
        });
    }
    let response = spectrum.response_function()?;
    let mut max_step = core::f64::consts::PI / (10.0 * response.bandwidth().max(1e-300));
    if let Some(tau) = modulation.time_scale() {
        max_step = max_step.min(tau / 20.0);
    }
    let h = HarmonicDecomposition::from_modulation(modulation, DEFAULT_TRUNCATION)?;
    if !h.entries().is_empty() {
        max_step = max_step.min(spectrum.correlation_time(&h)?.value / 20.0);
    }
    let alignment = match modulation.scheme() {
        Scheme::ImpulsivePm { period, .. } => Some(Alignment::Single { period: *period }),
        Scheme::OnOffAm { on, period } => Some(Alignment::Double {
            on: *on,
            period: *period,
        }),
        _ => None,
    };
    Ok(StepLimits { max_step, alignment })
}

/// Default step `min(τ, t_c)/40`, tightened for the kernel bandwidth and
/// aligned to the jumps of `ε`.
pub fn default_step(spectrum: &CouplingSpectrum, modulation: &Modulation) -> Result<f64> {
    let limits = step_limits(spectrum, modulation)?;
    let h = 0.5 * limits.max_step;
    match limits.alignment {
        Some(a) => a
            .align(h)
            .ok_or_else(|| Error::input("no grid step aligns with both τ₁ and τ₀")),
        None => Ok(h),
    }
}

/// Solves the amplitude equation on `[0, horizon]` with step `h`.
pub fn solve(spectrum: &CouplingSpectrum, modulation: &Modulation, horizon: f64, step: f64) -> Result<AmplitudeTrajectory> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::input(format!("horizon must be positive and finite, got {horizon}")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::input(format!("step must be positive and finite, got {step}")));
    }
    let limits = step_limits(spectrum, modulation)?;
    if step > limits.max_step * (1.0 + 1e-12) {
        let recommended = match limits.alignment {
            Some(a) => a.align(limits.max_step).unwrap_or(limits.max_step),
            None => limits.max_step,
        };
        return Err(Error::StepTooCoarse {
            requested: step,
            recommended,
        });
    }
    if let Some(a) = limits.alignment {
        if !a.aligned(step) {
            return Err(Error::StepTooCoarse {
                requested: step,
                recommended: a.align(step).unwrap_or(limits.max_step),
            });
        }
    }
    let steps = (horizon / step - 1e-9).ceil().max(1.0);
    if steps > MAX_STEPS as f64 {
        return Err(Error::input(format!("{steps} steps exceed the solver limit of {MAX_STEPS}")));
    }
    let n_steps = steps as usize;

    let wa = spectrum.resonance();
    let response = spectrum.response_function()?;
    let kernel: Vec<Complex64> = response
        .sample(step, n_steps + 1)?
        .into_iter()
        .enumerate()
        .map(|(m, phi)| phi * Complex64::from_polar(1.0, wa * m as f64 * step))
        .collect();

    // One-sided values of ε on each interval: `right[j]` on (t_j, t_{j+1})
    // seen from t_j, `left[j+1]` seen from t_{j+1}.
    let piecewise = modulation.jump_times(horizon).is_some();
    let mut right = Vec::with_capacity(n_steps + 1);
    let mut left = Vec::with_capacity(n_steps + 1);
    left.push(Complex64::new(0.0, 0.0));
    for j in 0..=n_steps {
        let t = j as f64 * step;
        if piecewise {
            let mid = modulation.eval_epsilon(t + 0.5 * step)?;
            right.push(mid);
            if j < n_steps {
                left.push(mid);
            }
        } else {
            let e = modulation.eval_epsilon(t)?;
            right.push(e);
            if j > 0 {
                left.push(e);
            }
        }
    }

    let half = 0.5 * step;
    let mut alpha = Vec::with_capacity(n_steps + 1);
    alpha.push(Complex64::new(1.0, 0.0));
    // u_j = (right_j + left_j)·α_j: trapezoid weights from both adjacent
    // intervals, collapsed into one sum.
    let mut u: Vec<Complex64> = Vec::with_capacity(n_steps + 1);
    u.push(right[0] * alpha[0]);
    let mut deriv = Complex64::new(0.0, 0.0); // f_0⁺: memory integral is empty
    for n in 0..n_steps {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, uj) in u.iter().enumerate() {
            s += kernel[n + 1 - j] * uj;
        }
        s *= half;
        let b = left[n + 1];
        let denom = Complex64::new(1.0, 0.0) + kernel[0] * (half * half * b.norm_sqr());
        let next = (alpha[n] + deriv * half - b.conj() * s * half) / denom;
        alpha.push(next);
        let memory = s + kernel[0] * b * next * half;
        deriv = -right[n + 1].conj() * memory;
        u.push((right[n + 1] + b) * next);
    }

    Ok(AmplitudeTrajectory {
        step,
        samples: alpha,
        kernel,
        spectrum: spectrum.clone(),
        modulation: modulation.clone(),
    })
}

/// Agreement between `|α(t)|` and `exp[-R(t)Q(t)/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationReport {
    pub max_relative: f64,
    pub mean_relative: f64,
    /// Time at which the maximum deviation occurs.
    pub worst_time: f64,
    pub samples: usize,
    /// `R·t_c` of the compared curve.
    pub validity_ratio: f64,
    pub regime: ValidityTier,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares a trajectory with a decay curve at the curve's sample times,
/// which must lie on the trajectory grid.
pub fn compare_with_universal(traj: &AmplitudeTrajectory, curve: &DecayCurve, tolerance: f64) -> Result<DeviationReport> {
    if curve.spectrum != traj.spectrum {
        return Err(Error::Mismatch("trajectory and curve use different spectra".into()));
    }
    if let Some(m) = &curve.modulation {
        if *m != traj.modulation {
            return Err(Error::Mismatch("trajectory and curve use different modulations".into()));
        }
    }
    if curve.samples.is_empty() {
        return Err(Error::Mismatch("decay curve has no samples".into()));
    }
    let mut max_relative: f64 = 0.0;
    let mut worst_time = 0.0;
    let mut total = 0.0;
    for s in &curve.samples {
        let alpha = traj
            .at(s.time)
            .ok_or_else(|| Error::Mismatch(format!("time {} is not on the trajectory grid", s.time)))?;
        let expected = s.survival.sqrt();
        let dev = (alpha.norm() - expected).abs() / expected;
        total += dev;
        if dev > max_relative {
            max_relative = dev;
            worst_time = s.time;
        }
    }
    let n = curve.samples.len();
    Ok(DeviationReport {
        max_relative,
        mean_relative: total / n as f64,
        worst_time,
        samples: n,
        validity_ratio: curve.validity.ratio,
        regime: curve.validity.tier,
        tolerance,
        passed: max_relative < tolerance,
    })
}
