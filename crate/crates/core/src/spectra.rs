//! Reservoir coupling spectra `G(ω)` and the quantities derived from them.
//!
//! A [`CouplingSpectrum`] pairs a spectral model with the resonance `ω_a` of
//! the decaying level. `G` is the density of final states weighted by the
//! coupling strength, so it is nonnegative everywhere; its Fourier transform
//! `Φ(t) = ∫G(ω)e^{-iωt}dω` is the memory kernel of the amplitude equation.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
// Math methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure_finite, Error, Result};
use crate::modulation::HarmonicDecomposition;
use crate::quad::{integrate, Tolerance};

/// Default high-frequency cutoff of a band-edge spectrum, in units of `Γ`.
pub const DEFAULT_BAND_CUTOFF: f64 = 1e3;

/// Relative floor applied to the local spectral scale.
pub const XI_FLOOR: f64 = 1e-9;

/// Piecewise-linear spectrum on a strictly increasing grid, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    omega: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedSpectrum {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::input("a tabulated spectrum needs at least two points"));
        }
        let (omega, values): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        for (i, (&w, &g)) in omega.iter().zip(&values).enumerate() {
            if !w.is_finite() || !g.is_finite() {
                return Err(Error::Divergent(format!("non-finite entry at row {i}")));
            }
            if g < 0.0 {
                return Err(Error::input(format!("negative G = {g} at ω = {w}")));
            }
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("tabulated frequencies must be strictly increasing"));
        }
        let total: f64 = omega
            .windows(2)
            .zip(values.windows(2))
            .map(|(w, g)| 0.5 * (w[1] - w[0]) * (g[0] + g[1]))
            .sum();
        if !total.is_finite() {
            return Err(Error::Divergent(format!("∫G dω = {total}")));
        }
        Ok(TabulatedSpectrum { omega, values })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if w < self.omega[0] || w > self.omega[n - 1] {
            return 0.0;
        }
        let i = self.omega.partition_point(|&x| x <= w).clamp(1, n - 1);
        let (x0, x1) = (self.omega[i - 1], self.omega[i]);
        let (g0, g1) = (self.values[i - 1], self.values[i]);
        g0 + (g1 - g0) * (w - x0) / (x1 - x0)
    }

    fn span(&self) -> f64 {
        self.omega[self.omega.len() - 1] - self.omega[0]
    }

    /// Frequencies where the support of `G` starts or stops.
    fn edges(&self) -> Vec<f64> {
        let n = self.omega.len();
        let mut edges = Vec::new();
        if self.values[0] > 0.0 {
            edges.push(self.omega[0]);
        }
        for i in 0..n - 1 {
            let (a, b) = (self.values[i], self.values[i + 1]);
            if (a == 0.0) != (b == 0.0) {
                edges.push(if a == 0.0 { self.omega[i] } else { self.omega[i + 1] });
            }
        }
        if self.values[n - 1] > 0.0 {
            edges.push(self.omega[n - 1]);
        }
        edges
    }

    fn distance_to_support(&self, w: f64) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.omega.len() - 1 {
            if self.values[i] > 0.0 || self.values[i + 1] > 0.0 {
                let (a, b) = (self.omega[i], self.omega[i + 1]);
                let d = if w < a {
                    a - w
                } else if w > b {
                    w - b
                } else {
                    0.0
                };
                best = best.min(d);
            }
        }
        best
    }

    fn integral(&self) -> f64 {
        self.omega
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(w, g)| 0.5 * (w[1] - w[0]) * (g[0] + g[1]))
            .sum()
    }

    /// Exact Fourier transform of the piecewise-linear interpolant.
    fn transform(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, g) in self.omega.windows(2).zip(self.values.windows(2)) {
            let len = w[1] - w[0];
            let theta = t * len;
            let (e0, e1) = linear_phase_moments(theta);
            let seg = e0 * g[0] + e1 * (g[1] - g[0]);
            acc += Complex64::from_polar(len, -w[0] * t) * seg;
        }
        acc
    }
}

/// `(∫₀¹ e^{-iθx}dx, ∫₀¹ x e^{-iθx}dx)`.
fn linear_phase_moments(theta: f64) -> (Complex64, Complex64) {
    if theta.abs() < 1e-3 {
        let t2 = theta * theta;
        let e0 = Complex64::new(1.0 - t2 / 6.0, -theta / 2.0 + theta * t2 / 24.0);
        let e1 = Complex64::new(0.5 - t2 / 8.0, -theta / 3.0 + theta * t2 / 30.0);
        return (e0, e1);
    }
    let i_theta = Complex64::new(0.0, theta);
    let e = Complex64::from_polar(1.0, -theta);
    let e0 = (Complex64::new(1.0, 0.0) - e) / i_theta;
    let e1 = -e / i_theta + e0 / i_theta;
    (e0, e1)
}

/// Spectral models of the reservoir.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumModel {
    /// `G = C ω^{1/2}/(ω+Γ)` for `ω > 0`, zero below. `cutoff` (Λ) only
    /// regularizes the response function.
    BandEdge { strength: f64, gamma: f64, cutoff: f64 },
    /// `G = g·w/((ω-ω₀)² + w²)`, so that `Φ(t) = πg e^{-iω₀t - wt}`.
    LorentzianPeak { weight: f64, center: f64, width: f64 },
    /// `G = G₀` for `|ω| ≤ ω_cut` (which may be infinite), zero outside.
    FlatCutoff { level: f64, cutoff: f64 },
    /// Single-maximum stand-in for an optical-lattice reservoir:
    /// `G = g·x^p·exp((p/q)(1 - x^q))`, `x = ω/ω_g`, for `ω > 0`. Peaks at
    /// `ω_g` with height `g`.
    LatticePeak { weight: f64, peak: f64, rise: f64, fall: f64 },
    Tabulated(TabulatedSpectrum),
}

impl SpectrumModel {
    pub fn name(&self) -> &'static str {
        match self {
            SpectrumModel::BandEdge { .. } => "band-edge",
            SpectrumModel::LorentzianPeak { .. } => "lorentzian",
            SpectrumModel::FlatCutoff { .. } => "flat",
            SpectrumModel::LatticePeak { .. } => "lattice-peak",
            SpectrumModel::Tabulated(_) => "tabulated",
        }
    }
}

/// A reservoir spectrum together with the resonance `ω_a` of the level.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpectrum {
    model: SpectrumModel,
    resonance: f64,
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && !x.is_nan() {
        Ok(x)
    } else {
        Err(Error::input(format!("{what} must be positive, got {x}")))
    }
}

fn nonnegative(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::input(format!("{what} must be finite and nonnegative, got {x}")))
    }
}

impl CouplingSpectrum {
    pub fn new(model: SpectrumModel, resonance: f64) -> Result<Self> {
        ensure_finite(resonance, "resonance ω_a")?;
        match &model {
            SpectrumModel::BandEdge { strength, gamma, cutoff } => {
                nonnegative(*strength, "C")?;
                positive(ensure_finite(*gamma, "Γ")?, "Γ")?;
                positive(*cutoff, "band cutoff Λ")?;
            }
            SpectrumModel::LorentzianPeak { weight, center, width } => {
                nonnegative(*weight, "g")?;
                ensure_finite(*center, "ω₀")?;
                positive(ensure_finite(*width, "w")?, "w")?;
            }
            SpectrumModel::FlatCutoff { level, cutoff } => {
                nonnegative(*level, "G₀")?;
                positive(*cutoff, "ω_cut")?;
            }
            SpectrumModel::LatticePeak { weight, peak, rise, fall } => {
                nonnegative(*weight, "g")?;
                positive(ensure_finite(*peak, "ω_g")?, "ω_g")?;
                positive(ensure_finite(*rise, "p")?, "p")?;
                positive(ensure_finite(*fall, "q")?, "q")?;
            }
            SpectrumModel::Tabulated(_) => {}
        }
        Ok(CouplingSpectrum { model, resonance })
    }

    pub fn band_edge(strength: f64, gamma: f64, resonance: f64) -> Result<Self> {
        Self::new(
            SpectrumModel::BandEdge {
                strength,
                gamma,
                cutoff: DEFAULT_BAND_CUTOFF * gamma,
            },
            resonance,
        )
    }

    pub fn lorentzian(weight: f64, center: f64, width: f64, resonance: f64) -> Result<Self> {
        Self::new(SpectrumModel::LorentzianPeak { weight, center, width }, resonance)
    }

    pub fn flat(level: f64, cutoff: f64, resonance: f64) -> Result<Self> {
        Self::new(SpectrumModel::FlatCutoff { level, cutoff }, resonance)
    }

    /// Lattice stand-in with the default shape exponents `p = q = 2`.
    pub fn lattice_peak(weight: f64, peak: f64, resonance: f64) -> Result<Self> {
        Self::new(
            SpectrumModel::LatticePeak {
                weight,
                peak,
                rise: 2.0,
                fall: 2.0,
            },
            resonance,
        )
    }

    pub fn tabulated(points: Vec<(f64, f64)>, resonance: f64) -> Result<Self> {
        Self::new(SpectrumModel::Tabulated(TabulatedSpectrum::new(points)?), resonance)
    }

    pub fn model(&self) -> &SpectrumModel {
        &self.model
    }

    pub fn resonance(&self) -> f64 {
        self.resonance
    }

    pub fn with_resonance(&self, resonance: f64) -> Self {
        CouplingSpectrum {
            model: self.model.clone(),
            resonance,
        }
    }

    /// Replaces the band-edge cutoff `Λ`; other models are returned unchanged.
    pub fn with_band_cutoff(&self, cutoff: f64) -> Result<Self> {
        let model = match &self.model {
            SpectrumModel::BandEdge { strength, gamma, .. } => SpectrumModel::BandEdge {
                strength: *strength,
                gamma: *gamma,
                cutoff,
            },
            other => other.clone(),
        };
        Self::new(model, self.resonance)
    }

    /// The same spectrum with `G` multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        positive(factor, "scale factor")?;
        let model = match &self.model {
            SpectrumModel::BandEdge { strength, gamma, cutoff } => SpectrumModel::BandEdge {
                strength: strength * factor,
                gamma: *gamma,
                cutoff: *cutoff,
            },
            SpectrumModel::LorentzianPeak { weight, center, width } => SpectrumModel::LorentzianPeak {
                weight: weight * factor,
                center: *center,
                width: *width,
            },
            SpectrumModel::FlatCutoff { level, cutoff } => SpectrumModel::FlatCutoff {
                level: level * factor,
                cutoff: *cutoff,
            },
            SpectrumModel::LatticePeak { weight, peak, rise, fall } => SpectrumModel::LatticePeak {
                weight: weight * factor,
                peak: *peak,
                rise: *rise,
                fall: *fall,
            },
            SpectrumModel::Tabulated(tab) => SpectrumModel::Tabulated(TabulatedSpectrum {
                omega: tab.omega.clone(),
                values: tab.values.iter().map(|g| g * factor).collect(),
            }),
        };
        Self::new(model, self.resonance)
    }

    /// `G(ω)`; rejects non-finite frequencies.
    pub fn eval_g(&self, omega: f64) -> Result<f64> {
        ensure_finite(omega, "frequency")?;
        Ok(self.g(omega))
    }

    /// `G(ω)` without input checks.
    pub fn g(&self, w: f64) -> f64 {
        match &self.model {
            SpectrumModel::BandEdge { strength, gamma, .. } => {
                if w > 0.0 {
                    strength * w.sqrt() / (w + gamma)
                } else {
                    0.0
                }
            }
            SpectrumModel::LorentzianPeak { weight, center, width } => {
                let d = w - center;
                weight * width / (d * d + width * width)
            }
            SpectrumModel::FlatCutoff { level, cutoff } => {
                if w.abs() <= *cutoff {
                    *level
                } else {
                    0.0
                }
            }
            SpectrumModel::LatticePeak { weight, peak, rise, fall } => {
                if w > 0.0 {
                    let x = w / peak;
                    weight * (rise * x.ln() + (rise / fall) * (1.0 - x.powf(*fall))).exp()
                } else {
                    0.0
                }
            }
            SpectrumModel::Tabulated(tab) => tab.eval(w),
        }
    }

    /// `sup_ω G(ω)`.
    pub fn sup_g(&self) -> f64 {
        match &self.model {
            SpectrumModel::BandEdge { strength, gamma, .. } => strength / (2.0 * gamma.sqrt()),
            SpectrumModel::LorentzianPeak { weight, width, .. } => weight / width,
            SpectrumModel::FlatCutoff { level, .. } => *level,
            SpectrumModel::LatticePeak { weight, .. } => *weight,
            SpectrumModel::Tabulated(tab) => tab.values.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Characteristic frequency scale of the model.
    pub fn frequency_scale(&self) -> f64 {
        match &self.model {
            SpectrumModel::BandEdge { gamma, .. } => *gamma,
            SpectrumModel::LorentzianPeak { width, .. } => *width,
            SpectrumModel::FlatCutoff { cutoff, .. } => {
                if cutoff.is_finite() {
                    *cutoff
                } else {
                    1.0
                }
            }
            SpectrumModel::LatticePeak { peak, .. } => *peak,
            SpectrumModel::Tabulated(tab) => tab.span(),
        }
    }

    /// Closed interval outside which `G` vanishes identically.
    pub fn support(&self) -> (f64, f64) {
        match &self.model {
            SpectrumModel::BandEdge { .. } | SpectrumModel::LatticePeak { .. } => (0.0, f64::INFINITY),
            SpectrumModel::LorentzianPeak { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            SpectrumModel::FlatCutoff { cutoff, .. } => (-cutoff, *cutoff),
            SpectrumModel::Tabulated(tab) => (tab.omega[0], tab.omega[tab.omega.len() - 1]),
        }
    }

    /// Constant part of `G` far from every feature, as `(ω → -∞, ω → +∞)`
    /// inside the support.
    pub(crate) fn asymptote(&self) -> f64 {
        match &self.model {
            SpectrumModel::FlatCutoff { level, .. } => *level,
            _ => 0.0,
        }
    }

    /// Absolute frequencies of edges, peaks and other structure in `G`.
    pub fn features(&self) -> Vec<f64> {
        match &self.model {
            SpectrumModel::BandEdge { gamma, .. } => alloc::vec![0.0, *gamma],
            SpectrumModel::LorentzianPeak { center, .. } => alloc::vec![*center],
            SpectrumModel::FlatCutoff { cutoff, .. } => {
                if cutoff.is_finite() {
                    alloc::vec![-cutoff, *cutoff]
                } else {
                    Vec::new()
                }
            }
            SpectrumModel::LatticePeak { peak, .. } => alloc::vec![0.0, *peak],
            SpectrumModel::Tabulated(tab) => tab.omega.clone(),
        }
    }

    /// Distance from `ω` to the extent over which `G` is non-negligible,
    /// used to size integration windows.
    pub(crate) fn reach(&self) -> f64 {
        let wa = self.resonance;
        match &self.model {
            SpectrumModel::BandEdge { gamma, .. } => wa.abs() + 16.0 * gamma,
            SpectrumModel::LorentzianPeak { center, width, .. } => (center - wa).abs() + 64.0 * width,
            SpectrumModel::FlatCutoff { .. } => wa.abs(),
            SpectrumModel::LatticePeak { peak, rise, fall, .. } => {
                // exp((p/q)(1 - x^q)) < 1e-16 beyond this x.
                let x = (1.0 + 37.0 * fall / rise).powf(1.0 / fall);
                wa.abs() + x * peak
            }
            SpectrumModel::Tabulated(tab) => {
                (tab.omega[0] - wa).abs().max((tab.omega[tab.omega.len() - 1] - wa).abs())
            }
        }
    }

    fn edges(&self) -> Vec<f64> {
        match &self.model {
            SpectrumModel::BandEdge { .. } | SpectrumModel::LatticePeak { .. } => alloc::vec![0.0],
            SpectrumModel::LorentzianPeak { .. } => Vec::new(),
            SpectrumModel::FlatCutoff { cutoff, .. } => {
                if cutoff.is_finite() {
                    alloc::vec![-cutoff, *cutoff]
                } else {
                    Vec::new()
                }
            }
            SpectrumModel::Tabulated(tab) => tab.edges(),
        }
    }

    fn distance_to_support(&self, w: f64) -> f64 {
        match &self.model {
            SpectrumModel::Tabulated(tab) => tab.distance_to_support(w),
            _ => {
                let (lo, hi) = self.support();
                if w < lo {
                    lo - w
                } else if w > hi {
                    w - hi
                } else {
                    0.0
                }
            }
        }
    }

    /// `(G′/G, G″/G)` for the closed-form models; `None` where they are not
    /// defined analytically (tabulated) or `G` vanishes.
    fn log_derivatives(&self, w: f64) -> Option<(f64, f64)> {
        match &self.model {
            SpectrumModel::BandEdge { gamma, .. } if w > 0.0 => {
                let l1 = 0.5 / w - 1.0 / (w + gamma);
                let l2 = -0.5 / (w * w) + 1.0 / ((w + gamma) * (w + gamma));
                Some((l1, l1 * l1 + l2))
            }
            SpectrumModel::LorentzianPeak { center, width, .. } => {
                let d = w - center;
                let s = d * d + width * width;
                let l1 = -2.0 * d / s;
                let l2 = -2.0 * (width * width - d * d) / (s * s);
                Some((l1, l1 * l1 + l2))
            }
            SpectrumModel::FlatCutoff { cutoff, .. } if w.abs() <= *cutoff => Some((0.0, 0.0)),
            SpectrumModel::LatticePeak { peak, rise, fall, .. } if w > 0.0 => {
                let xq = (w / peak).powf(*fall);
                let l1 = rise / w * (1.0 - xq);
                let l2 = -rise / (w * w) * (1.0 - xq + fall * xq);
                Some((l1, l1 * l1 + l2))
            }
            _ => None,
        }
    }

    /// Local spectral scale `ξ(ω)`: the smallest of `|G/G′|`,
    /// `√(2G/|G″|)` (finite at a smooth peak, where `G′ = 0`) and the
    /// distance to the nearest edge of the support. Where `G(ω) = 0` it is
    /// the distance to the nearest point with `G > 0`. Floored at
    /// [`XI_FLOOR`] times the model scale.
    pub fn spectral_scale_xi(&self, omega: f64) -> Result<f64> {
        ensure_finite(omega, "frequency")?;
        Ok(self.xi(omega))
    }

    pub(crate) fn xi(&self, w: f64) -> f64 {
        let floor = XI_FLOOR * self.frequency_scale();
        let g = self.g(w);
        if g <= 0.0 {
            return self.distance_to_support(w).max(floor);
        }
        let mut xi = f64::INFINITY;
        for e in self.edges() {
            xi = xi.min((w - e).abs());
        }
        match self.log_derivatives(w) {
            Some((l1, l2)) => {
                if l1 != 0.0 {
                    xi = xi.min(1.0 / l1.abs());
                }
                if l2 != 0.0 {
                    xi = xi.min((2.0 / l2.abs()).sqrt());
                }
            }
            None => {
                let h = 1e-4 * self.frequency_scale();
                let slope = (self.g(w + h) - self.g(w - h)) / (2.0 * h);
                if slope != 0.0 {
                    xi = xi.min((g / slope).abs());
                }
            }
        }
        xi.max(floor)
    }

    /// `t_c = max_k 1/ξ(ω_a + ω_k)` over the retained harmonics.
    pub fn correlation_time(&self, harmonics: &HarmonicDecomposition) -> Result<CorrelationTime> {
        if harmonics.entries().is_empty() {
            return Err(Error::input("correlation time needs at least one harmonic"));
        }
        let floor = XI_FLOOR * self.frequency_scale();
        let mut value: f64 = 0.0;
        let mut edge_degenerate = false;
        for h in harmonics.entries() {
            let xi = self.xi(self.resonance + h.frequency);
            if xi <= floor {
                edge_degenerate = true;
            }
            value = value.max(1.0 / xi);
        }
        Ok(CorrelationTime { value, edge_degenerate })
    }

    /// `R_GR = 2πG(ω_a)`.
    pub fn golden_rule_rate(&self) -> f64 {
        TAU * self.g(self.resonance)
    }

    /// The memory kernel `Φ(t)` of this spectrum.
    pub fn response_function(&self) -> Result<ReservoirResponse> {
        let kind = match &self.model {
            SpectrumModel::BandEdge { cutoff, .. } => {
                if !cutoff.is_finite() {
                    return Err(Error::Divergent(
                        "∫G dω grows like √Λ for a band edge; supply a finite cutoff Λ".into(),
                    ));
                }
                ResponseKind::Numeric
            }
            SpectrumModel::FlatCutoff { level, cutoff } => {
                if !cutoff.is_finite() {
                    return Err(Error::Divergent(
                        "a flat spectrum without cutoff has a delta-function response".into(),
                    ));
                }
                ResponseKind::Flat {
                    level: *level,
                    cutoff: *cutoff,
                }
            }
            SpectrumModel::LorentzianPeak { weight, center, width } => ResponseKind::Lorentzian {
                weight: *weight,
                center: *center,
                width: *width,
            },
            SpectrumModel::LatticePeak { .. } => ResponseKind::Numeric,
            SpectrumModel::Tabulated(_) => ResponseKind::Tabulated,
        };
        let mut response = ReservoirResponse {
            spectrum: self.clone(),
            kind,
            total_weight: 0.0,
            correlation_time: 1.0 / self.xi(self.resonance),
        };
        response.total_weight = match &self.model {
            SpectrumModel::FlatCutoff { level, cutoff } => 2.0 * level * cutoff,
            SpectrumModel::LorentzianPeak { weight, .. } => PI * weight,
            SpectrumModel::Tabulated(tab) => tab.integral(),
            _ => response.numeric_transform(0.0)?.re,
        };
        Ok(response)
    }

    /// Upper end of the numeric integration range for `Φ`.
    fn numeric_extent(&self) -> f64 {
        match &self.model {
            SpectrumModel::BandEdge { cutoff, .. } => *cutoff,
            SpectrumModel::LatticePeak { peak, rise, fall, .. } => {
                (1.0 + 37.0 * fall / rise).powf(1.0 / fall) * peak
            }
            _ => self.support().1,
        }
    }
}

/// Result of [`CouplingSpectrum::correlation_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTime {
    pub value: f64,
    /// Some `ω_a + ω_k` sits on an edge, so `ξ` hit its floor.
    pub edge_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum ResponseKind {
    Flat { level: f64, cutoff: f64 },
    Lorentzian { weight: f64, center: f64, width: f64 },
    Tabulated,
    Numeric,
}

/// The reservoir memory function `Φ(t) = ∫G(ω)e^{-iωt}dω` for `t ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirResponse {
    spectrum: CouplingSpectrum,
    kind: ResponseKind,
    total_weight: f64,
    correlation_time: f64,
}

impl ReservoirResponse {
    /// `Φ(0) = ∫G dω`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// `1/ξ(ω_a)`.
    pub fn correlation_time(&self) -> f64 {
        self.correlation_time
    }

    pub fn spectrum(&self) -> &CouplingSpectrum {
        &self.spectrum
    }

    /// Largest frequency offset, relative to `ω_a`, at which `G` carries
    /// weight; sets how finely the kernel `Φ(t)e^{iω_a t}` must be sampled.
    pub fn bandwidth(&self) -> f64 {
        let wa = self.spectrum.resonance;
        match &self.kind {
            ResponseKind::Flat { cutoff, .. } => cutoff + wa.abs(),
            ResponseKind::Lorentzian { center, width, .. } => (center - wa).abs() + width,
            ResponseKind::Tabulated | ResponseKind::Numeric => {
                let (lo, _) = self.spectrum.support();
                let hi = self.spectrum.numeric_extent();
                (hi - wa).abs().max((lo.max(-hi) - wa).abs())
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::input(format!("response delay must be finite and ≥ 0, got {t}")));
        }
        Ok(match &self.kind {
            ResponseKind::Flat { level, cutoff } => {
                let v = if t == 0.0 {
                    2.0 * level * cutoff
                } else {
                    2.0 * level * (cutoff * t).sin() / t
                };
                Complex64::new(v, 0.0)
            }
            ResponseKind::Lorentzian { weight, center, width } => {
                Complex64::from_polar(PI * weight * (-width * t).exp(), -center * t)
            }
            ResponseKind::Tabulated => match &self.spectrum.model {
                SpectrumModel::Tabulated(tab) => tab.transform(t),
                _ => unreachable!(),
            },
            ResponseKind::Numeric => self.numeric_transform(t)?,
        })
    }

    /// `Φ(nh)` for `n = 0..count`.
    pub fn sample(&self, step: f64, count: usize) -> Result<Vec<Complex64>> {
        (0..count).map(|n| self.eval(step * n as f64)).collect()
    }

    fn numeric_transform(&self, t: f64) -> Result<Complex64> {
        let spectrum = &self.spectrum;
        let hi = spectrum.numeric_extent();
        let (lo, _) = spectrum.support();
        let lo = lo.max(-hi);
        let mut points: Vec<f64> = spectrum
            .features()
            .into_iter()
            .filter(|w| *w >= lo && *w <= hi)
            .collect();
        points.push(lo);
        points.push(hi);
        let panel = if t > 0.0 { PI / t } else { f64::INFINITY };
        let tol = Tolerance::new(1e-12 * spectrum.frequency_scale(), 1e-9);
        let est = integrate(
            |w: f64| Complex64::from_polar(spectrum.g(w), -w * t),
            &points,
            panel,
            tol,
        )?;
        Ok(est.value)
    }
}
