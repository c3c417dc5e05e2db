//! Decay-rate engine for an unstable state coupled to an arbitrary continuum
//! whose coupling is weakly modulated in time.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! - [`spectra`]: coupling spectra `G(ω)`, their response functions `Φ(t)`,
//!   local spectral scales and the Golden-Rule rate.
//! - [`modulation`]: modulation schemes `ε(t)`, fluence, finite-window and
//!   stationary modulation spectra, harmonic decompositions.
//! - [`rate`]: the universal decay rate `R(t) = 2π∫G(ω+ω_a)F_t(ω)dω`, the
//!   long-time harmonic rate, survival curves and validity diagnostics.
//! - [`volterra`]: a direct solver for the exact amplitude equation, used as
//!   an independent check on the rate formula.
//! - [`optimize`]: choice of modulation parameters that suppress or enhance
//!   decay, optionally averaged over a band of resonances.
//!
//! All frequencies and times are dimensionless; callers pick the unit.

#![no_std]

extern crate alloc;

pub mod error;
pub mod modulation;
pub mod optimize;
pub mod quad;
pub mod rate;
pub mod special;
pub mod spectra;
pub mod volterra;

pub use error::{Error, Result};
pub use modulation::{HarmonicDecomposition, Modulation, SpectrumKind, WindowSpectrum};
pub use rate::{DecayCurve, LongTimeRate, Validity};
pub use spectra::{CouplingSpectrum, ReservoirResponse, SpectrumModel};
pub use volterra::{AmplitudeTrajectory, DeviationReport};

pub use num_complex::Complex64;
