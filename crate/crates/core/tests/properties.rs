//! Invariants of the rate engine under randomized inputs.

use std::f64::consts::{PI, TAU};

use modecay_core::modulation::Harmonic;
use modecay_core::optimize::{
    band_objective, band_rate, free_harmonic_value, optimize, Band, BandObjective, ControlProblem, Family, Goal,
};
use modecay_core::rate::{longtime_rate, universal_rate, ValidityTier};
use modecay_core::{Complex64, CouplingSpectrum, HarmonicDecomposition, Modulation};
use proptest::prelude::*;

fn time_domain_scheme() -> impl Strategy<Value = Modulation> {
    prop_oneof![
        (0.05f64..PI, 0.3f64..4.0).prop_map(|(p, t)| Modulation::impulsive_pm(p, t).unwrap()),
        (0.1f64..0.9, 0.3f64..4.0).prop_map(|(d, t)| Modulation::on_off_am(d * t, t).unwrap()),
        (-3.0f64..3.0).prop_map(|d| Modulation::monochromatic(Complex64::new(1.0, 0.0), d).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flat_spectrum_rate_ignores_modulation(m in time_domain_scheme(), t in 2.0f64..20.0, level in 0.01f64..1.0) {
        let s = CouplingSpectrum::flat(level, f64::INFINITY, 0.3).unwrap();
        let r = universal_rate(&s, &m.window_spectrum(t).unwrap()).unwrap();
        prop_assert!((r - TAU * level).abs() < 1e-6 * TAU * level, "{r}");
    }

    #[test]
    fn window_spectra_are_normalized(m in time_domain_scheme(), t in 1.0f64..15.0) {
        let w = m.window_spectrum(t).unwrap();
        let mass = w.total_mass().unwrap();
        prop_assert!((mass - 1.0).abs() < 1e-5, "{mass}");
        prop_assert!(w.eval(0.37) >= 0.0);
    }

    #[test]
    fn fluence_is_bounded_by_unit_amplitude(m in time_domain_scheme(), t in 0.0f64..30.0) {
        let q = m.fluence(t).unwrap();
        prop_assert!(q >= 0.0 && q <= t * (1.0 + 1e-12));
    }

    #[test]
    fn pm_harmonic_mass_converges(phase in 0.05f64..PI, period in 0.2f64..5.0) {
        let m = Modulation::impulsive_pm(phase, period).unwrap();
        let coarse = HarmonicDecomposition::from_modulation(&m, 16).unwrap();
        let fine = HarmonicDecomposition::from_modulation(&m, 256).unwrap();
        prop_assert!(fine.captured_mass() <= 1.0 + 1e-12);
        prop_assert!(fine.tail_mass() <= coarse.tail_mass());
        // |λ_k|² ≤ 4/(2πk-φ)² ⇒ the tail beyond K is below 4/(π²(2K-1)).
        prop_assert!(fine.tail_mass() < 4.0 / (PI * PI * 511.0) + 1e-12);
    }

    #[test]
    fn longtime_rate_is_nonnegative_and_bounded(phase in 0.05f64..PI, period in 0.2f64..5.0, wa in -1.0f64..3.0) {
        let s = CouplingSpectrum::band_edge(0.5, 1.0, wa).unwrap();
        let h = HarmonicDecomposition::from_modulation(&Modulation::impulsive_pm(phase, period).unwrap(), 64).unwrap();
        let r = longtime_rate(&s, &h);
        prop_assert!(r.rate >= 0.0);
        prop_assert!(r.rate <= TAU * s.sup_g() * (1.0 + 1e-12));
        prop_assert!(r.truncation_bound >= 0.0);
    }

    #[test]
    fn band_rate_is_linear_in_weights(w in 0.0f64..1.0, a in -0.5f64..2.0, b in -0.5f64..2.0, phase in 0.1f64..PI) {
        let s = CouplingSpectrum::band_edge(0.3, 1.0, 0.0).unwrap();
        let h = HarmonicDecomposition::from_modulation(&Modulation::impulsive_pm(phase, 1.5).unwrap(), 32).unwrap();
        let band = Band::new(vec![(a, w), (b, 1.0 - w)]).unwrap();
        let ra = longtime_rate(&s.with_resonance(a), &h).rate;
        let rb = longtime_rate(&s.with_resonance(b), &h).rate;
        let mixed = band_rate(&s, &h, &band).unwrap();
        prop_assert!((mixed - (w * ra + (1.0 - w) * rb)).abs() <= 1e-12 * (ra + rb).max(1e-300));
        // Survival averaging never exceeds rate averaging (Jensen) nor the
        // smallest member's rate from below.
        let surv = band_objective(&s, &h, &band, BandObjective::SurvivalAveraged { time: 3.0 }).unwrap();
        prop_assert!(surv <= mixed * (1.0 + 1e-12) + 1e-300);
        prop_assert!(surv >= ra.min(rb) * (1.0 - 1e-12));
    }

    #[test]
    fn free_harmonics_pick_the_best_vertex(
        center in -1.0f64..1.0,
        width in 0.05f64..1.0,
        freqs in prop::collection::vec(-2.0f64..2.0, 1..8),
        maximize in any::<bool>(),
    ) {
        let s = CouplingSpectrum::lorentzian(1e-4, center, width, 0.0).unwrap();
        let goal = if maximize { Goal::Maximize } else { Goal::Minimize };
        let mut freqs = freqs;
        freqs.sort_by(f64::total_cmp);
        freqs.dedup();
        let problem = ControlProblem::new(s.clone(), goal, Family::FreeHarmonics { frequencies: freqs.clone() })
            .with_objective(BandObjective::RateAveraged);
        let result = optimize(&problem).unwrap();
        let weights = result.weights.unwrap();
        prop_assert_eq!(weights.iter().filter(|&&w| w != 0.0).count(), 1);
        let band = Band::single(0.0).unwrap();
        let values: Vec<f64> = freqs.iter().map(|&w| free_harmonic_value(&s, &band, w)).collect();
        for v in &values {
            match goal {
                Goal::Minimize => prop_assert!(result.value <= *v),
                Goal::Maximize => prop_assert!(result.value >= *v),
            }
        }
    }

    #[test]
    fn validity_tiers_are_ordered(ratio in 0.0f64..1.0) {
        let tier = ValidityTier::of(ratio);
        match tier {
            ValidityTier::Strong => prop_assert!(ratio < 0.01),
            ValidityTier::Acceptable => prop_assert!((0.01..0.1).contains(&ratio)),
            ValidityTier::Flagged => prop_assert!(ratio >= 0.1),
        }
    }

    #[test]
    fn scaling_the_spectrum_scales_the_rate(factor in 0.1f64..10.0, phase in 0.1f64..PI, t in 2.0f64..12.0) {
        let s = CouplingSpectrum::band_edge(0.2, 1.0, 0.4).unwrap();
        let w = Modulation::impulsive_pm(phase, 1.3).unwrap().window_spectrum(t).unwrap();
        let r = universal_rate(&s, &w).unwrap();
        let r2 = universal_rate(&s.scaled(factor).unwrap(), &w).unwrap();
        prop_assert!((r2 - factor * r).abs() < 1e-6 * factor * r.max(1e-12));
    }
}

#[test]
fn explicit_decomposition_rejects_excess_mass() {
    let h = vec![
        Harmonic { frequency: 0.0, weight: Complex64::new(0.8, 0.0) },
        Harmonic { frequency: 1.0, weight: Complex64::new(0.8, 0.0) },
    ];
    assert!(HarmonicDecomposition::new(h, 1.0).is_err());
}
