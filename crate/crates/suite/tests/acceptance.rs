//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that every criterion is evaluated
//! and reported even when an earlier one fails; the process exits non-zero
//! if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use modecay::config::clock_time;
use modecay::presets;
use modecay_core::modulation::DEFAULT_TRUNCATION;
use modecay_core::optimize::{
    compare_schemes, optimize, scheme_rate, Band, ControlProblem, Family, Goal, SchemeTemplate,
};
use modecay_core::rate::{longtime_rate, modulation_validity, survival_curve, universal_rate};
use modecay_core::volterra::{compare_with_universal, solve};
use modecay_core::{Complex64, CouplingSpectrum, HarmonicDecomposition, Modulation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn pass_if(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: modecay_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("library error: {e}"))
}

/// `G(ω) = Cω^{1/2}/(ω+Γ)` for `ω > 0`, written out independently of the
/// library.
fn band_edge_g(c: f64, gamma: f64, w: f64) -> f64 {
    if w > 0.0 {
        c * w.sqrt() / (w + gamma)
    } else {
        0.0
    }
}

/// `|λ_k|²` of impulsive PM: `4 sin²(φ/2)/(2πk - φ)²`.
fn pm_weight(phase: f64, k: i64) -> f64 {
    let eta = TAU * k as f64 - phase;
    let s = (0.5 * phase).sin();
    4.0 * s * s / (eta * eta)
}

fn parseval() -> Check {
    let tau = 1.0;
    let mut schemes = vec![
        ("constant", Modulation::constant(1.0)),
        ("monochromatic", lib(Modulation::monochromatic(Complex64::new(0.7, 0.2), 0.8))?),
    ];
    for phase in [0.1, 1.0, PI] {
        schemes.push(("pm", lib(Modulation::impulsive_pm(phase, tau))?));
    }
    for duty in [0.02, 0.5] {
        schemes.push(("am", lib(Modulation::on_off_am(duty * tau, tau))?));
    }
    let mut worst: (f64, String) = (0.0, String::new());
    for (name, m) in &schemes {
        for t in [3.0 * tau, 30.0 * tau, 300.0 * tau] {
            let mass = lib(lib(m.window_spectrum(t))?.total_mass())?;
            let dev = (mass - 1.0).abs();
            if dev >= worst.0 {
                worst = (dev, format!("{name} at t = {t}"));
            }
        }
    }
    pass_if(
        worst.0 < 1e-6,
        format!("max |∫F_t dω - 1| = {:.2e} ({}) over 7 schemes × 3 windows, tol 1e-6", worst.0, worst.1),
    )
}

fn pm_identities() -> Check {
    let pi_pm = lib(Modulation::impulsive_pm(PI, 1.0))?;
    let h = lib(HarmonicDecomposition::from_modulation(&pi_pm, 1000))?;
    let expected = 4.0 / (PI * PI);
    let mut main = Vec::new();
    let mut tail = 0.0;
    let mut closed_form = 0.0f64;
    for (i, e) in h.entries().iter().enumerate() {
        let k = i as i64 - 1000;
        let w = e.weight.norm_sqr();
        closed_form = closed_form.max((w - pm_weight(PI, k)).abs());
        if k == 0 || k == 1 {
            main.push(w);
        } else {
            tail += w;
        }
    }
    let main_err = main.iter().map(|w| (w - expected).abs()).fold(0.0, f64::max);
    let tail_ok = (tail - 0.18943).abs() <= 0.005;
    let mut mass_err = 0.0f64;
    for phase in [0.1, FRAC_PI_2, PI] {
        let m = lib(Modulation::impulsive_pm(phase, 1.0))?;
        let h = lib(HarmonicDecomposition::from_modulation(&m, 10_000))?;
        mass_err = mass_err.max((h.captured_mass() - 1.0).abs());
    }
    pass_if(
        main_err < 1e-12 && tail_ok && mass_err < 1e-4 && closed_form < 1e-12,
        format!(
            "φ=π: ||λ₀,₁|² - 4/π²| = {main_err:.1e} (tol 1e-12), tail(K=1e3) = {tail:.5} (0.18943 ± 0.005), \
             |Σ|λ_k|² - 1| at K=1e4 = {mass_err:.1e} (tol 1e-4), closed-form mismatch {closed_form:.1e}"
        ),
    )
}

fn flat_invariance() -> Check {
    let level = 0.004;
    let s = lib(CouplingSpectrum::flat(level, f64::INFINITY, 0.35))?;
    let expected = TAU * level;
    let time_domain = [
        Modulation::constant(1.0),
        lib(Modulation::monochromatic(Complex64::new(1.0, 0.0), -1.3))?,
        lib(Modulation::impulsive_pm(0.1, 2.0))?,
        lib(Modulation::impulsive_pm(PI, 0.7))?,
        lib(Modulation::on_off_am(0.1, 5.0))?,
        lib(Modulation::quasiperiodic(vec![
            (0.0, Complex64::new(1.0, 0.0)),
            (2.0_f64.sqrt(), Complex64::new(0.0, 0.5)),
            (-PI, Complex64::new(0.3, -0.3)),
        ]))?,
    ];
    let mut worst = 0.0f64;
    let mut count = 0;
    for m in &time_domain {
        for t in [0.3, 1.0, 4.5, 17.0, 60.0, 250.0] {
            let r = lib(universal_rate(&s, &lib(m.window_spectrum(t))?))?;
            worst = worst.max(rel(r, expected));
            count += 1;
        }
    }
    for m in [
        lib(Modulation::random_lorentzian(0.5, 0.2, 1.0))?,
        lib(Modulation::measurement_sinc(0.8))?,
    ] {
        let r = lib(universal_rate(&s, &lib(m.stationary_spectrum())?))?;
        worst = worst.max(rel(r, expected));
        count += 1;
    }
    pass_if(
        worst < 1e-6,
        format!("max |R/(2πG₀) - 1| = {worst:.2e} over {count} (scheme, t) pairs, tol 1e-6"),
    )
}

fn longtime_convergence() -> Check {
    let spectra = [
        ("band-edge", lib(CouplingSpectrum::band_edge(1e-3, 1.0, 0.1))?),
        ("lorentzian", lib(CouplingSpectrum::lorentzian(1e-4, 0.0, 1.0, 0.3))?),
    ];
    let schemes = [
        ("pm(φ=0.1, τ=5)", lib(Modulation::impulsive_pm(0.1, 5.0))?),
        ("am(τ₁/τ₀=0.1, τ₀=5)", lib(Modulation::on_off_am(0.5, 5.0))?),
    ];
    let mut worst = (0.0f64, String::new());
    for (sname, s) in &spectra {
        for (mname, m) in &schemes {
            let h = lib(HarmonicDecomposition::from_modulation(m, 4096))?;
            let tc = lib(s.correlation_time(&h))?.value;
            let t = 1e3 * (1.0 / h.spacing()).max(tc);
            let r_t = lib(universal_rate(s, &lib(m.window_spectrum(t))?))?;
            let r_inf = longtime_rate(s, &h).rate;
            let dev = (r_t / r_inf - 1.0).abs();
            if dev >= worst.0 {
                worst = (dev, format!("{mname} on {sname} at t = {t:.4e}"));
            }
        }
    }
    pass_if(
        worst.0 < 0.01,
        format!("max |R(t)/R_∞ - 1| = {:.2e} ({}), tol 1e-2", worst.0, worst.1),
    )
}

fn fig1b_ordering() -> Check {
    let c = 1e-7;
    let s = lib(CouplingSpectrum::band_edge(c, 1.0, 0.1))?;
    let taus = [1.0, 2.0, 5.0, 10.0, 20.0, 30.0];
    let schemes = [
        SchemeTemplate::Pm { phase: 0.1 },
        SchemeTemplate::Pm { phase: PI },
        SchemeTemplate::Measurement,
    ];
    let table = lib(compare_schemes(&s, &schemes, &taus))?;
    // Independent check of the φ = 0.1 row: the harmonic sum with the
    // closed-form weights and G written out here.
    let r_gr = TAU * band_edge_g(c, 1.0, 0.1);
    let mut oracle_err = 0.0f64;
    for (i, &tau) in taus.iter().enumerate() {
        let k_max = 1 << 16;
        let sum: f64 = (-k_max..=k_max)
            .map(|k| pm_weight(0.1, k) * band_edge_g(c, 1.0, 0.1 + (TAU * k as f64 - 0.1) / tau))
            .sum();
        oracle_err = oracle_err.max(rel(table.rows[0].rates[i], TAU * sum));
    }
    let mut worst_validity = 0.0f64;
    for scheme in &schemes {
        for &tau in &taus {
            worst_validity = worst_validity.max(lib(modulation_validity(&s, &lib(scheme.at(tau))?))?.ratio);
        }
    }
    let mut violations = Vec::new();
    let mut cells = Vec::new();
    for (i, &tau) in taus.iter().enumerate() {
        let [a, b, m] = [0, 1, 2].map(|r| table.rows[r].ratios[i]);
        cells.push(format!("τ={tau}: {a:.3}/{b:.3}/{m:.3}"));
        if !(a < b) {
            violations.push(format!("τ={tau}: R(φ=0.1) ≥ R(φ=π)"));
        }
        if !(a < m) {
            violations.push(format!("τ={tau}: R(φ=0.1) ≥ R(measurement)"));
        }
    }
    let small = [0, 1, 2].map(|r| table.rows[r].ratios[0]);
    if small.iter().any(|&x| !(x < 1.0)) {
        violations.push("τ=1: not all below R_GR".into());
    }
    let ok = violations.is_empty() && worst_validity < 0.1 && oracle_err < 1e-4;
    let detail = format!(
        "R/R_GR (φ=0.1 / φ=π / measurement) {}; max R·t_c = {worst_validity:.3} (< 0.1); \
         φ=0.1 vs independent sum {oracle_err:.1e}; R_GR = {:.4e}{}",
        cells.join(", "),
        r_gr,
        if violations.is_empty() {
            String::new()
        } else {
            format!("; violated: {}", violations.join("; "))
        }
    );
    pass_if(ok, detail)
}

fn monochromatic_cutoff() -> Check {
    let s = lib(CouplingSpectrum::band_edge(1e-3, 1.0, 0.1))?;
    let r_gr = s.golden_rule_rate();
    let mut worst = 0.0f64;
    let mut cells = Vec::new();
    for detuning in [-0.15, -0.5, -2.0] {
        let m = lib(Modulation::monochromatic(Complex64::new(1.0, 0.0), detuning))?;
        let long = lib(scheme_rate(&s, &m))? / r_gr;
        let t = 1e4;
        let finite = lib(universal_rate(&s, &lib(m.window_spectrum(t))?))? / r_gr;
        worst = worst.max(long).max(finite);
        cells.push(format!("Δ={detuning}: R_∞/R_GR = {long:.1e}, R(t=1e4)/R_GR = {finite:.1e}"));
    }
    pass_if(worst < 1e-3, format!("{} (tol 1e-3)", cells.join("; ")))
}

fn am_measurement() -> Check {
    let s = lib(CouplingSpectrum::lorentzian(1e-4, 0.0, 1.0, 0.2))?;
    let period = 20.0;
    let on = 0.02 * period;
    let am = lib(Modulation::on_off_am(on, period))?;
    let h = lib(HarmonicDecomposition::from_modulation(&am, DEFAULT_TRUNCATION))?;
    let tc = lib(s.correlation_time(&h))?.value;
    let r_am = lib(scheme_rate(&s, &am))?;
    let r_meas = lib(scheme_rate(&s, &lib(Modulation::measurement_sinc(on))?))?;
    let dev = rel(r_am, r_meas);
    pass_if(
        dev < 0.02 && period > 10.0 * tc,
        format!(
            "τ₀ = {period}, τ₁ = {on}, t_c = {tc:.3} (τ₀/t_c = {:.1}); R_AM = {r_am:.6e}, R_meas = {r_meas:.6e}, \
             deviation {dev:.2e}, tol 2e-2",
            period / tc
        ),
    )
}

/// Maximum relative deviation between the exact amplitude and the rate
/// formula over `[0, 5/R]`, and the validity ratio of the run.
fn volterra_deviation(s: &CouplingSpectrum, m: &Modulation, step: f64) -> Result<(f64, f64), String> {
    let validity = lib(modulation_validity(s, m))?;
    let n = (5.0 / validity.rate / step).ceil() as usize;
    let traj = lib(solve(s, m, n as f64 * step, step))?;
    let samples = 200;
    let times: Vec<f64> = (0..=samples).map(|i| (i * n / samples) as f64 * step).collect();
    let curve = lib(survival_curve(s, m, &times))?;
    let report = lib(compare_with_universal(&traj, &curve, 0.02))?;
    Ok((report.max_relative, validity.ratio))
}

fn volterra_agreement() -> Check {
    let weak = 0.01 / TAU;
    let s = lib(CouplingSpectrum::lorentzian(weak, 0.0, 1.0, 0.0))?;
    let (dev_c, ratio_c) = volterra_deviation(&s, &Modulation::constant(1.0), 0.025)?;
    let (dev_pm, ratio_pm) = volterra_deviation(&s, &lib(Modulation::impulsive_pm(0.1, 1.0))?, 0.025)?;
    let mut series = Vec::new();
    for (scale, step) in [(1.0, 0.025), (10.0, 0.025), (100.0, 0.005)] {
        let s = lib(CouplingSpectrum::lorentzian(weak * scale, 0.0, 1.0, 0.0))?;
        series.push(volterra_deviation(&s, &Modulation::constant(1.0), step)?);
    }
    let monotonic = series.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
    pass_if(
        dev_c < 0.02 && dev_pm < 0.02 && monotonic,
        format!(
            "constant: {dev_c:.2e} at R·t_c = {ratio_c:.3}; pm(φ=0.1, τ=1): {dev_pm:.2e} at R·t_c = {ratio_pm:.3} \
             (tol 2e-2); growth {}",
            series
                .iter()
                .map(|(d, r)| format!("{d:.2e}@{r:.2}"))
                .collect::<Vec<_>>()
                .join(" → ")
        ),
    )
}

fn fig2_signs() -> Check {
    let load = |name: &str| presets::load(name).map_err(|e| format!("preset {name}: {e}"));
    let qze = load("fig2-qze")?;
    let aze = load("fig2-aze")?;
    let unmod = load("unmodulated")?;
    let spectrum = |c: &modecay::config::Config| c.spectrum().map_err(|e| e.to_string());
    let modulation = |c: &modecay::config::Config| c.modulation().map_err(|e| e.to_string());
    // QZE is checked from the 10 μs coupling time onward. The unmodulated
    // curve's own short-window transient dominates the anti-Zeno comparison
    // below ~15 μs, so AZE is checked once it has settled.
    let cases = [
        ("qze", spectrum(&qze)?, modulation(&qze)?, spectrum(&unmod)?, modulation(&unmod)?, true, [10.0, 50.0, 100.0]),
        ("aze", spectrum(&aze)?, modulation(&aze)?, spectrum(&aze)?, Modulation::constant(1.0), false, [20.0, 50.0, 100.0]),
    ];
    let mut ok = true;
    let mut cells = Vec::new();
    for (name, s, m, s0, m0, slower, couplings) in &cases {
        let peak = match s.model() {
            modecay_core::SpectrumModel::LatticePeak { peak, .. } => *peak,
            _ => return Err(format!("{name}: not a lattice-peak spectrum")),
        };
        ok &= s.resonance() < peak;
        // Coupling times in the presets' internal unit (1 μs).
        for &q in couplings {
            let t = clock_time(m, q).map_err(|e| e.to_string())?;
            let p = lib(survival_curve(s, m, &[t]))?.samples[0].survival;
            let p0 = lib(survival_curve(s0, m0, &[q]))?.samples[0].survival;
            let good = if *slower { p > p0 } else { p < p0 };
            ok &= good;
            cells.push(format!("{name} Q={q} μs: P = {p:.5} vs {p0:.5}{}", if good { "" } else { " (wrong sign)" }));
        }
    }
    // Where the anti-Zeno speed-up sets in, for the record.
    let (s, m) = (&cases[1].1, &cases[1].2);
    let mut onset = None;
    for q in (1..=40).map(|i| 0.5 * i as f64) {
        let t = clock_time(m, q).map_err(|e| e.to_string())?;
        let p = lib(survival_curve(s, m, &[t]))?.samples[0].survival;
        let p0 = lib(survival_curve(s, &Modulation::constant(1.0), &[q]))?.samples[0].survival;
        if p < p0 {
            onset = Some(q);
            break;
        }
    }
    pass_if(
        ok,
        format!(
            "{}; QZE must exceed and AZE fall below the unmodulated P; AZE speed-up onset at Q ≈ {} μs",
            cells.join(", "),
            onset.map_or("> 20".to_string(), |q| q.to_string())
        ),
    )
}

/// Piecewise-linear interpolation, zero outside the table.
fn interpolate(table: &[(f64, f64)], w: f64) -> f64 {
    if w < table[0].0 || w > table[table.len() - 1].0 {
        return 0.0;
    }
    for pair in table.windows(2) {
        let ((x0, g0), (x1, g1)) = (pair[0], pair[1]);
        if w <= x1 {
            return g0 + (g1 - g0) * (w - x0) / (x1 - x0);
        }
    }
    table[table.len() - 1].1
}

fn optimizer_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_0a);
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for trial in 0..20 {
        let mut w = -5.0;
        let mut table = Vec::new();
        for _ in 0..24 {
            table.push((w, rng.gen_range(0.0..1e-5)));
            w += rng.gen_range(0.1..0.8);
        }
        let frequencies: Vec<f64> = (0..12).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let raw: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0))).collect();
        let total: f64 = raw.iter().map(|p| p.1).sum();
        let band_points: Vec<(f64, f64)> = raw.iter().map(|&(a, p)| (a, p / total)).collect();
        let spectrum = lib(CouplingSpectrum::tabulated(table.clone(), 0.0))?;
        let band = lib(Band::normalized(raw))?;
        let values: Vec<f64> = frequencies
            .iter()
            .map(|&f| TAU * band_points.iter().map(|&(a, p)| p * interpolate(&table, a + f)).sum::<f64>())
            .collect();
        for goal in [Goal::Minimize, Goal::Maximize] {
            let sign = if goal == Goal::Minimize { 1.0 } else { -1.0 };
            let mut expected = 0;
            for k in 1..frequencies.len() {
                let (v, b) = (sign * values[k], sign * values[expected]);
                if v < b || (v == b && frequencies[k].abs() < frequencies[expected].abs()) {
                    expected = k;
                }
            }
            let problem = ControlProblem::new(
                spectrum.clone(),
                goal,
                Family::FreeHarmonics {
                    frequencies: frequencies.clone(),
                },
            )
            .with_band(band.clone());
            let result = lib(optimize(&problem))?;
            let weights = result.weights.ok_or("free harmonics returned no weights")?;
            let chosen = weights.iter().position(|&x| x == 1.0);
            runs += 1;
            if chosen != Some(expected) || result.excluded != 0 {
                mismatches.push(format!("trial {trial} {goal:?}: chose {chosen:?}, scan {expected}"));
            }
        }
    }
    pass_if(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{runs}/{runs} minimize/maximize runs on 20 random tabulated spectra match the exhaustive vertex scan")
        } else {
            mismatches.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("Parseval normalization", parseval),
        ("PM harmonic identities", pm_identities),
        ("flat-spectrum invariance", flat_invariance),
        ("long-time convergence", longtime_convergence),
        ("band-edge scheme ordering", fig1b_ordering),
        ("monochromatic cutoff kill", monochromatic_cutoff),
        ("AM-measurement equivalence", am_measurement),
        ("exact-amplitude agreement", volterra_agreement),
        ("lattice Zeno/anti-Zeno signs", fig2_signs),
        ("free-harmonic optimizer exactness", optimizer_exactness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name} [{elapsed:.1}s]: {detail}", i + 1);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
