//! Elementary special functions used by the window transforms and the exact
//! tail integrals.

use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
// Math methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `∫₀ˡ e^{iηs} ds = l·e^{iηl/2}·sinc(ηl/2)`, stable at `η → 0`.
pub fn phase_integral(eta: f64, len: f64) -> Complex64 {
    let half = 0.5 * eta * len;
    Complex64::from_polar(len * sinc(half), half)
}

/// `Σ_{n=0}^{N-1} e^{inθ}` evaluated through the Dirichlet kernel.
pub fn geometric_phase_sum(theta: f64, n: u64) -> Complex64 {
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let nf = n as f64;
    let reduced = theta - core::f64::consts::TAU * (theta / core::f64::consts::TAU).round();
    let half = 0.5 * reduced;
    let denom = half.sin();
    let magnitude = if denom == 0.0 {
        nf
    } else {
        (nf * half).sin() / denom
    };
    Complex64::from_polar(1.0, (nf - 1.0) * half) * magnitude
}

/// Sine and cosine integrals `(Si(x), Ci(x))` for `x > 0`.
///
/// Power series below `x = 2`, continued fraction for `E₁(ix)` above.
pub fn sici(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 200;

    if x > 2.0 {
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / FPMIN, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..MAXIT {
            let a = -(((i - 1) * (i - 1)) as f64);
            b += Complex64::new(2.0, 0.0);
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < EPS {
                break;
            }
        }
        h *= Complex64::new(x.cos(), -x.sin());
        (FRAC_PI_2 + h.im, -h.re)
    } else {
        // Alternating odd/even power series for Si and Ci - γ - ln x.
        let mut sum_s = 0.0;
        let mut sum_c = 0.0;
        let mut fact = 1.0;
        let mut sign = 1.0;
        for k in 1..MAXIT {
            fact *= x / k as f64;
            let term = fact / k as f64;
            if k % 2 == 1 {
                sum_s += sign * term;
            } else {
                sign = -sign;
                sum_c += sign * term;
            }
            if term < EPS * 1e-2 {
                break;
            }
        }
        (sum_s, sum_c + x.ln() + EULER_GAMMA)
    }
}

/// `∫ₓ^∞ e^{iud}/u du` for `x > 0`, `d ≠ 0`.
pub(crate) fn oscillatory_log_tail(x: f64, d: f64) -> Complex64 {
    let (si, ci) = sici(x * d.abs());
    Complex64::new(-ci, d.signum() * (FRAC_PI_2 - si))
}

/// `∫ₓ^∞ e^{iud}/u² du` for `x > 0`.
pub(crate) fn oscillatory_square_tail(x: f64, d: f64) -> Complex64 {
    if d == 0.0 {
        return Complex64::new(1.0 / x, 0.0);
    }
    Complex64::from_polar(1.0 / x, x * d) + Complex64::new(0.0, d) * oscillatory_log_tail(x, d)
}

/// `∫_W^∞ e^{iωd} / ((ω-a)(ω-b)) dω` for `W > max(a, b)`.
pub(crate) fn pole_pair_tail(w: f64, a: f64, b: f64, d: f64) -> Complex64 {
    let xa = w - a;
    let xb = w - b;
    debug_assert!(xa > 0.0 && xb > 0.0);
    if (a - b).abs() <= 1e-7 * xa.min(xb) {
        let c = 0.5 * (a + b);
        return Complex64::from_polar(1.0, c * d) * oscillatory_square_tail(w - c, d);
    }
    if d == 0.0 {
        return Complex64::new((xb / xa).ln() / (a - b), 0.0);
    }
    (Complex64::from_polar(1.0, a * d) * oscillatory_log_tail(xa, d)
        - Complex64::from_polar(1.0, b * d) * oscillatory_log_tail(xb, d))
        / (a - b)
}
