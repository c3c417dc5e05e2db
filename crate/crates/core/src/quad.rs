//! Globally adaptive Gauss–Kronrod (10/21) quadrature over panelled intervals.
//!
//! Oscillatory integrands are handled by seeding the adaptive loop with panels
//! no wider than a caller-chosen width (typically a fraction of the
//! oscillation period) and with breakpoints at every known feature.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
// Math methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_460,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_958_109_831,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

/// Gauss weights for the odd-indexed Kronrod nodes (`XGK[1]`, `XGK[3]`, ...).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Values that can be integrated: real or complex.
pub trait Integrand:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Absolute and relative error targets; the loop stops once the estimated
/// error is below `abs + rel·|value|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-8, 1e-6)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_PANELS: usize = 8_000_000;

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

struct Queued {
    error: f64,
    index: usize,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: Integrand, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[10];
    let mut gauss = T::default();
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron = kron + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).magnitude();
    (value, error)
}

/// Integrates `f` across the sorted `breakpoints`, splitting every gap into
/// panels no wider than `max_panel` before adaptive bisection.
pub fn integrate<T, F>(
    f: F,
    breakpoints: &[f64],
    max_panel: f64,
    tol: Tolerance,
) -> Result<Estimate<T>>
where
    T: Integrand,
    F: FnMut(f64) -> T,
{
    integrate_limited(f, breakpoints, max_panel, tol, MAX_PANELS)
}

/// [`integrate`] with an explicit cap on the number of panels.
pub fn integrate_limited<T, F>(
    mut f: F,
    breakpoints: &[f64],
    max_panel: f64,
    tol: Tolerance,
    max_panels: usize,
) -> Result<Estimate<T>>
where
    T: Integrand,
    F: FnMut(f64) -> T,
{
    let mut points: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    if points.len() < 2 {
        return Ok(Estimate {
            value: T::default(),
            error: 0.0,
            evaluations: 0,
        });
    }

    let mut panels: Vec<Panel<T>> = Vec::new();
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let count = if max_panel.is_finite() && max_panel > 0.0 {
            ((hi - lo) / max_panel).ceil().max(1.0) as usize
        } else {
            1
        };
        if panels.len() + count > max_panels {
            return Err(Error::input("quadrature domain needs too many panels"));
        }
        let step = (hi - lo) / count as f64;
        for i in 0..count {
            let a = lo + step * i as f64;
            let b = if i + 1 == count { hi } else { lo + step * (i + 1) as f64 };
            let (value, error) = kronrod(&mut f, a, b);
            panels.push(Panel { a, b, value, error });
        }
    }
    let mut evaluations = 21 * panels.len();

    let mut total = panels.iter().fold(T::default(), |acc, p| acc + p.value);
    let mut total_err: f64 = panels.iter().map(|p| p.error).sum();
    let mut heap: BinaryHeap<Queued> = panels
        .iter()
        .enumerate()
        .map(|(index, p)| Queued { error: p.error, index })
        .collect();
    let mut since_resum = 0usize;

    while total_err > tol.target(total.magnitude()) {
        let Some(Queued { index, .. }) = heap.pop() else {
            break;
        };
        let (a, b) = (panels[index].a, panels[index].b);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) || (b - a) <= 1e-13 * a.abs().max(b.abs()) {
            // Unsplittable in floating point; keep its contribution as is.
            continue;
        }
        if panels.len() + 1 > max_panels {
            return Err(Error::Quadrature {
                value: total.magnitude(),
                estimate: total_err,
            });
        }
        let (left, left_err) = kronrod(&mut f, a, mid);
        let (right, right_err) = kronrod(&mut f, mid, b);
        evaluations += 42;

        total = total - panels[index].value + left + right;
        total_err += left_err + right_err - panels[index].error;
        panels[index] = Panel {
            a,
            b: mid,
            value: left,
            error: left_err,
        };
        heap.push(Queued {
            error: left_err,
            index,
        });
        panels.push(Panel {
            a: mid,
            b,
            value: right,
            error: right_err,
        });
        heap.push(Queued {
            error: right_err,
            index: panels.len() - 1,
        });

        since_resum += 1;
        if since_resum == 4096 {
            since_resum = 0;
            total = panels.iter().fold(T::default(), |acc, p| acc + p.value);
            total_err = panels.iter().map(|p| p.error).sum();
        }
    }

    let total = panels.iter().fold(T::default(), |acc, p| acc + p.value);
    let total_err: f64 = panels.iter().map(|p| p.error).sum();
    // Leftover error that bisection could not reduce is accepted only if it
    // is at the level of floating-point noise on the integrand.
    let noise = 1e-13 * panels
        .iter()
        .map(|p| p.value.magnitude())
        .sum::<f64>();
    if total_err > tol.target(total.magnitude()) + noise {
        return Err(Error::Quadrature {
            value: total.magnitude(),
            estimate: total_err,
        });
    }
    Ok(Estimate {
        value: total,
        error: total_err,
        evaluations,
    })
}
