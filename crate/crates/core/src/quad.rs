//! Adaptive Gauss-Kronrod quadrature and oscillatory tail summation.
//!
//! The rules follow QUADPACK: a 10-point Gauss rule embedded in a 21-point
//! Kronrod rule, global bisection of the interval with the largest error,
//! and Wynn's epsilon algorithm for sequences of cycle integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Integral estimate with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: 0.0,
        error: 0.0,
    };
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value - rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::ZERO, |a, b| a + b)
    }
}

/// One application of the 21-point Kronrod rule on `[a, b]`.
pub fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let result_abs = abs_sum * half.abs();
    let result_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if result_asc != 0.0 && err != 0.0 {
        err = result_asc * (200.0 * err / result_asc).powf(1.5).min(1.0);
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * result_abs);
    }
    Estimate {
        value: result,
        error: err,
    }
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_subdivisions: 2000,
        }
    }

    /// Error target for an integral of size `value`; never below what
    /// double precision can resolve.
    pub fn target(&self, value: f64) -> f64 {
        self.abs
            .max(self.rel * value.abs())
            .max(100.0 * f64::EPSILON * value.abs())
    }
}

/// Globally adaptive integration of `f` over the finite interval `[a, b]`.
///
/// Returns the best estimate together with its error when the tolerance is
/// met, and [`Error::QuadratureNotConverged`] otherwise.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    let est = integrate_best_effort(f, a, b, tol);
    let target = tol.target(est.value);
    if est.error <= target {
        Ok(est)
    } else {
        Err(Error::QuadratureNotConverged {
            value: est.value,
            achieved: est.error,
            tolerance: target,
        })
    }
}

/// As [`integrate`] but always returns the final estimate, converged or not.
pub fn integrate_best_effort<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Estimate {
    if a == b {
        return Estimate::ZERO;
    }
    let first = gauss_kronrod_21(f, a, b);
    let mut heap = BinaryHeap::new();
    let mut total = first;
    heap.push(Segment { a, b, est: first });
    let mut subdivisions = 0;
    while total.error > tol.target(total.value) && subdivisions < tol.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval no longer divisible in floating point
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod_21(f, worst.a, mid);
        let right = gauss_kronrod_21(f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error = (total.error + left.error + right.error - worst.est.error).max(0.0);
        heap.push(Segment {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            est: right,
        });
        subdivisions += 1;
    }
    let value: f64 = heap.iter().map(|s| s.est.value).sum();
    let error: f64 = heap.iter().map(|s| s.est.error).sum();
    Estimate { value, error }
}

/// Integrate a non-oscillatory, eventually decaying integrand over
/// `[a, ∞)` on geometrically growing panels `[a·2ᵏ, a·2ᵏ⁺¹]`.
///
/// Stops once a panel contributes less than `tol.abs / 1000` and
/// `upper_scale` has been passed (the scale beyond which `f` is known to
/// decay at least exponentially).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    upper_scale: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    assert!(a > 0.0, "geometric panels need a positive start");
    let mut total = Estimate::ZERO;
    let mut lo = a;
    for _ in 0..2048 {
        let hi = 2.0 * lo;
        let panel_tol = Tolerance {
            abs: tol.abs / 64.0,
            ..tol
        };
        let est = integrate(f, lo, hi, panel_tol)?;
        total = total + est;
        if lo > upper_scale && est.value.abs() < tol.target(total.value) * 1e-3 {
            return Ok(total);
        }
        lo = hi;
    }
    Err(Error::QuadratureNotConverged {
        value: total.value,
        achieved: f64::INFINITY,
        tolerance: tol.abs,
    })
}

/// Wynn's epsilon algorithm over a sequence of partial sums.
#[derive(Debug, Default, Clone)]
pub struct WynnEpsilon {
    table: Vec<Vec<f64>>,
    last_estimate: Option<f64>,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add the next partial sum; returns the current extrapolated value and
    /// the change from the previous extrapolation.
    pub fn push(&mut self, partial_sum: f64) -> (f64, f64) {
        let mut row = vec![partial_sum];
        if let Some(prev) = self.table.last() {
            // eps_{k+1}^{(n)} = eps_{k-1}^{(n+1)} + 1/(eps_k^{(n+1)} - eps_k^{(n)})
            for k in 0..prev.len() {
                let diff = row[k] - prev[k];
                let before = if k == 0 { 0.0 } else { prev[k - 1] };
                let next = if diff == 0.0 {
                    f64::INFINITY
                } else {
                    before + 1.0 / diff
                };
                if !next.is_finite() {
                    break;
                }
                row.push(next);
            }
        }
        // even columns carry the extrapolants
        let best = row
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(_, v)| *v)
            .next_back()
            .unwrap_or(partial_sum);
        self.table.push(row);
        if self.table.len() > 60 {
            self.table.remove(0);
        }
        let change = self
            .last_estimate
            .map(|prev| (best - prev).abs())
            .unwrap_or(f64::INFINITY);
        self.last_estimate = Some(best);
        (best, change)
    }
}

/// ∫_{start}^{∞} f(x) dx for an oscillatory `f` whose zeros are spaced by
/// `half_period`, by summing half-period integrals and extrapolating the
/// partial sums with Wynn's epsilon algorithm. `start` should be a zero of
/// the oscillating factor.
pub fn integrate_oscillatory_tail<F: Fn(f64) -> f64>(
    f: &F,
    start: f64,
    half_period: f64,
    tol: Tolerance,
    max_cycles: usize,
) -> Result<Estimate> {
    let mut wynn = WynnEpsilon::new();
    let mut partial = 0.0;
    let mut quad_error = 0.0;
    let mut stable = 0;
    let cell_tol = Tolerance {
        abs: tol.abs / 256.0,
        rel: tol.rel / 16.0,
        ..tol
    };
    let mut last_change = f64::INFINITY;
    let mut best = 0.0;
    for k in 0..max_cycles {
        let a = start + k as f64 * half_period;
        let cell = integrate(f, a, a + half_period, cell_tol)?;
        partial += cell.value;
        quad_error += cell.error;
        let (estimate, change) = wynn.push(partial);
        best = estimate;
        last_change = change;
        let target = tol.target(estimate);
        // plain summation has converged when the cells themselves vanish
        if cell.value.abs() < target * 1e-3 && k > 4 {
            return Ok(Estimate {
                value: partial,
                error: quad_error + cell.value.abs(),
            });
        }
        if change < 0.1 * target {
            stable += 1;
            if stable >= 3 && k >= 8 {
                return Ok(Estimate {
                    value: estimate,
                    error: quad_error + change.max(f64::EPSILON * estimate.abs()),
                });
            }
        } else {
            stable = 0;
        }
    }
    Err(Error::QuadratureNotConverged {
        value: best,
        achieved: last_change + quad_error,
        tolerance: tol.target(best),
    })
}
