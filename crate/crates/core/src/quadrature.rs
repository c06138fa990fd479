//! Adaptive Gauss–Kronrod quadrature (21-point Kronrod / 10-point Gauss
//! panels, globally adaptive bisection) plus the interval transforms used
//! by the analytic oracles.
#![allow(clippy::excessive_precision)]

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{exp, powf, sqrt};

/// Tolerances and truncation parameters shared by every analytic oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Truncation point for `e^{-λ}`-damped integrals.
    pub lambda_max: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            lambda_max: 60.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, lambda_max: f64, max_subdivisions: usize) -> Result<Self> {
        let q = QuadratureSpec {
            rel_tol,
            abs_tol,
            lambda_max,
            max_subdivisions,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if !(self.lambda_max > 0.0) || !(exp(-self.lambda_max) < self.abs_tol) {
            return Err(Error::invalid(
                "lambda_max",
                "e^{-lambda_max} must be below abs_tol",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }

    /// Same spec with both tolerances scaled by `factor`.
    pub fn loosened(&self, factor: f64) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

/// Value of an integral together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
}

impl core::ops::Add for Integral {
    type Output = Integral;
    fn add(self, rhs: Integral) -> Integral {
        Integral {
            value: self.value + rhs.value,
            abs_err: self.abs_err + rhs.abs_err,
        }
    }
}

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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_640_580_640,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resabs = resk.abs();
    let mut resg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = powf(200.0 * err / resasc, 1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Panel { a, b, value, err }
}

/// Globally adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, quad: &QuadratureSpec) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_err: 0.0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate needs finite limits"));
    }
    let first = gk21(&mut f, a, b);
    let mut total = first.value;
    let mut total_err = first.err;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut splits = 1;
    // Panels too narrow to bisect further keep their error here.
    let mut frozen_err = 0.0;
    let mut frozen_val = 0.0;
    loop {
        let target = quad.abs_tol.max(quad.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if splits >= quad.max_subdivisions {
            return Err(Error::Quadrature {
                achieved: total_err,
                requested: target,
                layer: None,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE) {
            frozen_err += worst.err;
            frozen_val += worst.value;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gk21(&mut f, worst.a, mid);
        let right = gk21(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        splits += 1;
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    let value = heap.iter().map(|p| p.value).sum::<f64>() + frozen_val;
    let abs_err = heap.iter().map(|p| p.err).sum::<f64>() + frozen_err;
    if !value.is_finite() {
        return Err(Error::Quadrature {
            achieved: f64::INFINITY,
            requested: quad.abs_tol,
            layer: None,
        });
    }
    Ok(Integral { value, abs_err })
}

/// `∫_a^∞ f` for `a > 0` via `s = a / w²`, which turns algebraic tails
/// `s^{-p}` with `p ≥ 3/2` into bounded integrands on `(0, 1]`.
pub fn integrate_upper_tail<F: FnMut(f64) -> f64>(mut f: F, a: f64, quad: &QuadratureSpec) -> Result<Integral> {
    if !(a > 0.0) {
        return Err(Error::domain("upper-tail integral needs a positive lower limit"));
    }
    integrate(
        |w| {
            if w <= 0.0 {
                return 0.0;
            }
            let s = a / (w * w);
            if !s.is_finite() {
                return 0.0;
            }
            let v = f(s) * 2.0 * a / (w * w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        quad,
    )
}

/// `∫_0^b f` via `z = w²`, which removes `z^{-1/2}` endpoint singularities.
pub fn integrate_from_zero<F: FnMut(f64) -> f64>(mut f: F, b: f64, quad: &QuadratureSpec) -> Result<Integral> {
    if !(b > 0.0) {
        return Err(Error::domain("integral from zero needs a positive upper limit"));
    }
    integrate(|w| 2.0 * w * f(w * w), 0.0, sqrt(b), quad)
}

/// `∫_0^∞ f`, split at the given positive breakpoints. The first piece uses
/// [`integrate_from_zero`], the last [`integrate_upper_tail`].
pub fn integrate_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    breakpoints: &[f64],
    quad: &QuadratureSpec,
) -> Result<Integral> {
    let mut pts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|p| *p > 0.0 && p.is_finite())
        .collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    if pts.is_empty() {
        pts.push(1.0);
    }
    let mut total = integrate_from_zero(&mut f, pts[0], quad)?;
    for w in pts.windows(2) {
        total = total + integrate(&mut f, w[0], w[1], quad)?;
    }
    total = total + integrate_upper_tail(&mut f, *pts.last().unwrap(), quad)?;
    Ok(total)
}

/// `∫_a^∞ f` for an integrand that changes sign every `half_period`
/// (starting at `a`) with a slowly decaying amplitude. Half-period pieces
/// are summed and the partial sums extrapolated with Wynn's epsilon table.
pub fn integrate_oscillatory_tail<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    half_period: f64,
    quad: &QuadratureSpec,
) -> Result<Integral> {
    const PIECES: usize = 40;
    if !(half_period > 0.0) || !a.is_finite() {
        return Err(Error::domain("oscillatory tail needs a finite start and positive half-period"));
    }
    let mut partial = Vec::with_capacity(PIECES);
    let mut sum = 0.0;
    let mut err = 0.0;
    for k in 0..PIECES {
        let lo = a + k as f64 * half_period;
        let piece = integrate(&mut f, lo, lo + half_period, quad)?;
        sum += piece.value;
        err += piece.abs_err;
        partial.push(sum);
    }
    let (value, extrapolation_err) = wynn_epsilon(&partial);
    Ok(Integral {
        value,
        abs_err: err + extrapolation_err,
    })
}

fn wynn_epsilon(s: &[f64]) -> (f64, f64) {
    let n = s.len();
    let mut best = s[n - 1];
    let mut best_err = (s[n - 1] - s[n - 2]).abs();
    let mut prev = alloc::vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut column = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                return (best, best_err);
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        column += 1;
        if column % 2 == 0 && next.len() >= 2 {
            let m = next.len();
            let e = (next[m - 1] - next[m - 2]).abs();
            if e < best_err {
                best = next[m - 1];
                best_err = e;
            }
        }
        prev = cur;
        cur = next;
    }
    (best, best_err)
}
