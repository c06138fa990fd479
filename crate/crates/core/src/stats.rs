//! Small statistics toolbox: Kolmogorov–Smirnov distances and weighted
//! least squares.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// `sqrt(p (1-p) / n)`.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    sqrt((p * (1.0 - p)).max(0.0) / n as f64)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// `sup_y |F_n(y) - F(y)|` for the empirical CDF of `samples`.
pub fn ks_distance<F: FnMut(f64) -> f64>(samples: &[f64], mut cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("KS distance of an empty sample".into()));
    }
    let s = sorted(samples);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample statistic `sup_y |F_a(y) - F_b(y)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("KS distance of an empty sample".into()));
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Result of a weighted straight-line fit `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
}

/// Weighted least squares with weights `1/σ²`; standard errors assume the
/// `σ` are the true per-point standard deviations.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() != sigma.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len().min(sigma.len()),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("a line needs two points".into()));
    }
    let (mut sw, mut swx, mut swy, mut swxx, mut swxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&xi, &yi), &si) in x.iter().zip(y).zip(sigma) {
        if !(si > 0.0) || !si.is_finite() {
            return Err(Error::invalid("sigma", "weights need positive finite standard errors"));
        }
        let w = 1.0 / (si * si);
        sw += w;
        swx += w * xi;
        swy += w * yi;
        swxx += w * xi * xi;
        swxy += w * xi * yi;
    }
    let det = sw * swxx - swx * swx;
    if !(det > 0.0) {
        return Err(Error::InsufficientData("abscissae are all equal".into()));
    }
    let slope = (sw * swxy - swx * swy) / det;
    let intercept = (swxx * swy - swx * swxy) / det;
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr: sqrt(sw / det),
        intercept_stderr: sqrt(swxx / det),
    })
}
