//! Float helpers over `libm` so the crate builds without `std`.

pub(crate) use core::f64::consts::{FRAC_PI_8, PI, SQRT_2};

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub(crate) fn atan(x: f64) -> f64 {
    libm::atan(x)
}
#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub(crate) fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}
#[inline]
pub(crate) fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    sqrt(x.iter().map(|v| v * v).sum())
}

/// Number of grid steps of size `dt` needed to reach `t`: the first `k`
/// with `k·dt ≥ t`, forgiving rounding in `t/dt`.
pub(crate) fn ceil_steps(t: f64, dt: f64) -> usize {
    let r = t / dt;
    let k = libm::round(r);
    if (r - k).abs() <= 1e-9 * k.max(1.0) {
        k as usize
    } else {
        libm::ceil(r) as usize
    }
}
