//! The free isotropic α-stable process in ℝ^d.

use alloc::format;
use alloc::vec::Vec;

use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{self, gamma, ln, powf, sin, sqrt, PI};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::rng::RngStream;

/// Stability index and dimension of an isotropic α-stable process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableSpec {
    alpha: f64,
    dim: usize,
}

impl StableSpec {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid("alpha", "alpha must be in (0,2)"));
        }
        if dim == 0 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        Ok(StableSpec { alpha, dim })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The coefficient `A_{d,α}` of the Lévy density `A |y|^{-d-α}`.
    pub fn levy_constant(&self) -> f64 {
        levy_constant(self.dim, self.alpha)
    }
}

pub(crate) fn levy_constant(dim: usize, alpha: f64) -> f64 {
    let d = dim as f64;
    powf(2.0, alpha) * gamma(0.5 * (d + alpha)) / (powf(PI, 0.5 * d) * gamma(-0.5 * alpha).abs())
}

/// A point of ℝ^d with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("a point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("point coordinates must be finite"));
        }
        Ok(Point(coords))
    }

    /// One-dimensional point.
    pub fn scalar(x: f64) -> Self {
        Point(alloc::vec![x])
    }

    pub fn origin(dim: usize) -> Self {
        Point(alloc::vec![0.0; dim])
    }

    /// The distinguished interior point `(0, …, 0, 1)`.
    pub fn unit_axis(dim: usize) -> Self {
        let mut v = alloc::vec![0.0; dim];
        v[dim - 1] = 1.0;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        math::norm(&self.0)
    }

    pub fn scaled(&self, r: f64) -> Point {
        Point(self.0.iter().map(|c| c * r).collect())
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(x)
    }
}

fn check_dim(spec: &StableSpec, y: &Point) -> Result<()> {
    if y.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: y.dim(),
        });
    }
    Ok(())
}

/// Lévy density `ν(y) = A_{d,α} |y|^{-d-α}`.
pub fn levy_density(spec: &StableSpec, y: &Point) -> Result<f64> {
    check_dim(spec, y)?;
    let r = y.norm();
    if r == 0.0 {
        return Err(Error::domain("the Lévy density is singular at the origin"));
    }
    Ok(spec.levy_constant() * powf(r, -(spec.dim as f64) - spec.alpha))
}

/// `∫_ℝ (1 - cos(ξ y)) ν(y) dy` by quadrature, for `d = 1`.
///
/// Should reproduce `|ξ|^α`. The integral is split into the first period
/// (with a substitution that flattens the `y^{1-α}` behaviour at zero),
/// 63 further periods, and an integration-by-parts tail.
pub fn check_levy_normalization(spec: &StableSpec, xi: &Point, quad: &QuadratureSpec) -> Result<f64> {
    if spec.dim != 1 {
        return Err(Error::Unsupported(format!(
            "normalization quadrature is one-dimensional, got d = {}",
            spec.dim
        )));
    }
    check_dim(spec, xi)?;
    let omega = xi.coords()[0].abs();
    if omega == 0.0 {
        return Ok(0.0);
    }
    let alpha = spec.alpha;
    let a = spec.levy_constant();
    let period = 2.0 * PI / omega;
    // 1 - cos(u) = 2 sin²(u/2) keeps precision for small u.
    let integrand = |y: f64| {
        let h = sin(0.5 * omega * y);
        2.0 * h * h * powf(y, -1.0 - alpha)
    };

    let m = 1.0 / (2.0 - alpha);
    let head = integrate(
        |w| {
            if w <= 0.0 {
                return 0.0;
            }
            let y = period * powf(w, m);
            integrand(y) * period * m * powf(w, m - 1.0)
        },
        0.0,
        1.0,
        quad,
    )?;
    const PERIODS: usize = 64;
    let mut body = 0.0;
    for k in 1..PERIODS {
        body += integrate(integrand, k as f64 * period, (k + 1) as f64 * period, quad)?.value;
    }
    // Tail from X = 64 periods, where cos(ωX) = 1 and sin(ωX) = 0:
    // ∫_X^∞ y^{-p} = X^{1-p}/(p-1), and the cosine part by parts.
    let x = PERIODS as f64 * period;
    let p = 1.0 + alpha;
    let w2 = omega * omega;
    let cos_tail = p * powf(x, -p - 1.0) / w2 - p * (p + 1.0) * (p + 2.0) * powf(x, -p - 3.0) / (w2 * w2);
    let tail = powf(x, -alpha) / alpha - cos_tail;
    Ok(2.0 * a * (head.value + body + tail))
}

/// Exact sampler for the increment `X_{t+s} - X_s` over a fixed lag `t`.
///
/// `X_t = sqrt(2 S) N` where `N` is a standard Gaussian vector and `S` is
/// positive (α/2)-stable with `E e^{-λS} = e^{-t λ^{α/2}}`, drawn with
/// Kanter's representation.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler {
    a: f64,
    inv_a: f64,
    tail_exp: f64,
    scale: f64,
    dim: usize,
}

impl IncrementSampler {
    pub fn new(spec: &StableSpec, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain("time lag must be positive"));
        }
        let a = 0.5 * spec.alpha;
        Ok(IncrementSampler {
            a,
            inv_a: 1.0 / a,
            tail_exp: (1.0 - a) / a,
            scale: math::SQRT_2 * powf(t, 1.0 / spec.alpha),
            dim: spec.dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unit positive (α/2)-stable variable, `E e^{-λS} = e^{-λ^{α/2}}`.
    #[inline]
    pub fn subordinator(&self, rng: &mut RngStream) -> f64 {
        let u = PI * rng.open01();
        let e: f64 = Exp1.sample(rng);
        let ln_s = ln(sin(self.a * u)) - self.inv_a * ln(sin(u))
            + self.tail_exp * (ln(sin((1.0 - self.a) * u)) - ln(e));
        math::exp(ln_s)
    }

    /// Overwrite `out` (length `dim`) with one increment.
    #[inline]
    pub fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]) {
        let amp = self.scale * sqrt(self.subordinator(rng));
        for v in out.iter_mut() {
            let n: f64 = StandardNormal.sample(rng);
            *v = amp * n;
        }
    }
}

/// One draw of `X_t` started at the origin.
pub fn sample_increment(spec: &StableSpec, t: f64, rng: &mut RngStream) -> Result<Point> {
    let sampler = IncrementSampler::new(spec, t)?;
    let mut v = alloc::vec![0.0; spec.dim];
    sampler.sample_into(rng, &mut v);
    Ok(Point(v))
}

/// Cauchy (`α = 1`) transition density
/// `Γ((d+1)/2) π^{-(d+1)/2} t (|x|² + t²)^{-(d+1)/2}`.
pub fn transition_density_cauchy(dim: usize, t: f64, x: &Point) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("time must be positive"));
    }
    if x.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.dim(),
        });
    }
    let h = 0.5 * (dim as f64 + 1.0);
    let r2: f64 = x.coords().iter().map(|c| c * c).sum();
    Ok(gamma(h) * powf(PI, -h) * t * powf(r2 + t * t, -h))
}

/// Two-sided envelope `t^{-d/α} ∧ t |x|^{-d-α}` of the transition density.
pub fn density_envelope(spec: &StableSpec, t: f64, x: &Point) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("time must be positive"));
    }
    check_dim(spec, x)?;
    let d = spec.dim as f64;
    let r = x.norm();
    let near = powf(t, -d / spec.alpha);
    if r == 0.0 {
        return Ok(near);
    }
    Ok(near.min(t * powf(r, -d - spec.alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cos, exp};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn spec_rejects_out_of_range_alpha() {
        assert!(StableSpec::new(2.0, 1).is_err());
        assert!(StableSpec::new(0.0, 1).is_err());
        assert!(StableSpec::new(1.0, 0).is_err());
        let e = StableSpec::new(2.5, 1).unwrap_err();
        assert!(alloc::format!("{e}").contains("alpha must be in (0,2)"));
    }

    #[test]
    fn levy_density_values() {
        let s = StableSpec::new(1.0, 1).unwrap();
        // A_{1,1} = 2 Γ(1) / (√π · 2√π) = 1/π
        assert!(rel(levy_density(&s, &Point::scalar(1.0)).unwrap(), 1.0 / PI) < 1e-14);
        assert!(rel(levy_density(&s, &Point::scalar(2.0)).unwrap(), 1.0 / (4.0 * PI)) < 1e-14);
        assert!(levy_density(&s, &Point::scalar(0.0)).is_err());
    }

    #[test]
    fn levy_density_homogeneity() {
        for &(alpha, d) in &[(0.5, 1), (1.3, 2), (1.9, 3)] {
            let s = StableSpec::new(alpha, d).unwrap();
            let y = Point::new((0..d).map(|i| 0.3 + i as f64).collect()).unwrap();
            let r = 3.7;
            let lhs = levy_density(&s, &y.scaled(r)).unwrap();
            let rhs = powf(r, -(d as f64) - alpha) * levy_density(&s, &y).unwrap();
            assert!(rel(lhs, rhs) < 1e-13);
        }
    }

    #[test]
    fn normalization_quadrature() {
        let q = QuadratureSpec::default();
        let s1 = StableSpec::new(1.0, 1).unwrap();
        let v = check_levy_normalization(&s1, &Point::scalar(1.0), &q).unwrap();
        assert!((v - 1.0).abs() < 1e-7, "{v}");
        let s15 = StableSpec::new(1.5, 1).unwrap();
        let v = check_levy_normalization(&s15, &Point::scalar(2.0), &q).unwrap();
        assert!((v - powf(2.0, 1.5)).abs() < 1e-7, "{v}");
        for &alpha in &[0.3, 0.7, 1.9] {
            let s = StableSpec::new(alpha, 1).unwrap();
            let v = check_levy_normalization(&s, &Point::scalar(-0.7), &q).unwrap();
            assert!((v - powf(0.7, alpha)).abs() < 1e-7, "alpha {alpha}: {v}");
        }
        assert_eq!(check_levy_normalization(&s1, &Point::scalar(0.0), &q).unwrap(), 0.0);
        let s2 = StableSpec::new(1.0, 2).unwrap();
        assert!(check_levy_normalization(&s2, &Point::origin(2), &q).is_err());
    }

    #[test]
    fn cauchy_density_values() {
        assert!(rel(transition_density_cauchy(1, 1.0, &Point::scalar(0.0)).unwrap(), 1.0 / PI) < 1e-14);
        assert!(rel(transition_density_cauchy(1, 2.0, &Point::scalar(0.0)).unwrap(), 0.5 / PI) < 1e-14);
        let x = Point::new(alloc::vec![1.0, 0.0]).unwrap();
        let expect = 1.0 / (4.0 * math::SQRT_2 * PI);
        assert!(rel(transition_density_cauchy(2, 1.0, &x).unwrap(), expect) < 1e-14);
        assert!(transition_density_cauchy(1, 0.0, &Point::scalar(0.0)).is_err());
    }

    #[test]
    fn cauchy_density_scaling() {
        for d in 1..4 {
            for &t in &[0.1, 0.7, 3.0, 20.0] {
                for &r in &[0.0, 0.3, 2.0, 50.0] {
                    let mut c = alloc::vec![0.0; d];
                    c[0] = r;
                    c[d - 1] += 0.5 * r;
                    let x = Point::new(c).unwrap();
                    let lhs = transition_density_cauchy(d, t, &x).unwrap();
                    let rhs = powf(t, -(d as f64)) * transition_density_cauchy(d, 1.0, &x.scaled(1.0 / t)).unwrap();
                    assert!(rel(lhs, rhs) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn envelope_values_and_band() {
        let s = StableSpec::new(1.0, 1).unwrap();
        assert_eq!(density_envelope(&s, 1.0, &Point::scalar(0.0)).unwrap(), 1.0);
        assert!((density_envelope(&s, 1.0, &Point::scalar(10.0)).unwrap() - 1e-2).abs() < 1e-16);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &t in &[0.1, 1.0, 10.0] {
            for &x in &[0.0, 0.1, 1.0, 10.0, 100.0] {
                let p = Point::scalar(x);
                let ratio = transition_density_cauchy(1, t, &p).unwrap() / density_envelope(&s, t, &p).unwrap();
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        // p/e = (1/π) max(1,u²)/(1+u²) with u = |x|/t, so the band is [1/(2π), 1/π].
        assert!(lo >= 1.0 / (2.0 * PI) - 1e-12 && hi <= 1.0 / PI + 1e-12, "[{lo}, {hi}]");
    }

    #[test]
    fn sampler_is_deterministic() {
        let s = StableSpec::new(1.3, 3).unwrap();
        let mut a = RngStream::new(11, 2);
        let mut b = RngStream::new(11, 2);
        for _ in 0..100 {
            assert_eq!(
                sample_increment(&s, 0.5, &mut a).unwrap(),
                sample_increment(&s, 0.5, &mut b).unwrap()
            );
        }
        assert!(sample_increment(&s, 0.0, &mut a).is_err());
    }

    #[test]
    fn subordinator_laplace_transform() {
        // E exp(-λ S) = exp(-λ^{α/2}) for the unit subordinator.
        for &alpha in &[0.6, 1.0, 1.6] {
            let s = StableSpec::new(alpha, 1).unwrap();
            let sampler = IncrementSampler::new(&s, 1.0).unwrap();
            let mut rng = RngStream::new(5, 0);
            let n = 200_000;
            let mean = (0..n).map(|_| exp(-sampler.subordinator(&mut rng))).sum::<f64>() / n as f64;
            assert!((mean - exp(-1.0)).abs() < 4.0 * 0.5 / sqrt(n as f64), "alpha {alpha}: {mean}");
        }
    }

    #[test]
    fn tiny_lag_concentrates() {
        let s = StableSpec::new(1.0, 1).unwrap();
        let mut rng = RngStream::new(1, 0);
        let mut v: Vec<f64> = (0..100_000)
            .map(|_| sample_increment(&s, 1e-12, &mut rng).unwrap().norm())
            .collect();
        v.sort_by(|a, b| a.total_cmp(b));
        assert!(v[v.len() / 2] < 1e-4);
    }

    #[test]
    fn cauchy_characteristic_function_and_symmetry() {
        let s = StableSpec::new(1.0, 1).unwrap();
        let sampler = IncrementSampler::new(&s, 1.0).unwrap();
        let mut rng = RngStream::new(2024, 0);
        let n = 1_000_000usize;
        let mut sum_cos = 0.0;
        let mut sum_cos2 = 0.0;
        let mut neg = 0usize;
        let mut buf = [0.0];
        for _ in 0..n {
            sampler.sample_into(&mut rng, &mut buf);
            let c = cos(buf[0]);
            sum_cos += c;
            sum_cos2 += c * c;
            if buf[0] < 0.0 {
                neg += 1;
            }
        }
        let mean = sum_cos / n as f64;
        let se = sqrt((sum_cos2 / n as f64 - mean * mean) / n as f64);
        assert!((mean - exp(-1.0)).abs() < 3.0 * se, "{mean} ± {se}");
        let frac = neg as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 * 0.5 / sqrt(n as f64));
    }
}
