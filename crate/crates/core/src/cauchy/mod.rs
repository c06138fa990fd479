//! Analytic oracles for the Cauchy process (`d = α = 1`) killed on leaving
//! the half-line `(0, ∞)`.
//!
//! Everything is built from the weight integral
//! `Φ(t) = ∫_0^t log s / (1 + s²) ds`, tabulated once, and from the Laplace
//! representation `r(x) = ∫_0^∞ γ(s) e^{-sx} ds` of the correction term in
//! the generalized eigenfunctions `ψ(λx) = sin(λx + π/8) - r(λx)`.
//!
//! [`CauchyHalfLine`] owns the tables; construct it once and share it.

mod constants;
mod kernel;
mod ruin;
mod table;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{atan, cos, exp, ln, ln1p, powf, sin, sqrt, FRAC_PI_8, PI, SQRT_2};
use crate::quadrature::{integrate, integrate_from_zero, integrate_half_line, integrate_upper_tail, QuadratureSpec};

pub use constants::Constants;
use table::HermiteTable;

const PHI_T_LO: f64 = 1e-6;
const PHI_T_HI: f64 = 1e8;
const PHI_NODES: usize = 4000;

// Trapezoid nodes in v = log s for integrals against γ.
const LAPLACE_V_LO: f64 = -40.0;
const LAPLACE_V_HI: f64 = 64.0;
const LAPLACE_STEP: f64 = 0.25;
// Nodes lighter than this are skipped by the heat kernel's double sum.
const KERNEL_WEIGHT_FLOOR: f64 = 1e-20;

/// `Φ(t)` for small `t` from its power series (error `O(t⁵ log t)`).
fn phi_series(t: f64) -> f64 {
    let l = ln(t);
    let t3 = t * t * t;
    t * l - t - t3 * l / 3.0 + t3 / 9.0
}

/// Integrand of `Φ` in the variable `u = log s`.
#[inline]
fn phi_integrand(u: f64) -> f64 {
    let e = exp(u);
    u * e / (1.0 + e * e)
}

/// `Φ(t) = ∫_0^t log s / (1 + s²) ds` by direct adaptive quadrature in
/// `u = log s`, which removes the logarithmic singularity at the origin.
///
/// `Φ(0) = Φ(∞) = 0` and `Φ(1) = -G` (Catalan's constant).
pub fn log_weight_integral(t: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain("log_weight_integral needs t >= 0"));
    }
    if t == 0.0 || t == f64::INFINITY {
        return Ok(0.0);
    }
    let u = ln(t);
    if u < -48.0 {
        return Ok(phi_series(t));
    }
    if u > 48.0 {
        return Ok(phi_series(1.0 / t));
    }
    // Below u = -50 the integrand is under 1e-20.
    Ok(integrate(phi_integrand, -50.0, u, quad)?.value)
}

/// Riesz formula for the Green function of the half-line,
/// `G(x, y) = (1/π) log((√x + √y) / |√x - √y|)`.
pub fn green_halfline(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::domain("green_halfline needs x, y > 0"));
    }
    if x == y {
        return Err(Error::Singular("the Green function is infinite on the diagonal".into()));
    }
    let (a, b) = (sqrt(x), sqrt(y));
    let q = a.min(b) / a.max(b);
    // log((1+q)/(1-q)) = log1p(2q/(1-q))
    Ok(ln1p(2.0 * q / (1.0 - q)) / PI)
}

#[derive(Debug, Clone, Copy)]
struct Node {
    s: f64,
    /// `h s γ(s)`; trapezoid weight for `∫ γ(s) f(s) ds` in `v = log s`.
    w: f64,
}

/// Tables and oracles for the killed Cauchy process on `(0, ∞)`.
#[derive(Debug, Clone)]
pub struct CauchyHalfLine {
    quad: QuadratureSpec,
    phi: HermiteTable,
    nodes: Vec<Node>,
    kernel_from: usize,
    ruin: ruin::RuinTable,
}

impl CauchyHalfLine {
    /// Build the `Φ` table, the Laplace nodes and the ruin-time CDF.
    pub fn new(quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        let phi = build_phi_table(&quad)?;
        let mut oracle = CauchyHalfLine {
            quad,
            phi,
            nodes: Vec::new(),
            kernel_from: 0,
            ruin: ruin::RuinTable::placeholder(),
        };
        oracle.build_nodes()?;
        oracle.ruin = ruin::RuinTable::build(&oracle)?;
        Ok(oracle)
    }

    pub fn quad(&self) -> &QuadratureSpec {
        &self.quad
    }

    fn build_nodes(&mut self) -> Result<()> {
        let n = ((LAPLACE_V_HI - LAPLACE_V_LO) / LAPLACE_STEP) as usize + 1;
        self.nodes = (0..n)
            .map(|k| {
                let s = exp(LAPLACE_V_LO + k as f64 * LAPLACE_STEP);
                Node {
                    s,
                    w: LAPLACE_STEP * s * self.laplace_weight(s),
                }
            })
            .collect();
        self.kernel_from = self.nodes.iter().position(|n| n.w > KERNEL_WEIGHT_FLOOR).unwrap_or(0);
        // r(0) = ∫γ = sin(π/8).
        let total: f64 = self.nodes.iter().map(|n| n.w).sum();
        if (total - sin(FRAC_PI_8)).abs() > 1e-12 {
            return Err(Error::Table(alloc::format!(
                "Laplace nodes integrate γ to {total:.15}, expected sin(π/8)"
            )));
        }
        Ok(())
    }

    #[inline]
    fn phi_unchecked(&self, t: f64) -> f64 {
        if t <= 0.0 || t == f64::INFINITY {
            0.0
        } else if t < PHI_T_LO {
            phi_series(t)
        } else if t > PHI_T_HI {
            phi_series(1.0 / t)
        } else {
            self.phi.eval(ln(t))
        }
    }

    /// Tabulated `Φ(t)`.
    pub fn log_weight_integral(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain("log_weight_integral needs t >= 0"));
        }
        Ok(self.phi_unchecked(t))
    }

    /// `ξ(t) = (1/π) t (1+t²)^{-3/4} e^{-Φ(t)/π}`; the ruin time from `x`
    /// has density `t⁻¹ ξ(t/x)`.
    pub fn xi(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain("xi needs t > 0"));
        }
        Ok(self.xi_unchecked(t))
    }

    #[inline]
    pub(crate) fn xi_unchecked(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 0.0;
        }
        t * self.xi_over_t(t)
    }

    /// `ξ(t)/t`, finite at `t = 0`.
    #[inline]
    fn xi_over_t(&self, t: f64) -> f64 {
        let damp = exp(-self.phi_unchecked(t) / PI) / PI;
        if t <= 1.0 {
            powf(1.0 + t * t, -0.75) * damp
        } else {
            let inv = 1.0 / t;
            powf(inv, 1.5) * powf(1.0 + inv * inv, -0.75) * damp
        }
    }

    /// Density of the ruin time from `x` at time `t`.
    pub fn ruin_density(&self, x: f64, t: f64) -> Result<f64> {
        if !(x > 0.0 && t > 0.0) {
            return Err(Error::domain("ruin_density needs x, t > 0"));
        }
        Ok(self.xi_unchecked(t / x) / t)
    }

    /// `P_x(τ > t) = ∫_{t/x}^∞ ξ(u)/u du`.
    pub fn survival(&self, x: f64, t: f64) -> Result<f64> {
        if !(x > 0.0 && t > 0.0) {
            return Err(Error::domain("survival needs x, t > 0"));
        }
        let a = t / x;
        let f = |u: f64| self.xi_over_t(u);
        let p = if a <= 1.0 {
            1.0 - integrate(f, 0.0, a, &self.quad)?.value
        } else {
            integrate_upper_tail(f, a, &self.quad)?.value
        };
        Ok(p.clamp(0.0, 1.0))
    }

    /// `γ(s) = (√2/(2π)) s (1+s²)^{-5/4} e^{Φ(s)/π}`, so that `r` is the
    /// Laplace transform of `γ`.
    pub fn laplace_weight(&self, s: f64) -> f64 {
        if !(s > 0.0) || s == f64::INFINITY {
            return 0.0;
        }
        let c = SQRT_2 / (2.0 * PI) * exp(self.phi_unchecked(s) / PI);
        if s <= 1.0 {
            c * s * powf(1.0 + s * s, -1.25)
        } else {
            let inv = 1.0 / s;
            c * powf(inv, 1.5) * powf(1.0 + inv * inv, -1.25)
        }
    }

    /// `r(x) = ∫_0^∞ γ(s) e^{-sx} ds` by adaptive quadrature.
    pub fn r_function(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("r_function needs x >= 0"));
        }
        let mut breaks = alloc::vec![1.0];
        if x > 1.0 {
            breaks.push(1.0 / x);
        }
        Ok(integrate_half_line(|s| self.laplace_weight(s) * exp(-s * x), &breaks, &self.quad)?.value)
    }

    /// `r(x)` from the trapezoid nodes; agrees with [`Self::r_function`] to
    /// about `1e-13` and is much cheaper.
    pub fn r_nodes(&self, x: f64) -> f64 {
        self.nodes.iter().map(|n| n.w * exp(-n.s * x)).sum()
    }

    /// `ψ(x) = sin(x + π/8) - r(x)`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        Ok(sin(x + FRAC_PI_8) - self.r_function(x)?)
    }

    pub fn psi_nodes(&self, x: f64) -> f64 {
        sin(x + FRAC_PI_8) - self.r_nodes(x)
    }

    /// Yaglom density `n₁(y) = √(2/π) ∫_0^∞ λ^{1/2} ψ(λy) e^{-λ} dλ`,
    /// evaluated in closed form through the Laplace representation of `r`.
    pub fn yaglom_density(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::domain("yaglom_density needs y > 0"));
        }
        let lead = powf(1.0 + y * y, -0.75) * sin(FRAC_PI_8 + 1.5 * atan(y));
        let corr: f64 = self.nodes.iter().map(|n| n.w * powf(1.0 + n.s * y, -1.5)).sum();
        Ok(((lead - corr) / SQRT_2).max(0.0))
    }

    /// `n₁(y)` by damped quadrature over `λ ∈ [0, lambda_max]` with `ψ`
    /// from [`Self::psi`]. Slow; kept as an independent check.
    pub fn yaglom_density_spectral(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::domain("yaglom_density needs y > 0"));
        }
        let inner = self.quad.loosened(10.0);
        let mut failure = None;
        let v = integrate_from_zero(
            |lam| match self.r_inner(lam * y, &inner) {
                Ok(r) => sqrt(lam) * (sin(lam * y + FRAC_PI_8) - r) * exp(-lam),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            self.quad.lambda_max,
            &self.quad,
        )
        .map_err(|e| e.in_layer("yaglom density, spectral integral"))?;
        if let Some(e) = failure {
            return Err(e.in_layer("yaglom density, r(λy)"));
        }
        Ok(sqrt(2.0 / PI) * v.value)
    }

    fn r_inner(&self, x: f64, quad: &QuadratureSpec) -> Result<f64> {
        let mut breaks = alloc::vec![1.0];
        if x > 1.0 {
            breaks.push(1.0 / x);
        }
        Ok(integrate_half_line(|s| self.laplace_weight(s) * exp(-s * x), &breaks, quad)?.value)
    }

    /// `∫_0^y n₁`, in closed form.
    pub fn yaglom_cdf(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::domain("yaglom_cdf needs y >= 0"));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y == f64::INFINITY {
            return Ok(1.0);
        }
        let lead = cos(FRAC_PI_8) - powf(1.0 + y * y, -0.25) * cos(FRAC_PI_8 + 0.5 * atan(y));
        // 1 - (1+z)^{-1/2} = -expm1(-log1p(z)/2)
        let corr: f64 = self
            .nodes
            .iter()
            .map(|n| n.w / n.s * -libm::expm1(-0.5 * ln1p(n.s * y)))
            .sum();
        Ok((SQRT_2 * (lead - corr)).clamp(0.0, 1.0))
    }

    /// Entrance law `n_t(y) = t^{-3/2} n₁(y/t)`.
    pub fn entrance_density(&self, t: f64, y: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain("entrance density needs t > 0"));
        }
        Ok(powf(t, -1.5) * self.yaglom_density(y / t)?)
    }

    /// `p₁^Γ(x,y) / (P_x(τ>1) P_y(τ>1) p₁(x-y))`.
    pub fn factorization_ratio(&self, x: f64, y: f64) -> Result<f64> {
        let p = self.heat_kernel(1.0, x, y)?;
        let free = 1.0 / (PI * (1.0 + (x - y) * (x - y)));
        Ok(p / (self.survival(x, 1.0)? * self.survival(y, 1.0)? * free))
    }
}

fn build_phi_table(quad: &QuadratureSpec) -> Result<HermiteTable> {
    let u0 = ln(PHI_T_LO);
    let h = (ln(PHI_T_HI) - u0) / (PHI_NODES - 1) as f64;
    let mut y = Vec::with_capacity(PHI_NODES);
    let mut dy = Vec::with_capacity(PHI_NODES);
    let mut acc = phi_series(PHI_T_LO);
    for k in 0..PHI_NODES {
        let u = u0 + k as f64 * h;
        if k > 0 {
            acc += integrate(phi_integrand, u - h, u, quad)?.value;
        }
        y.push(acc);
        dy.push(phi_integrand(u));
    }
    let table = HermiteTable::new(u0, h, y, dy);
    // Φ(t) = Φ(1/t), so the top end must meet the small-t series.
    let end = phi_series(1.0 / PHI_T_HI);
    if (table.last() - end).abs() > 1e-10 {
        return Err(Error::Table(alloc::format!(
            "Φ table drifted to {:.3e} at its upper end",
            table.last() - end
        )));
    }
    for i in 0..16 {
        let u = u0 + (i as f64 + 0.37) * (table.hi() - table.lo()) / 16.0;
        let t = exp(u);
        let direct = log_weight_integral(t, quad)?;
        let err = (table.eval(u) - direct).abs();
        if err > quad.rel_tol * direct.abs().max(1e-3) {
            return Err(Error::Table(alloc::format!(
                "Φ interpolation error {err:.3e} at t = {t:.4e}"
            )));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219;

    fn oracle() -> CauchyHalfLine {
        CauchyHalfLine::new(QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn weight_integral_values() {
        let q = QuadratureSpec::default();
        assert_eq!(log_weight_integral(0.0, &q).unwrap(), 0.0);
        assert!((log_weight_integral(1.0, &q).unwrap() + CATALAN).abs() < 1e-12);
        assert!(log_weight_integral(1e8, &q).unwrap().abs() < 1e-6);
        assert!(log_weight_integral(-1.0, &q).is_err());
        let o = oracle();
        for &t in &[1e-9, 1e-6, 0.01, 0.5, 1.0, 3.0, 77.0, 1e5, 1e9] {
            let a = o.log_weight_integral(t).unwrap();
            let b = log_weight_integral(t, &q).unwrap();
            assert!((a - b).abs() < 1e-11, "t={t}: {a} vs {b}");
            // Φ(t) = Φ(1/t)
            let c = o.log_weight_integral(1.0 / t).unwrap();
            assert!((a - c).abs() < 1e-11);
        }
    }

    #[test]
    fn laplace_nodes_match_quadrature() {
        let o = oracle();
        for &x in &[0.0, 0.01, 0.3, 1.0, 7.0, 50.0] {
            let a = o.r_function(x).unwrap();
            let b = o.r_nodes(x);
            assert!((a - b).abs() < 1e-10, "x={x}: {a} vs {b}");
        }
        assert!((o.r_function(0.0).unwrap() - sin(FRAC_PI_8)).abs() < 1e-9);
    }

    #[test]
    fn green_values() {
        assert!(green_halfline(1.0, 1.0).is_err());
        assert!(green_halfline(0.0, 1.0).is_err());
        let g = green_halfline(1.0, 4.0).unwrap();
        assert!((g - ln(3.0) / PI).abs() < 1e-15);
        assert_eq!(g, green_halfline(4.0, 1.0).unwrap());
    }

    #[test]
    fn yaglom_cdf_matches_density() {
        let o = oracle();
        let q = QuadratureSpec::default();
        for &y in &[0.1, 1.0, 5.0, 40.0] {
            let direct = integrate_from_zero(|u| o.yaglom_density(u).unwrap(), y, &q).unwrap().value;
            assert!((direct - o.yaglom_cdf(y).unwrap()).abs() < 1e-9, "y={y}");
        }
        assert!((o.yaglom_cdf(1e12).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn yaglom_density_spectral_route() {
        let o = oracle();
        for &y in &[0.2, 1.0, 3.0] {
            let a = o.yaglom_density(y).unwrap();
            let b = o.yaglom_density_spectral(y).unwrap();
            assert!((a - b).abs() < 1e-7, "y={y}: {a} vs {b}");
        }
    }

    #[test]
    fn ruin_density_integrates_to_survival_drop() {
        let o = oracle();
        let q = QuadratureSpec::default();
        let drop = integrate(|t| o.ruin_density(2.0, t).unwrap(), 0.5, 3.0, &q).unwrap().value;
        let expect = o.survival(2.0, 0.5).unwrap() - o.survival(2.0, 3.0).unwrap();
        assert!((drop - expect).abs() < 1e-9);
    }
}
