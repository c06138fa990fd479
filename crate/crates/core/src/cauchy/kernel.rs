//! Killed heat kernel `p_t^Γ(x, y) = (2/π) ∫_0^∞ ψ(λx) ψ(λy) e^{-λt} dλ`.

use super::CauchyHalfLine;
use crate::error::{Error, Result};
use crate::math::{atan, cos, exp, ln1p, sin, FRAC_PI_8, PI, SQRT_2};
use crate::quadrature::integrate;

fn check(t: f64, x: f64, y: f64) -> Result<()> {
    if !(t > 0.0 && x > 0.0 && y > 0.0) || !(t.is_finite() && x.is_finite() && y.is_finite()) {
        return Err(Error::domain("heat kernel needs t, x, y > 0"));
    }
    Ok(())
}

impl CauchyHalfLine {
    /// `p_t^Γ(x, y)`.
    ///
    /// Expanding `ψ = sin(· + π/8) - r` with `r` the Laplace transform of
    /// `γ`, every `λ`-integral is elementary:
    ///
    /// `p = (2/π) [A - B(x,y) - B(y,x) + C]` with
    /// `A = ∫ sin(λx+π/8) sin(λy+π/8) e^{-λt} dλ`,
    /// `B(x,y) = ∫γ(s) (c sin(π/8) + x cos(π/8)) / (c² + x²) ds`, `c = t + sy`,
    /// `C = ∫∫ γ(s)γ(u) / (t + sx + uy) ds du`.
    pub fn heat_kernel(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        check(t, x, y)?;
        Ok(self.heat_kernel_unchecked(t, x, y))
    }

    pub(crate) fn heat_kernel_unchecked(&self, t: f64, x: f64, y: f64) -> f64 {
        let (sp, cp) = (sin(FRAC_PI_8), cos(FRAC_PI_8));
        let d = x - y;
        let s = x + y;
        let tt = t * t;
        let a = 0.5 * (t / (tt + d * d) - (t - s) / (SQRT_2 * (tt + s * s)));
        let nodes = &self.nodes[self.kernel_from..];
        let cross = |x: f64, y: f64| -> f64 {
            nodes
                .iter()
                .map(|n| {
                    let c = t + n.s * y;
                    n.w * (c * sp + x * cp) / (c * c + x * x)
                })
                .sum()
        };
        let mut double = 0.0;
        for nk in nodes {
            let ck = t + nk.s * x;
            let mut inner = 0.0;
            for nj in nodes {
                inner += nj.w / (ck + nj.s * y);
            }
            double += nk.w * inner;
        }
        (2.0 / PI * (a - cross(x, y) - cross(y, x) + double)).max(0.0)
    }

    /// `∫_a^b p_t^Γ(x, y) dy` for `0 ≤ a < b < ∞`, integrating each term
    /// of the node expansion in closed form.
    pub fn kernel_mass(&self, t: f64, x: f64, a: f64, b: f64) -> Result<f64> {
        check(t, x, 1.0)?;
        if !(a >= 0.0 && b > a && b.is_finite()) {
            return Err(Error::domain("kernel_mass needs 0 <= a < b < inf"));
        }
        Ok(self.kernel_mass_unchecked(t, x, a, b))
    }

    pub(crate) fn kernel_mass_unchecked(&self, t: f64, x: f64, a: f64, b: f64) -> f64 {
        let (sp, cp) = (sin(FRAC_PI_8), cos(FRAC_PI_8));
        let len = b - a;
        let tt = t * t;
        let near = atan((b - x) / t) - atan((a - x) / t);
        let (ua, ub) = (x + a, x + b);
        let far = atan(ub / t) - atan(ua / t) - 0.5 * ln1p((ub * ub - ua * ua) / (tt + ua * ua));
        let lead = 0.5 * (near - far / SQRT_2);
        let nodes = &self.nodes[self.kernel_from..];
        let mut cross = 0.0;
        for n in nodes {
            // B(x, y) with c = t + s y running over [c_a, c_b].
            let (ca, cb) = (t + n.s * a, t + n.s * b);
            let log_part = ln1p(n.s * len * (ca + cb) / (ca * ca + x * x)) / n.s;
            let atan_part = atan(n.s * x * len / (x * x + ca * cb)) / n.s;
            cross += n.w * (0.5 * sp * log_part + cp * atan_part);
            // B(y, x) with c = t + s x fixed.
            let c = t + n.s * x;
            let atan_part = atan(c * len / (c * c + a * b));
            let log_part = ln1p((b * b - a * a) / (c * c + a * a));
            cross += n.w * (sp * atan_part + 0.5 * cp * log_part);
        }
        let mut double = 0.0;
        for nk in nodes {
            let ck = t + nk.s * x;
            let mut inner = 0.0;
            for nj in nodes {
                inner += nj.w * ln1p(nj.s * len / (ck + nj.s * a)) / nj.s;
            }
            double += nk.w * inner;
        }
        (2.0 / PI * (lead - cross + double)).max(0.0)
    }

    /// `p_t^Γ(x, y)` by direct damped quadrature of the spectral integral,
    /// truncated at `λ = lambda_max / t`.
    pub fn heat_kernel_spectral(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        check(t, x, y)?;
        let v = integrate(
            |lam| self.psi_nodes(lam * x) * self.psi_nodes(lam * y) * exp(-lam * t),
            0.0,
            self.quad.lambda_max / t,
            &self.quad,
        )
        .map_err(|e| e.in_layer("heat kernel, spectral integral"))?;
        Ok(2.0 / PI * v.value)
    }
}
