//! The constants `C₀`, `C₁` and the Kelvin integral by nested quadrature.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{green_halfline, CauchyHalfLine};
use crate::error::{Error, Result};
use crate::math::{powf, sqrt, PI};
use crate::quadrature::{integrate_half_line, Integral};

/// Output of [`CauchyHalfLine::constants_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// `lim_{x→0} G(x, 1) / √x`.
    pub c0: f64,
    /// `C₀ ∫∫ K(y) p₁^Γ(y,z) κ(z) dz dy` with `K(y) = y^{-1/2}`.
    pub c1: f64,
    pub c1_err: f64,
    /// `∫_0^∞ n_t(1) dt`.
    pub k_integral: f64,
    pub k_integral_err: f64,
}

fn positive_breaks(y: f64) -> Vec<f64> {
    let mut b: Vec<f64> = [0.5 * y, y - 1.0, y, y + 1.0, 2.0 * y]
        .into_iter()
        .filter(|v| *v > 0.0)
        .collect();
    b.push(1.0);
    b
}

impl CauchyHalfLine {
    /// `∫_0^∞ p₁^Γ(y, z) κ(z) dz` with `κ(z) = 1/(πz)`: the ruin-time
    /// density at time 1, which also equals `ξ(1/y)`.
    pub fn escape_density(&self, y: f64) -> Result<Integral> {
        if !(y > 0.0) {
            return Err(Error::domain("escape_density needs y > 0"));
        }
        integrate_half_line(
            |z| {
                if z <= 0.0 {
                    return 0.0;
                }
                self.heat_kernel_unchecked(1.0, y, z) / (PI * z)
            },
            &positive_breaks(y),
            &self.quad.loosened(10.0),
        )
    }

    /// Nested evaluation of `∫_0^∞ w(y) ∫_0^∞ p₁^Γ(y,z) κ(z) dz dy`.
    fn outer_escape<W: Fn(f64) -> f64>(&self, weight: W, breaks: &[f64], outer: &'static str) -> Result<Integral> {
        let mut failure = None;
        let r = integrate_half_line(
            |y| {
                if y <= 0.0 {
                    return 0.0;
                }
                let w = weight(y);
                if w == 0.0 {
                    return 0.0;
                }
                match self.escape_density(y) {
                    Ok(q) => w * q.value,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            breaks,
            &self.quad.loosened(100.0),
        )
        .map_err(|e| e.in_layer(outer))?;
        if let Some(e) = failure {
            return Err(e.in_layer("inner escape integral over z"));
        }
        Ok(r)
    }

    /// `C₀`, `C₁` and `∫ n_t(1) dt`.
    pub fn constants_check(&self) -> Result<Constants> {
        let x = 1e-16;
        let c0 = green_halfline(x, 1.0)? / sqrt(x);
        let c1 = self.outer_escape(|y| powf(y, -0.5), &[1.0], "outer integral over y of C1")?;
        let k = integrate_half_line(
            |t| {
                if t <= 0.0 {
                    return 0.0;
                }
                powf(t, -1.5) * self.yaglom_density(1.0 / t).unwrap_or(0.0)
            },
            &[1.0],
            &self.quad,
        )
        .map_err(|e| e.in_layer("time integral of the entrance law"))?;
        Ok(Constants {
            c0,
            c1: c0 * c1.value,
            c1_err: c0 * c1.abs_err,
            k_integral: k.value,
            k_integral_err: k.abs_err,
        })
    }

    /// `(G_Γ P₁^Γ κ_Γ)(x) = ∫ G(x,w) ∫ p₁^Γ(w,z) κ(z) dz dw`, which equals
    /// `P_x(τ > 1)`.
    pub fn survival_representation(&self, x: f64) -> Result<Integral> {
        if !(x > 0.0) {
            return Err(Error::domain("survival_representation needs x > 0"));
        }
        self.outer_escape(
            |w| if w == x { 0.0 } else { green_halfline(x, w).unwrap_or(0.0) },
            &[0.5 * x, x, 2.0 * x],
            "outer Green integral",
        )
    }
}
