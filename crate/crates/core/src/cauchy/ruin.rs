//! Tabulated ruin-time law and its exact inverse-CDF sampler.

use alloc::vec::Vec;

use super::table::HermiteTable;
use super::CauchyHalfLine;
use crate::error::{Error, Result};
use crate::math::{exp, ln};
use crate::quadrature::{integrate, integrate_upper_tail};
use crate::rng::RngStream;

const V_LO: f64 = 1e-8;
const V_HI: f64 = 1e12;
const NODES: usize = 3001;

/// `log S(v)` on a uniform grid in `w = log v`, where
/// `S(v) = P_1(τ > v) = ∫_v^∞ ξ(u)/u du`.
#[derive(Debug, Clone)]
pub(crate) struct RuinTable {
    log_s: HermiteTable,
    /// `1 - S(V_LO)`, integrated directly to avoid cancellation.
    head_mass: f64,
}

impl RuinTable {
    pub(crate) fn placeholder() -> Self {
        RuinTable {
            log_s: HermiteTable::new(0.0, 1.0, alloc::vec![0.0, 0.0], alloc::vec![0.0, 0.0]),
            head_mass: 0.0,
        }
    }

    pub(crate) fn build(o: &CauchyHalfLine) -> Result<Self> {
        let quad = &o.quad;
        let w0 = ln(V_LO);
        let h = (ln(V_HI) - w0) / (NODES - 1) as f64;
        let layer = |e: Error| e.in_layer("ruin CDF table");
        let mut s = alloc::vec![0.0; NODES];
        s[NODES - 1] = integrate_upper_tail(|u| o.xi_over_t(u), V_HI, quad).map_err(layer)?.value;
        // In w = log u, ξ(u)/u du = ξ(e^w) dw.
        for k in (0..NODES - 1).rev() {
            let lo = w0 + k as f64 * h;
            s[k] = s[k + 1] + integrate(|w| o.xi_unchecked(exp(w)), lo, lo + h, quad).map_err(layer)?.value;
        }
        let head_mass = integrate(|u| o.xi_over_t(u), 0.0, V_LO, quad).map_err(layer)?.value;
        let total = s[0] + head_mass;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Table(alloc::format!(
                "ruin CDF does not reach 1 (total mass {total:.12})"
            )));
        }
        let mut y = Vec::with_capacity(NODES);
        let mut dy = Vec::with_capacity(NODES);
        for (k, &sk) in s.iter().enumerate() {
            let v = exp(w0 + k as f64 * h);
            y.push(ln(sk));
            dy.push(-o.xi_unchecked(v) / sk);
        }
        Ok(RuinTable {
            log_s: HermiteTable::new(w0, h, y, dy),
            head_mass,
        })
    }

    /// `v` with `S(v) = u`, for `u ∈ (0, 1)`.
    pub(crate) fn invert(&self, u: f64) -> f64 {
        let target = ln(u);
        if target >= self.log_s.first() {
            // Below V_LO the density is flat at 1/π to relative O(V_LO).
            V_LO * (1.0 - u) / self.head_mass
        } else if target <= self.log_s.last() {
            // Above V_HI, S(v) ∝ v^{-1/2}.
            let r = exp(self.log_s.last()) / u;
            V_HI * r * r
        } else {
            exp(self.log_s.invert_decreasing(target))
        }
    }
}

impl CauchyHalfLine {
    /// Exact draw of the ruin time `τ` started from `x > 0`.
    pub fn sample_ruin_time(&self, x: f64, rng: &mut RngStream) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::domain("ruin time needs a start x > 0"));
        }
        Ok(x * self.ruin.invert(rng.open01()))
    }

    /// Inverse of `v ↦ P_1(τ > v)`.
    pub(crate) fn ruin_invert(&self, u: f64) -> f64 {
        self.ruin.invert(u)
    }

    /// `P_1(τ > v)` read off the sampler's table.
    pub fn ruin_survival_table(&self, v: f64) -> f64 {
        let w = ln(v);
        if v <= V_LO {
            1.0 - self.ruin.head_mass * v / V_LO
        } else if v >= V_HI {
            exp(self.ruin.log_s.last()) * crate::math::sqrt(V_HI / v)
        } else {
            exp(self.ruin.log_s.eval(w))
        }
    }
}
