//! Cubic Hermite tables on a uniform grid with exact node derivatives.

use alloc::vec::Vec;

use crate::math::floor;

#[derive(Debug, Clone)]
pub(crate) struct HermiteTable {
    u0: f64,
    h: f64,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl HermiteTable {
    pub(crate) fn new(u0: f64, h: f64, y: Vec<f64>, dy: Vec<f64>) -> Self {
        debug_assert_eq!(y.len(), dy.len());
        debug_assert!(y.len() >= 2);
        HermiteTable { u0, h, y, dy }
    }

    pub(crate) fn lo(&self) -> f64 {
        self.u0
    }

    pub(crate) fn hi(&self) -> f64 {
        self.u0 + self.h * (self.y.len() - 1) as f64
    }

    pub(crate) fn first(&self) -> f64 {
        self.y[0]
    }

    pub(crate) fn last(&self) -> f64 {
        self.y[self.y.len() - 1]
    }

    #[inline]
    fn cell(&self, k: usize, tau: f64) -> f64 {
        let t2 = tau * tau;
        let t3 = t2 * tau;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + tau;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * self.h * self.dy[k] + h01 * self.y[k + 1] + h11 * self.h * self.dy[k + 1]
    }

    /// Interpolated value at `u`, clamped to the table range.
    #[inline]
    pub(crate) fn eval(&self, u: f64) -> f64 {
        let n = self.y.len();
        let pos = ((u - self.u0) / self.h).clamp(0.0, (n - 1) as f64);
        let k = (floor(pos) as usize).min(n - 2);
        self.cell(k, pos - k as f64)
    }

    /// Solve `eval(u) = target` for a table of decreasing values; `target`
    /// must lie between `last()` and `first()`.
    pub(crate) fn invert_decreasing(&self, target: f64) -> f64 {
        // Largest k with y[k] >= target.
        let (mut lo, mut hi) = (0usize, self.y.len() - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.y[mid] >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..52 {
            let m = 0.5 * (a + b);
            if self.cell(lo, m) >= target {
                a = m;
            } else {
                b = m;
            }
        }
        self.u0 + self.h * (lo as f64 + 0.5 * (a + b))
    }
}
