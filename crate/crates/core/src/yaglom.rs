//! Monte Carlo estimators for the Yaglom limit, quasi-stationarity and the
//! entrance law.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cauchy::CauchyHalfLine;
use crate::cone::{ConeSpec, HomogeneityExponent};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::exit::{run_paths, ExitCounts, InitialLaw, PathAccumulator, PathParams, Snapshots};
use crate::math::{cos, floor, gamma, ln, norm, powf, sqrt, PI};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::rng::RngStream;
use crate::stable::{Point, StableSpec};
use crate::stats::{binomial_stderr, ks_distance};

/// Histogram layout on the cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Binning {
    /// `n` equal bins on `[lo, hi)` of the first coordinate (`d = 1`).
    Uniform { lo: f64, hi: f64, n: usize },
    /// Radial × angular bins for `d ≥ 2`. Radial edges are
    /// `0, r_min, …, r_max` with geometric spacing after `r_min`; angular
    /// bins split the angle to `e_d` over `[0, π]` evenly.
    Polar {
        r_min: f64,
        r_max: f64,
        n_radial: usize,
        n_angular: usize,
    },
}

impl Binning {
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let b = Binning::Uniform { lo, hi, n };
        b.validate()?;
        Ok(b)
    }

    pub fn polar(r_min: f64, r_max: f64, n_radial: usize, n_angular: usize) -> Result<Self> {
        let b = Binning::Polar {
            r_min,
            r_max,
            n_radial,
            n_angular,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Binning::Uniform { lo, hi, n } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || n == 0 {
                    return Err(Error::invalid("bins", "need lo < hi and at least one bin"));
                }
            }
            Binning::Polar {
                r_min,
                r_max,
                n_radial,
                n_angular,
            } => {
                if !(r_min > 0.0 && r_max > r_min) || !r_max.is_finite() || n_radial < 2 || n_angular == 0 {
                    return Err(Error::invalid(
                        "bins",
                        "need 0 < r_min < r_max, two radial and one angular bin",
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Binning::Uniform { .. } if dim != 1 => Err(Error::invalid("bins", "uniform bins are for d = 1")),
            Binning::Polar { .. } if dim < 2 => Err(Error::invalid("bins", "polar bins need d >= 2")),
            _ => Ok(()),
        }
    }

    pub fn n_bins(&self) -> usize {
        match *self {
            Binning::Uniform { n, .. } => n,
            Binning::Polar {
                n_radial, n_angular, ..
            } => n_radial * n_angular,
        }
    }

    /// Same layout with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Binning {
        match *self {
            Binning::Uniform { lo, hi, n } => Binning::Uniform {
                lo: lo * factor,
                hi: hi * factor,
                n,
            },
            Binning::Polar {
                r_min,
                r_max,
                n_radial,
                n_angular,
            } => Binning::Polar {
                r_min: r_min * factor,
                r_max: r_max * factor,
                n_radial,
                n_angular,
            },
        }
    }

    /// Edges of the uniform layout; `None` for polar bins.
    pub fn edges(&self) -> Option<Vec<f64>> {
        match *self {
            Binning::Uniform { lo, hi, n } => Some((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()),
            Binning::Polar { .. } => None,
        }
    }

    fn radial_edge(&self, i: usize) -> f64 {
        match *self {
            Binning::Polar {
                r_min, r_max, n_radial, ..
            } => {
                if i == 0 {
                    0.0
                } else {
                    r_min * powf(r_max / r_min, (i - 1) as f64 / (n_radial - 1) as f64)
                }
            }
            Binning::Uniform { .. } => unreachable!(),
        }
    }

    /// Extent of bin `i`: the range of the first coordinate (uniform) or of
    /// the radius (polar), plus the angle-to-axis range for polar bins.
    pub fn bin_extent(&self, i: usize) -> ((f64, f64), Option<(f64, f64)>) {
        match *self {
            Binning::Uniform { lo, hi, n } => {
                let w = (hi - lo) / n as f64;
                ((lo + w * i as f64, if i + 1 == n { hi } else { lo + w * (i + 1) as f64 }), None)
            }
            Binning::Polar { n_angular, .. } => {
                let (ri, ai) = (i / n_angular, i % n_angular);
                let a = PI / n_angular as f64;
                ((self.radial_edge(ri), self.radial_edge(ri + 1)), Some((a * ai as f64, a * (ai + 1) as f64)))
            }
        }
    }

    /// Bin index of `y`, or `None` when `y` falls outside the window.
    pub fn locate(&self, y: &[f64]) -> Option<usize> {
        match *self {
            Binning::Uniform { lo, hi, n } => {
                let v = y[0];
                if v < lo || v >= hi {
                    return None;
                }
                Some(((floor((v - lo) / (hi - lo) * n as f64)) as usize).min(n - 1))
            }
            Binning::Polar {
                r_min,
                r_max,
                n_radial,
                n_angular,
            } => {
                let r = norm(y);
                if r >= r_max {
                    return None;
                }
                let ri = if r < r_min {
                    0
                } else {
                    let f = ln(r / r_min) / ln(r_max / r_min) * (n_radial - 1) as f64;
                    1 + (floor(f) as usize).min(n_radial - 2)
                };
                let c = if r > 0.0 { (y[y.len() - 1] / r).clamp(-1.0, 1.0) } else { 1.0 };
                let theta = libm::acos(c);
                let ai = ((floor(theta / PI * n_angular as f64)) as usize).min(n_angular - 1);
                Some(ri * n_angular + ai)
            }
        }
    }

    /// Lebesgue measure of bin `i` in ℝ^dim.
    pub fn volume(&self, i: usize, dim: usize) -> f64 {
        match *self {
            Binning::Uniform { lo, hi, n } => (hi - lo) / n as f64,
            Binning::Polar { n_angular, .. } => {
                let (ri, ai) = (i / n_angular, i % n_angular);
                let (r0, r1) = (self.radial_edge(ri), self.radial_edge(ri + 1));
                let d = dim as f64;
                let radial = (powf(r1, d) - powf(r0, d)) / d;
                let (t0, t1) = (PI * ai as f64 / n_angular as f64, PI * (ai + 1) as f64 / n_angular as f64);
                // |S^{d-2}| ∫ sin^{d-2} θ dθ
                let band = match dim {
                    2 => 2.0 * (t1 - t0),
                    3 => 2.0 * PI * (cos(t0) - cos(t1)),
                    _ => {
                        let s = 2.0 * powf(PI, 0.5 * (d - 1.0)) / gamma(0.5 * (d - 1.0));
                        let q = QuadratureSpec::default();
                        s * integrate(|t| powf(libm::sin(t), d - 2.0), t0, t1, &q)
                            .map(|r| r.value)
                            .unwrap_or(f64::NAN)
                    }
                };
                radial * band
            }
        }
    }

    /// Uniform draw from bin `i` (uniform in radius and angle for polar
    /// bins, which is what "bin-uniform" means here).
    fn sample_in_bin(&self, i: usize, rng: &mut RngStream, out: &mut [f64]) {
        match *self {
            Binning::Uniform { lo, hi, n } => {
                let w = (hi - lo) / n as f64;
                out[0] = lo + w * (i as f64 + rng.open01());
            }
            Binning::Polar { n_angular, .. } => {
                let (ri, ai) = (i / n_angular, i % n_angular);
                let (r0, r1) = (self.radial_edge(ri), self.radial_edge(ri + 1));
                let r = r0 + (r1 - r0) * rng.open01();
                let theta = PI * (ai as f64 + rng.open01()) / n_angular as f64;
                direction_at_angle(theta, rng, out);
                for v in out.iter_mut() {
                    *v *= r;
                }
            }
        }
    }

    fn window_radius(&self) -> f64 {
        match *self {
            Binning::Uniform { hi, .. } => hi,
            Binning::Polar { r_max, .. } => r_max,
        }
    }
}

/// Unit vector at angle `theta` from `e_d` with a uniformly random
/// direction in the orthogonal complement.
fn direction_at_angle(theta: f64, rng: &mut RngStream, out: &mut [f64]) {
    let d = out.len();
    let mut perp = 0.0;
    for v in out[..d - 1].iter_mut() {
        let g: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
        *v = g;
        perp += g * g;
    }
    let s = libm::sin(theta) / sqrt(perp);
    for v in out[..d - 1].iter_mut() {
        *v *= s;
    }
    out[d - 1] = cos(theta);
}

/// Normalized histogram of an estimated law on the cone, plus its
/// out-of-window ("overflow") mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub binning: Binning,
    pub dim: usize,
    pub alpha: f64,
    pub masses: Vec<f64>,
    pub stderr: Vec<f64>,
    pub overflow: f64,
    pub overflow_stderr: f64,
    /// Number of contributing (surviving) paths.
    pub total: u64,
    pub n_paths: u64,
    pub survival: f64,
    pub survival_stderr: f64,
    pub warnings: Vec<String>,
    /// Raw samples, flattened, in path order.
    #[serde(skip)]
    pub samples: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

/// Survivors fewer than this trigger a warning.
pub const MIN_SURVIVORS: u64 = 1000;

impl EmpiricalMeasure {
    /// Bin flattened `samples` (each of length `dim`).
    pub fn from_samples(binning: Binning, dim: usize, alpha: f64, samples: Vec<f64>, n_paths: u64) -> Result<Self> {
        binning.validate()?;
        binning.check_dim(dim)?;
        let total = (samples.len() / dim) as u64;
        if total == 0 {
            return Err(Error::InsufficientData(
                "no surviving paths; increase n_paths or start further inside the cone".into(),
            ));
        }
        let mut counts = vec![0u64; binning.n_bins()];
        let mut over = 0u64;
        for y in samples.chunks_exact(dim) {
            match binning.locate(y) {
                Some(i) => counts[i] += 1,
                None => over += 1,
            }
        }
        let n = total as f64;
        let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let stderr = masses.iter().map(|&m| binomial_stderr(m, total)).collect();
        let overflow = over as f64 / n;
        let survival = n / n_paths as f64;
        let mut warnings = Vec::new();
        if total < MIN_SURVIVORS {
            warnings.push(format!("only {total} surviving paths (< {MIN_SURVIVORS})"));
        }
        let mut m = EmpiricalMeasure {
            binning,
            dim,
            alpha,
            masses,
            stderr,
            overflow,
            overflow_stderr: binomial_stderr(overflow, total),
            total,
            n_paths,
            survival,
            survival_stderr: binomial_stderr(survival, n_paths),
            warnings,
            samples,
            cumulative: Vec::new(),
        };
        m.rebuild_cumulative();
        Ok(m)
    }

    fn rebuild_cumulative(&mut self) {
        let mut acc = 0.0;
        self.cumulative = self
            .masses
            .iter()
            .chain(core::iter::once(&self.overflow))
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
    }

    /// Call after deserializing; restores the sampling table.
    pub fn restore(mut self) -> Self {
        self.rebuild_cumulative();
        self
    }

    /// Per-bin density (mass / volume).
    pub fn densities(&self) -> Vec<f64> {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, m)| m / self.binning.volume(i, self.dim))
            .collect()
    }

    /// KS distance of the first-coordinate samples (`d = 1`) to `cdf`.
    pub fn ks_to<F: FnMut(f64) -> f64>(&self, cdf: F) -> Result<f64> {
        if self.dim != 1 {
            return Err(Error::Unsupported("KS distance is implemented for d = 1".into()));
        }
        ks_distance(&self.samples, cdf)
    }
}

impl InitialLaw for EmpiricalMeasure {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Bin-uniform draw; overflow draws follow a Pareto tail of index α
    /// beyond the window, in a uniformly random direction inside the cone
    /// for `d ≥ 2`.
    fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]) {
        let u = rng.open01() * self.cumulative.last().copied().unwrap_or(1.0);
        let i = self.cumulative.partition_point(|&c| c < u).min(self.masses.len());
        if i < self.masses.len() {
            self.binning.sample_in_bin(i, rng, out);
            return;
        }
        let r = self.binning.window_radius() * powf(rng.open01(), -1.0 / self.alpha);
        if self.dim == 1 {
            out[0] = r;
            return;
        }
        // Directions of the recorded overflow samples, if any.
        let over: Vec<&[f64]> = self
            .samples
            .chunks_exact(self.dim)
            .filter(|y| self.binning.locate(y).is_none())
            .collect();
        if over.is_empty() {
            out.fill(0.0);
            out[self.dim - 1] = r;
            return;
        }
        let pick = over[(rng.open01() * over.len() as f64) as usize % over.len()];
        let n = norm(pick);
        for (o, p) in out.iter_mut().zip(pick) {
            *o = p / n * r;
        }
    }
}

/// Collects final positions of the surviving paths.
struct Survivors {
    positions: Vec<f64>,
    n: u64,
}

impl PathAccumulator for Survivors {
    fn finish(&mut self, exit: Option<usize>, pos: &[f64]) {
        self.n += 1;
        if exit.is_none() {
            self.positions.extend_from_slice(pos);
        }
    }
    fn merge(&mut self, later: Self) {
        self.positions.extend(later.positions);
        self.n += later.n;
    }
}

/// Law of `X_t / t^{1/α}` given `τ > t`, from `x`.
///
/// Uses scaling: the paths start at `t^{-1/α} x` and run to time 1, with
/// `params.dt` measured on that rescaled clock (`params.t_max` is not
/// used).
#[allow(clippy::too_many_arguments)]
pub fn estimate_yaglom<E: Executor>(
    exec: &E,
    cone: &ConeSpec,
    spec: &StableSpec,
    x: &Point,
    t: f64,
    params: &PathParams,
    binning: &Binning,
) -> Result<EmpiricalMeasure> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", "time must be positive"));
    }
    cone.check_dim(x)?;
    binning.check_dim(cone.dim())?;
    let start = x.scaled(powf(t, -1.0 / spec.alpha()));
    let p = params.with_horizon(1.0_f64.max(params.dt));
    let s = run_paths(exec, cone, spec, &start, &p, || Survivors {
        positions: Vec::new(),
        n: 0,
    })?;
    EmpiricalMeasure::from_samples(binning.clone(), cone.dim(), spec.alpha(), s.positions, s.n)
}

/// One point of a quasi-stationarity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QsRatio {
    pub t: f64,
    /// `P_μ(τ > t) (t+1)^{β/α}`.
    pub ratio: f64,
    pub stderr: f64,
}

/// Start paths from `start` (typically an estimated Yaglom measure) and
/// compare `P(τ > t)` with `(t+1)^{-β/α}`. The stderr combines the
/// binomial error with the propagated uncertainty of `β`.
pub fn quasistationarity_check<E: Executor, L: InitialLaw + ?Sized>(
    exec: &E,
    cone: &ConeSpec,
    spec: &StableSpec,
    start: &L,
    beta: &HomogeneityExponent,
    t_grid: &[f64],
    params: &PathParams,
) -> Result<Vec<QsRatio>> {
    if t_grid.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::invalid("t_grid", "times must be nonnegative"));
    }
    let alpha = spec.alpha();
    let horizon = t_grid.iter().copied().fold(0.0, f64::max);
    let simulated = if horizon > 0.0 {
        let p = params.with_horizon(horizon.max(params.dt));
        let n_steps = p.steps(p.t_max);
        Some((run_paths(exec, cone, spec, start, &p, || ExitCounts::new(n_steps))?, p))
    } else {
        None
    };
    Ok(t_grid
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return QsRatio {
                    t,
                    ratio: 1.0,
                    stderr: 0.0,
                };
            }
            let (counts, p) = simulated.as_ref().expect("simulated for t > 0");
            let ph = counts.alive_at(p.steps(t)) as f64 / counts.n_paths as f64;
            let w = powf(t + 1.0, beta.beta / alpha);
            let ratio = ph * w;
            let se_mc = binomial_stderr(ph, counts.n_paths) * w;
            let se_beta = ratio * ln(t + 1.0) / alpha * beta.stderr;
            QsRatio {
                t,
                ratio,
                stderr: sqrt(se_mc * se_mc + se_beta * se_beta),
            }
        })
        .collect())
}

/// Estimated entrance-law density `n_t` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntranceLawEstimate {
    pub t: f64,
    pub binning: Binning,
    pub dim: usize,
    /// `p̂_t(x, bin) / (volume · p̂(τ > 1))`.
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `∫ n̂_t`, including mass outside the window.
    pub mass: f64,
    pub mass_stderr: f64,
    /// Part of `mass` outside the window.
    pub overflow: f64,
    pub overflow_stderr: f64,
    pub x_small: Point,
    pub survival_at_one: f64,
    pub n_paths: u64,
    pub dt: f64,
}

impl EntranceLawEstimate {
    /// `∫_bin n̂_t` with its standard error.
    pub fn bin_masses(&self) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .zip(&self.stderr)
            .enumerate()
            .map(|(i, (v, e))| {
                let vol = self.binning.volume(i, self.dim);
                (v * vol, e * vol)
            })
            .collect()
    }
}

/// Estimate `n_t(y) = lim_{x→0} p_t^Γ(x, y) / P_x(τ > 1)` at every
/// requested `(t, binning)` from one ensemble started at `x_small`.
///
/// Numerator and denominator come from the same paths; the stderr uses the
/// delta method and ignores their (positive) correlation.
pub fn entrance_law_mc<E: Executor>(
    exec: &E,
    cone: &ConeSpec,
    spec: &StableSpec,
    x_small: &Point,
    requests: &[(f64, Binning)],
    params: &PathParams,
) -> Result<Vec<EntranceLawEstimate>> {
    cone.check_dim(x_small)?;
    let dim = cone.dim();
    for (t, b) in requests {
        if !(*t > 0.0) {
            return Err(Error::invalid("t", "entrance-law times must be positive"));
        }
        b.validate()?;
        b.check_dim(dim)?;
    }
    let horizon = requests.iter().map(|r| r.0).fold(1.0, f64::max);
    let p = params.with_horizon(horizon);
    let n_steps = p.steps(horizon);
    let steps: Vec<usize> = requests.iter().map(|r| p.steps(r.0)).collect();
    let snaps = run_paths(exec, cone, spec, x_small, &p, || Snapshots::new(steps.clone(), n_steps))?;
    let n = snaps.exits.n_paths;
    let nf = n as f64;
    let alive_one = snaps.exits.alive_at(p.steps(1.0));
    if alive_one == 0 {
        return Err(Error::InsufficientData(
            "no path survived to time 1; increase n_paths or x_small".into(),
        ));
    }
    let p1 = alive_one as f64 / nf;
    let rel1 = (1.0 - p1) / (nf * p1);
    let mut out = Vec::with_capacity(requests.len());
    for ((t, binning), positions) in requests.iter().zip(&snaps.positions) {
        let mut counts = vec![0u64; binning.n_bins()];
        let mut over = 0u64;
        for y in positions.chunks_exact(dim) {
            match binning.locate(y) {
                Some(i) => counts[i] += 1,
                None => over += 1,
            }
        }
        let ratio = |c: u64| -> (f64, f64) {
            let f = c as f64 / nf;
            let v = f / p1;
            let rel_f = if c > 0 { (1.0 - f) / (nf * f) } else { 0.0 };
            (v, v * sqrt(rel_f + rel1))
        };
        let mut values = Vec::with_capacity(counts.len());
        let mut stderr = Vec::with_capacity(counts.len());
        for (i, &c) in counts.iter().enumerate() {
            let vol = binning.volume(i, dim);
            let (v, e) = ratio(c);
            values.push(v / vol);
            stderr.push(e / vol);
        }
        let alive = (positions.len() / dim) as u64;
        let (mass, mass_stderr) = ratio(alive);
        let (overflow, overflow_stderr) = ratio(over);
        out.push(EntranceLawEstimate {
            t: *t,
            binning: binning.clone(),
            dim,
            values,
            stderr,
            mass,
            mass_stderr,
            overflow,
            overflow_stderr,
            x_small: x_small.clone(),
            survival_at_one: p1,
            n_paths: n,
            dt: p.dt,
        });
    }
    Ok(out)
}

/// Push an estimated half-line entrance law forward by the exact killed
/// kernel: the predicted mass of `n_{t+s}` in each bin of `target`,
///
/// `∫_J n_{t+s} = ∫ n_t(z) ∫_J p_s^Γ(z, y) dy dz`,
///
/// with `n̂_t` taken as constant on each bin (four-point Gauss in `z`) and
/// its overflow spread as a `y^{-2}` tail. Returns `(mass, stderr)` per
/// target bin; the stderr propagates the bin errors of `n̂_t` only.
pub fn propagate_halfline(
    oracle: &CauchyHalfLine,
    source: &EntranceLawEstimate,
    s: f64,
    target: &Binning,
) -> Result<Vec<(f64, f64)>> {
    let (Binning::Uniform { hi: src_hi, .. }, Some(src_edges), Some(dst_edges)) =
        (&source.binning, source.binning.edges(), target.edges())
    else {
        return Err(Error::Unsupported("propagation is implemented for half-line bins".into()));
    };
    if !(s > 0.0) {
        return Err(Error::invalid("s", "propagation time must be positive"));
    }
    // Gauss–Legendre nodes and weights on [-1, 1].
    const GL: [(f64, f64); 4] = [
        (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    ];
    let transfer = |z: f64, j: usize| -> f64 {
        let (a, b) = (dst_edges[j].max(0.0), dst_edges[j + 1]);
        if b <= a || z <= 0.0 {
            return 0.0;
        }
        oracle.kernel_mass_unchecked(s, z, a, b)
    };
    let n_dst = dst_edges.len() - 1;
    let mut mass = vec![0.0; n_dst];
    let mut var = vec![0.0; n_dst];
    let bins = source.bin_masses();
    for (i, &(m, e)) in bins.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let (lo, hi) = (src_edges[i].max(0.0), src_edges[i + 1]);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (j, (mj, vj)) in mass.iter_mut().zip(var.iter_mut()).enumerate() {
            let k: f64 = GL.iter().map(|&(u, w)| 0.5 * w * transfer(mid + half * u, j)).sum();
            *mj += m * k;
            *vj += (e * k) * (e * k);
        }
    }
    if source.overflow > 0.0 {
        // y^{-2} tail beyond the window: midpoint quantiles hi / (1 - q).
        const Q: usize = 16;
        for (j, (mj, vj)) in mass.iter_mut().zip(var.iter_mut()).enumerate() {
            let k: f64 = (0..Q)
                .map(|i| transfer(src_hi / (1.0 - (i as f64 + 0.5) / Q as f64), j))
                .sum::<f64>()
                / Q as f64;
            *mj += source.overflow * k;
            *vj += (source.overflow_stderr * k) * (source.overflow_stderr * k);
        }
    }
    Ok(mass.into_iter().zip(var).map(|(m, v)| (m, sqrt(v))).collect())
}
