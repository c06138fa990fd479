//! Grid-observed exit simulation.
//!
//! A path is the random-walk skeleton `X_{k·dt}` built from exact stable
//! increments; it is absorbed at the first grid index where it lies outside
//! the cone. Excursions out of the cone between grid times are missed, so
//! survival is biased upwards by an amount that shrinks with `dt`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cauchy::{green_halfline, CauchyHalfLine};
use crate::cone::{ConeSpec, HomogeneityExponent};
use crate::error::{Error, Result};
use crate::exec::{block_range, n_blocks, Executor};
use crate::math::{ceil_steps, ln, powf, PI};
use crate::quadrature::{integrate, integrate_half_line, QuadratureSpec};
use crate::rng::RngStream;
use crate::stable::{IncrementSampler, Point, StableSpec};
use crate::stats::{binomial_stderr, weighted_linear_fit};

/// Time step, horizon, ensemble size and random stream of a simulation.
#[derive(Debug, Clone)]
pub struct PathParams {
    pub dt: f64,
    pub t_max: f64,
    pub n_paths: u64,
    pub rng: RngStream,
}

impl PathParams {
    pub fn new(dt: f64, t_max: f64, n_paths: u64, rng: RngStream) -> Result<Self> {
        let p = PathParams {
            dt,
            t_max,
            n_paths,
            rng,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("dt", "time step must be positive"));
        }
        if !(self.t_max >= self.dt) || !self.t_max.is_finite() {
            return Err(Error::invalid("t_max", "horizon must be at least one time step"));
        }
        if self.n_paths == 0 {
            return Err(Error::invalid("n_paths", "need at least one path"));
        }
        Ok(())
    }

    /// Grid index of time `t`: the first `k` with `k·dt ≥ t`.
    pub fn steps(&self, t: f64) -> usize {
        ceil_steps(t, self.dt)
    }

    pub fn with_horizon(&self, t_max: f64) -> Self {
        PathParams {
            t_max,
            ..self.clone()
        }
    }
}

/// One simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitRecord {
    /// Alive at every grid time up to `t_max`.
    pub survived: bool,
    /// First grid index outside the cone.
    pub exit_index: Option<usize>,
    /// Position at each requested observation time, `None` once absorbed.
    pub snapshots: Vec<Option<Point>>,
}

/// Monte Carlo estimate of `P_x(τ > t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    pub x: Point,
    pub t: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub n_paths: u64,
    pub dt: f64,
}

impl SurvivalEstimate {
    fn from_counts(x: &Point, t: f64, alive: u64, n: u64, dt: f64) -> Self {
        let p = alive as f64 / n as f64;
        SurvivalEstimate {
            x: x.clone(),
            t,
            p_hat: p,
            stderr: binomial_stderr(p, n),
            n_paths: n,
            dt,
        }
    }
}

/// Per-block accumulator fed by [`run_paths`].
pub trait PathAccumulator: Send {
    /// Called after each grid step `k ≥ 1` that leaves the path inside.
    #[inline]
    fn step(&mut self, _k: usize, _pos: &[f64]) {}
    /// Called once per path. `exit` is the absorbing grid index (`Some(0)`
    /// for a start outside the cone) and `pos` the position there, or the
    /// final position if the path survived.
    fn finish(&mut self, exit: Option<usize>, pos: &[f64]);
    /// Append the contents of a later block.
    fn merge(&mut self, later: Self)
    where
        Self: Sized;
}

/// Source of starting points.
pub trait InitialLaw: Sync {
    fn dim(&self) -> usize;
    fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]);
}

impl InitialLaw for Point {
    fn dim(&self) -> usize {
        Point::dim(self)
    }
    fn sample_into(&self, _rng: &mut RngStream, out: &mut [f64]) {
        out.copy_from_slice(self.coords());
    }
}

/// Simulate `params.n_paths` killed paths up to `params.t_max` and fold
/// them into one accumulator. Block `b` uses `params.rng.child(b)`; blocks
/// are merged in index order, so the result does not depend on `exec`.
pub fn run_paths<E, L, A, M>(
    exec: &E,
    cone: &ConeSpec,
    spec: &StableSpec,
    start: &L,
    params: &PathParams,
    make: M,
) -> Result<A>
where
    E: Executor,
    L: InitialLaw + ?Sized,
    A: PathAccumulator,
    M: Fn() -> A + Sync,
{
    params.validate()?;
    if spec.dim() != cone.dim() {
        return Err(Error::DimensionMismatch {
            expected: cone.dim(),
            got: spec.dim(),
        });
    }
    if start.dim() != cone.dim() {
        return Err(Error::DimensionMismatch {
            expected: cone.dim(),
            got: start.dim(),
        });
    }
    let sampler = IncrementSampler::new(spec, params.dt)?;
    let n_steps = params.steps(params.t_max);
    let dim = cone.dim();
    let blocks = exec.map_blocks(n_blocks(params.n_paths), |b| {
        let mut rng = params.rng.child(b);
        let mut acc = make();
        let mut pos = vec![0.0; dim];
        let mut inc = vec![0.0; dim];
        for _ in block_range(params.n_paths, b) {
            start.sample_into(&mut rng, &mut pos);
            walk(cone, &sampler, n_steps, &mut rng, &mut pos, &mut inc, &mut acc);
        }
        acc
    });
    let mut it = blocks.into_iter();
    let mut total = it.next().unwrap_or_else(&make);
    for acc in it {
        total.merge(acc);
    }
    Ok(total)
}

#[inline]
fn walk<A: PathAccumulator>(
    cone: &ConeSpec,
    sampler: &IncrementSampler,
    n_steps: usize,
    rng: &mut RngStream,
    pos: &mut [f64],
    inc: &mut [f64],
    acc: &mut A,
) {
    if !cone.contains_slice(pos) {
        acc.finish(Some(0), pos);
        return;
    }
    for k in 1..=n_steps {
        sampler.sample_into(rng, inc);
        for (p, d) in pos.iter_mut().zip(inc.iter()) {
            *p += *d;
        }
        if !cone.contains_slice(pos) {
            acc.finish(Some(k), pos);
            return;
        }
        acc.step(k, pos);
    }
    acc.finish(None, pos);
}

/// Counts of first exits per grid index.
#[derive(Debug, Clone, Default)]
pub struct ExitCounts {
    /// `counts[k]` paths absorbed at index `k`.
    pub counts: Vec<u64>,
    pub survivors: u64,
    pub n_paths: u64,
}

impl ExitCounts {
    pub fn new(n_steps: usize) -> Self {
        ExitCounts {
            counts: vec![0; n_steps + 1],
            survivors: 0,
            n_paths: 0,
        }
    }

    /// Paths still alive at grid index `k`.
    pub fn alive_at(&self, k: usize) -> u64 {
        let dead: u64 = self.counts.iter().take(k + 1).sum();
        self.n_paths - dead
    }
}

impl PathAccumulator for ExitCounts {
    fn finish(&mut self, exit: Option<usize>, _pos: &[f64]) {
        self.n_paths += 1;
        match exit {
            Some(k) => self.counts[k] += 1,
            None => self.survivors += 1,
        }
    }
    fn merge(&mut self, later: Self) {
        for (a, b) in self.counts.iter_mut().zip(later.counts) {
            *a += b;
        }
        self.survivors += later.survivors;
        self.n_paths += later.n_paths;
    }
}

/// Positions at fixed grid indices `≥ 1`, in path order, for paths alive
/// there.
#[derive(Debug, Clone)]
pub struct Snapshots {
    pub steps: Vec<usize>,
    /// `positions[i]` holds the flattened coordinates of the survivors at
    /// `steps[i]`.
    pub positions: Vec<Vec<f64>>,
    pub exits: ExitCounts,
}

impl Snapshots {
    pub fn new(steps: Vec<usize>, n_steps: usize) -> Self {
        let n = steps.len();
        Snapshots {
            steps,
            positions: vec![Vec::new(); n],
            exits: ExitCounts::new(n_steps),
        }
    }
}

impl PathAccumulator for Snapshots {
    #[inline]
    fn step(&mut self, k: usize, pos: &[f64]) {
        for (i, &s) in self.steps.iter().enumerate() {
            if s == k {
                self.positions[i].extend_from_slice(pos);
            }
        }
    }
    fn finish(&mut self, exit: Option<usize>, pos: &[f64]) {
        self.exits.finish(exit, pos);
    }
    fn merge(&mut self, later: Self) {
        for (a, b) in self.positions.iter_mut().zip(later.positions) {
            a.extend(b);
        }
        self.exits.merge(later.exits);
    }
}

/// Simulate a single path with `params.rng` (cloned, so the call is
/// repeatable), observing it at `observe` times.
pub fn simulate_exit(
    cone: &ConeSpec,
    spec: &StableSpec,
    x: &Point,
    params: &PathParams,
    observe: &[f64],
) -> Result<ExitRecord> {
    params.validate()?;
    cone.check_dim(x)?;
    if spec.dim() != cone.dim() {
        return Err(Error::DimensionMismatch {
            expected: cone.dim(),
            got: spec.dim(),
        });
    }
    let sampler = IncrementSampler::new(spec, params.dt)?;
    let n_steps = params.steps(params.t_max);
    let steps: Vec<usize> = observe.iter().map(|&t| params.steps(t)).collect();

    struct One {
        steps: Vec<usize>,
        snaps: Vec<Option<Point>>,
        exit: Option<Option<usize>>,
        start: Vec<f64>,
    }
    impl PathAccumulator for One {
        fn step(&mut self, k: usize, pos: &[f64]) {
            for (i, &s) in self.steps.iter().enumerate() {
                if s == k {
                    self.snaps[i] = Some(Point::new(pos.to_vec()).expect("finite position"));
                }
            }
        }
        fn finish(&mut self, exit: Option<usize>, _pos: &[f64]) {
            if exit != Some(0) {
                for (i, &s) in self.steps.iter().enumerate() {
                    if s == 0 {
                        self.snaps[i] = Some(Point::new(self.start.clone()).expect("finite start"));
                    }
                }
            }
            self.exit = Some(exit);
        }
        fn merge(&mut self, _later: Self) {}
    }

    let mut acc = One {
        snaps: vec![None; steps.len()],
        steps,
        exit: None,
        start: x.coords().to_vec(),
    };
    let mut rng = params.rng.clone();
    let mut pos = x.coords().to_vec();
    let mut inc = vec![0.0; cone.dim()];
    walk(cone, &sampler, n_steps, &mut rng, &mut pos, &mut inc, &mut acc);
    let exit = acc.exit.flatten();
    Ok(ExitRecord {
        survived: exit.is_none(),
        exit_index: exit,
        snapshots: acc.snaps,
    })
}

/// Grid estimates of `P_x(τ > t)` for every `t` in `times` from one
/// ensemble simulated to `max(times)`.
pub fn survival_curve<E: Executor>(
    exec: &E,
    cone: &ConeSpec,
    spec: &StableSpec,
    x: &Point,
    times: &[f64],
    params: &PathParams,
) -> Result<Vec<SurvivalEstimate>> {
    cone.check_dim(x)?;
    let horizon = times.iter().copied().fold(0.0, f64::max);
    for &t in times {
        if !(t > 0.0) {
            return Err(Error::invalid("t", "survival times must be positive"));
        }
    }
    if horizon > params.t_max * (1.0 + 1e-12) {
        return Err(Error::invalid("t", "survival time beyond the simulation horizon t_max"));
    }
    let p = params.with_horizon(horizon.max(params.dt));
    let n_steps = p.steps(p.t_max);
    let counts = run_paths(exec, cone, spec, x, &p, || ExitCounts::new(n_steps))?;
    Ok(times
        .iter()
        .map(|&t| SurvivalEstimate::from_counts(x, t, counts.alive_at(p.steps(t)), counts.n_paths, p.dt))
        .collect())
}

/// Grid estimate of `P_x(τ > t)` with binomial standard error.
pub fn survival_mc<E: Executor>(
    exec: &E,
    cone: &ConeSpec,
    spec: &StableSpec,
    x: &Point,
    t: f64,
    params: &PathParams,
) -> Result<SurvivalEstimate> {
    Ok(survival_curve(exec, cone, spec, x, &[t], params)?.remove(0))
}

/// Details of a homogeneity-exponent regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub exponent: HomogeneityExponent,
    pub slope: f64,
    pub slope_stderr: f64,
    pub curve: Vec<SurvivalEstimate>,
}

/// Regress `log P_x(τ > t)` on `log t` (weights from the delta method,
/// `σ = stderr / p`) and return `β = -α · slope`.
///
/// The survival estimates share paths and are positively correlated; the
/// reported standard error ignores that.
pub fn estimate_beta<E: Executor>(
    exec: &E,
    cone: &ConeSpec,
    spec: &StableSpec,
    x: &Point,
    t_grid: &[f64],
    params: &PathParams,
) -> Result<BetaFit> {
    if t_grid.len() < 4 {
        return Err(Error::invalid("t_grid", "β regression needs at least 4 times"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(t_grid[0] > 0.0) {
        return Err(Error::invalid("t_grid", "times must be positive and increasing"));
    }
    if t_grid[t_grid.len() - 1] / t_grid[0] < powf(10.0, 1.5) * (1.0 - 1e-12) {
        return Err(Error::invalid("t_grid", "times must span at least 1.5 decades"));
    }
    let horizon = t_grid[t_grid.len() - 1];
    let curve = survival_curve(exec, cone, spec, x, t_grid, &params.with_horizon(horizon))?;
    if let Some(e) = curve.iter().find(|e| e.p_hat == 0.0) {
        return Err(Error::InsufficientData(format!(
            "no survivors at t = {}; increase n_paths or shorten the time grid",
            e.t
        )));
    }
    let lx: Vec<f64> = curve.iter().map(|e| ln(e.t)).collect();
    let ly: Vec<f64> = curve.iter().map(|e| ln(e.p_hat)).collect();
    // A single survivor has zero binomial variance; floor at one count.
    let sig: Vec<f64> = curve
        .iter()
        .map(|e| (e.stderr / e.p_hat).max(1.0 / (e.p_hat * e.n_paths as f64)))
        .collect();
    let fit = weighted_linear_fit(&lx, &ly, &sig)?;
    let alpha = spec.alpha();
    let exponent = HomogeneityExponent::estimated(-fit.slope * alpha, fit.slope_stderr * alpha, alpha)?;
    Ok(BetaFit {
        exponent,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        curve,
    })
}

/// Exact draw of the Cauchy ruin time from `x > 0` (no grid).
pub fn sample_ruin_time_cauchy(oracle: &CauchyHalfLine, x: f64, rng: &mut RngStream) -> Result<f64> {
    oracle.sample_ruin_time(x, rng)
}

/// `P_x(τ > t)` for the Cauchy half-line from exact ruin-time draws, with
/// the same block/stream layout as [`run_paths`].
pub fn survival_exact_cauchy<E: Executor>(
    exec: &E,
    oracle: &CauchyHalfLine,
    x: f64,
    t: f64,
    n_paths: u64,
    rng: &RngStream,
) -> Result<SurvivalEstimate> {
    if !(x > 0.0 && t > 0.0) || n_paths == 0 {
        return Err(Error::invalid("x", "need x > 0, t > 0 and at least one path"));
    }
    let blocks = exec.map_blocks(n_blocks(n_paths), |b| {
        let mut r = rng.child(b);
        let mut alive = 0u64;
        for _ in block_range(n_paths, b) {
            if x * oracle.ruin_invert(r.open01()) > t {
                alive += 1;
            }
        }
        alive
    });
    let alive: u64 = blocks.iter().sum();
    Ok(SurvivalEstimate::from_counts(&Point::scalar(x), t, alive, n_paths, 0.0))
}

/// Both sides of the Ikeda–Watanabe identity for the exit event
/// `{τ ∈ window, X_τ ∈ target}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitLawCheck {
    pub mc_frequency: f64,
    pub mc_stderr: f64,
    pub quadrature: f64,
    pub quadrature_err: f64,
}

/// Exit window/target check on the Cauchy half-line.
///
/// `window = (a, b)` may have `b = ∞`; then the time integral of the
/// killed kernel is the Green function. `target = (lo, hi)` must lie in
/// `(-∞, 0]`. The Monte Carlo side uses the grid exit index and the first
/// observed position outside, and a finite `window.1` must not exceed
/// `params.t_max`.
#[allow(clippy::too_many_arguments)]
pub fn exit_law_check<E: Executor>(
    exec: &E,
    oracle: &CauchyHalfLine,
    cone: &ConeSpec,
    spec: &StableSpec,
    x: &Point,
    window: (f64, f64),
    target: (f64, f64),
    params: &PathParams,
    quad: &QuadratureSpec,
) -> Result<ExitLawCheck> {
    if *cone != ConeSpec::HalfLine || spec.alpha() != 1.0 {
        return Err(Error::Unsupported(
            "the exit-law quadrature needs the Cauchy process on the half-line".into(),
        ));
    }
    cone.check_dim(x)?;
    let x0 = x.coords()[0];
    if !(x0 > 0.0) {
        return Err(Error::domain("exit_law_check needs a start inside the half-line"));
    }
    let (a, b) = window;
    let (lo, hi) = target;
    if !(a >= 0.0 && b > a) {
        return Err(Error::invalid("window", "need 0 <= a < b"));
    }
    if !(hi <= 0.0 && lo < hi) {
        return Err(Error::invalid("target", "target set must be an interval in (-inf, 0]"));
    }

    // ∫_B ν(z - y) dz for y > 0.
    let jump_into = |y: f64| -> f64 {
        let far = if lo == f64::NEG_INFINITY { 0.0 } else { 1.0 / (y - lo) };
        (1.0 / (y - hi) - far) / PI
    };
    let breaks = [0.5 * x0, x0, 2.0 * x0];
    let inner_quad = quad.loosened(10.0);
    let mut failure = None;
    let mut time_slice = |u: f64| -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let bp = [0.5 * x0, (x0 - u).max(0.5 * x0), x0, x0 + u, 2.0 * x0];
        match integrate_half_line(|y| if y <= 0.0 { 0.0 } else { oracle.heat_kernel_unchecked(u, x0, y) * jump_into(y) }, &bp, &inner_quad) {
            Ok(v) => v.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let q = if b == f64::INFINITY {
        let head = if a > 0.0 {
            integrate(&mut time_slice, 0.0, a, quad).map_err(|e| e.in_layer("exit law, time integral"))?
        } else {
            crate::quadrature::Integral { value: 0.0, abs_err: 0.0 }
        };
        let total = integrate_half_line(
            |y| if y <= 0.0 || y == x0 { 0.0 } else { green_halfline(x0, y).unwrap_or(0.0) * jump_into(y) },
            &breaks,
            quad,
        )
        .map_err(|e| e.in_layer("exit law, Green integral"))?;
        crate::quadrature::Integral {
            value: total.value - head.value,
            abs_err: total.abs_err + head.abs_err,
        }
    } else {
        integrate(&mut time_slice, a, b, quad).map_err(|e| e.in_layer("exit law, time integral"))?
    };
    if let Some(e) = failure {
        return Err(e.in_layer("exit law, space integral"));
    }

    let horizon = if b.is_finite() { b } else { params.t_max };
    if horizon > params.t_max * (1.0 + 1e-12) {
        return Err(Error::invalid("window", "window end beyond the simulation horizon t_max"));
    }
    let p = params.with_horizon(horizon);
    let (ka, kb) = (p.steps(a), p.steps(horizon));

    #[derive(Default)]
    struct Hits {
        hits: u64,
        n: u64,
        ka: usize,
        kb: usize,
        lo: f64,
        hi: f64,
    }
    impl PathAccumulator for Hits {
        fn finish(&mut self, exit: Option<usize>, pos: &[f64]) {
            self.n += 1;
            if let Some(k) = exit {
                // Grid exit in (a, b]: the true exit time lies in the
                // preceding step.
                if k > self.ka && k <= self.kb && pos[0] > self.lo && pos[0] <= self.hi {
                    self.hits += 1;
                }
            }
        }
        fn merge(&mut self, later: Self) {
            self.hits += later.hits;
            self.n += later.n;
        }
    }
    let hits = run_paths(exec, cone, spec, x, &p, || Hits {
        ka,
        kb,
        lo,
        hi,
        ..Default::default()
    })?;
    let f = hits.hits as f64 / hits.n as f64;
    Ok(ExitLawCheck {
        mc_frequency: f,
        mc_stderr: binomial_stderr(f, hits.n),
        quadrature: q.value,
        quadrature_err: q.abs_err,
    })
}

/// Expected time spent in `{y : in_region(y)}` before exit or `t_max`,
/// as the Riemann sum `dt · #{k ≥ 1 : X_{k dt} ∈ region, k < exit}`.
pub fn occupation_mc<E, R>(
    exec: &E,
    cone: &ConeSpec,
    spec: &StableSpec,
    x: &Point,
    in_region: R,
    params: &PathParams,
) -> Result<(f64, f64)>
where
    E: Executor,
    R: Fn(&[f64]) -> bool + Sync + Copy + Send,
{
    struct Occ<R> {
        region: R,
        cur: u64,
        sum: f64,
        sum_sq: f64,
        n: u64,
    }
    impl<R: Fn(&[f64]) -> bool + Send> PathAccumulator for Occ<R> {
        #[inline]
        fn step(&mut self, _k: usize, pos: &[f64]) {
            if (self.region)(pos) {
                self.cur += 1;
            }
        }
        fn finish(&mut self, _exit: Option<usize>, _pos: &[f64]) {
            let c = self.cur as f64;
            self.sum += c;
            self.sum_sq += c * c;
            self.n += 1;
            self.cur = 0;
        }
        fn merge(&mut self, later: Self) {
            self.sum += later.sum;
            self.sum_sq += later.sum_sq;
            self.n += later.n;
        }
    }
    let occ = run_paths(exec, cone, spec, x, params, || Occ {
        region: in_region,
        cur: 0,
        sum: 0.0,
        sum_sq: 0.0,
        n: 0,
    })?;
    let n = occ.n as f64;
    let mean = occ.sum / n;
    let var = (occ.sum_sq / n - mean * mean).max(0.0);
    Ok((mean * params.dt, crate::math::sqrt(var / n) * params.dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    fn cauchy() -> StableSpec {
        StableSpec::new(1.0, 1).unwrap()
    }

    #[test]
    fn start_outside_exits_at_zero() {
        let p = PathParams::new(0.01, 1.0, 10, RngStream::new(1, 0)).unwrap();
        let r = simulate_exit(&ConeSpec::HalfLine, &cauchy(), &Point::scalar(-1.0), &p, &[0.5]).unwrap();
        assert_eq!(r.exit_index, Some(0));
        assert!(!r.survived);
        assert_eq!(r.snapshots, vec![None]);
        let s = survival_mc(&Sequential, &ConeSpec::HalfLine, &cauchy(), &Point::scalar(-1.0), 1.0, &p).unwrap();
        assert_eq!(s.p_hat, 0.0);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn single_path_is_repeatable_and_monotone_in_horizon() {
        let rng = RngStream::new(9, 4);
        let short = PathParams::new(0.01, 1.0, 1, rng.clone()).unwrap();
        let long = PathParams::new(0.01, 5.0, 1, rng).unwrap();
        for seed_shift in 0..20u64 {
            let s = PathParams {
                rng: RngStream::new(seed_shift, 0),
                ..short.clone()
            };
            let l = PathParams {
                rng: RngStream::new(seed_shift, 0),
                ..long.clone()
            };
            let a = simulate_exit(&ConeSpec::HalfLine, &cauchy(), &Point::scalar(1.0), &s, &[]).unwrap();
            let b = simulate_exit(&ConeSpec::HalfLine, &cauchy(), &Point::scalar(1.0), &l, &[]).unwrap();
            assert_eq!(a, simulate_exit(&ConeSpec::HalfLine, &cauchy(), &Point::scalar(1.0), &s, &[]).unwrap());
            // Surviving the long horizon implies surviving the short one.
            assert!(!b.survived || a.survived);
            if let Some(k) = a.exit_index {
                assert_eq!(b.exit_index, Some(k));
            }
        }
    }

    #[test]
    fn snapshots_lie_in_cone() {
        let p = PathParams::new(0.01, 2.0, 1, RngStream::new(3, 0)).unwrap();
        let cone = ConeSpec::wedge(PI).unwrap();
        let spec = StableSpec::new(1.5, 2).unwrap();
        for s in 0..20 {
            let q = PathParams {
                rng: RngStream::new(s, 0),
                ..p.clone()
            };
            let r = simulate_exit(&cone, &spec, &Point::new(vec![0.0, 3.0]).unwrap(), &q, &[0.0, 0.5, 1.0, 2.0]).unwrap();
            assert_eq!(r.snapshots[0], Some(Point::new(vec![0.0, 3.0]).unwrap()));
            for s in r.snapshots.iter().flatten() {
                assert!(cone.contains(s).unwrap());
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(PathParams::new(0.0, 1.0, 1, RngStream::new(0, 0)).is_err());
        assert!(PathParams::new(0.1, 0.05, 1, RngStream::new(0, 0)).is_err());
        assert!(PathParams::new(0.1, 1.0, 0, RngStream::new(0, 0)).is_err());
        let p = PathParams::new(0.1, 1.0, 1, RngStream::new(0, 0)).unwrap();
        assert_eq!(p.steps(1.0), 10);
        assert_eq!(p.steps(0.3), 3);
    }

    #[test]
    fn beta_grid_validation() {
        let p = PathParams::new(0.1, 1.0, 100, RngStream::new(0, 0)).unwrap();
        let h = ConeSpec::HalfLine;
        let one = Point::scalar(1.0);
        assert!(estimate_beta(&Sequential, &h, &cauchy(), &one, &[1.0, 2.0, 4.0], &p).is_err());
        assert!(estimate_beta(&Sequential, &h, &cauchy(), &one, &[1.0, 2.0, 4.0, 8.0], &p).is_err());
        assert!(estimate_beta(&Sequential, &h, &cauchy(), &one, &[1.0, 4.0, 2.0, 40.0], &p).is_err());
    }

    #[test]
    fn survival_curve_is_monotone() {
        let p = PathParams::new(0.01, 4.0, 2000, RngStream::new(5, 0)).unwrap();
        let c = survival_curve(&Sequential, &ConeSpec::HalfLine, &cauchy(), &Point::scalar(1.0), &[0.5, 1.0, 2.0, 4.0], &p).unwrap();
        for w in c.windows(2) {
            assert!(w[1].p_hat <= w[0].p_hat);
        }
    }
}
