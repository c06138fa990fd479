//! Experiment dispatch. Each experiment writes its data files through
//! [`Outputs`] and returns the metrics recorded in the manifest.

use std::f64::consts::PI;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use cone_yaglom_core::exit::{estimate_beta, survival_curve, survival_exact_cauchy};
use cone_yaglom_core::yaglom::{entrance_law_mc, estimate_yaglom, quasistationarity_check};
use cone_yaglom_core::{
    Binning, CauchyHalfLine, ConeSpec, EmpiricalMeasure, EntranceLawEstimate, Executor, PathParams, RngStream,
};

use crate::config::{Experiment, RunConfig};
use crate::error::CliError;
use crate::golden::{self, GoldenTable};
use crate::output::{join_coords, write_json, Outputs, RunManifest, SchemaVersions};
use crate::output::{CSV_SCHEMA_VERSION, JSON_SCHEMA_VERSION, MANIFEST_SCHEMA_VERSION};

/// RNG stream ids. Each ensemble of a run gets its own.
const STREAM_MAIN: u64 = 0;
const STREAM_QS: u64 = 1;
const STREAM_CONTROL: u64 = 2;
const STREAM_EXACT: u64 = 3;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overwrite the golden file with the values computed by `cauchy-exact`.
    pub regenerate_golden: bool,
}

/// Run the configured experiment, write its outputs and manifest, and
/// return the manifest.
pub fn run<E: Executor>(cfg: &RunConfig, exec: &E, workers: usize, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let mut out = Outputs::new(&cfg.output)?;
    let metrics = match cfg.experiment {
        Experiment::Survival => survival(cfg, exec, &mut out)?,
        Experiment::Beta => beta(cfg, exec, &mut out)?,
        Experiment::Yaglom => yaglom(cfg, exec, &mut out)?,
        Experiment::Entrance => entrance(cfg, exec, &mut out)?,
        Experiment::QsCheck => qs_check(cfg, exec, &mut out)?,
        Experiment::CauchyExact => cauchy_exact(cfg, &mut out, opts)?,
        Experiment::Factorization => factorization(cfg, &mut out)?,
        Experiment::Constants => constants(cfg, &mut out)?,
    };
    let dir = out.dir().to_path_buf();
    let manifest = RunManifest {
        artifact: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        schemas: SchemaVersions {
            csv: CSV_SCHEMA_VERSION,
            json: JSON_SCHEMA_VERSION,
            manifest: MANIFEST_SCHEMA_VERSION,
        },
        experiment: cfg.experiment.name().to_string(),
        config: cfg.echo.clone(),
        workers,
        started_unix: started,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        outputs: out.into_files(),
        metrics,
    };
    write_json(&dir.join(RunManifest::file_name(cfg.experiment.name())), &manifest)?;
    Ok(manifest)
}

fn params(cfg: &RunConfig, t_max: f64, stream: u64) -> Result<PathParams, CliError> {
    Ok(PathParams::new(cfg.dt, t_max.max(cfg.dt), cfg.n_paths, RngStream::new(cfg.seed, stream))?)
}

fn is_cauchy_half_line(cfg: &RunConfig) -> bool {
    cfg.cone == ConeSpec::HalfLine && cfg.spec.alpha() == 1.0
}

fn oracle(cfg: &RunConfig) -> Result<CauchyHalfLine, CliError> {
    Ok(CauchyHalfLine::new(cfg.quad)?)
}

fn binning(cfg: &RunConfig) -> &Binning {
    cfg.binning.as_ref().expect("defaults fill a binning for histogram experiments")
}

#[derive(Serialize)]
struct SurvivalRow {
    cone: String,
    alpha: f64,
    x: String,
    t: f64,
    dt: f64,
    n_paths: u64,
    p_hat: f64,
    stderr: f64,
}

fn survival<E: Executor>(cfg: &RunConfig, exec: &E, out: &mut Outputs) -> Result<Value, CliError> {
    let horizon = cfg.times.iter().copied().fold(0.0, f64::max);
    let curve = survival_curve(exec, &cfg.cone, &cfg.spec, &cfg.x, &cfg.times, &params(cfg, horizon, STREAM_MAIN)?)?;
    let rows: Vec<SurvivalRow> = curve
        .iter()
        .map(|e| SurvivalRow {
            cone: cfg.cone.label(),
            alpha: cfg.spec.alpha(),
            x: join_coords(cfg.x.coords()),
            t: e.t,
            dt: e.dt,
            n_paths: e.n_paths,
            p_hat: e.p_hat,
            stderr: e.stderr,
        })
        .collect();
    out.csv("survival.csv", "survival", &rows)?;

    let mut m = json!({ "estimates": curve });
    let x0 = cfg.x.coords()[0];
    if is_cauchy_half_line(cfg) && x0 > 0.0 {
        let o = oracle(cfg)?;
        let mut checks = Vec::new();
        for e in &curve {
            let exact = o.survival(x0, e.t)?;
            let sampler = survival_exact_cauchy(exec, &o, x0, e.t, cfg.n_paths, &RngStream::new(cfg.seed, STREAM_EXACT))?;
            checks.push(json!({
                "t": e.t,
                "quadrature": exact,
                "quadrature_rel_tol": cfg.quad.rel_tol,
                "grid_minus_quadrature": e.p_hat - exact,
                "exact_sampler_p_hat": sampler.p_hat,
                "exact_sampler_stderr": sampler.stderr,
            }));
        }
        m["oracle"] = Value::Array(checks);
    }
    Ok(m)
}

#[derive(Serialize)]
struct CurveRow {
    t: f64,
    p_hat: f64,
    stderr: f64,
    log_t: f64,
    log_p_hat: f64,
    log_stderr: f64,
}

fn beta<E: Executor>(cfg: &RunConfig, exec: &E, out: &mut Outputs) -> Result<Value, CliError> {
    let fit = estimate_beta(exec, &cfg.cone, &cfg.spec, &cfg.x, &cfg.times, &params(cfg, 0.0, STREAM_MAIN)?)?;
    let rows: Vec<CurveRow> = fit
        .curve
        .iter()
        .map(|e| CurveRow {
            t: e.t,
            p_hat: e.p_hat,
            stderr: e.stderr,
            log_t: e.t.ln(),
            log_p_hat: e.p_hat.ln(),
            log_stderr: e.stderr / e.p_hat,
        })
        .collect();
    out.csv("beta_curve.csv", "survival-curve", &rows)?;
    let closed = cfg.cone.closed_form_beta(cfg.spec.alpha());
    out.json("beta.json", "beta-fit", &json!({ "fit": fit, "closed_form_beta": closed }))?;
    Ok(json!({
        "beta": fit.exponent.beta,
        "beta_stderr": fit.exponent.stderr,
        "slope": fit.slope,
        "slope_stderr": fit.slope_stderr,
        "closed_form_beta": closed,
    }))
}

#[derive(Serialize)]
struct HistRow {
    bin_lo: f64,
    bin_hi: f64,
    mass: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct PolarHistRow {
    r_lo: f64,
    r_hi: f64,
    angle_lo: f64,
    angle_hi: f64,
    mass: f64,
    stderr: f64,
}

/// Histogram rows plus a last row for the mass beyond the window.
fn write_histogram(out: &mut Outputs, name: &str, schema: &str, b: &Binning, mass: &[(f64, f64)], overflow: (f64, f64)) -> Result<(), CliError> {
    match b {
        Binning::Uniform { hi, .. } => {
            let mut rows: Vec<HistRow> = mass
                .iter()
                .enumerate()
                .map(|(i, &(m, se))| {
                    let ((lo, up), _) = b.bin_extent(i);
                    HistRow { bin_lo: lo, bin_hi: up, mass: m, stderr: se }
                })
                .collect();
            rows.push(HistRow { bin_lo: *hi, bin_hi: f64::INFINITY, mass: overflow.0, stderr: overflow.1 });
            out.csv(name, schema, &rows)
        }
        Binning::Polar { r_max, .. } => {
            let mut rows: Vec<PolarHistRow> = mass
                .iter()
                .enumerate()
                .map(|(i, &(m, se))| {
                    let ((r_lo, r_hi), a) = b.bin_extent(i);
                    let (angle_lo, angle_hi) = a.expect("polar bins have an angular range");
                    PolarHistRow { r_lo, r_hi, angle_lo, angle_hi, mass: m, stderr: se }
                })
                .collect();
            rows.push(PolarHistRow {
                r_lo: *r_max,
                r_hi: f64::INFINITY,
                angle_lo: 0.0,
                angle_hi: PI,
                mass: overflow.0,
                stderr: overflow.1,
            });
            out.csv(name, &format!("{schema}-polar"), &rows)
        }
    }
}

/// Kolmogorov–Smirnov distance to the exact Yaglom law (Cauchy half-line).
fn ks_to_exact(m: &EmpiricalMeasure, o: &CauchyHalfLine) -> Result<f64, CliError> {
    Ok(m.ks_to(|y| if y <= 0.0 { 0.0 } else { o.yaglom_cdf(y).unwrap_or(f64::NAN) })?)
}

fn yaglom<E: Executor>(cfg: &RunConfig, exec: &E, out: &mut Outputs) -> Result<Value, CliError> {
    let t = cfg.times[0];
    let b = binning(cfg);
    let m = estimate_yaglom(exec, &cfg.cone, &cfg.spec, &cfg.x, t, &params(cfg, 1.0, STREAM_MAIN)?, b)?;
    let mass: Vec<(f64, f64)> = m.masses.iter().copied().zip(m.stderr.iter().copied()).collect();
    write_histogram(out, "yaglom.csv", "yaglom-histogram", b, &mass, (m.overflow, m.overflow_stderr))?;
    let ks = if is_cauchy_half_line(cfg) { Some(ks_to_exact(&m, &oracle(cfg)?)?) } else { None };
    // 99% one-sample critical value for the survivor count.
    let ks_critical = 1.628 / (m.total as f64).sqrt();
    out.json(
        "yaglom.json",
        "yaglom-measure",
        &json!({
            "t": t,
            "x": cfg.x.coords(),
            "measure": m,
            "ks_to_quadrature": ks,
            "ks_critical_99": ks_critical,
        }),
    )?;
    Ok(json!({
        "survivors": m.total,
        "survival": m.survival,
        "survival_stderr": m.survival_stderr,
        "overflow": m.overflow,
        "overflow_stderr": m.overflow_stderr,
        "ks_to_quadrature": ks,
        "ks_critical_99": ks_critical,
        "warnings": m.warnings,
    }))
}

#[derive(Serialize)]
struct EntranceRow {
    t: f64,
    bin_lo: f64,
    bin_hi: f64,
    angle_lo: Option<f64>,
    angle_hi: Option<f64>,
    density: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct TransportRow {
    t: f64,
    bin: usize,
    mass: f64,
    stderr: f64,
    predicted: f64,
    predicted_stderr: f64,
}

fn entrance<E: Executor>(cfg: &RunConfig, exec: &E, out: &mut Outputs) -> Result<Value, CliError> {
    let alpha = cfg.spec.alpha();
    let b = binning(cfg);
    let requests: Vec<(f64, Binning)> = cfg.times.iter().map(|&t| (t, b.scaled(t.powf(1.0 / alpha)))).collect();
    let horizon = cfg.times.iter().copied().fold(1.0, f64::max);
    let x_small = cfg.x_small.as_ref().expect("defaults fill x_small");
    let est = entrance_law_mc(exec, &cfg.cone, &cfg.spec, x_small, &requests, &params(cfg, horizon, STREAM_MAIN)?)?;

    let mut rows = Vec::new();
    for e in &est {
        for (i, (&v, &se)) in e.values.iter().zip(&e.stderr).enumerate() {
            let ((lo, hi), ang) = e.binning.bin_extent(i);
            rows.push(EntranceRow {
                t: e.t,
                bin_lo: lo,
                bin_hi: hi,
                angle_lo: ang.map(|a| a.0),
                angle_hi: ang.map(|a| a.1),
                density: v,
                stderr: se,
            });
        }
    }
    out.csv("entrance.csv", "entrance-density", &rows)?;
    out.json("entrance.json", "entrance-law", &est)?;

    let mut m = json!({
        "survival_at_one": est[0].survival_at_one,
        "masses": est.iter().map(|e| json!({ "t": e.t, "mass": e.mass, "stderr": e.mass_stderr, "overflow": e.overflow })).collect::<Vec<_>>(),
    });
    if let Some(beta) = cfg.beta {
        let decay = beta.beta / alpha;
        m["mass_vs_power_law"] = est
            .iter()
            .map(|e| json!({ "t": e.t, "mass": e.mass, "stderr": e.mass_stderr, "expected": e.t.powf(-decay) }))
            .collect();
        let transport = transport_rows(&est, decay);
        if !transport.is_empty() {
            out.csv("entrance_transport.csv", "entrance-transport", &transport)?;
            let worst = transport
                .iter()
                .map(|r| (r.mass - r.predicted).abs() / r.stderr.hypot(r.predicted_stderr).max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            m["transport_max_z"] = json!(worst);
        }
    }
    Ok(m)
}

/// Bin masses at each later time against `(t/t₀)^{-β/α}` times the
/// masses at the first time; the bins are the first time's bins scaled by
/// `(t/t₀)^{1/α}`, so the two should agree.
fn transport_rows(est: &[EntranceLawEstimate], decay: f64) -> Vec<TransportRow> {
    let Some((first, rest)) = est.split_first() else { return Vec::new() };
    let base = first.bin_masses();
    let mut rows = Vec::new();
    for e in rest {
        let f = (e.t / first.t).powf(-decay);
        for (i, ((m, se), (m0, se0))) in e.bin_masses().into_iter().zip(&base).enumerate() {
            rows.push(TransportRow {
                t: e.t,
                bin: i,
                mass: m,
                stderr: se,
                predicted: f * m0,
                predicted_stderr: f * se0,
            });
        }
    }
    rows
}

#[derive(Serialize)]
struct QsRow {
    start: &'static str,
    t: f64,
    ratio: f64,
    stderr: f64,
}

fn qs_check<E: Executor>(cfg: &RunConfig, exec: &E, out: &mut Outputs) -> Result<Value, CliError> {
    let beta = cfg.beta.expect("validated: qs-check has beta");
    let b = binning(cfg);
    let mu = estimate_yaglom(exec, &cfg.cone, &cfg.spec, &cfg.x, cfg.yaglom_t, &params(cfg, 1.0, STREAM_MAIN)?, b)?;
    let horizon = cfg.times.iter().copied().fold(0.0, f64::max);
    let from_mu = quasistationarity_check(exec, &cfg.cone, &cfg.spec, &mu, &beta, &cfg.times, &params(cfg, horizon, STREAM_QS)?)?;
    let from_point = quasistationarity_check(exec, &cfg.cone, &cfg.spec, &cfg.x, &beta, &cfg.times, &params(cfg, horizon, STREAM_CONTROL)?)?;
    let mut rows = Vec::new();
    for (label, r) in [("yaglom", &from_mu), ("point", &from_point)] {
        rows.extend(r.iter().map(|q| QsRow { start: label, t: q.t, ratio: q.ratio, stderr: q.stderr }));
    }
    out.csv("qs.csv", "qs-ratios", &rows)?;
    let mass: Vec<(f64, f64)> = mu.masses.iter().copied().zip(mu.stderr.iter().copied()).collect();
    write_histogram(out, "qs_measure.csv", "yaglom-histogram", b, &mass, (mu.overflow, mu.overflow_stderr))?;
    let dev = |r: &[cone_yaglom_core::yaglom::QsRatio]| r.iter().map(|q| (q.ratio - 1.0).abs()).fold(0.0, f64::max);
    Ok(json!({
        "beta": beta,
        "yaglom_t": cfg.yaglom_t,
        "measure_survivors": mu.total,
        "yaglom_start": from_mu,
        "point_start": from_point,
        "max_deviation_yaglom_start": dev(&from_mu),
        "max_deviation_point_start": dev(&from_point),
    }))
}

#[derive(Serialize)]
struct FunctionRow<'a> {
    function: &'a str,
    probe: f64,
    value: f64,
    rel_tol: f64,
}

fn cauchy_exact(cfg: &RunConfig, out: &mut Outputs, opts: &RunOptions) -> Result<Value, CliError> {
    let o = oracle(cfg)?;
    let table = GoldenTable::compute(&o, &cfg.probes)?;
    let mut rows = Vec::new();
    for (name, values) in &table.functions {
        for (p, v) in table.probes.iter().zip(values) {
            rows.push(FunctionRow { function: name, probe: *p, value: *v, rel_tol: cfg.quad.rel_tol });
        }
    }
    out.csv("cauchy_exact.csv", "cauchy-functions", &rows)?;
    out.json("cauchy_exact.json", "cauchy-golden", &table)?;

    let (reference, origin) = match &cfg.golden {
        Some(p) if !opts.regenerate_golden => (GoldenTable::load(p)?, p.display().to_string()),
        _ => (GoldenTable::parse(golden::EMBEDDED, "embedded")?, "embedded".to_string()),
    };
    let dev = table.deviation(&reference);
    let mut m = json!({
        "golden": origin,
        "max_abs_deviation": dev.max_abs,
        "max_rel_deviation": dev.max_rel,
        "compared": dev.compared,
        "same_tolerances": reference.rel_tol == table.rel_tol && reference.abs_tol == table.abs_tol,
    });
    if opts.regenerate_golden {
        let path = cfg.golden.clone().unwrap_or_else(|| golden::DEFAULT_PATH.into());
        write_json(&path, &table)?;
        m["regenerated"] = json!(path.display().to_string());
    }
    Ok(m)
}

#[derive(Serialize)]
struct RatioRow {
    x: f64,
    y: f64,
    ratio: f64,
    rel_tol: f64,
}

fn factorization(cfg: &RunConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let o = oracle(cfg)?;
    let mut rows = Vec::with_capacity(cfg.probes.len() * cfg.probes.len());
    for &x in &cfg.probes {
        for &y in &cfg.probes {
            rows.push(RatioRow { x, y, ratio: o.factorization_ratio(x, y)?, rel_tol: cfg.quad.rel_tol });
        }
    }
    out.csv("factorization.csv", "factorization-ratio", &rows)?;
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.ratio), b.max(r.ratio)));
    Ok(json!({ "min_ratio": lo, "max_ratio": hi, "band": hi / lo }))
}

#[derive(Serialize)]
struct ConstantRow {
    name: &'static str,
    value: f64,
    abs_err: f64,
    reference: f64,
}

fn constants(cfg: &RunConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let o = oracle(cfg)?;
    let c = o.constants_check()?;
    let rep = o.survival_representation(1.0)?;
    let surv = o.survival(1.0, 1.0)?;
    let two_over_pi = 2.0 / PI;
    let rows = [
        ConstantRow { name: "c0", value: c.c0, abs_err: cfg.quad.rel_tol * c.c0, reference: two_over_pi },
        ConstantRow { name: "c1", value: c.c1, abs_err: c.c1_err, reference: two_over_pi },
        ConstantRow { name: "entrance_time_integral", value: c.k_integral, abs_err: c.k_integral_err, reference: 1.0 },
        ConstantRow { name: "survival_representation_x1", value: rep.value, abs_err: rep.abs_err, reference: surv },
    ];
    out.csv("constants.csv", "constants", &rows)?;
    Ok(json!({
        "c0": c.c0,
        "c1": c.c1,
        "c1_err": c.c1_err,
        "entrance_time_integral": c.k_integral,
        "entrance_time_integral_err": c.k_integral_err,
        "survival_representation_x1": rep.value,
        "survival_representation_err": rep.abs_err,
        "survival_x1_t1": surv,
        "max_deviation": rows.iter().map(|r| (r.value - r.reference).abs()).fold(0.0, f64::max),
    }))
}

