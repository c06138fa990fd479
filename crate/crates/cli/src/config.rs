//! Run configuration: a flat TOML file, validated into a [`RunConfig`].
//!
//! Every key is optional in the file except `cone` and `alpha`; missing keys
//! get the defaults listed in the README, and the filled-in file is echoed
//! into the run manifest so that the echo alone reproduces the run.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use cone_yaglom_core::{Binning, ConeSpec, HomogeneityExponent, Point, QuadratureSpec, StableSpec};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_N_PATHS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUTPUT: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Survival,
    Beta,
    Yaglom,
    Entrance,
    QsCheck,
    CauchyExact,
    Factorization,
    Constants,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Survival,
        Experiment::Beta,
        Experiment::Yaglom,
        Experiment::Entrance,
        Experiment::QsCheck,
        Experiment::CauchyExact,
        Experiment::Factorization,
        Experiment::Constants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Survival => "survival",
            Experiment::Beta => "beta",
            Experiment::Yaglom => "yaglom",
            Experiment::Entrance => "entrance",
            Experiment::QsCheck => "qs-check",
            Experiment::CauchyExact => "cauchy-exact",
            Experiment::Factorization => "factorization",
            Experiment::Constants => "constants",
        }
    }

    /// Experiments that only evaluate the Cauchy half-line oracle.
    pub fn is_oracle(self) -> bool {
        matches!(self, Experiment::CauchyExact | Experiment::Factorization | Experiment::Constants)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::invalid("experiment", format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl ConfigError {
    fn invalid(key: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    /// The offending key for validation errors.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { key, .. } => Some(key),
            _ => None,
        }
    }
}

/// A coordinate given either as a number (a multiple of the cone axis) or
/// as a full point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Coord {
    fn to_point(&self, key: &str, dim: usize) -> Result<Point, ConfigError> {
        let p = match self {
            Coord::Scalar(s) => Point::unit_axis(dim).scaled(*s),
            Coord::Vector(v) => {
                if v.len() != dim {
                    return Err(ConfigError::invalid(key, format!("expected {dim} coordinates, got {}", v.len())));
                }
                Point::new(v.clone()).map_err(|e| ConfigError::invalid(key, e.to_string()))?
            }
        };
        if p.coords().iter().any(|c| !c.is_finite()) {
            return Err(ConfigError::invalid(key, "coordinates must be finite"));
        }
        Ok(p)
    }
}

/// The file as written, one field per key. After [`ConfigFile::fill_defaults`]
/// it doubles as the echo stored in the manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wedge_angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_aperture: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Coord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_radial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_angular: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_small: Option<Coord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yaglom_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub golden: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn line_of(text: &str, offset: usize) -> usize {
    1 + text.as_bytes()[..offset.min(text.len())].iter().filter(|&&b| b == b'\n').count()
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
            message: e.message().to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// The file as TOML, suitable for re-running.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    fn dim(&self) -> usize {
        match self.cone.as_deref() {
            Some("half-line") => 1,
            Some("wedge") => 2,
            _ => self.dim.unwrap_or(1),
        }
    }

    /// Fill every key the experiment reads with its default.
    pub fn fill_defaults(&mut self, exp: Experiment) {
        self.experiment = Some(exp.name().to_string());
        let quad = QuadratureSpec::default();
        self.rel_tol.get_or_insert(quad.rel_tol);
        self.abs_tol.get_or_insert(quad.abs_tol);
        self.lambda_max.get_or_insert(quad.lambda_max);
        self.max_subdivisions.get_or_insert(quad.max_subdivisions);
        self.output.get_or_insert_with(|| DEFAULT_OUTPUT.to_string());
        self.seed.get_or_insert(DEFAULT_SEED);
        if exp.is_oracle() {
            if exp != Experiment::Constants && self.probes.is_none() {
                self.probes = Some(default_probes());
            }
            return;
        }
        self.dt.get_or_insert(DEFAULT_DT);
        self.n_paths.get_or_insert(DEFAULT_N_PATHS);
        self.x.get_or_insert(Coord::Scalar(1.0));
        if self.t.is_none() && self.t_grid.is_none() {
            match exp {
                Experiment::Survival => self.t = Some(1.0),
                Experiment::Yaglom => self.t = Some(256.0),
                Experiment::Beta => self.t_grid = Some(vec![8.0, 16.0, 32.0, 64.0, 128.0, 256.0]),
                Experiment::Entrance => self.t_grid = Some(vec![1.0, 4.0]),
                Experiment::QsCheck => self.t_grid = Some(vec![1.0, 4.0, 16.0]),
                _ => {}
            }
        }
        if exp == Experiment::Entrance {
            self.x_small.get_or_insert(Coord::Scalar(0.01));
        }
        if exp == Experiment::QsCheck {
            self.yaglom_t.get_or_insert(256.0);
        }
        if matches!(exp, Experiment::Yaglom | Experiment::Entrance | Experiment::QsCheck) {
            let uniform_given = self.bin_lo.is_some() || self.bin_hi.is_some() || self.n_bins.is_some();
            let polar_given = self.r_min.is_some() || self.r_max.is_some() || self.n_radial.is_some() || self.n_angular.is_some();
            if self.dim() == 1 && !polar_given {
                self.bin_lo.get_or_insert(0.0);
                self.bin_hi.get_or_insert(100.0);
                self.n_bins.get_or_insert(500);
            } else if self.dim() > 1 && !uniform_given {
                self.r_min.get_or_insert(0.05);
                self.r_max.get_or_insert(50.0);
                self.n_radial.get_or_insert(40);
                self.n_angular.get_or_insert(8);
            }
        }
    }
}

/// 50 log-spaced points on `[1e-3, 1e3]`.
pub fn default_probes() -> Vec<f64> {
    (0..50).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 49.0)).collect()
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub cone: ConeSpec,
    pub spec: StableSpec,
    pub x: Point,
    /// `t` or `t_grid`, sorted as given.
    pub times: Vec<f64>,
    pub dt: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub binning: Option<Binning>,
    pub x_small: Option<Point>,
    pub yaglom_t: f64,
    pub beta: Option<HomogeneityExponent>,
    pub probes: Vec<f64>,
    pub quad: QuadratureSpec,
    pub golden: Option<PathBuf>,
    pub output: PathBuf,
    pub workers: Option<usize>,
    /// The file with defaults filled in.
    pub echo: ConfigFile,
}

fn require<T: Copy>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::invalid(key, "missing"))
}

fn positive(v: f64, key: &str) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::invalid(key, format!("must be positive and finite, got {v}")))
    }
}

fn parse_cone(f: &ConfigFile) -> Result<ConeSpec, ConfigError> {
    let kind = f.cone.as_deref().ok_or_else(|| ConfigError::invalid("cone", "missing"))?;
    let core = |key: &str, e: cone_yaglom_core::Error| ConfigError::invalid(key, e.to_string());
    let cone = match kind {
        "half-line" => {
            if f.dim.is_some_and(|d| d != 1) {
                return Err(ConfigError::invalid("dim", "the half-line has dim = 1"));
            }
            ConeSpec::HalfLine
        }
        "half-space" => ConeSpec::half_space(require(f.dim, "dim")?).map_err(|e| core("dim", e))?,
        "wedge" => {
            if f.dim.is_some_and(|d| d != 2) {
                return Err(ConfigError::invalid("dim", "a planar wedge has dim = 2"));
            }
            let angle = require(f.wedge_angle, "wedge_angle")?;
            ConeSpec::wedge(angle).map_err(|e| core("wedge_angle", e))?
        }
        "circular" => {
            let dim = require(f.dim, "dim")?;
            let h = require(f.half_aperture, "half_aperture")?;
            ConeSpec::circular(dim, h).map_err(|e| match e {
                cone_yaglom_core::Error::Invalid { name: "dim", .. } => core("dim", e),
                _ => core("half_aperture", e),
            })?
        }
        other => {
            return Err(ConfigError::invalid(
                "cone",
                format!("unknown cone `{other}` (expected half-line, half-space, wedge or circular)"),
            ))
        }
    };
    if kind != "wedge" && f.wedge_angle.is_some() {
        return Err(ConfigError::invalid("wedge_angle", "only used with cone = \"wedge\""));
    }
    if kind != "circular" && f.half_aperture.is_some() {
        return Err(ConfigError::invalid("half_aperture", "only used with cone = \"circular\""));
    }
    Ok(cone)
}

fn parse_binning(f: &ConfigFile, dim: usize) -> Result<Option<Binning>, ConfigError> {
    let uniform = [f.bin_lo.is_some(), f.bin_hi.is_some(), f.n_bins.is_some()];
    let polar = [f.r_min.is_some(), f.r_max.is_some(), f.n_radial.is_some(), f.n_angular.is_some()];
    let err = |key: &str, e: cone_yaglom_core::Error| ConfigError::invalid(key, e.to_string());
    if uniform.iter().any(|&b| b) && polar.iter().any(|&b| b) {
        return Err(ConfigError::invalid("r_min", "give either bin_lo/bin_hi/n_bins or r_min/r_max/n_radial/n_angular"));
    }
    if uniform.iter().any(|&b| b) {
        if dim != 1 {
            return Err(ConfigError::invalid("bin_lo", "uniform bins need dim = 1; use r_min/r_max/n_radial/n_angular"));
        }
        let (lo, hi, n) = (require(f.bin_lo, "bin_lo")?, require(f.bin_hi, "bin_hi")?, require(f.n_bins, "n_bins")?);
        if n == 0 {
            return Err(ConfigError::invalid("n_bins", "must be at least 1"));
        }
        if !(lo >= 0.0) {
            return Err(ConfigError::invalid("bin_lo", "must be nonnegative"));
        }
        return Binning::uniform(lo, hi, n).map(Some).map_err(|e| err("bin_hi", e));
    }
    if polar.iter().any(|&b| b) {
        if dim < 2 {
            return Err(ConfigError::invalid("r_min", "polar bins need dim >= 2"));
        }
        let r_min = positive(require(f.r_min, "r_min")?, "r_min")?;
        let r_max = require(f.r_max, "r_max")?;
        if !(r_max > r_min) {
            return Err(ConfigError::invalid("r_max", "must exceed r_min"));
        }
        let n_radial = require(f.n_radial, "n_radial")?;
        if n_radial < 2 {
            return Err(ConfigError::invalid("n_radial", "must be at least 2"));
        }
        let n_angular = require(f.n_angular, "n_angular")?;
        if n_angular == 0 {
            return Err(ConfigError::invalid("n_angular", "must be at least 1"));
        }
        return Binning::polar(r_min, r_max, n_radial, n_angular).map(Some).map_err(|e| err("r_min", e));
    }
    Ok(None)
}

fn parse_times(f: &ConfigFile, exp: Experiment) -> Result<Vec<f64>, ConfigError> {
    let times = match (f.t, &f.t_grid) {
        (Some(_), Some(_)) => return Err(ConfigError::invalid("t_grid", "give either t or t_grid, not both")),
        (Some(t), None) => vec![positive(t, "t")?],
        (None, Some(g)) => {
            if g.is_empty() {
                return Err(ConfigError::invalid("t_grid", "must not be empty"));
            }
            for &t in g {
                positive(t, "t_grid")?;
            }
            if g.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(ConfigError::invalid("t_grid", "times must be strictly increasing"));
            }
            g.clone()
        }
        (None, None) => Vec::new(),
    };
    match exp {
        Experiment::Yaglom if times.len() != 1 => Err(ConfigError::invalid("t", "the yaglom experiment takes a single time t")),
        Experiment::Beta if times.len() < 4 => Err(ConfigError::invalid("t_grid", "β regression needs at least 4 times")),
        Experiment::Beta if times[times.len() - 1] / times[0] < 10f64.powf(1.5) * (1.0 - 1e-12) => {
            Err(ConfigError::invalid("t_grid", "times must span at least 1.5 decades"))
        }
        _ => Ok(times),
    }
}

impl RunConfig {
    /// Validate `file` for `exp`. Defaults are filled first, so every key a
    /// run reads is checked before anything is computed.
    pub fn resolve(mut file: ConfigFile, exp: Experiment) -> Result<Self, ConfigError> {
        if let Some(e) = file.experiment.as_deref() {
            if e.parse::<Experiment>()? != exp {
                return Err(ConfigError::invalid("experiment", format!("config is for `{e}` but `{exp}` was requested")));
            }
        }
        file.fill_defaults(exp);
        let f = &file;

        let alpha = require(f.alpha, "alpha")?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(ConfigError::invalid("alpha", format!("alpha must be in (0,2), got {alpha}")));
        }
        let cone = parse_cone(f)?;
        let dim = cone.dim();
        let spec = StableSpec::new(alpha, dim).map_err(|e| ConfigError::invalid("alpha", e.to_string()))?;
        if exp.is_oracle() && (cone != ConeSpec::HalfLine || alpha != 1.0) {
            return Err(ConfigError::invalid(
                "cone",
                format!("`{exp}` evaluates the Cauchy half-line oracle; it needs cone = \"half-line\" and alpha = 1"),
            ));
        }

        let quad = QuadratureSpec::new(
            require(f.rel_tol, "rel_tol")?,
            require(f.abs_tol, "abs_tol")?,
            require(f.lambda_max, "lambda_max")?,
            require(f.max_subdivisions, "max_subdivisions")?,
        )
        .map_err(|e| match e {
            cone_yaglom_core::Error::Invalid { name, reason } => ConfigError::invalid(name, reason),
            other => ConfigError::invalid("rel_tol", other.to_string()),
        })?;

        let x = f.x.as_ref().map(|c| c.to_point("x", dim)).transpose()?.unwrap_or_else(|| Point::unit_axis(dim));
        let x_small = f.x_small.as_ref().map(|c| c.to_point("x_small", dim)).transpose()?;
        if let Some(p) = &x_small {
            if !cone.contains(p).unwrap_or(false) {
                return Err(ConfigError::invalid("x_small", "must lie inside the cone"));
            }
        }
        let times = parse_times(f, exp)?;
        let dt = match f.dt {
            Some(dt) => positive(dt, "dt")?,
            None => DEFAULT_DT,
        };
        let n_paths = f.n_paths.unwrap_or(DEFAULT_N_PATHS);
        if n_paths == 0 && !exp.is_oracle() {
            return Err(ConfigError::invalid("n_paths", "must be at least 1"));
        }
        let binning = parse_binning(f, dim)?;
        let yaglom_t = match f.yaglom_t {
            Some(t) => positive(t, "yaglom_t")?,
            None => 256.0,
        };
        let beta = match (f.beta, f.beta_stderr) {
            (Some(b), se) => {
                let se = se.unwrap_or(0.0);
                if !(se >= 0.0 && se.is_finite()) {
                    return Err(ConfigError::invalid("beta_stderr", "must be nonnegative"));
                }
                Some(HomogeneityExponent::estimated(b, se, alpha).map_err(|e| ConfigError::invalid("beta", e.to_string()))?)
            }
            (None, Some(_)) => return Err(ConfigError::invalid("beta_stderr", "given without beta")),
            (None, None) => HomogeneityExponent::closed_form(&cone, alpha).ok(),
        };
        if exp == Experiment::QsCheck && beta.is_none() {
            return Err(ConfigError::invalid("beta", "no closed form for this cone; supply beta (e.g. from the beta experiment)"));
        }
        let probes = f.probes.clone().unwrap_or_default();
        for &p in &probes {
            positive(p, "probes")?;
        }
        if let Some(w) = f.workers {
            if w == 0 {
                return Err(ConfigError::invalid("workers", "must be at least 1"));
            }
        }
        if !exp.is_oracle() && !cone.contains(&x).unwrap_or(false) && exp != Experiment::Survival {
            return Err(ConfigError::invalid("x", "start point must lie inside the cone"));
        }

        Ok(RunConfig {
            experiment: exp,
            cone,
            spec,
            x,
            times,
            dt,
            n_paths,
            seed: f.seed.unwrap_or(DEFAULT_SEED),
            binning,
            x_small,
            yaglom_t,
            beta,
            probes,
            quad,
            golden: f.golden.as_ref().map(PathBuf::from),
            output: PathBuf::from(f.output.as_deref().unwrap_or(DEFAULT_OUTPUT)),
            workers: f.workers,
            echo: file,
        })
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Read, override and validate a config file.
pub fn load_config(path: &Path, exp: Experiment, over: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut file = ConfigFile::read(path)?;
    if let Some(s) = over.seed {
        file.seed = Some(s);
    }
    if let Some(w) = over.workers {
        file.workers = Some(w);
    }
    if let Some(o) = &over.out {
        file.output = Some(o.to_string_lossy().into_owned());
    }
    RunConfig::resolve(file, exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ConfigFile, ConfigError> {
        ConfigFile::parse(s, Path::new("test.toml"))
    }

    #[test]
    fn parse_error_reports_line() {
        let e = parse("cone = \"half-line\"\nalpha = 1\nx = [1,\n").unwrap_err();
        match e {
            ConfigError::Parse { line, .. } => assert!(line >= 3, "{line}"),
            other => panic!("{other}"),
        }
        let e = parse("cone = \"half-line\"\n\nbogus = 3\n").unwrap_err();
        match e {
            ConfigError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn scalar_or_vector_start() {
        let f = parse("cone = \"wedge\"\nwedge_angle = 2.0\nalpha = 1.5\nx = 3\n").unwrap();
        let c = RunConfig::resolve(f, Experiment::Survival).unwrap();
        assert_eq!(c.x.coords(), &[0.0, 3.0]);
        let f = parse("cone = \"wedge\"\nwedge_angle = 2.0\nalpha = 1.5\nx = [0.1, 3]\n").unwrap();
        let c = RunConfig::resolve(f, Experiment::Survival).unwrap();
        assert_eq!(c.x.coords(), &[0.1, 3.0]);
        let f = parse("cone = \"wedge\"\nwedge_angle = 2.0\nalpha = 1.5\nx = [1, 2, 3]\n").unwrap();
        assert_eq!(RunConfig::resolve(f, Experiment::Survival).unwrap_err().key(), Some("x"));
    }

    #[test]
    fn echo_round_trips() {
        let f = parse("cone = \"half-line\"\nalpha = 1\n").unwrap();
        let c = RunConfig::resolve(f, Experiment::Yaglom).unwrap();
        let again = parse(&c.echo.to_toml()).unwrap();
        assert_eq!(again, c.echo);
        let c2 = RunConfig::resolve(again, Experiment::Yaglom).unwrap();
        assert_eq!(c2.echo, c.echo);
        assert_eq!(c2.binning, c.binning);
    }

    #[test]
    fn oracle_experiments_need_the_cauchy_half_line() {
        let f = parse("cone = \"half-line\"\nalpha = 1.5\n").unwrap();
        assert_eq!(RunConfig::resolve(f, Experiment::Constants).unwrap_err().key(), Some("cone"));
    }

    #[test]
    fn qs_check_needs_beta_without_closed_form() {
        let f = parse("cone = \"wedge\"\nwedge_angle = 1.0\nalpha = 1\nr_min = 0.1\nr_max = 10\nn_radial = 5\nn_angular = 2\n").unwrap();
        assert_eq!(RunConfig::resolve(f.clone(), Experiment::QsCheck).unwrap_err().key(), Some("beta"));
        let f = ConfigFile { beta: Some(0.9), ..f };
        assert!(RunConfig::resolve(f, Experiment::QsCheck).is_ok());
    }
}
