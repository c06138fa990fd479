//! Reference values of the Cauchy half-line functions at fixed probes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use cone_yaglom_core::{CauchyHalfLine, QuadratureSpec};

use crate::error::CliError;

/// The table shipped with the binary.
pub const EMBEDDED: &str = include_str!("../goldens/cauchy_halfline.json");

/// Where `--regenerate-golden` writes when the config names no file.
pub const DEFAULT_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/goldens/cauchy_halfline.json");

/// Names and evaluation rules of the tabulated functions.
pub const FUNCTIONS: [&str; 9] = [
    "log_weight_integral",
    "xi",
    "survival_x1",
    "r_function",
    "psi",
    "yaglom_density",
    "yaglom_cdf",
    "heat_kernel_t1_x1",
    "factorization_x1",
];

pub fn evaluate(o: &CauchyHalfLine, name: &str, p: f64) -> cone_yaglom_core::Result<f64> {
    match name {
        "log_weight_integral" => o.log_weight_integral(p),
        "xi" => o.xi(p),
        "survival_x1" => o.survival(1.0, p),
        "r_function" => o.r_function(p),
        "psi" => o.psi(p),
        "yaglom_density" => o.yaglom_density(p),
        "yaglom_cdf" => o.yaglom_cdf(p),
        "heat_kernel_t1_x1" => o.heat_kernel(1.0, 1.0, p),
        "factorization_x1" => o.factorization_ratio(1.0, p),
        _ => unreachable!("unknown golden function {name}"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenTable {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub probes: Vec<f64>,
    pub functions: BTreeMap<String, Vec<f64>>,
}

impl GoldenTable {
    pub fn compute(o: &CauchyHalfLine, probes: &[f64]) -> cone_yaglom_core::Result<Self> {
        let mut functions = BTreeMap::new();
        for name in FUNCTIONS {
            let v = probes.iter().map(|&p| evaluate(o, name, p)).collect::<cone_yaglom_core::Result<Vec<_>>>()?;
            functions.insert(name.to_string(), v);
        }
        let q: &QuadratureSpec = o.quad();
        Ok(GoldenTable {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            probes: probes.to_vec(),
            functions,
        })
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Golden {
            path: origin.to_string(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Largest absolute and relative differences at the probes both tables
    /// share, and how many values were compared.
    pub fn deviation(&self, reference: &GoldenTable) -> Deviation {
        let mut d = Deviation::default();
        for (name, values) in &self.functions {
            let Some(ref_values) = reference.functions.get(name) else { continue };
            for (i, p) in self.probes.iter().enumerate() {
                let Some(j) = reference.probes.iter().position(|q| q.to_bits() == p.to_bits()) else { continue };
                let (a, b) = (values[i], ref_values[j]);
                let abs = (a - b).abs();
                d.max_abs = d.max_abs.max(abs);
                if b != 0.0 {
                    d.max_rel = d.max_rel.max(abs / b.abs());
                }
                d.compared += 1;
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub max_abs: f64,
    pub max_rel: f64,
    pub compared: usize,
}
