//! CSV/JSON writers and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ConfigFile;
use crate::error::CliError;

pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const JSON_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub format: String,
    /// `<name>/<version>`, e.g. `yaglom-histogram/1`.
    pub schema: String,
}

/// Files written by one experiment, all inside one directory.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn register(&mut self, name: &str, format: &str, schema: &str, version: u32) {
        self.files.push(OutputFile {
            path: name.to_string(),
            format: format.to_string(),
            schema: format!("{schema}/{version}"),
        });
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, schema: &str, rows: &[R]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Csv { path: path.clone(), source: e })?;
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Csv { path: path.clone(), source: e })?;
        }
        w.flush().map_err(io_err(&path))?;
        self.register(name, "csv", schema, CSV_SCHEMA_VERSION);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, schema: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_json(&path, value)?;
        self.register(name, "json", schema, JSON_SCHEMA_VERSION);
        Ok(())
    }

    pub fn into_files(self) -> Vec<OutputFile> {
        self.files
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::Json)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaVersions {
    pub csv: u32,
    pub json: u32,
    pub manifest: u32,
}

/// Record of one run. Everything except `started_unix` and
/// `elapsed_seconds` is a function of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub schemas: SchemaVersions,
    pub experiment: String,
    /// The config with defaults filled; write it back as TOML to re-run.
    pub config: ConfigFile,
    pub workers: usize,
    pub started_unix: f64,
    pub elapsed_seconds: f64,
    pub outputs: Vec<OutputFile>,
    /// Achieved tolerances, standard errors and checks against known values.
    pub metrics: serde_json::Value,
}

impl RunManifest {
    pub fn file_name(experiment: &str) -> String {
        format!("{experiment}.manifest.json")
    }
}

/// Start positions and similar as a space-separated list.
pub fn join_coords(c: &[f64]) -> String {
    c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}
