//! Command-line driver for `cone-yaglom-core`: flat TOML run configs,
//! experiment dispatch, CSV/JSON outputs and run manifests.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod golden;
pub mod output;
pub mod pool;
pub mod run;

pub use config::{load_config, ConfigFile, Experiment, Overrides, RunConfig};
pub use error::{exit_code, CliError};
pub use output::RunManifest;
pub use pool::Pool;
pub use run::{run, RunOptions};

/// Load, build the worker pool and run: everything `main` does apart from
/// argument parsing and reporting.
pub fn execute(
    config: &std::path::Path,
    experiment: Experiment,
    over: &Overrides,
    workers_env: Option<&str>,
    opts: &RunOptions,
) -> Result<RunManifest, CliError> {
    let cfg = load_config(config, experiment, over)?;
    let workers = pool::resolve_workers(workers_env, over.workers, cfg.workers).map_err(|reason| config::ConfigError::Invalid {
        key: "workers".into(),
        reason,
    })?;
    let pool = Pool::new(workers).map_err(|e| CliError::Pool(e.to_string()))?;
    run(&cfg, &pool, pool.workers(), opts)
}
