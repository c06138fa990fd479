//! Rayon-backed [`Executor`] with a capped worker count.

use cone_yaglom_core::Executor;
use rayon::prelude::*;

/// Environment variable that overrides the `--workers` flag.
pub const WORKERS_ENV: &str = "CONE_YAGLOM_WORKERS";

pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
        Ok(Pool { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Pool {
    fn map_blocks<T, F>(&self, n_blocks: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync,
    {
        // Indexed collect keeps block order whatever the schedule.
        self.pool.install(|| (0..n_blocks).into_par_iter().map(&f).collect())
    }
}

/// Worker count: environment, then flag, then config, then all cores.
pub fn resolve_workers(env: Option<&str>, flag: Option<usize>, config: Option<usize>) -> Result<usize, String> {
    if let Some(v) = env.map(str::trim).filter(|v| !v.is_empty()) {
        return match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")),
        };
    }
    Ok(flag
        .or(config)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)))
}
