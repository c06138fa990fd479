use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cone_yaglom::pool::WORKERS_ENV;
use cone_yaglom::{execute, Experiment, Overrides, RunOptions};

/// Monte Carlo and quadrature experiments for stable processes killed on
/// leaving a cone.
#[derive(Debug, Parser)]
#[command(name = "cone-yaglom", version)]
struct Args {
    /// survival, beta, yaglom, entrance, qs-check, cauchy-exact,
    /// factorization or constants.
    experiment: String,
    /// Flat TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; the CONE_YAGLOM_WORKERS environment variable wins.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// cauchy-exact only: overwrite the golden file with the new values.
    #[arg(long)]
    regenerate_golden: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let experiment: Experiment = match args.experiment.parse() {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cone_yaglom::exit_code::VALIDATION as u8);
        }
    };
    let over = Overrides {
        seed: args.seed,
        workers: args.workers,
        out: args.out,
    };
    let env = std::env::var(WORKERS_ENV).ok();
    let opts = RunOptions {
        regenerate_golden: args.regenerate_golden,
    };
    match execute(&args.config, experiment, &over, env.as_deref(), &opts) {
        Ok(m) => {
            let dir = m.config.output.as_deref().unwrap_or(".");
            for f in &m.outputs {
                println!("{dir}/{}", f.path);
            }
            println!("{dir}/{}", cone_yaglom::RunManifest::file_name(&m.experiment));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
