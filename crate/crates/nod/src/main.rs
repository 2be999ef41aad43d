use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nod::config::parse_override;
use nod::{run, CliError, Command, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "nod", version, about = "Nonlinear opinion dynamics on the circle")]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for sweeps and batches.
    #[arg(long)]
    threads: Option<usize>,

    /// Override a config entry, e.g. `--set model.alpha=1.02`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn execute(cli: Cli) -> Result<serde_json::Value, CliError> {
    let overrides = Overrides {
        set: cli.set.iter().map(|s| parse_override(s)).collect::<Result<_, _>>()?,
        seed: cli.seed,
        output_dir: cli.out,
    };
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| run(cli.command, &cfg))
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
