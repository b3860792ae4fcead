use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use quintic_lab_cli::{run_config, CliError, ExperimentConfig, ExperimentId, Format};

#[derive(Parser)]
#[command(name = "quintic-lab", version, about = "Run quintic-lab experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML parameter file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the experiment named by `experiment = "..."` in the config.
    Run,
    /// Runs the named experiment.
    #[command(name = "exp")]
    Experiment {
        #[arg(value_enum)]
        id: ExperimentId,
    },
    /// Lists the experiment ids.
    List,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::usage("threads", e.to_string()))?;
    }
    let id = match cli.command {
        Command::List => {
            for id in ExperimentId::ALL {
                println!("{id}");
            }
            return Ok(());
        }
        Command::Run => None,
        Command::Experiment { id } => Some(id),
    };
    let mut cfg = match (&cli.config, id) {
        (Some(path), id) => ExperimentConfig::load(path, id)?,
        (None, Some(id)) => ExperimentConfig::new(id),
        (None, None) => return Err(CliError::usage("config", "`run` needs --config")),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    run_config(&cfg)?.emit(cli.format, cli.out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
