use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tr_boson::cli::{cmd_analyze, cmd_landscape, cmd_network, cmd_protocol, cmd_sample, CommandOutcome};
use tr_boson::config::RunConfig;

/// Time-resolved boson sampling with spectrally distinct photons.
#[derive(Parser)]
#[command(name = "trbs", version)]
struct Cli {
    /// Run configuration (TOML); defaults apply when omitted.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Dotted-path override, e.g. `--set network.phi=1.5708` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the unitary, its permanent and the anchor checks.
    Network,
    /// Write the theoretical correlation landscape.
    Landscape {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail unless the centre of the landscape is dark.
        #[arg(long)]
        verify: bool,
    },
    /// Write sampled detection events.
    Sample {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare an event file with a theory landscape (or another event file).
    Analyze {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        theory: PathBuf,
        /// Proceed even if the two files carry different config hashes.
        #[arg(long)]
        force: bool,
    },
    /// Simulate the repeat-until-success protocol.
    Protocol,
}

fn run(cli: Cli) -> tr_boson::Result<CommandOutcome> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| tr_boson::Error::Config(format!("thread pool: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path, &cli.overrides)?,
        None => RunConfig::with_overrides(&cli.overrides)?,
    };
    match cli.command {
        Command::Network => cmd_network(&cfg),
        Command::Landscape { out, verify } => cmd_landscape(&cfg, out.as_deref(), verify),
        Command::Sample { out } => cmd_sample(&cfg, out.as_deref()),
        Command::Analyze { events, theory, force } => cmd_analyze(&cfg, &events, &theory, force),
        Command::Protocol => cmd_protocol(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error kind={} message={:?}", e.kind(), e.to_string());
            ExitCode::from(2)
        }
    }
}
