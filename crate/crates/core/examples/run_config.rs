//! Configuration-driven runs, as the `trbs` binary does them: load a TOML
//! file, apply overrides, and run the network, landscape, sample and analyze
//! commands into one output directory.
//!
//! cargo run --release --example run_config [config file] [KEY=VALUE ...]

use std::path::PathBuf;

use tr_boson::cli::{cmd_analyze, cmd_landscape, cmd_network, cmd_sample};
use tr_boson::config::RunConfig;

fn main() -> tr_boson::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/tritter.toml"));
    let overrides: Vec<String> = args.collect();
    let cfg = RunConfig::load(&path, &overrides)?;
    println!("config {} (hash {})", path.display(), &cfg.config_hash()[..16]);

    print!("{}", cmd_network(&cfg)?.report);
    let landscape = cmd_landscape(&cfg, None, false)?;
    print!("{}", landscape.report);
    let sample = cmd_sample(&cfg, None)?;
    print!("{}", sample.report);
    let analysis = cmd_analyze(&cfg, &sample.written[0], &landscape.written[0], false)?;
    print!("{}", analysis.report);
    println!("analysis thresholds {}", if analysis.success { "met" } else { "not met" });
    Ok(())
}
