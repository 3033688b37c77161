//! Monte Carlo threefold events, with and without experimental imperfections.
//!
//! cargo run --release --example sample_events [n_events] [output file]

use std::f64::consts::PI;

use tr_boson::network::paper_network;
use tr_boson::sampler::{write_events, NoiseModel, Sampler, Statistics};
use tr_boson::wavepacket::paper_sources;

fn main() -> tr_boson::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let out = args.next().unwrap_or_else(|| "events.csv".into());

    let u = paper_network(PI / 2.0)?;
    let sources = paper_sources();
    for (label, noise) in [("ideal", NoiseModel::ideal(3)), ("experimental", NoiseModel::paper())] {
        let run = Sampler::new(&u, &sources, &noise, Statistics::Quantum)?.run(n, 1)?;
        let contaminated = run.events.iter().filter(|e| e.contaminated).count();
        println!(
            "{label:>12}: {} events from {} trials, rejection acceptance {:.3}, contaminated {contaminated}",
            run.events.len(),
            run.trials,
            run.acceptance()
        );
        if label == "ideal" {
            for e in run.events.iter().take(3) {
                println!("              {e:?}");
            }
            write_events(std::path::Path::new(&out), &run.events, None)?;
            println!("              wrote {out}");
        }
    }
    Ok(())
}
