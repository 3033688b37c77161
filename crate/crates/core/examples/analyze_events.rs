//! Sampled events against theory: kernel smoothing, overlap fidelity, beat
//! periods and symmetry scores collected in one report.

use std::f64::consts::PI;

use tr_boson::analysis::{analyze, DEFAULT_R0_NS};
use tr_boson::correlation::landscape_theory;
use tr_boson::grid::GridSpec;
use tr_boson::network::paper_network;
use tr_boson::sampler::{sample_events, NoiseModel};
use tr_boson::wavepacket::paper_sources;

fn main() -> tr_boson::Result<()> {
    let u = paper_network(PI / 2.0)?;
    let s = paper_sources();
    let theory = landscape_theory(&u, &s, [1, 2, 3], &GridSpec::default())?;
    for (label, noise) in [("ideal", NoiseModel::ideal(3)), ("experimental", NoiseModel::paper())] {
        let events = sample_events(&u, &s, &noise, 30_000, 9)?;
        let report = analyze(&events, &theory, DEFAULT_R0_NS)?;
        println!("## {label}\n{}", report.to_toml());
    }
    Ok(())
}
