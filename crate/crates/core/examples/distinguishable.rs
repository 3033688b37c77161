//! Interfering and distinguishable photons through the same network: the
//! beat pattern only survives when the photons interfere.

use tr_boson::analysis::{beat_contrast, fidelity, smooth_events};
use tr_boson::grid::GridSpec;
use tr_boson::network::paper_network;
use tr_boson::sampler::{port_weights, sample_distinguishable, sample_events, NoiseModel};
use tr_boson::wavepacket::paper_sources;

fn main() -> tr_boson::Result<()> {
    let u = paper_network(0.0)?;
    let s = paper_sources();
    let g = GridSpec::default();
    let n = 50_000;

    let w = port_weights(&u, &s)?;
    println!("P(one photon per port) = {:.4}", 6.0 * w.get(&[1, 2, 3]).unwrap_or(0.0));

    let quantum = smooth_events(&sample_events(&u, &s, &NoiseModel::ideal(3), n, 1)?, &g, 3.0)?;
    let classical = smooth_events(&sample_distinguishable(&u, &s, &NoiseModel::ideal(3), n, 1)?, &g, 3.0)?;
    let (qx, qy) = beat_contrast(&quantum);
    let (cx, cy) = beat_contrast(&classical);
    println!("beat peak / DC   quantum ({qx:.3}, {qy:.3})   distinguishable ({cx:.3}, {cy:.3})");
    println!("fidelity between the two landscapes: {:.4}", fidelity(&quantum, &classical)?);
    println!(
        "density near the origin   quantum {:.3e}   distinguishable {:.3e}",
        quantum.interpolate(0.0, 0.0).unwrap_or(0.0) / quantum.max(),
        classical.interpolate(0.0, 0.0).unwrap_or(0.0) / classical.max()
    );
    Ok(())
}
