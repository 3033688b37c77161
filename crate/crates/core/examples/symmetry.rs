//! Geometric symmetries of the landscape: the tritter setting is invariant
//! under the 120° rotation that cycles the three detectors, and shifting the
//! phase by π swaps the two time axes.

use std::f64::consts::PI;

use tr_boson::analysis::{fidelity, symmetry_score, Transform};
use tr_boson::correlation::landscape_theory;
use tr_boson::grid::GridSpec;
use tr_boson::network::paper_network;
use tr_boson::wavepacket::paper_sources;

fn main() -> tr_boson::Result<()> {
    let s = paper_sources();
    let g = GridSpec::default();
    let land = |phi: f64| landscape_theory(&paper_network(phi)?, &s, [1, 2, 3], &g);
    let phases = [0.0, PI / 2.0, PI, 1.5 * PI];
    let grids: Vec<_> = phases.iter().map(|&p| land(p)).collect::<tr_boson::Result<_>>()?;

    println!("phi     axis_swap  rotation_120  mirror");
    for (phi, f) in phases.iter().zip(&grids) {
        let scores: Vec<f64> = Transform::ALL.iter().map(|&t| symmetry_score(f, t)).collect::<tr_boson::Result<_>>()?;
        println!("{phi:5.3}   {:.4}     {:.4}        {:.4}", scores[0], scores[1], scores[2]);
    }
    println!("F(f_pi, f_0 transposed)      = {:.6}", fidelity(&grids[2], &grids[0].transposed())?);
    println!("F(f_3pi/2, f_pi/2 transposed) = {:.6}", fidelity(&grids[3], &grids[1].transposed())?);
    Ok(())
}
