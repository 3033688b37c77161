//! Theoretical threefold correlation landscape `f(t₁ − t₃, t₂ − t₃)`.
//!
//! cargo run --release --example landscape [phi] [output file]

use tr_boson::correlation::landscape_theory;
use tr_boson::grid::GridSpec;
use tr_boson::network::paper_network;
use tr_boson::wavepacket::paper_sources;

fn main() -> tr_boson::Result<()> {
    let mut args = std::env::args().skip(1);
    let phi: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.0);
    let out = args.next().unwrap_or_else(|| "landscape.txt".into());

    let f = landscape_theory(&paper_network(phi)?, &paper_sources(), [1, 2, 3], &GridSpec::default())?;
    let spec = *f.spec();
    let (mut best, mut at) = (0.0, (0.0, 0.0));
    for j in 0..spec.ny() {
        for i in 0..spec.nx() {
            if f.at(i, j) > best {
                best = f.at(i, j);
                at = (spec.x(i), spec.y(j));
            }
        }
    }
    println!("phi = {phi}");
    println!("max f = {best:.4e} /ns^2 at (x, y) = ({}, {}) ns", at.0, at.1);
    println!("f(0, 0) / max = {:.3e}", f.interpolate(0.0, 0.0).unwrap_or(0.0) / best);

    // Coarse text picture, brighter characters for larger values.
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    for y in (-60..=60).rev().step_by(6) {
        let row: String = (-60..=60)
            .step_by(3)
            .map(|x| {
                let v = f.interpolate(x as f64, y as f64).unwrap_or(0.0) / best;
                shades[((v * 9.0).round() as usize).min(9)]
            })
            .collect();
        println!("{y:4} |{row}|");
    }
    f.write(std::path::Path::new(&out), None)?;
    println!("wrote {out}");
    Ok(())
}
