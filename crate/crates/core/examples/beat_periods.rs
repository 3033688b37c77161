//! Beat periods of the theory landscape as the interferometer phase is tuned.

use std::f64::consts::PI;

use tr_boson::analysis::{beat_periods, Spectrum, Window};
use tr_boson::correlation::landscape_theory;
use tr_boson::grid::GridSpec;
use tr_boson::network::paper_network;
use tr_boson::wavepacket::paper_sources;

fn main() -> tr_boson::Result<()> {
    let sources = paper_sources();
    let d = sources.detunings();
    println!("detunings {d:?} MHz");
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        println!("  1/|nu{} - nu{}| = {:.2} ns", a + 1, b + 1, 1e3 / (d[a] - d[b]).abs());
    }
    let grid = GridSpec::default();
    for k in 0..4 {
        let phi = k as f64 * PI / 4.0;
        let f = landscape_theory(&paper_network(phi)?, &sources, [1, 2, 3], &grid)?;
        let p = beat_periods(&f)?;
        let sx = Spectrum::new(&f.marginal_x(), grid.step, Window::Rectangular);
        println!(
            "phi = {:4.2}: x period {:6.2} +- {:.2} ns, y period {:6.2} +- {:.2} ns, x peak/DC {:.3}",
            phi,
            p.x.value,
            p.x.error,
            p.y.value,
            p.y.error,
            sx.peak_to_dc()
        );
    }
    Ok(())
}
