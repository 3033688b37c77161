//! Envelope shapes and their effect on interference: overlaps between
//! detuned photons, the port distribution, and a tabulated profile.

use tr_boson::network::tritter;
use tr_boson::sampler::port_weights;
use tr_boson::wavepacket::{parse_tabulated, spectral_overlap, Envelope, SourceSet, Wavepacket, PAPER_DETUNINGS_MHZ};

fn sources(env: &Envelope) -> tr_boson::Result<SourceSet> {
    let wps = PAPER_DETUNINGS_MHZ.iter().map(|&d| Wavepacket::new(env.clone(), 0.0, d)).collect::<tr_boson::Result<_>>()?;
    SourceSet::ideal(wps)
}

fn main() -> tr_boson::Result<()> {
    let table = "# t_ns amplitude\n0 0\n4 0.8\n10 1\n40 0.5\n120 0.1\n200 0\n";
    let shapes = [
        ("double exponential 5/100 ns", Envelope::double_exponential_ns(5.0, 100.0)),
        ("double exponential 5/25 ns", Envelope::double_exponential_ns(5.0, 25.0)),
        ("one-sided exponential", Envelope::OneSidedExponential { gamma: 1.0 / 50.0 }),
        ("gaussian", Envelope::Gaussian { sigma: 20.0 }),
        ("tabulated", parse_tabulated(table, "inline")?),
    ];
    for (name, env) in shapes {
        let s = sources(&env)?;
        let o12 = spectral_overlap(s.get(0), s.get(1)).norm();
        let w = port_weights(&tritter(), &s)?;
        println!(
            "{name:30} |<1|2>| = {o12:.3}   P(one per port) = {:.4}   P(all at port 1) = {:.4}",
            6.0 * w.get(&[1, 2, 3]).unwrap_or(0.0),
            w.get(&[1, 1, 1]).unwrap_or(0.0)
        );
    }
    Ok(())
}
