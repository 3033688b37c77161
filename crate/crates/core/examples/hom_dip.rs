//! Two photons of different colour on a balanced beamsplitter. Their
//! coincidence density oscillates at the detuning difference, yet it always
//! vanishes when both detectors click at the same instant.

use tr_boson::correlation::{joint_density, DetectionConfig};
use tr_boson::network::{circuit_to_unitary, CircuitElement};
use tr_boson::wavepacket::{Envelope, SourceSet, Wavepacket};

fn main() -> tr_boson::Result<()> {
    let bs = circuit_to_unitary(&[CircuitElement::beamsplitter(1, 2, 0.5)], 2)?;
    let env = Envelope::double_exponential_ns(5.0, 100.0);
    let t2 = 40.0;
    for delta in [0.0, 20.0, 39.4] {
        let sources = SourceSet::ideal(vec![Wavepacket::new(env.clone(), 0.0, 0.0)?, Wavepacket::new(env.clone(), 0.0, delta)?])?;
        println!("detuning difference {delta} MHz (t2 = {t2} ns)");
        for tau in [-30.0, -20.0, -10.0, -5.0, 0.0, 5.0, 10.0, 20.0, 30.0] {
            let p = joint_density(&bs, &sources, &DetectionConfig::new(vec![1, 2], vec![t2 + tau, t2]))?;
            println!("  t1 - t2 = {tau:6.1} ns   p = {p:.4e} /ns^2");
        }
    }
    Ok(())
}
