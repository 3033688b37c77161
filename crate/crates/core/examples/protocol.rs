//! Rate enhancement of the repeat-until-success protocol: closed form versus
//! Monte Carlo, and its dependence on the number of trials per batch.

use tr_boson::protocol::{enhancement_factor, ProtocolConfig, ProtocolReport};
use tr_boson::sampler::{table_contamination, G2_EXCITATION};

fn main() -> tr_boson::Result<()> {
    println!("p_e    closed form   Monte Carlo            z      contamination q");
    for p_e in G2_EXCITATION {
        let r = ProtocolReport::run(&ProtocolConfig::new(p_e, 7, 3)?, 1_000_000, 7)?;
        let q = table_contamination(p_e).unwrap_or_default();
        println!(
            "{p_e:.2}   {:10.3}   {:8.3} +- {:6.3}   {:5.2}   {:.3?}",
            r.closed_form, r.estimate.ratio, r.estimate.stderr_ratio, r.z, q
        );
    }
    println!("\nenhancement at p_e = 0.04 versus m");
    for m in [1, 2, 4, 7, 10, 15, 25] {
        let e3 = enhancement_factor(&ProtocolConfig::new(0.04, m, 3)?);
        let e1 = enhancement_factor(&ProtocolConfig::new(0.04, m, 1)?);
        println!("  m = {m:2}: n = 3 {e3:8.2}   n = 1 {e1:.3}");
    }
    Ok(())
}
