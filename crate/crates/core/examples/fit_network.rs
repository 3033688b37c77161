//! Fits the fixed phases of the three-mode interferometer so that `U(0)` is
//! gauge equivalent to `U₀` and `U(π/2)` to the tritter, then prints the
//! network file that the library ships.
//!
//! cargo run --release --example fit_network [restarts] [seed]

use tr_boson::network::fit_paper_family;

fn main() -> tr_boson::Result<()> {
    let mut args = std::env::args().skip(1);
    let restarts = args.next().and_then(|a| a.parse().ok()).unwrap_or(24);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let fit = fit_paper_family(restarts, seed)?;
    eprintln!("cost {:.3e} after {restarts} restarts", fit.cost);
    eprintln!("fixed phases {:?}", fit.fixed_phases);
    eprintln!(
        "anchors: U0 {:.1e}, tritter {:.1e}, row swap {:.1e}",
        fit.report.zero_anchor, fit.report.tritter_anchor, fit.report.swap_anchor
    );
    print!("{}", fit.family.to_toml_string());
    Ok(())
}
