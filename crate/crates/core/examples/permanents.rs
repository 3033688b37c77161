//! Permanents by definition and by Ryser's formula, and the two reference
//! networks: `U₀` has a vanishing permanent, the tritter does not.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tr_boson::network::{tritter, u_zero};
use tr_boson::permanent::{perm_naive, perm_ryser};
use tr_boson::{ComplexMatrix, C64};

fn main() -> tr_boson::Result<()> {
    println!("|perm U0|      = {:.3e}", perm_ryser(&u_zero())?.norm());
    println!("|perm tritter| = {:.6}", perm_ryser(&tritter())?.norm());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("\n n   naive            ryser            ryser time");
    for n in 2..=8 {
        let m = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let a = perm_naive(&m)?;
        let t = Instant::now();
        let b = perm_ryser(&m)?;
        println!("{n:2}   {:<16.6} {:<16.6} {:?}", a.norm(), b.norm(), t.elapsed());
    }

    let n = 20;
    let m = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), 0.0));
    let t = Instant::now();
    let p = perm_ryser(&m)?;
    println!("\nn = {n}: |perm| = {:.4e} in {:?}", p.norm(), t.elapsed());
    Ok(())
}
