//! Reconstruct a time density from sampled measurement outcomes: the
//! coefficient at frequency w is the sample mean of exp(-i w t).

use apclock::apfun::{reconstruct_density, sample_one_plus_cos};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> apclock::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in [1_000, 10_000, 100_000] {
        let samples = sample_one_plus_cos(&mut rng, 1.0, 1, n);
        let p = reconstruct_density(&samples, &[-2.0, -1.0, 0.0, 1.0, 2.0])?;
        let module = p.function().module().clone();
        let coeffs: Vec<String> = p
            .function()
            .terms()
            .map(|(k, c)| format!("w={:+.0}: {:.4}{:+.4}i", module.value(k) + 0.0, c.re, c.im))
            .collect();
        println!("n = {n:>6}: {}  (expected 1/2 at w = +-1, 0 at +-2)", coeffs.join("  "));
    }
    Ok(())
}
