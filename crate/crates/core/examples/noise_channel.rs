//! Every covariant time POM is the canonical one preceded by a noise channel
//! that keeps energy populations fixed. Build a random POM, decompose it into
//! Kraus operators and check both statements.

use std::sync::Arc;

use apclock::observables::{canonical_t0, channel_apply, kraus_completeness_deviation, random_t0, OperatorMatrix};
use apclock::spectrum::{generate, Family};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> apclock::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let s = Arc::new(generate(&Family::Hydrogen { rydberg: 1.0, n_max: 5 })?);
    let pom = random_t0(s.clone(), 3, &mut rng)?;
    let kraus = pom.kraus_decompose()?;
    println!("{} Kraus operators, completeness deviation {:.1e}", kraus.len(), kraus_completeness_deviation(&kraus));

    let rho = OperatorMatrix::random_density(s.clone(), &mut rng);
    let noisy = channel_apply(&kraus, &rho)?;
    let canonical = canonical_t0(s);
    for t in [0.0, 1.0, 10.0, 100.0] {
        println!(
            "t = {t:>5}: tr[rho T_t] = {:.12}   tr[phi(rho) T_t^can] = {:.12}",
            pom.density_mixed(&rho, t)?,
            canonical.density_mixed(&noisy, t)?
        );
    }
    let diag: f64 = (0..rho.dim())
        .map(|i| (rho.matrix()[(i, i)] - noisy.matrix()[(i, i)]).norm())
        .fold(0.0, f64::max);
    println!("max population change {diag:.1e}");
    Ok(())
}
