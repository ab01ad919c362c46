//! Energy-time uncertainty relations for random hydrogen states:
//! the exact relation P_ap = 2 - sum|c|^4 (without shared resonances),
//! the entropic relation S(H) + S_ap >= 0, and the one-bit bound I_ap <= ln 2.

use std::f64::consts::LN_2;
use std::sync::Arc;

use apclock::canonical::StateVector;
use apclock::resolution::{ResolutionReport, EntropyOptions};
use apclock::spectrum::{generate, Family};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> apclock::Result<()> {
    let s = Arc::new(generate(&Family::Hydrogen { rydberg: 1.0, n_max: 6 })?);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let opts = EntropyOptions::default();
    println!("{:>8} {:>10} {:>10} {:>12} {:>10}", "purity", "S_ap", "S(H)", "I_ap (bits)", "UR resid");
    for _ in 0..8 {
        let psi = StateVector::random(s.clone(), &mut rng);
        let r = ResolutionReport::for_state(&psi, &opts)?;
        println!(
            "{:>8.5} {:>10.6} {:>10.6} {:>12.6} {:>10.1e}",
            r.purity,
            r.entropy,
            r.energy_entropy,
            r.information_bits,
            r.exact_ur_residual.unwrap_or(f64::NAN)
        );
        assert!(r.eur_slack >= -1e-9 && r.information <= LN_2 + r.entropy_error);
    }
    Ok(())
}
