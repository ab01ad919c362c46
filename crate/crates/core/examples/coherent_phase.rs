//! Coherent phase states: purity (1+u^2)/(1-u^2) and entropy ln(1-u^2).
//! The resolution sharpens without bound as u -> 1.

use apclock::canonical::coherent_phase;
use apclock::resolution::{state_entropy, state_purity, EntropyBackend, EntropyOptions};

fn main() -> apclock::Result<()> {
    let opts = EntropyOptions::with_backend(EntropyBackend::ExactPeriodic);
    println!("{:>5} {:>6} {:>14} {:>14} {:>14} {:>14}", "u", "levels", "purity", "closed form", "entropy", "ln(1-u^2)");
    for u in [0.3, 0.5, 0.7, 0.9, 0.95] {
        let psi = coherent_phase(u, 1.0)?;
        let q = u * u;
        println!(
            "{u:>5} {:>6} {:>14.10} {:>14.10} {:>14.10} {:>14.10}",
            psi.dimension(),
            state_purity(&psi)?,
            (1.0 + q) / (1.0 - q),
            state_entropy(&psi, &opts)?.value,
            (1.0 - q).ln()
        );
    }
    Ok(())
}
