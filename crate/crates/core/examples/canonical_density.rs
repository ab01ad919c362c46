//! The canonical time density of a state, its covariance under evolution,
//! and the degenerate form as a sum of moduli.

use std::f64::consts::PI;
use std::sync::Arc;

use apclock::canonical::StateVector;
use apclock::spectrum::{generate, Family};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> apclock::Result<()> {
    // |psi> = (|0> + |1>)/sqrt 2 on the harmonic spectrum: p(t) = 1 + cos t
    let s = Arc::new(generate(&Family::Harmonic { omega: 1.0, n_max: 1 })?);
    let a = Complex64::new(0.5f64.sqrt(), 0.0);
    let psi = StateVector::new(s, vec![a, a])?;
    for t in [0.0, PI / 2.0, PI] {
        println!("p({t:.4}) = {:.12}  (1 + cos t = {:.12})", psi.density_at(t), 1.0 + t.cos());
    }

    // a random state on a degenerate spectrum
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let iso = Arc::new(generate(&Family::Isotropic2 { omega: 1.0, n_max: 3 })?);
    let phi = StateVector::random(iso, &mut rng);
    let density = phi.canonical_density()?;
    println!(
        "isotropic random state: {} density terms, mean {:.3}, min sampled value {:.4}",
        density.function().len(),
        density.function().besicovitch_mean().re,
        density.certificate().min_value
    );
    let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.37).collect();
    println!("covariance deviation for tau = 2.5: {:.2e}", phi.covariance_check(2.5, &grid));
    println!("autocorrelation A(0) = {}", phi.autocorrelation().evaluate(0.0));
    Ok(())
}
