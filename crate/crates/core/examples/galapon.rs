//! The inverse-difference operator G = i hbar sum |E_j><E_k|/(E_j - E_k) is
//! Hermitian, but [H, G] vanishes on the diagonal and <G> does not advance
//! with time, so it is not a time observable.

use std::sync::Arc;

use apclock::canonical::StateVector;
use apclock::observables::galapon_diagnostic;
use apclock::spectrum::{generate, Family};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> apclock::Result<()> {
    let s = Arc::new(generate(&Family::Hydrogen { rydberg: 1.0, n_max: 4 })?);
    let psi = StateVector::equal_superposition(s);
    let taus: Vec<f64> = (0..=10).map(|i| i as f64).collect();
    let r = galapon_diagnostic(&psi, &taus, 20, &mut ChaCha8Rng::seed_from_u64(42))?;
    println!("Hermitian deviation        {:.1e}", r.hermitian_deviation);
    println!("diagonal of [H,G]          {:?}", r.commutator_diagonal);
    println!("|[H,G]|E_k>|               {:?}", r.commutator_on_eigenstates);
    println!("[H,G] = {} i hbar on sum c = 0 states (residual {:.1e})", r.commutator_sign, r.commutator_residual);
    for (tau, g) in &r.expectation_trace {
        println!("  tau = {tau:>4}: <G> = {g:>10.5}");
    }
    println!("max |<G>_tau - <G>_0 - tau| = {:.4}", r.covariance_deviation);
    Ok(())
}
