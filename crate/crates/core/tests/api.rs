//! Cross-module checks through the public API: states, canonical densities,
//! resolution measures and time POMs agree with one another.

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use apclock::canonical::{coherent_phase, correlated_isotropic, StateVector};
use apclock::observables::{canonical_t0, OperatorMatrix};
use apclock::resolution::{state_entropy, state_purity, EntropyBackend, EntropyOptions};
use apclock::spectrum::{generate, Family};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn canonical_pom_reproduces_state_density() {
    let spectrum = Arc::new(generate(&Family::Hydrogen { rydberg: 1.0, n_max: 5 }).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let psi = StateVector::random(spectrum.clone(), &mut rng);
    let pom = canonical_t0(spectrum);
    for t in [0.0, 0.7, 3.1, 25.0] {
        assert_abs_diff_eq!(pom.density_pure(&psi, t).unwrap(), psi.density_at(t), epsilon = 1e-10);
        let rho = OperatorMatrix::pure_state(&psi);
        assert_abs_diff_eq!(pom.density_mixed(&rho, t).unwrap(), psi.density_at(t), epsilon = 1e-10);
    }
}

#[test]
fn coherent_phase_backends_agree() {
    let psi = coherent_phase(0.6, 1.0).unwrap();
    let exact = (1.0f64 - 0.36).ln();
    assert_abs_diff_eq!(state_purity(&psi).unwrap(), 1.36 / 0.64, epsilon = 1e-9);
    for backend in [EntropyBackend::ExactPeriodic, EntropyBackend::Torus, EntropyBackend::Auto] {
        let h = state_entropy(&psi, &EntropyOptions::with_backend(backend)).unwrap();
        assert_abs_diff_eq!(h.value, exact, epsilon = 1e-6);
    }
}

#[test]
fn correlated_state_matches_coherent_phase() {
    for u in [0.3, 0.5] {
        let opts = EntropyOptions::default();
        let a = state_entropy(&correlated_isotropic(u, 1.0).unwrap(), &opts).unwrap().value;
        let b = state_entropy(&coherent_phase(u, 1.0).unwrap(), &opts).unwrap().value;
        assert_abs_diff_eq!(a, b, epsilon = 1e-6);
    }
}
