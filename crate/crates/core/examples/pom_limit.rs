//! The canonical POM as the long-time limit of normalised time projectors:
//! N(X) -> 1 and finite-horizon expectations converge to almost-periodic means.

use std::sync::Arc;

use apclock::apfun::APFunction;
use apclock::canonical::StateVector;
use apclock::observables::normalisation_operator;
use apclock::spectrum::{generate, Family};
use num_complex::Complex64;

fn main() -> apclock::Result<()> {
    let s = Arc::new(generate(&Family::Hydrogen { rydberg: 1.0, n_max: 4 })?);
    let gap = s.min_gap().unwrap();
    let psi = StateVector::equal_superposition(s.clone());
    let f = APFunction::exponential(s.module().clone(), s.key(2) - s.key(0), Complex64::new(1.0, 0.0));
    let exact = psi.canonical_density()?.expectation(&f)?;
    println!("mean of p(t) exp(i w t): {exact:.8}");
    for x in [1e1, 1e2, 1e3, 1e4] {
        let lim = normalisation_operator(s.clone(), x / gap)?;
        println!(
            "X = {x:>6.0}/gap: |N - 1|_max = {:.3e} (bound {:.1e}), <f>_X = {:.8}",
            lim.identity_deviation(),
            2.0 / x,
            lim.expectation(&psi, &f)?
        );
    }
    Ok(())
}
