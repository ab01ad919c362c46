//! The same entropy computed by every applicable backend.

use std::f64::consts::SQRT_2;

use apclock::canonical::{anisotropic_product, coherent_phase, StateVector};
use apclock::resolution::{factorized_entropy, state_entropy, EntropyBackend, EntropyOptions};

fn report(label: &str, psi: &StateVector) {
    println!("{label}");
    for backend in [
        EntropyBackend::ExactPeriodic,
        EntropyBackend::Torus,
        EntropyBackend::TimeAverage,
    ] {
        match state_entropy(psi, &EntropyOptions::with_backend(backend)) {
            Ok(s) => println!("  {backend:<15} {:.10}  error {:.1e}  evaluations {}", s.value, s.error, s.evaluations),
            Err(e) => println!("  {backend:<15} {e}"),
        }
    }
}

fn main() -> apclock::Result<()> {
    report("coherent phase u = 0.6", &coherent_phase(0.6, 1.0)?);

    let (u, v) = (0.5, 0.4);
    report("anisotropic |u>|v>, omega = (1, sqrt 2)", &anisotropic_product(u, v, 1.0, SQRT_2)?);
    let factors = [coherent_phase(u, 1.0)?, coherent_phase(v, SQRT_2)?];
    let s = factorized_entropy(&factors, &EntropyOptions::with_backend(EntropyBackend::Factorized))?;
    println!("  {:<15} {:.10}", "factorized", s.value);
    println!("  {:<15} {:.10}", "closed form", (1.0 - u * u).ln() + (1.0 - v * v).ln());
    Ok(())
}
