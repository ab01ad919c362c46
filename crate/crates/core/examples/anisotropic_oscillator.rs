//! Thermal-like states of the two-mode anisotropic oscillator at fixed mean
//! energy: solve for Omega, then compare S(H) + S_ap with the 2-nat bound,
//! and the isotropic and single-mode alternatives at the same energy.

use std::f64::consts::SQRT_2;

use apclock::canonical::coherent_phase;
use apclock::resolution::{energy_entropy, factorized_entropy, EntropyBackend, EntropyOptions};
use apclock::scenario::solve_omega;

fn main() -> apclock::Result<()> {
    let opts = EntropyOptions::with_backend(EntropyBackend::Factorized);
    let (w1, w2) = (1.0, SQRT_2);
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>12}", "E", "Omega", "S_ap", "S(H)", "sum", "single-mode");
    for e in [1.0, 4.0, 10.0, 20.0, 50.0] {
        let big = solve_omega(e, w1, w2)?;
        let (uu, vv) = ((-w1 / big).exp(), (-w2 / big).exp());
        let factors = [coherent_phase(uu.sqrt(), w1)?, coherent_phase(vv.sqrt(), w2)?];
        let s = factorized_entropy(&factors, &opts)?.value;
        let h: f64 = factors.iter().map(energy_entropy).sum();
        // single mode of frequency 1 at the same mean energy
        let single = (1.0 / (1.0 + e)).ln();
        println!("{e:>6} {big:>10.5} {s:>10.5} {h:>10.5} {:>10.5} {single:>12.5}", h + s);
    }
    Ok(())
}
