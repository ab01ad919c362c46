//! Spectra and their frequency modules.
//!
//! Exact spectra store every level as integer coordinates over a declared
//! basis, so equal energy differences (shared resonances) are detected
//! exactly. Float spectra recover a basis greedily and flag their resonance
//! report as heuristic.

use apclock::spectrum::{generate, Family, Spectrum};

fn describe(s: &Spectrum) {
    let report = s.resonance_report();
    println!("{}", s.label());
    println!("  levels {}, dimension {}, module rank {}", s.level_count(), s.dimension(), s.module().rank());
    println!("  min gap {:?}", s.min_gap());
    println!(
        "  shared resonances: {} (heuristic: {}), common period {:?}",
        report.has_shared_resonances, report.heuristic, report.common_period
    );
    for class in report.classes.iter().filter(|c| c.pairs.len() > 1).take(3) {
        println!("    difference {:.6} shared by {:?}", class.frequency, class.pairs);
    }
}

fn main() -> apclock::Result<()> {
    describe(&generate(&Family::Hydrogen { rydberg: 1.0, n_max: 5 })?);
    describe(&generate(&Family::Harmonic { omega: 1.0, n_max: 4 })?);
    describe(&generate(&Family::Isotropic2 { omega: 1.0, n_max: 3 })?);
    describe(&generate(&Family::Anisotropic2 { omega1: 1.0, omega2: 2f64.sqrt(), n_max: 2 })?);
    describe(&generate(&Family::PowerLaw { k: 4.0, n_min: 1, n_max: 6 })?);

    // commensurate frequencies are rejected for the anisotropic oscillator
    let err = generate(&Family::Anisotropic2 { omega1: 1.0, omega2: 1.5, n_max: 2 }).unwrap_err();
    println!("anisotropic(1, 1.5): {err}");
    Ok(())
}
