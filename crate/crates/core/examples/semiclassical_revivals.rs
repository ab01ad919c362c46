//! Wave-packet revivals in the second-order expansion of a power-law
//! spectrum: direct summation vs the Poisson (displaced Gaussian) form, and
//! the comparison with the exact spectrum over growing windows.

use apclock::semiclassical::{
    expand_spectrum, gaussian_backend_error, powerlaw_energy, time_grid, validate_powerlaw, Profile,
    SemiclassicalProfile,
};

fn main() -> apclock::Result<()> {
    let e = expand_spectrum(powerlaw_energy(4.0), 200.0, 1.0)?;
    println!("E' = {:.6}, E'' = {:.6e}, revival time {:.3}", e.e1, e.e2, e.revival_time);
    let p = SemiclassicalProfile::new(e, Profile::Gaussian { sigma: 5.0 }, 1.0)?;
    let tr = p.revival_time();
    for frac in [0.0, 0.25, 0.5, 1.0] {
        let t = frac * tr;
        println!(
            "t = {frac:>4} tau_r: |theta|^2 direct {:.6}, Poisson {:.6}, |A| = {:.6}",
            p.theta(t).norm_sqr(),
            p.gaussian_theta(t)?.norm_sqr(),
            p.autocorrelation(t).norm()
        );
    }
    println!("backend agreement on [0, tau_r]: {:.1e}", gaussian_backend_error(&p, &time_grid(tr, 64))?);
    let (at, peak) = p.revival_peak(tr);
    println!("revival peak |A| = {peak:.6} at {at:.3}");

    let v = validate_powerlaw(4.0, 200, 5.0, 20_000, 1.0)?;
    for (frac, err) in &v.windows {
        println!("exact spectrum vs expansion on [0, {frac} tau_r]: relative error {err:.3e}");
    }
    Ok(())
}
