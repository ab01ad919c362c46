//! Sparse almost-periodic functions: products, Besicovitch means and the
//! Parseval identity, checked against finite-horizon time averages.

use std::sync::Arc;

use apclock::apfun::{empirical_mean_estimate, APFunction};
use apclock::spectrum::{FrequencyModule, Freq};
use num_complex::Complex64;

fn main() -> apclock::Result<()> {
    // frequencies over the basis (1, sqrt 2)
    let module = Arc::new(FrequencyModule::exact(vec![1.0, 2f64.sqrt()], 1)?);
    let term = |a: i64, b: i64, re: f64, im: f64| {
        APFunction::exponential(module.clone(), Freq::from_slice(&[a, b]), Complex64::new(re, im))
    };
    let f = term(0, 0, 1.0, 0.0).add(&term(1, 0, 0.5, 0.0))?.add(&term(-1, 0, 0.5, 0.0))?;
    let g = term(0, 1, 0.0, 0.3).add(&term(1, -1, 0.2, 0.0))?;
    let fg = f.multiply(&g.conjugate())?;

    println!("f has {} terms, g has {}, f*conj(g) has {}", f.len(), g.len(), fg.len());
    println!("mean(f)          = {}", f.besicovitch_mean());
    println!("mean(|g|^2)      = {}", g.multiply(&g.conjugate())?.besicovitch_mean());
    println!("Parseval sum (g) = {}", g.parseval_norm());

    let w_max = fg.max_abs_frequency();
    let horizons: Vec<f64> = (0..8).map(|k| 100.0 * 2f64.powi(k)).collect();
    let est = empirical_mean_estimate(|t| fg.evaluate(t), &horizons, 2.0 * std::f64::consts::PI / w_max)?;
    println!("mean(f conj g): exact {}  time average {} (ladder spread {:.1e})", fg.besicovitch_mean(), est.value, est.error);

    let shifted = f.shifted(0.7);
    println!("f(t - 0.7) at t = 2: {}  vs f(1.3) = {}", shifted.evaluate(2.0), f.evaluate(1.3));
    Ok(())
}
