//! States over a spectrum and their canonical time statistics.
//!
//! For a state `sum c_{j,d} |E_j, d>` the time representation is one
//! almost-periodic function per degeneracy index,
//! `theta_d(t) = sum_j c_{j,d} exp(i E_j t / hbar)`, and the canonical time
//! density is `p(t) = sum_d |theta_d(t)|^2`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::apfun::{APDensity, APFunction};
use crate::error::{invalid, Error, Result};
use crate::spectrum::{anisotropic2_box, generate, Family, Freq, Spectrum};

/// Tolerance on `sum |c|^2 = 1`.
pub const NORM_TOL: f64 = 1e-12;

/// Tail probability discarded when truncating infinite superpositions.
pub const TAIL_TOL: f64 = 1e-12;

/// Complex amplitudes over the `(level, degeneracy index)` basis of a spectrum.
#[derive(Clone, Debug)]
pub struct StateVector {
    spectrum: Arc<Spectrum>,
    amplitudes: Vec<Complex64>,
}

/// One almost-periodic function per degeneracy index.
#[derive(Clone, Debug)]
pub struct TimeRepresentation {
    theta: Vec<APFunction>,
}

impl TimeRepresentation {
    pub fn components(&self) -> &[APFunction] {
        &self.theta
    }

    pub fn evaluate(&self, t: f64) -> Vec<Complex64> {
        self.theta.iter().map(|f| f.evaluate(t)).collect()
    }

    /// `sum_d mean |theta_d|^2`, which is the squared norm of the state.
    pub fn parseval_total(&self) -> f64 {
        self.theta.iter().map(APFunction::parseval_norm).sum()
    }

    /// `sum_d |theta_d(t)|^2`.
    pub fn density_at(&self, t: f64) -> f64 {
        self.theta.iter().map(|f| f.evaluate(t).norm_sqr()).sum()
    }
}

impl StateVector {
    /// Amplitudes in flat basis order (see [`Spectrum::index`]); the norm must
    /// already be 1 within [`NORM_TOL`].
    pub fn new(spectrum: Arc<Spectrum>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != spectrum.dimension() {
            return Err(Error::DimensionMismatch {
                expected: spectrum.dimension(),
                found: amplitudes.len(),
            });
        }
        let n2: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalised(n2));
        }
        Ok(StateVector {
            spectrum,
            amplitudes,
        })
    }

    /// As [`StateVector::new`] but rescales nonzero amplitudes to unit norm.
    pub fn normalized(spectrum: Arc<Spectrum>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::NotNormalised(n2));
        }
        let s = n2.sqrt().recip();
        amplitudes.iter_mut().for_each(|c| *c *= s);
        Self::new(spectrum, amplitudes)
    }

    /// Amplitudes on the `d = 0` state of each level.
    pub fn from_level_amplitudes(spectrum: Arc<Spectrum>, amps: &[Complex64]) -> Result<Self> {
        if amps.len() != spectrum.level_count() {
            return Err(Error::DimensionMismatch {
                expected: spectrum.level_count(),
                found: amps.len(),
            });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); spectrum.dimension()];
        for (j, c) in amps.iter().enumerate() {
            v[spectrum.index(j, 0)] = *c;
        }
        Self::new(spectrum, v)
    }

    pub fn eigenstate(spectrum: Arc<Spectrum>, level: usize, d: usize) -> Result<Self> {
        if level >= spectrum.level_count() || d >= spectrum.degeneracy(level) {
            return Err(invalid(format!("no basis state ({level}, {d})")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); spectrum.dimension()];
        v[spectrum.index(level, d)] = Complex64::new(1.0, 0.0);
        Self::new(spectrum, v)
    }

    /// Equal-weight superposition of the `d = 0` state of every level.
    pub fn equal_superposition(spectrum: Arc<Spectrum>) -> Self {
        let n = spectrum.level_count();
        let amps = vec![Complex64::new((n as f64).sqrt().recip(), 0.0); n];
        Self::from_level_amplitudes(spectrum, &amps).expect("equal weights are normalised")
    }

    /// Haar-random pure state over the full space (normalised complex Gaussian).
    pub fn random<R: Rng + ?Sized>(spectrum: Arc<Spectrum>, rng: &mut R) -> Self {
        let amps = (0..spectrum.dimension())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(spectrum, amps).expect("gaussian vector is nonzero")
    }

    pub fn spectrum(&self) -> &Arc<Spectrum> {
        &self.spectrum
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, level: usize, d: usize) -> Complex64 {
        self.amplitudes[self.spectrum.index(level, d)]
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// Energy distribution `p_j = sum_d |c_{j,d}|^2`.
    pub fn level_populations(&self) -> Vec<f64> {
        (0..self.spectrum.level_count())
            .map(|j| {
                (0..self.spectrum.degeneracy(j))
                    .map(|d| self.amplitude(j, d).norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// `<H>` in energy units.
    pub fn mean_energy(&self) -> f64 {
        self.level_populations()
            .iter()
            .enumerate()
            .map(|(j, p)| p * self.spectrum.energy(j))
            .sum()
    }

    /// Schrodinger evolution by `tau`: `c_{j,d} -> c_{j,d} exp(-i E_j tau / hbar)`.
    pub fn evolve(&self, tau: f64) -> StateVector {
        let s = &self.spectrum;
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::from_polar(1.0, -s.frequency(s.level_of(i).0) * tau))
            .collect();
        StateVector {
            spectrum: s.clone(),
            amplitudes,
        }
    }

    /// `theta_d(t) = sum_j c_{j,d} exp(i E_j t / hbar)` for each degeneracy index `d`.
    pub fn time_representation(&self) -> TimeRepresentation {
        let s = &self.spectrum;
        let max_deg = s.levels().iter().map(|l| l.degeneracy).max().unwrap_or(1);
        let theta = (0..max_deg)
            .map(|d| {
                APFunction::from_terms(
                    s.module().clone(),
                    (0..s.level_count())
                        .filter(|&j| d < s.degeneracy(j))
                        .map(|j| (s.key(j).clone(), self.amplitude(j, d))),
                )
            })
            .collect();
        TimeRepresentation { theta }
    }

    /// The canonical density `sum_d conj(theta_d) theta_d` as an exact
    /// trigonometric polynomial; its mean is 1.
    pub fn canonical_density(&self) -> Result<APDensity> {
        let rep = self.time_representation();
        let module = self.spectrum.module().clone();
        let mut p = APFunction::zero(module);
        for th in rep.components() {
            p = p.add(&th.conjugate().multiply(th)?)?;
        }
        APDensity::new(p)
    }

    /// `p(t)` evaluated directly from the time representation.
    pub fn density_at(&self, t: f64) -> f64 {
        self.time_representation().density_at(t)
    }

    /// `A(tau) = sum_j p_j exp(i E_j tau / hbar)`, the overlap `<psi|psi_{-tau}>`
    /// and equal to `mean conj(theta(t)) theta(t + tau)`.
    pub fn autocorrelation(&self) -> APFunction {
        let s = &self.spectrum;
        let pops = self.level_populations();
        APFunction::from_terms(
            s.module().clone(),
            pops.iter()
                .enumerate()
                .map(|(j, p)| (s.key(j).clone(), Complex64::new(*p, 0.0))),
        )
    }

    /// `max_t |p(t | psi_tau) - p(t - tau | psi)|` over `grid`.
    pub fn covariance_check(&self, tau: f64, grid: &[f64]) -> f64 {
        let now = self.time_representation();
        let later = self.evolve(tau).time_representation();
        grid.iter()
            .map(|&t| (later.density_at(t) - now.density_at(t - tau)).abs())
            .fold(0.0, f64::max)
    }
}

/// Smallest `n` with `u^(2(n+1)) < tail`, i.e. the truncation point of a
/// geometric distribution with ratio `u^2`.
pub(crate) fn geometric_cutoff(u: f64, tail: f64) -> usize {
    if u == 0.0 {
        return 0;
    }
    ((tail.ln() / (2.0 * u.ln())).ceil() as usize).saturating_sub(1).max(1)
}

fn check_u(name: &str, u: f64) -> Result<()> {
    if (0.0..1.0).contains(&u) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1), got {u}")))
    }
}

/// Coherent phase state `sqrt(1 - u^2) sum_n u^n |n>` on the harmonic
/// spectrum `E_n = n omega`, truncated at tail probability [`TAIL_TOL`] and
/// renormalised.
pub fn coherent_phase(u: f64, omega: f64) -> Result<StateVector> {
    check_u("u", u)?;
    let n_max = geometric_cutoff(u, TAIL_TOL);
    let spectrum = generate(&Family::Harmonic { omega, n_max })?;
    let amps: Vec<Complex64> = (0..=n_max)
        .map(|n| Complex64::new(u.powi(n as i32), 0.0))
        .collect();
    let spectrum = Arc::new(spectrum.with_label(format!("coherent phase u={u}")));
    let mut v = vec![Complex64::new(0.0, 0.0); spectrum.dimension()];
    for (j, c) in amps.iter().enumerate() {
        v[spectrum.index(j, 0)] = *c;
    }
    StateVector::normalized(spectrum, v)
}

/// Smallest `n_max` for which the product `|u> (x) |u>` restricted to
/// `E_n <= n_max omega` misses less than `tail` probability.
pub fn isotropic_cutoff(u: f64, tail: f64) -> usize {
    let q = u * u;
    let mut n_max = 0usize;
    let mut rest = 1.0 - (1.0 - q) * (1.0 - q);
    while rest >= tail && n_max < 100_000 {
        n_max += 1;
        rest -= (n_max as f64 + 1.0) * (1.0 - q) * (1.0 - q) * q.powi(n_max as i32);
    }
    n_max
}

/// Product `|u> (x) |u>` of coherent phase states on the isotropic two-mode
/// oscillator: amplitude `(1 - u^2) u^n` on each `|E_n, d> = |d> (x) |n - d>`,
/// truncated at `n_max` and renormalised.
///
/// Pointwise density errors scale with the amplitude tail, roughly the square
/// root of the probability tail; see [`isotropic_cutoff`].
pub fn isotropic_product(u: f64, omega: f64, n_max: usize) -> Result<StateVector> {
    check_u("u", u)?;
    let spectrum = Arc::new(generate(&Family::Isotropic2 { omega, n_max })?);
    let amps = (0..spectrum.level_count())
        .flat_map(|n| (0..=n).map(move |_| Complex64::new(u.powi(n as i32), 0.0)))
        .collect();
    StateVector::normalized(spectrum, amps)
}

/// Product `|u> (x) |v>` of coherent phase states on the anisotropic two-mode
/// oscillator with incommensurate `omega1`, `omega2`.
pub fn anisotropic_product(u: f64, v: f64, omega1: f64, omega2: f64) -> Result<StateVector> {
    check_u("u", u)?;
    check_u("v", v)?;
    let m_max = geometric_cutoff(u, TAIL_TOL / 2.0);
    let n_max = geometric_cutoff(v, TAIL_TOL / 2.0);
    let spectrum = Arc::new(anisotropic2_box(omega1, omega2, m_max, n_max)?);
    let index: HashMap<Freq, usize> = spectrum
        .keys()
        .iter()
        .enumerate()
        .map(|(j, k)| (k.clone(), j))
        .collect();
    let denom = spectrum.module().denominator();
    let mut amps = vec![Complex64::new(0.0, 0.0); spectrum.dimension()];
    for m in 0..=m_max {
        for n in 0..=n_max {
            let key = Freq::from_slice(&[m as i64 * denom, n as i64 * denom]);
            let j = index[&key];
            amps[spectrum.index(j, 0)] = Complex64::new(u.powi(m as i32) * v.powi(n as i32), 0.0);
        }
    }
    StateVector::normalized(spectrum, amps)
}

/// The correlated isotropic state `sqrt(1 - u^2) sum_m u^m |m> (x) |m>`.
///
/// It lies in the nondegenerate subspace spanned by `|m> (x) |m>`, whose
/// energies are `2 m omega`; the state is represented over that subspace.
pub fn correlated_isotropic(u: f64, omega: f64) -> Result<StateVector> {
    let s = coherent_phase(u, 2.0 * omega)?;
    let spectrum = Arc::new((**s.spectrum()).clone().with_label(format!("correlated isotropic u={u}")));
    StateVector::new(spectrum, s.amplitudes().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_level() -> StateVector {
        let s = Arc::new(generate(&Family::Harmonic { omega: 1.0, n_max: 1 }).unwrap());
        let a = 0.5f64.sqrt();
        StateVector::from_level_amplitudes(s, &[c(a, 0.0), c(a, 0.0)]).unwrap()
    }

    fn hydrogen(n: usize) -> Arc<Spectrum> {
        Arc::new(generate(&Family::Hydrogen { rydberg: 1.0, n_max: n }).unwrap())
    }

    #[test]
    fn normalisation_is_enforced() {
        let s = hydrogen(3);
        assert!(matches!(
            StateVector::new(s.clone(), vec![c(1.0, 0.0); 3]),
            Err(Error::NotNormalised(_))
        ));
        assert!(matches!(
            StateVector::new(s.clone(), vec![c(1.0, 0.0); 2]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(StateVector::normalized(s, vec![c(1.0, 0.0); 3]).is_ok());
    }

    #[test]
    fn evolve_examples() {
        let psi = two_level();
        let same = psi.evolve(0.0);
        assert_eq!(same.amplitudes(), psi.amplitudes());

        let s = hydrogen(3);
        let e = StateVector::eigenstate(s, 1, 0).unwrap();
        let moved = e.evolve(2.3);
        assert!((moved.amplitude(1, 0).norm() - 1.0).abs() < 1e-15);

        let moved = psi.evolve(PI);
        let a = 0.5f64.sqrt();
        assert!((moved.amplitude(0, 0) - c(a, 0.0)).norm() < 1e-15);
        assert!((moved.amplitude(1, 0) - c(-a, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn time_representation_examples() {
        let s = hydrogen(3);
        let e = StateVector::eigenstate(s.clone(), 0, 0).unwrap();
        let th = e.time_representation();
        assert_eq!(th.components().len(), 1);
        assert_eq!(th.components()[0].coefficient(s.key(0)), c(1.0, 0.0));

        let psi = two_level();
        let th = psi.time_representation();
        assert_eq!(th.components()[0].len(), 2);
        assert!((th.parseval_total() - 1.0).abs() < 1e-15);

        // theta of the evolved state is the shifted theta
        let psi = StateVector::random(s.clone(), &mut ChaCha8Rng::seed_from_u64(1));
        let shifted = psi.time_representation().components()[0].shifted(0.7);
        let evolved = psi.evolve(0.7).time_representation();
        assert!(evolved.components()[0].approx_eq(&shifted, 1e-14));
    }

    #[test]
    fn canonical_density_examples() {
        let s = hydrogen(4);
        let e = StateVector::eigenstate(s, 2, 0).unwrap();
        let p = e.canonical_density().unwrap();
        assert_eq!(p.function().len(), 1);

        let p = two_level().canonical_density().unwrap();
        for t in [0.0, 0.4, 1.0, 2.0, PI] {
            assert!((p.evaluate(t) - (1.0 + t.cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn isotropic_product_matches_coherent_phase_density() {
        let u: f64 = 0.5;
        let psi = isotropic_product(u, 1.0, isotropic_cutoff(u, 1e-24)).unwrap();
        let rep = psi.time_representation();
        for i in 0..200 {
            let t = i as f64 * 0.05;
            let expected = (1.0 - u * u) / (1.0 + u * u - 2.0 * u * t.cos());
            assert!((rep.density_at(t) - expected).abs() < 1e-10, "{t} {} {expected}", rep.density_at(t));
        }
    }

    #[test]
    fn degenerate_density_reduces_for_nondegenerate_spectra() {
        let s = hydrogen(5);
        let psi = StateVector::random(s, &mut ChaCha8Rng::seed_from_u64(3));
        let th = &psi.time_representation().components()[0].clone();
        let p = psi.canonical_density().unwrap();
        let direct = th.conjugate().multiply(th).unwrap();
        assert!(p.function().approx_eq(&direct, 1e-15));
    }

    #[test]
    fn global_relabelling_leaves_density_unchanged() {
        let s = Arc::new(
            Spectrum::from_rationals(
                &[Rational::from_integer(0), Rational::from_integer(1), Rational::new(5, 2)],
                &[3, 3, 3],
                1.0,
            )
            .unwrap(),
        );
        let psi = StateVector::random(s.clone(), &mut ChaCha8Rng::seed_from_u64(4));
        let perm = [2usize, 0, 1];
        let mut amps = vec![c(0.0, 0.0); s.dimension()];
        for j in 0..3 {
            for d in 0..3 {
                amps[s.index(j, perm[d])] = psi.amplitude(j, d);
            }
        }
        let relabelled = StateVector::new(s, amps).unwrap();
        let a = psi.canonical_density().unwrap();
        let b = relabelled.canonical_density().unwrap();
        assert!(a.function().approx_eq(b.function(), 1e-14));
    }

    #[test]
    fn autocorrelation_examples() {
        let s = hydrogen(5);
        let psi = StateVector::random(s.clone(), &mut ChaCha8Rng::seed_from_u64(5));
        let a = psi.autocorrelation();
        assert!((a.evaluate(0.0) - 1.0).norm() < 1e-14);

        let e = StateVector::eigenstate(s.clone(), 3, 0).unwrap();
        assert!((e.autocorrelation().evaluate(12.3).norm() - 1.0).abs() < 1e-14);

        let th = &psi.time_representation().components()[0].clone();
        for i in 0..20 {
            let tau = i as f64 * 0.77 - 3.0;
            // theta(t + tau) is theta shifted by -tau
            let prod = th.conjugate().multiply(&th.shifted(-tau)).unwrap();
            assert!((prod.besicovitch_mean() - a.evaluate(tau)).norm() < 1e-10);
        }
    }

    #[test]
    fn covariance_examples() {
        let psi = two_level();
        let grid: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        assert_eq!(psi.covariance_check(0.0, &grid), 0.0);
        assert!(psi.covariance_check(1.7, &grid) < 1e-10);
        let aniso = anisotropic_product(0.3, 0.4, 1.0, 2f64.sqrt()).unwrap();
        assert!(aniso.covariance_check(3f64.sqrt(), &grid) < 1e-10);
    }

    #[test]
    fn coherent_phase_truncation() {
        let psi = coherent_phase(0.5, 1.0).unwrap();
        let n = psi.dimension();
        assert!(0.25f64.powi(n as i32) < TAIL_TOL);
        assert!(0.25f64.powi(n as i32 - 1) >= TAIL_TOL);
        assert!(coherent_phase(1.0, 1.0).is_err());
        let z = coherent_phase(0.0, 1.0).unwrap();
        assert!((z.amplitude(0, 0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlated_state_lives_on_doubled_frequencies() {
        let psi = correlated_isotropic(0.5, 1.0).unwrap();
        assert!((psi.spectrum().energy(1) - 2.0).abs() < 1e-15);
        assert!((psi.mean_energy() - 2.0 * 0.25 / 0.75).abs() < 1e-10);
    }

    #[test]
    fn anisotropic_product_populations_factorise() {
        let (u, v) = (0.4f64, 0.6f64);
        let psi = anisotropic_product(u, v, 1.0, 2f64.sqrt()).unwrap();
        let e = psi.mean_energy();
        let (uu, vv) = (u * u, v * v);
        let expected = uu / (1.0 - uu) + 2f64.sqrt() * vv / (1.0 - vv);
        assert!((e - expected).abs() < 1e-9);
    }
}
