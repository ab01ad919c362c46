//! Almost-periodic functions as finite trigonometric polynomials.
//!
//! An [`APFunction`] is `g(t) = sum_j a_j exp(i w_j t)` with each frequency `w_j`
//! keyed exactly in a [`FrequencyModule`]. On this class the Besicovitch mean
//! `lim (1/X) int_0^X g dt` is the zero-frequency coefficient, and the Parseval
//! relation `mean |g|^2 = sum |a_j|^2` holds exactly.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::{grid_sizes, Field, MAX_GRID_POINTS};
use crate::quadrature;
use crate::spectrum::{float_module, Freq, FrequencyModule};

/// Coefficients with modulus at or below this are dropped.
pub const COEFF_EPS: f64 = 1e-15;

/// Default bound on the number of terms a product may produce.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Default tolerance on negative sampled density values.
pub const POSITIVITY_EPS: f64 = 1e-9;

/// Default number of positivity samples.
pub const POSITIVITY_SAMPLES: usize = 1 << 16;

const REAL_TOL: f64 = 1e-14;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Debug)]
pub struct APFunction {
    module: Arc<FrequencyModule>,
    terms: BTreeMap<Freq, Complex64>,
    real: bool,
}

fn same_module(a: &Arc<FrequencyModule>, b: &Arc<FrequencyModule>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl APFunction {
    pub fn zero(module: Arc<FrequencyModule>) -> Self {
        Self::from_map(module, BTreeMap::new())
    }

    pub fn constant(module: Arc<FrequencyModule>, c: Complex64) -> Self {
        let zero = module.zero();
        Self::from_terms(module, [(zero, c)])
    }

    /// `c * exp(i w t)` for the frequency keyed by `freq`.
    pub fn exponential(module: Arc<FrequencyModule>, freq: Freq, c: Complex64) -> Self {
        Self::from_terms(module, [(freq, c)])
    }

    /// Sum of terms; repeated frequencies are accumulated.
    pub fn from_terms(
        module: Arc<FrequencyModule>,
        terms: impl IntoIterator<Item = (Freq, Complex64)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            debug_assert_eq!(k.rank(), module.rank());
            *map.entry(k).or_insert(c64(0.0, 0.0)) += c;
        }
        Self::from_map(module, map)
    }

    fn from_map(module: Arc<FrequencyModule>, mut terms: BTreeMap<Freq, Complex64>) -> Self {
        terms.retain(|_, c| c.norm() > COEFF_EPS);
        let real = terms.iter().all(|(k, c)| {
            let mirror = terms.get(&-k).copied().unwrap_or(c64(0.0, 0.0));
            (mirror - c.conj()).norm() <= REAL_TOL * c.norm().max(1.0)
        });
        APFunction { module, terms, real }
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Freq, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, f: &Freq) -> Complex64 {
        self.terms.get(f).copied().unwrap_or(c64(0.0, 0.0))
    }

    /// True iff the coefficients are conjugate-symmetric, i.e. `g` is real-valued.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, self.module.value(k) * t))
            .sum()
    }

    fn check(&self, other: &APFunction) -> Result<()> {
        if same_module(&self.module, &other.module) {
            Ok(())
        } else {
            Err(Error::ModuleMismatch)
        }
    }

    pub fn add(&self, other: &APFunction) -> Result<APFunction> {
        self.check(other)?;
        let mut map = self.terms.clone();
        for (k, c) in &other.terms {
            *map.entry(k.clone()).or_insert(c64(0.0, 0.0)) += c;
        }
        Ok(Self::from_map(self.module.clone(), map))
    }

    pub fn sub(&self, other: &APFunction) -> Result<APFunction> {
        self.add(&other.scale(c64(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> APFunction {
        let map = self.terms.iter().map(|(k, a)| (k.clone(), a * c)).collect();
        Self::from_map(self.module.clone(), map)
    }

    /// Complex conjugate: `a_w exp(iwt)` becomes `conj(a_w) exp(-iwt)`.
    pub fn conjugate(&self) -> APFunction {
        let map = self.terms.iter().map(|(k, a)| (-k, a.conj())).collect();
        Self::from_map(self.module.clone(), map)
    }

    pub fn multiply(&self, other: &APFunction) -> Result<APFunction> {
        self.multiply_capped(other, DEFAULT_TERM_CAP)
    }

    /// Frequency convolution; fails once the product holds more than `cap` terms.
    pub fn multiply_capped(&self, other: &APFunction, cap: usize) -> Result<APFunction> {
        self.check(other)?;
        let mut map: BTreeMap<Freq, Complex64> = BTreeMap::new();
        for (k1, a) in &self.terms {
            for (k2, b) in &other.terms {
                *map.entry(k1 + k2).or_insert(c64(0.0, 0.0)) += a * b;
            }
            if map.len() > cap {
                return Err(Error::TermBudgetExceeded { cap });
            }
        }
        Ok(Self::from_map(self.module.clone(), map))
    }

    /// The time shift `t -> t - tau`.
    pub fn shifted(&self, tau: f64) -> APFunction {
        let map = self
            .terms
            .iter()
            .map(|(k, a)| (k.clone(), a * Complex64::from_polar(1.0, -self.module.value(k) * tau)))
            .collect();
        Self::from_map(self.module.clone(), map)
    }

    /// Besicovitch mean: the zero-frequency coefficient.
    pub fn besicovitch_mean(&self) -> Complex64 {
        self.coefficient(&self.module.zero())
    }

    /// `sum_w |a_w|^2`, equal to the mean of `|g|^2`.
    pub fn parseval_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Exact finite-horizon average `(1/X) int_0^X g(t) dt`.
    pub fn finite_mean(&self, horizon: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, a)| {
                if k.is_zero() {
                    *a
                } else {
                    let w = self.module.value(k);
                    let e = Complex64::from_polar(1.0, w * horizon) - 1.0;
                    a * e / c64(0.0, w * horizon)
                }
            })
            .sum()
    }

    pub fn max_abs_frequency(&self) -> f64 {
        self.terms
            .keys()
            .map(|k| self.module.value(k).abs())
            .fold(0.0, f64::max)
    }

    /// Coefficient-wise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &APFunction, tol: f64) -> bool {
        if !same_module(&self.module, &other.module) {
            return false;
        }
        let keys = self.terms.keys().chain(other.terms.keys());
        keys.into_iter()
            .all(|k| (self.coefficient(k) - other.coefficient(k)).norm() <= tol)
    }
}

/// Record of the grid check behind an [`APDensity`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub min_value: f64,
    pub samples: usize,
    pub passed: bool,
}

/// A real, normalised, sampled-nonnegative almost-periodic function.
#[derive(Clone, Debug)]
pub struct APDensity {
    function: APFunction,
    certificate: PositivityCertificate,
}

impl APDensity {
    /// Validate normalisation and realness, then certify positivity; a sampled
    /// minimum below `-POSITIVITY_EPS` is an error.
    pub fn new(function: APFunction) -> Result<APDensity> {
        let d = Self::new_unchecked_positivity(function)?;
        if !d.certificate.passed {
            return Err(Error::PositivityCheckFailed {
                min: d.certificate.min_value,
            });
        }
        Ok(d)
    }

    /// As [`APDensity::new`] but a failed positivity check is only recorded.
    pub fn new_unchecked_positivity(function: APFunction) -> Result<APDensity> {
        let mean = function.besicovitch_mean();
        if (mean - 1.0).norm() > 1e-10 {
            return Err(invalid(format!("density mean must be 1, got {mean}")));
        }
        if !function.is_real() {
            return Err(invalid("density must be real-valued"));
        }
        let mut terms = function.terms;
        terms.insert(function.module.zero(), c64(1.0, 0.0));
        let function = APFunction {
            module: function.module,
            terms,
            real: true,
        };
        let certificate = certify(&function, POSITIVITY_SAMPLES);
        Ok(APDensity {
            function,
            certificate,
        })
    }

    /// The uniform density `p = 1`.
    pub fn uniform(module: Arc<FrequencyModule>) -> APDensity {
        let function = APFunction::constant(module, c64(1.0, 0.0));
        APDensity {
            function,
            certificate: PositivityCertificate {
                min_value: 1.0,
                samples: 1,
                passed: true,
            },
        }
    }

    pub fn function(&self) -> &APFunction {
        &self.function
    }

    pub fn certificate(&self) -> &PositivityCertificate {
        &self.certificate
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.function.evaluate(t).re
    }

    /// Expectation value `mean(p f)` of an almost-periodic observable.
    pub fn expectation(&self, f: &APFunction) -> Result<Complex64> {
        Ok(self.function.multiply(f)?.besicovitch_mean())
    }
}

/// Sample the density on the torus spanned by its frequencies. Grid points
/// approach every point of the orbit closure, which is where the time
/// evolution lives.
fn certify(p: &APFunction, samples: usize) -> PositivityCertificate {
    let field = Field::direct(p);
    let layout = field.layout();
    let dims = layout.dims().max(1);
    let per_axis = ((samples as f64).powf(1.0 / dims as f64).round() as usize).next_power_of_two();
    let mut sizes = grid_sizes(&field.spans(&layout), per_axis, 4);
    while sizes.iter().product::<usize>() > MAX_GRID_POINTS {
        let i = (0..sizes.len()).max_by_key(|&i| sizes[i]).unwrap();
        sizes[i] /= 2;
    }
    let vals = field.grid_values(&layout, &sizes);
    let min_value = vals.iter().copied().fold(f64::INFINITY, f64::min);
    PositivityCertificate {
        min_value,
        samples: vals.len(),
        passed: min_value >= -POSITIVITY_EPS,
    }
}

/// A long-time average estimate with its convergence ladder.
#[derive(Clone, Debug, Serialize)]
pub struct MeanEstimate {
    pub value: Complex64,
    /// Largest spread among the last three ladder values.
    pub error: f64,
    /// `(horizon or sample count, estimate)` for each rung.
    pub ladder: Vec<(f64, Complex64)>,
}

fn ladder_spread(ladder: &[(f64, Complex64)]) -> f64 {
    let tail = &ladder[ladder.len().saturating_sub(3)..];
    let mut spread = 0.0f64;
    for a in tail {
        for b in tail {
            spread = spread.max((a.1 - b.1).norm());
        }
    }
    spread
}

/// `(1/X) int_0^X f dt` by composite quadrature on each horizon of the ladder.
/// `panel` bounds the quadrature panel width; use about `2 pi / w_max`.
pub fn empirical_mean_estimate<F>(f: F, horizons: &[f64], panel: f64) -> Result<MeanEstimate>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if horizons.is_empty() || horizons.iter().any(|x| !(*x > 0.0)) {
        return Err(invalid("horizons must be positive"));
    }
    if !(panel > 0.0) {
        return Err(invalid("panel width must be positive"));
    }
    let mut sorted = horizons.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ladder = Vec::with_capacity(sorted.len());
    let mut integral = c64(0.0, 0.0);
    let mut prev = 0.0;
    for &x in &sorted {
        integral += quadrature::integrate(&f, prev, x, panel);
        prev = x;
        ladder.push((x, integral / x));
    }
    Ok(MeanEstimate {
        value: ladder.last().unwrap().1,
        error: ladder_spread(&ladder),
        ladder,
    })
}

/// Sample average with a prefix ladder `N/4, N/2, N`.
pub fn sample_mean_estimate(samples: &[Complex64]) -> Result<MeanEstimate> {
    if samples.is_empty() {
        return Err(invalid("need at least one sample"));
    }
    let n = samples.len();
    let mut cuts: Vec<usize> = vec![n / 4, n / 2, n];
    cuts.retain(|&c| c > 0);
    cuts.dedup();
    let ladder: Vec<(f64, Complex64)> = cuts
        .iter()
        .map(|&c| (c as f64, samples[..c].iter().sum::<Complex64>() / c as f64))
        .collect();
    Ok(MeanEstimate {
        value: ladder.last().unwrap().1,
        error: ladder_spread(&ladder),
        ladder,
    })
}

/// Reconstruct an almost-periodic density from measured outcomes `a_n`:
/// the coefficient at `w` is `N^-1 sum_n exp(-i w a_n)`.
///
/// `frequencies` must contain 0 and be closed under negation. A failed
/// positivity check is recorded in the certificate, not raised.
pub fn reconstruct_density(samples: &[f64], frequencies: &[f64]) -> Result<APDensity> {
    if samples.is_empty() {
        return Err(invalid("need at least one sample"));
    }
    let tol = crate::spectrum::DEFAULT_FREQ_TOLERANCE;
    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(1.0);
    if !frequencies.iter().any(|w| close(*w, 0.0)) {
        return Err(invalid("frequency list must contain 0"));
    }
    if !frequencies
        .iter()
        .all(|w| frequencies.iter().any(|v| close(*v, -w)))
    {
        return Err(invalid("frequency list must be closed under negation"));
    }
    let (module, keys) = float_module(frequencies, tol);
    let module = Arc::new(module);
    let n = samples.len() as f64;
    let mut map = BTreeMap::new();
    for (w, k) in frequencies.iter().zip(keys) {
        if k.is_zero() {
            continue;
        }
        let c: Complex64 = samples
            .iter()
            .map(|a| Complex64::from_polar(1.0, -w * a))
            .sum::<Complex64>()
            / n;
        map.insert(k, c);
    }
    map.insert(module.zero(), c64(1.0, 0.0));
    APDensity::new_unchecked_positivity(APFunction::from_map(module, map))
}

/// Inverse-CDF sampler for `p(t) = 1 + a cos(t)` on one period, `|a| <= 1`.
/// Used to build synthetic measurement records.
pub fn sample_one_plus_cos<R: rand::Rng>(rng: &mut R, amplitude: f64, periods: u64, n: usize) -> Vec<f64> {
    let cdf = |t: f64| (t + amplitude * t.sin()) / (2.0 * PI);
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let (mut lo, mut hi) = (0.0, 2.0 * PI);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if cdf(mid) < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let k = rng.gen_range(0..periods.max(1));
            0.5 * (lo + hi) + 2.0 * PI * k as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rank1() -> Arc<FrequencyModule> {
        Arc::new(FrequencyModule::exact(vec![1.0], 1).unwrap())
    }

    fn rank2() -> Arc<FrequencyModule> {
        Arc::new(FrequencyModule::exact(vec![1.0, 2f64.sqrt()], 1).unwrap())
    }

    fn k(c: &[i64]) -> Freq {
        Freq::from_slice(c)
    }

    fn cosine(m: &Arc<FrequencyModule>) -> APFunction {
        APFunction::from_terms(m.clone(), [(k(&[1]), c64(0.5, 0.0)), (k(&[-1]), c64(0.5, 0.0))])
    }

    #[test]
    fn evaluate_examples() {
        let m = rank1();
        let one = APFunction::constant(m.clone(), c64(1.0, 0.0));
        assert_eq!(one.evaluate(3.7), c64(1.0, 0.0));
        let c = cosine(&m);
        assert!((c.evaluate(0.0) - 1.0).norm() < 1e-15);
        assert!((c.evaluate(PI) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn linear_operations() {
        let m = rank1();
        let a = APFunction::exponential(m.clone(), k(&[1]), c64(1.0, 0.0));
        let b = APFunction::exponential(m.clone(), k(&[1]), c64(-1.0, 0.0));
        assert!(a.add(&b).unwrap().is_empty());

        let i = APFunction::exponential(m.clone(), k(&[1]), c64(0.0, 1.0));
        let conj = i.conjugate();
        assert_eq!(conj.len(), 1);
        assert_eq!(conj.coefficient(&k(&[-1])), c64(0.0, -1.0));

        let f = APFunction::from_terms(m.clone(), [(k(&[0]), c64(1.0, 0.0)), (k(&[1]), c64(2.0, 0.0))]);
        let g = f.scale(c64(3.0, 0.0));
        assert_eq!(g.coefficient(&k(&[0])), c64(3.0, 0.0));
        assert_eq!(g.coefficient(&k(&[1])), c64(6.0, 0.0));
    }

    #[test]
    fn module_mismatch_is_an_error() {
        let a = APFunction::constant(rank1(), c64(1.0, 0.0));
        let b = APFunction::constant(rank2(), c64(1.0, 0.0));
        assert!(matches!(a.add(&b), Err(Error::ModuleMismatch)));
        assert!(matches!(a.multiply(&b), Err(Error::ModuleMismatch)));
    }

    #[test]
    fn multiply_examples() {
        let m = rank1();
        let e = APFunction::exponential(m.clone(), k(&[1]), c64(1.0, 0.0));
        let prod = e.multiply(&e.conjugate()).unwrap();
        assert!(prod.approx_eq(&APFunction::constant(m.clone(), c64(1.0, 0.0)), 1e-15));

        let one = APFunction::constant(m.clone(), c64(1.0, 0.0));
        let f = one.add(&e).unwrap();
        let g = one.add(&e.conjugate()).unwrap();
        let p = f.multiply(&g).unwrap();
        // hand convolution: {0: 2, 1: 1, -1: 1}
        assert_eq!(p.len(), 3);
        assert_eq!(p.coefficient(&k(&[0])), c64(2.0, 0.0));
        assert_eq!(p.coefficient(&k(&[1])), c64(1.0, 0.0));
        assert_eq!(p.coefficient(&k(&[-1])), c64(1.0, 0.0));

        assert!(f.multiply(&one).unwrap().approx_eq(&f, 0.0));
    }

    #[test]
    fn term_budget() {
        let m = rank1();
        let f = APFunction::from_terms(m.clone(), (0..20).map(|j| (k(&[j]), c64(1.0, 0.0))));
        let g = APFunction::from_terms(m.clone(), (0..20).map(|j| (k(&[100 * j]), c64(1.0, 0.0))));
        assert!(matches!(
            f.multiply_capped(&g, 100),
            Err(Error::TermBudgetExceeded { cap: 100 })
        ));
        assert_eq!(f.multiply_capped(&g, 400).unwrap().len(), 400);
    }

    #[test]
    fn besicovitch_mean_examples() {
        let m = Arc::new(FrequencyModule::exact(vec![1.3, 2f64.sqrt()], 1).unwrap());
        let e = APFunction::exponential(m.clone(), k(&[1, 0]), c64(1.0, 0.0));
        assert_eq!(e.besicovitch_mean(), c64(0.0, 0.0));
        assert_eq!(APFunction::constant(m.clone(), c64(1.0, 0.0)).besicovitch_mean(), c64(1.0, 0.0));
        let f = APFunction::from_terms(m.clone(), [(k(&[0, 0]), c64(3.0, 0.0)), (k(&[0, 1]), c64(2.0, 0.0))]);
        assert_eq!(f.besicovitch_mean(), c64(3.0, 0.0));
        assert_eq!(f.parseval_norm(), 13.0);
    }

    #[test]
    fn finite_mean_over_whole_periods_is_exact() {
        let m = rank1();
        let e = APFunction::exponential(m.clone(), k(&[1]), c64(1.0, 0.0));
        assert!(e.finite_mean(2.0 * PI * 7.0).norm() < 1e-14);
        assert!((e.finite_mean(1.0) - (Complex64::from_polar(1.0, 1.0) - 1.0) / c64(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn empirical_mean_examples() {
        let est = empirical_mean_estimate(|t| Complex64::from_polar(1.0, t), &[2.0 * PI * 50.0], 1.0).unwrap();
        assert!(est.value.norm() < 1e-12);

        let est = empirical_mean_estimate(|_| c64(1.0, 0.0), &[3.3, 17.0, 170.0], 1.0).unwrap();
        assert!((est.value - 1.0).norm() < 1e-13);
        assert!(est.error < 1e-13);

        // closed-form oracle: |(exp(iwX) - 1) / (iwX)| <= 2 / (w X)
        let w = 2f64.sqrt();
        let est = empirical_mean_estimate(|t| Complex64::from_polar(1.0, w * t), &[1e3, 1e4, 1e5], 1.0).unwrap();
        let mut prev_bound = f64::INFINITY;
        for (x, v) in &est.ladder {
            let bound = 2.0 / (w * x);
            let exact = ((Complex64::from_polar(1.0, w * x) - 1.0) / c64(0.0, w * x)).norm();
            assert!(v.norm() <= bound + 1e-12);
            assert!((v.norm() - exact).abs() < 1e-12);
            assert!(bound < prev_bound);
            prev_bound = bound;
        }
        assert!(empirical_mean_estimate(|_| c64(1.0, 0.0), &[-1.0], 1.0).is_err());
    }

    #[test]
    fn empirical_mean_of_polynomial_converges_at_rate_one_over_x() {
        let m = rank2();
        let f = APFunction::from_terms(
            m.clone(),
            [(k(&[0, 0]), c64(0.7, 0.0)), (k(&[1, -1]), c64(0.2, 0.1)), (k(&[2, 1]), c64(-0.3, 0.0))],
        );
        let horizons = [1e2, 1e3, 1e4];
        let est = empirical_mean_estimate(|t| f.evaluate(t), &horizons, 0.5).unwrap();
        for (x, v) in &est.ladder {
            let bound: f64 = f
                .terms()
                .filter(|(k, _)| !k.is_zero())
                .map(|(k, c)| 2.0 * c.norm() / (m.value(k).abs() * x))
                .sum();
            assert!((v - f.besicovitch_mean()).norm() <= bound + 1e-10);
        }
    }

    #[test]
    fn sample_mean_ladder() {
        let s = vec![c64(1.0, 0.0); 8];
        let e = sample_mean_estimate(&s).unwrap();
        assert_eq!(e.value, c64(1.0, 0.0));
        assert_eq!(e.ladder.len(), 3);
        assert!(sample_mean_estimate(&[]).is_err());
    }

    #[test]
    fn reconstruction_from_point_mass() {
        let d = reconstruct_density(&[0.0; 10], &[-1.0, 0.0, 1.0]).unwrap();
        let f = d.function();
        assert_eq!(f.len(), 3);
        for (_, c) in f.terms() {
            assert!((c - 1.0).norm() < 1e-15);
        }
        // 1 + 2 cos t dips to -1: recorded, not fatal
        assert!(!d.certificate().passed);

        let u = reconstruct_density(&[0.3, 1.2], &[0.0]).unwrap();
        assert_eq!(u.function().len(), 1);
        assert!(u.certificate().passed);

        assert!(reconstruct_density(&[0.0], &[0.0, 1.0]).is_err());
        assert!(reconstruct_density(&[0.0], &[1.0, -1.0]).is_err());
    }

    #[test]
    fn reconstruction_recovers_cosine_coefficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = sample_one_plus_cos(&mut rng, 1.0, 10_000, 100_000);
        let d = reconstruct_density(&samples, &[-1.0, 0.0, 1.0]).unwrap();
        let key = d.function().terms().find(|(k, _)| d.function().module().value(k) > 0.5).unwrap().1;
        // Monte-Carlo oracle: Var[cos a] = 1/2 - 1/4 under p = 1 + cos t
        let se = (0.25f64 / 100_000.0).sqrt();
        assert!((key - 0.5).norm() < 3.0 * se * 2f64.sqrt());
    }

    #[test]
    fn density_validation() {
        let m = rank1();
        let p = APFunction::constant(m.clone(), c64(1.0, 0.0)).add(&cosine(&m).scale(c64(2.0, 0.0))).unwrap();
        assert!(matches!(APDensity::new(p), Err(Error::PositivityCheckFailed { .. })));
        let half = APFunction::constant(m.clone(), c64(0.5, 0.0));
        assert!(APDensity::new(half).is_err());
        let cplx = APFunction::constant(m.clone(), c64(1.0, 0.0))
            .add(&APFunction::exponential(m.clone(), k(&[1]), c64(0.1, 0.0)))
            .unwrap();
        assert!(APDensity::new(cplx).is_err());
        let ok = APFunction::constant(m.clone(), c64(1.0, 0.0)).add(&cosine(&m)).unwrap();
        let d = APDensity::new(ok).unwrap();
        assert!(d.certificate().min_value.abs() < 1e-12);
        assert!((d.evaluate(0.0) - 2.0).abs() < 1e-15);
    }

    fn arb_function(max_terms: usize) -> impl Strategy<Value = APFunction> {
        prop::collection::vec(((-5i64..5, -5i64..5), (-1.0f64..1.0, -1.0f64..1.0)), 0..max_terms).prop_map(
            |terms| {
                APFunction::from_terms(
                    rank2(),
                    terms.into_iter().map(|((a, b), (re, im))| (k(&[a, b]), c64(re, im))),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn parseval_matches_mean_of_modulus(f in arb_function(50)) {
            let direct = f.conjugate().multiply(&f).unwrap().besicovitch_mean();
            prop_assert!((direct.re - f.parseval_norm()).abs() <= 1e-12 * f.parseval_norm().max(1.0));
            prop_assert!(direct.im.abs() <= 1e-12);
        }

        #[test]
        fn schwarz_inequality(f in arb_function(10), g in arb_function(10)) {
            let cross = f.conjugate().multiply(&g).unwrap().besicovitch_mean().norm_sqr();
            prop_assert!(cross <= f.parseval_norm() * g.parseval_norm() * (1.0 + 1e-12) + 1e-15);
        }

        #[test]
        fn realness_flag_is_consistent(f in arb_function(10)) {
            let h = f.add(&f.conjugate()).unwrap();
            prop_assert!(h.is_real());
            prop_assert!(h.conjugate().approx_eq(&h, 1e-14));
            prop_assert_eq!(f.is_real(), f.conjugate().approx_eq(&f, 1e-14 * 2.0));
        }

        #[test]
        fn shift_matches_translated_evaluation(f in arb_function(10), tau in -10.0f64..10.0, t in -10.0f64..10.0) {
            prop_assert!((f.shifted(tau).evaluate(t) - f.evaluate(t - tau)).norm() < 1e-10);
        }
    }
}
