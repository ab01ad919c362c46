//! Discrete energy spectra and the exact arithmetic of their level differences.
//!
//! Every level energy is stored as a [`Freq`]: a vector of integer coordinates
//! over the basis of a [`FrequencyModule`]. Two level differences are equal iff
//! their coordinate vectors are equal, so resonances are decided without any
//! floating-point comparison once the module is built.
//!
//! Units follow the `hbar = 1` convention unless a spectrum is rescaled with
//! [`Spectrum::with_hbar`]; the module always holds angular frequencies
//! `E / hbar`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};

pub type Rational = Ratio<i128>;

/// Default merge tolerance for float-mode spectra.
pub const DEFAULT_FREQ_TOLERANCE: f64 = 1e-9;

/// Bound on integer coefficients tried by the float-mode basis search.
const MAX_SEARCH_COEFF: i64 = 64;

/// Integer coordinates of a frequency over a module basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Freq(pub SmallVec<[i64; 2]>);

impl Freq {
    pub fn zero(rank: usize) -> Self {
        Freq(SmallVec::from_elem(0, rank))
    }

    pub fn from_slice(coords: &[i64]) -> Self {
        Freq(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Freq(self.0.iter().map(|&c| c * k).collect())
    }
}

impl Add for &Freq {
    type Output = Freq;
    fn add(self, rhs: &Freq) -> Freq {
        debug_assert_eq!(self.rank(), rhs.rank());
        Freq(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Freq {
    type Output = Freq;
    fn sub(self, rhs: &Freq) -> Freq {
        debug_assert_eq!(self.rank(), rhs.rank());
        Freq(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Freq {
    type Output = Freq;
    fn neg(self) -> Freq {
        Freq(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ModuleMode {
    /// Coordinates derived from exact rationals over a declared independent basis.
    Exact,
    /// Coordinates found greedily from floating energies, merging within `tolerance`.
    Float { tolerance: f64 },
}

/// A finitely generated group of frequencies `sum_i k_i * basis_i / denominator`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyModule {
    basis: Vec<f64>,
    denominator: i64,
    mode: ModuleMode,
    declared_independent: bool,
}

impl FrequencyModule {
    /// Exact module over a caller-declared rationally independent basis.
    pub fn exact(basis: Vec<f64>, denominator: i64) -> Result<Self> {
        if basis.is_empty() {
            return Err(invalid("frequency module needs at least one basis element"));
        }
        if basis.iter().any(|b| *b == 0.0 || !b.is_finite()) {
            return Err(invalid("basis elements must be finite and nonzero"));
        }
        if denominator < 1 {
            return Err(invalid("denominator must be positive"));
        }
        Ok(FrequencyModule {
            basis,
            denominator,
            mode: ModuleMode::Exact,
            declared_independent: true,
        })
    }

    fn float(basis: Vec<f64>, tolerance: f64) -> Self {
        FrequencyModule {
            basis,
            denominator: 1,
            mode: ModuleMode::Float { tolerance },
            declared_independent: false,
        }
    }

    pub fn basis(&self) -> &[f64] {
        &self.basis
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn mode(&self) -> ModuleMode {
        self.mode
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, ModuleMode::Exact)
    }

    /// Whether independence of the basis was declared (exact) rather than inferred (float).
    pub fn declared_independent(&self) -> bool {
        self.declared_independent
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Angular frequency of one unit step along axis `i`.
    pub fn unit(&self, i: usize) -> f64 {
        self.basis[i] / self.denominator as f64
    }

    pub fn zero(&self) -> Freq {
        Freq::zero(self.rank())
    }

    /// Real value of a frequency key.
    pub fn value(&self, f: &Freq) -> f64 {
        f.coords()
            .iter()
            .enumerate()
            .map(|(i, &k)| k as f64 * self.unit(i))
            .sum()
    }

    fn rescaled(&self, factor: f64) -> Self {
        FrequencyModule {
            basis: self.basis.iter().map(|b| b * factor).collect(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub energy: f64,
    pub degeneracy: usize,
}

/// Energy input for [`make_spectrum`].
#[derive(Clone, Debug, PartialEq)]
pub enum EnergyValue {
    Real(f64),
    Rational(Rational),
}

/// An ordered, finite, possibly degenerate discrete spectrum.
#[derive(Clone, Debug)]
pub struct Spectrum {
    levels: Vec<EnergyLevel>,
    keys: Vec<Freq>,
    offsets: Vec<usize>,
    module: Arc<FrequencyModule>,
    hbar: f64,
    label: String,
}

impl Spectrum {
    fn assemble(levels: Vec<EnergyLevel>, keys: Vec<Freq>, module: FrequencyModule) -> Self {
        let mut offsets = Vec::with_capacity(levels.len());
        let mut acc = 0;
        for l in &levels {
            offsets.push(acc);
            acc += l.degeneracy;
        }
        Spectrum {
            levels,
            keys,
            offsets,
            module: Arc::new(module),
            hbar: 1.0,
            label: String::new(),
        }
    }

    /// Exact spectrum whose energies are rational combinations of `basis`.
    ///
    /// `coords[j][i]` is the rational coefficient of `basis[i]` in level `j`.
    /// The basis is trusted to be rationally independent.
    pub fn from_lattice(
        coords: Vec<Vec<Rational>>,
        degeneracies: &[usize],
        basis: Vec<f64>,
    ) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        check_lengths(coords.len(), degeneracies)?;
        let rank = basis.len();
        if coords.iter().any(|c| c.len() != rank) {
            return Err(invalid("every level needs one coefficient per basis element"));
        }

        let approx = |c: &[Rational]| -> f64 {
            c.iter()
                .zip(&basis)
                .map(|(r, b)| r.to_f64().unwrap_or(f64::NAN) * b)
                .sum()
        };
        let mut order: Vec<usize> = (0..coords.len()).collect();
        order.sort_by(|&a, &b| approx(&coords[a]).total_cmp(&approx(&coords[b])));
        for w in order.windows(2) {
            let (a, b) = (&coords[w[0]], &coords[w[1]]);
            if a == b || approx(a) == approx(b) {
                return Err(Error::DuplicateLevel { energy: approx(a) });
            }
        }

        let mut denom: i128 = 1;
        for r in coords.iter().flatten() {
            denom = denom.lcm(r.denom());
            if denom > i64::MAX as i128 {
                return Err(Error::Overflow);
            }
        }
        let mut keys = Vec::with_capacity(coords.len());
        let mut levels = Vec::with_capacity(coords.len());
        let module = FrequencyModule::exact(basis, denom as i64)?;
        for &j in &order {
            let mut key = SmallVec::new();
            for r in &coords[j] {
                let scaled = r * Rational::from_integer(denom);
                debug_assert!(scaled.is_integer());
                let k = scaled.to_integer();
                if k.abs() > i64::MAX as i128 / 4 {
                    return Err(Error::Overflow);
                }
                key.push(k as i64);
            }
            let key = Freq(key);
            levels.push(EnergyLevel {
                energy: module.value(&key),
                degeneracy: degeneracies[j],
            });
            keys.push(key);
        }
        Ok(Self::assemble(levels, keys, module))
    }

    /// Exact spectrum with energies `energies[j] * unit`.
    pub fn from_rationals(energies: &[Rational], degeneracies: &[usize], unit: f64) -> Result<Self> {
        let coords = energies.iter().map(|e| vec![*e]).collect();
        Self::from_lattice(coords, degeneracies, vec![unit])
    }

    /// Float spectrum; the frequency module is built greedily with merge tolerance
    /// `tolerance` (relative, floored at absolute `tolerance` for small values).
    pub fn from_floats(energies: &[f64], degeneracies: &[usize], tolerance: f64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        check_lengths(energies.len(), degeneracies)?;
        if !(tolerance > 0.0) {
            return Err(invalid("float mode needs a positive merge tolerance"));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(invalid("energies must be finite"));
        }
        let mut order: Vec<usize> = (0..energies.len()).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let sorted: Vec<f64> = order.iter().map(|&j| energies[j]).collect();
        for w in sorted.windows(2) {
            if (w[1] - w[0]).abs() <= tolerance * w[1].abs().max(1.0) {
                return Err(Error::DuplicateLevel { energy: w[1] });
            }
        }

        let mut greedy = GreedyBasis::new(tolerance);
        let offset_ids: Vec<usize> = sorted[1..]
            .iter()
            .map(|e| greedy.insert(e - sorted[0]))
            .collect();
        let ground = greedy.insert(sorted[0]);
        let rank = greedy.basis.len().max(1);
        if greedy.basis.is_empty() {
            // single level at zero energy
            greedy.basis.push(1.0);
        }
        let pad = |v: &[i64]| {
            let mut k = Freq::zero(rank);
            for (i, c) in v.iter().enumerate() {
                k.0[i] = *c;
            }
            k
        };
        let base = pad(&greedy.entries[ground]);
        let mut keys = vec![base.clone()];
        for id in offset_ids {
            keys.push(&base + &pad(&greedy.entries[id]));
        }
        let module = FrequencyModule::float(greedy.basis, tolerance);
        let levels = order
            .iter()
            .zip(&sorted)
            .map(|(&j, &e)| EnergyLevel {
                energy: e,
                degeneracy: degeneracies[j],
            })
            .collect::<Vec<_>>();
        for (l, k) in levels.iter().zip(&keys) {
            let v = module.value(k);
            debug_assert!(
                (v - l.energy).abs() <= 1e3 * tolerance * l.energy.abs().max(1.0),
                "greedy basis misrepresents {} as {}",
                l.energy,
                v
            );
        }
        Ok(Self::assemble(levels, keys, module))
    }

    /// Rescale to a spectrum with the given `hbar`; energies are kept and the
    /// frequency module becomes `E / hbar`.
    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar must be positive"));
        }
        let factor = self.hbar / hbar;
        self.module = Arc::new(self.module.rescaled(factor));
        self.hbar = hbar;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn levels(&self) -> &[EnergyLevel] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn energy(&self, j: usize) -> f64 {
        self.levels[j].energy
    }

    pub fn degeneracy(&self, j: usize) -> usize {
        self.levels[j].degeneracy
    }

    pub fn is_degenerate(&self) -> bool {
        self.levels.iter().any(|l| l.degeneracy > 1)
    }

    /// Total Hilbert-space dimension, the sum of degeneracies.
    pub fn dimension(&self) -> usize {
        self.offsets.last().copied().unwrap_or(0) + self.levels.last().map_or(0, |l| l.degeneracy)
    }

    /// Flat basis index of `|E_j, d>`.
    pub fn index(&self, level: usize, d: usize) -> usize {
        debug_assert!(d < self.levels[level].degeneracy);
        self.offsets[level] + d
    }

    /// Inverse of [`Spectrum::index`].
    pub fn level_of(&self, index: usize) -> (usize, usize) {
        let j = match self.offsets.binary_search(&index) {
            Ok(j) => j,
            Err(j) => j - 1,
        };
        (j, index - self.offsets[j])
    }

    pub fn key(&self, j: usize) -> &Freq {
        &self.keys[j]
    }

    pub fn keys(&self) -> &[Freq] {
        &self.keys
    }

    /// Angular frequency `E_j / hbar`.
    pub fn frequency(&self, j: usize) -> f64 {
        self.module.value(&self.keys[j])
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    /// Smallest spacing between adjacent levels, as an angular frequency.
    pub fn min_gap(&self) -> Option<f64> {
        (1..self.levels.len())
            .map(|j| self.frequency(j) - self.frequency(j - 1))
            .min_by(f64::total_cmp)
    }

    /// Partition of ordered level pairs by their (exact) difference.
    pub fn resonance_report(&self) -> ResonanceReport {
        let n = self.levels.len();
        let mut classes: BTreeMap<Freq, Vec<(usize, usize)>> = BTreeMap::new();
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    classes
                        .entry(&self.keys[j] - &self.keys[k])
                        .or_default()
                        .push((j, k));
                }
            }
        }
        let has_shared_resonances = classes.values().any(|c| c.len() > 1);
        let diffs: Vec<Freq> = self.keys.iter().map(|k| k - &self.keys[0]).collect();
        let common_period = rank_one_generator(&diffs).map(|(g, mult)| {
            let step = mult.iter().fold(0i64, |acc, &m| acc.gcd(&m));
            let base = (self.module.value(&g) * step as f64).abs();
            2.0 * std::f64::consts::PI / base
        });
        ResonanceReport {
            classes: classes
                .into_iter()
                .map(|(difference, pairs)| ResonanceClass {
                    frequency: self.module.value(&difference),
                    difference,
                    pairs,
                })
                .collect(),
            has_shared_resonances,
            common_period,
            heuristic: !self.module.is_exact(),
        }
    }
}

fn check_lengths(n: usize, degeneracies: &[usize]) -> Result<()> {
    if degeneracies.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: degeneracies.len(),
        });
    }
    if degeneracies.contains(&0) {
        return Err(invalid("degeneracies must be at least 1"));
    }
    Ok(())
}

/// Build a spectrum from user input: rationals (or integral reals) in exact mode,
/// reals in float mode.
pub fn make_spectrum(
    energies: &[EnergyValue],
    degeneracies: &[usize],
    mode: ModuleMode,
) -> Result<Spectrum> {
    match mode {
        ModuleMode::Exact => {
            let rationals = energies
                .iter()
                .map(|e| match e {
                    EnergyValue::Rational(r) => Ok(*r),
                    EnergyValue::Real(x) if x.fract() == 0.0 && x.abs() < 1e15 => {
                        Ok(Rational::from_integer(*x as i128))
                    }
                    EnergyValue::Real(x) => Err(invalid(format!(
                        "exact mode needs rational energies, got {x}"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            Spectrum::from_rationals(&rationals, degeneracies, 1.0)
        }
        ModuleMode::Float { tolerance } => {
            let reals: Vec<f64> = energies
                .iter()
                .map(|e| match e {
                    EnergyValue::Real(x) => *x,
                    EnergyValue::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
                })
                .collect();
            Spectrum::from_floats(&reals, degeneracies, tolerance)
        }
    }
}

/// Parse `"p/q"`, `"p"`, or a decimal literal as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 30 {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let ip: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let fp: i128 = frac.parse().map_err(|_| bad())?;
        let scale = 10i128.pow(digits);
        let mag = ip.abs() * scale + fp;
        return Ok(Rational::new(if neg { -mag } else { mag }, scale));
    }
    Ok(Rational::from_integer(s.parse().map_err(|_| bad())?))
}

/// Standard spectrum families, truncated at `n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    /// `E_n = n * omega`, `n = 0..=n_max`.
    Harmonic { omega: f64, n_max: usize },
    /// `E_mn = m * omega1 + n * omega2`, `m, n = 0..=n_max`, with `omega1/omega2`
    /// declared irrational.
    Anisotropic2 { omega1: f64, omega2: f64, n_max: usize },
    /// `E_n = -rydberg / n^2`, `n = 1..=n_max`.
    Hydrogen { rydberg: f64, n_max: usize },
    /// `E_n = n^(2k/(k+2))`, `n = n_min..=n_max`.
    PowerLaw { k: f64, n_min: usize, n_max: usize },
    /// `E_n = n * omega` with degeneracy `n + 1`, `n = 0..=n_max`.
    Isotropic2 { omega: f64, n_max: usize },
}

pub fn generate(family: &Family) -> Result<Spectrum> {
    let positive = |name: &str, x: f64| {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(invalid(format!("{name} must be positive, got {x}")))
        }
    };
    match *family {
        Family::Harmonic { omega, n_max } => {
            positive("omega", omega)?;
            let e: Vec<Rational> = (0..=n_max as i128).map(Rational::from_integer).collect();
            Ok(Spectrum::from_rationals(&e, &vec![1; e.len()], omega)?
                .with_label(format!("harmonic(omega={omega}, n_max={n_max})")))
        }
        Family::Isotropic2 { omega, n_max } => {
            positive("omega", omega)?;
            let e: Vec<Rational> = (0..=n_max as i128).map(Rational::from_integer).collect();
            let d: Vec<usize> = (0..=n_max).map(|n| n + 1).collect();
            Ok(Spectrum::from_rationals(&e, &d, omega)?
                .with_label(format!("isotropic2(omega={omega}, n_max={n_max})")))
        }
        Family::Hydrogen { rydberg, n_max } => {
            positive("rydberg", rydberg)?;
            if n_max < 1 {
                return Err(invalid("hydrogen needs n_max >= 1"));
            }
            let e: Vec<Rational> = (1..=n_max as i128).map(|n| Rational::new(-1, n * n)).collect();
            Ok(Spectrum::from_rationals(&e, &vec![1; e.len()], rydberg)?
                .with_label(format!("hydrogen(R={rydberg}, n_max={n_max})")))
        }
        Family::Anisotropic2 { omega1, omega2, n_max } => anisotropic2_box(omega1, omega2, n_max, n_max),
        Family::PowerLaw { k, n_min, n_max } => {
            positive("k", k)?;
            if n_min > n_max {
                return Err(invalid("power law needs n_min <= n_max"));
            }
            let p = 2.0 * k / (k + 2.0);
            let e: Vec<f64> = (n_min..=n_max).map(|n| (n as f64).powf(p)).collect();
            Ok(Spectrum::from_floats(&e, &vec![1; e.len()], DEFAULT_FREQ_TOLERANCE)?
                .with_label(format!("powerlaw(k={k}, n={n_min}..={n_max})")))
        }
    }
}

/// Two-mode anisotropic oscillator with independent truncations per mode.
pub fn anisotropic2_box(omega1: f64, omega2: f64, m_max: usize, n_max: usize) -> Result<Spectrum> {
    if !(omega1 > 0.0 && omega2 > 0.0) {
        return Err(invalid("anisotropic frequencies must be positive"));
    }
    if let Some((p, q)) = small_rational_ratio(omega1 / omega2, 1000, 1e-12) {
        return Err(Error::CommensurateFrequencies { omega1, omega2, p, q });
    }
    let mut coords = Vec::new();
    for m in 0..=m_max as i128 {
        for n in 0..=n_max as i128 {
            coords.push(vec![Rational::from_integer(m), Rational::from_integer(n)]);
        }
    }
    let degs = vec![1; coords.len()];
    Ok(Spectrum::from_lattice(coords, &degs, vec![omega1, omega2])?.with_label(format!(
        "anisotropic2(omega1={omega1}, omega2={omega2}, m_max={m_max}, n_max={n_max})"
    )))
}

/// `Some((p, q))` when `x` is within relative `tol` of `p/q` with `q <= max_q`.
fn small_rational_ratio(x: f64, max_q: i64, tol: f64) -> Option<(i64, i64)> {
    (1..=max_q).find_map(|q| {
        let p = (x * q as f64).round();
        ((p / q as f64 - x).abs() <= tol * x.abs()).then_some((p as i64, q))
    })
}

/// A class of ordered level pairs `(j, k)` sharing one difference `E_j - E_k`.
#[derive(Clone, Debug, Serialize)]
pub struct ResonanceClass {
    pub difference: Freq,
    pub frequency: f64,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceReport {
    pub classes: Vec<ResonanceClass>,
    pub has_shared_resonances: bool,
    pub common_period: Option<f64>,
    /// Set when equality of differences was decided by the float-mode tolerance.
    pub heuristic: bool,
}

/// If all nonzero vectors are integer multiples of one primitive vector `g`,
/// return `g` (first nonzero coordinate positive) and the multiples.
pub(crate) fn rank_one_generator(vectors: &[Freq]) -> Option<(Freq, Vec<i64>)> {
    let first = vectors.iter().find(|v| !v.is_zero())?;
    let mut g = first.0.iter().fold(0i64, |acc, &c| acc.gcd(&c));
    let lead = first.0.iter().find(|&&c| c != 0).copied()?;
    if lead < 0 {
        g = -g;
    }
    let gen = Freq(first.0.iter().map(|c| c / g).collect());
    let pivot = gen.0.iter().position(|&c| c != 0)?;
    let mut multiples = Vec::with_capacity(vectors.len());
    for v in vectors {
        let num = v.0[pivot];
        if num % gen.0[pivot] != 0 {
            return None;
        }
        let s = num / gen.0[pivot];
        if gen.scaled(s) != *v {
            return None;
        }
        multiples.push(s);
    }
    Some((gen, multiples))
}

/// Float-mode module for an arbitrary list of frequencies, processed in order of
/// increasing magnitude. Returns the module and one key per input value.
pub(crate) fn float_module(values: &[f64], tolerance: f64) -> (FrequencyModule, Vec<Freq>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()));
    let mut greedy = GreedyBasis::new(tolerance);
    let mut ids = vec![0; values.len()];
    for &i in &order {
        ids[i] = greedy.insert(values[i]);
    }
    if greedy.basis.is_empty() {
        greedy.basis.push(1.0);
    }
    let rank = greedy.basis.len();
    let keys = ids
        .iter()
        .map(|&id| {
            let mut k = Freq::zero(rank);
            for (i, c) in greedy.entries[id].iter().enumerate() {
                k.0[i] = *c;
            }
            k
        })
        .collect();
    (FrequencyModule::float(greedy.basis, tolerance), keys)
}

/// Greedy float-mode basis: values are expressed as integer combinations of
/// basis elements, refining an axis by a small rational factor when needed.
struct GreedyBasis {
    basis: Vec<f64>,
    entries: Vec<Vec<i64>>,
    eps: f64,
}

impl GreedyBasis {
    fn new(eps: f64) -> Self {
        GreedyBasis {
            basis: Vec::new(),
            entries: Vec::new(),
            eps,
        }
    }

    fn insert(&mut self, x: f64) -> usize {
        let coords = self.locate(x);
        self.entries.push(coords);
        self.entries.len() - 1
    }

    fn locate(&mut self, x: f64) -> Vec<i64> {
        let r = self.basis.len();
        let tol = self.eps * x.abs().max(1.0);
        if x.abs() <= tol {
            return vec![0; r];
        }
        if let Some(c) = self.search(x, tol) {
            return c;
        }
        for i in 0..r {
            let b = self.basis[i];
            for q in 2..=MAX_SEARCH_COEFF {
                let p = (x / b * q as f64).round();
                if p != 0.0 && p.abs() < 1e12 && (p * b / q as f64 - x).abs() <= tol {
                    self.basis[i] = b / q as f64;
                    for e in &mut self.entries {
                        e[i] *= q;
                    }
                    let mut c = vec![0; r];
                    c[i] = p as i64;
                    return c;
                }
            }
        }
        self.basis.push(x);
        for e in &mut self.entries {
            e.push(0);
        }
        let mut c = vec![0; r + 1];
        c[r] = 1;
        c
    }

    /// Integer combination within tolerance, minimising the L1 norm. The last
    /// coefficient is solved by rounding; the others range over `|c| <= 64`.
    /// Only attempted for rank <= 3; above that single-axis multiples are tried.
    fn search(&self, x: f64, tol: f64) -> Option<Vec<i64>> {
        let r = self.basis.len();
        if r == 0 {
            return None;
        }
        if r > 3 {
            return (0..r).find_map(|i| {
                let c = (x / self.basis[i]).round();
                ((c * self.basis[i] - x).abs() <= tol && c.abs() < 1e12).then(|| {
                    let mut v = vec![0; r];
                    v[i] = c as i64;
                    v
                })
            });
        }
        let last = self.basis[r - 1];
        let mut prefix = vec![-MAX_SEARCH_COEFF; r - 1];
        let mut best: Option<(i64, Vec<i64>)> = None;
        loop {
            let partial: f64 = prefix.iter().zip(&self.basis).map(|(&c, b)| c as f64 * b).sum();
            let c = ((x - partial) / last).round();
            if c.abs() < 1e12 && (partial + c * last - x).abs() <= tol {
                let norm = prefix.iter().map(|v| v.abs()).sum::<i64>() + c.abs() as i64;
                if best.as_ref().is_none_or(|(n, _)| norm < *n) {
                    let mut v = prefix.clone();
                    v.push(c as i64);
                    best = Some((norm, v));
                }
            }
            let mut i = 0;
            loop {
                if i == prefix.len() {
                    return best.map(|b| b.1);
                }
                if prefix[i] < MAX_SEARCH_COEFF {
                    prefix[i] += 1;
                    break;
                }
                prefix[i] = -MAX_SEARCH_COEFF;
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn integer_levels_are_periodic() {
        let s = make_spectrum(
            &[EnergyValue::Real(0.0), EnergyValue::Real(1.0), EnergyValue::Real(2.0)],
            &[1, 1, 1],
            ModuleMode::Exact,
        )
        .unwrap();
        let rep = s.resonance_report();
        assert!((rep.common_period.unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!(rep.has_shared_resonances);
    }

    #[test]
    fn one_level_has_no_differences() {
        let s = make_spectrum(&[EnergyValue::Real(0.0)], &[1], ModuleMode::Exact).unwrap();
        let rep = s.resonance_report();
        assert!(rep.classes.is_empty());
        assert!(!rep.has_shared_resonances);
        assert_eq!(s.dimension(), 1);
    }

    #[test]
    fn hydrogen_like_rationals() {
        let e = [r(-1, 1), r(-1, 4), r(-1, 9)];
        let s = Spectrum::from_rationals(&e, &[1, 1, 1], 1.0).unwrap();
        assert_eq!(s.module().denominator(), 36);
        // oracle: rational differences compared directly
        for j in 0..3 {
            for k in 0..3 {
                let exact = e[j] - e[k];
                let key = s.key(j) - s.key(k);
                assert_eq!(Rational::from_integer(key.coords()[0] as i128) / 36, exact);
            }
        }
    }

    #[test]
    fn errors_on_bad_input() {
        assert!(matches!(
            Spectrum::from_floats(&[], &[], 1e-9),
            Err(Error::EmptySpectrum)
        ));
        assert!(matches!(
            Spectrum::from_floats(&[1.0, 1.0 + 1e-12], &[1, 1], 1e-9),
            Err(Error::DuplicateLevel { .. })
        ));
        assert!(matches!(
            Spectrum::from_rationals(&[r(1, 2), r(2, 4)], &[1, 1], 1.0),
            Err(Error::DuplicateLevel { .. })
        ));
        assert!(Spectrum::from_floats(&[0.0, 1.0], &[1], 1e-9).is_err());
        assert!(Spectrum::from_floats(&[0.0, 1.0], &[1, 0], 1e-9).is_err());
    }

    #[test]
    fn harmonic_family() {
        let s = generate(&Family::Harmonic { omega: 1.0, n_max: 3 }).unwrap();
        let e: Vec<f64> = s.levels().iter().map(|l| l.energy).collect();
        assert_eq!(e, vec![0.0, 1.0, 2.0, 3.0]);
        let rep = s.resonance_report();
        assert!(rep.has_shared_resonances);
        assert!((rep.common_period.unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn isotropic_degeneracies() {
        let s = generate(&Family::Isotropic2 { omega: 1.0, n_max: 2 }).unwrap();
        let d: Vec<usize> = s.levels().iter().map(|l| l.degeneracy).collect();
        assert_eq!(d, vec![1, 2, 3]);
        assert_eq!(s.dimension(), 6);
        assert_eq!(s.index(2, 1), 4);
        assert_eq!(s.level_of(4), (2, 1));
        assert_eq!(s.level_of(0), (0, 0));
    }

    #[test]
    fn anisotropic_levels_are_distinct() {
        let w2 = 2f64.sqrt();
        let s = generate(&Family::Anisotropic2 { omega1: 1.0, omega2: w2, n_max: 2 }).unwrap();
        assert_eq!(s.level_count(), 9);
        // exhaustive lattice check: all (m, n) give distinct values
        let mut vals: Vec<f64> = (0..3)
            .flat_map(|m| (0..3).map(move |n| m as f64 + n as f64 * w2))
            .collect();
        vals.sort_by(f64::total_cmp);
        for (l, v) in s.levels().iter().zip(&vals) {
            assert!((l.energy - v).abs() < 1e-12);
        }
        assert!(vals.windows(2).all(|w| w[1] - w[0] > 1e-3));
        assert!(s.resonance_report().common_period.is_none());
    }

    #[test]
    fn commensurate_anisotropic_rejected() {
        assert!(matches!(
            generate(&Family::Anisotropic2 { omega1: 1.0, omega2: 1.5, n_max: 2 }),
            Err(Error::CommensurateFrequencies { p: 2, q: 3, .. })
        ));
    }

    #[test]
    fn hydrogen_has_no_shared_resonances() {
        // oracle: compare all ordered rational differences pairwise
        let e: Vec<Rational> = (1..=4).map(|n: i128| r(-1, n * n)).collect();
        let mut oracle_shared = false;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        if a != b && (a, b) != (c, d) && c != d && e[a] - e[b] == e[c] - e[d] {
                            oracle_shared = true;
                        }
                    }
                }
            }
        }
        assert!(!oracle_shared);
        let s = generate(&Family::Hydrogen { rydberg: 1.0, n_max: 4 }).unwrap();
        let rep = s.resonance_report();
        assert!(!rep.has_shared_resonances);
        assert_eq!(rep.classes.len(), 12);
    }

    #[test]
    fn two_level_classes() {
        let s = Spectrum::from_floats(&[0.0, 0.7], &[1, 1], 1e-9).unwrap();
        let rep = s.resonance_report();
        assert_eq!(rep.classes.len(), 2);
        assert!(!rep.has_shared_resonances);
        assert!(rep.heuristic);
    }

    #[test]
    fn exact_equality_matches_rational_arithmetic() {
        // brute-force oracle over all generator families with n_max <= 6
        for n_max in 1..=6usize {
            let fams = [
                (Family::Harmonic { omega: 1.0, n_max }, None),
                (Family::Hydrogen { rydberg: 1.0, n_max }, Some(1i128)),
                (Family::Isotropic2 { omega: 1.0, n_max }, None),
            ];
            for (fam, hyd) in fams {
                let s = generate(&fam).unwrap();
                let exact: Vec<Rational> = (0..s.level_count() as i128)
                    .map(|j| match hyd {
                        Some(_) => r(-1, (j + 1) * (j + 1)),
                        None => Rational::from_integer(j),
                    })
                    .collect();
                let n = exact.len();
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            for d in 0..n {
                                let lhs = s.key(a) - s.key(b) == s.key(c) - s.key(d);
                                let rhs = exact[a] - exact[b] == exact[c] - exact[d];
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn float_mode_finds_rank_one_structure() {
        let s = Spectrum::from_floats(&[0.0, 1.0, 2.0, 3.0], &[1; 4], 1e-9).unwrap();
        assert_eq!(s.module().rank(), 1);
        assert!((s.resonance_report().common_period.unwrap() - 2.0 * PI).abs() < 1e-9);

        let e: Vec<f64> = (1..=5).map(|n| -1.0 / (n * n) as f64).collect();
        let s = Spectrum::from_floats(&e, &[1; 5], 1e-9).unwrap();
        assert_eq!(s.module().rank(), 1);
        assert!(!s.resonance_report().has_shared_resonances);

        let w = 2f64.sqrt();
        let s = Spectrum::from_floats(&[0.0, 1.0, w, 1.0 + w, 2.0], &[1; 5], 1e-9).unwrap();
        assert_eq!(s.module().rank(), 2);
        assert!(s.resonance_report().has_shared_resonances);
    }

    #[test]
    fn float_mode_with_offset_ground_energy() {
        let w = 2f64.sqrt();
        let s = Spectrum::from_floats(&[w, w + 1.0, w + 2.0], &[1; 3], 1e-9).unwrap();
        for j in 0..3 {
            assert!((s.frequency(j) - s.energy(j)).abs() < 1e-12);
        }
        assert!((s.resonance_report().common_period.unwrap() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn powerlaw_levels() {
        let s = generate(&Family::PowerLaw { k: 2.0, n_min: 0, n_max: 5 }).unwrap();
        // k = 2 gives E_n = n, a harmonic spectrum
        assert_eq!(s.module().rank(), 1);
        let s = generate(&Family::PowerLaw { k: 4.0, n_min: 1, n_max: 30 }).unwrap();
        for j in 0..s.level_count() {
            let n = (j + 1) as f64;
            assert!((s.frequency(j) - n.powf(4.0 / 3.0)).abs() < 1e-6 * n);
        }
    }

    #[test]
    fn hbar_rescales_frequencies_only() {
        let s = generate(&Family::Harmonic { omega: 2.0, n_max: 2 }).unwrap().with_hbar(0.5).unwrap();
        assert_eq!(s.energy(1), 2.0);
        assert!((s.frequency(1) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("3/4").unwrap(), r(3, 4));
        assert_eq!(parse_rational("-1/9").unwrap(), r(-1, 9));
        assert_eq!(parse_rational("2").unwrap(), r(2, 1));
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
        assert!(parse_rational("x/2").is_err());
        assert!(parse_rational("1/0").is_err());
    }

}
