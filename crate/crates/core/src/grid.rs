//! Evaluation of trigonometric polynomials on uniform torus grids.
//!
//! A density built from a spectrum lives on the torus spanned by the active
//! axes of its frequency module (or on a circle, when all frequencies are
//! multiples of a single generator). Sampling that torus uniformly gives exact
//! values at the grid points; phases are reduced with integer arithmetic so
//! large coordinates do not lose precision.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::apfun::APFunction;
use crate::spectrum::{rank_one_generator, Freq, FrequencyModule};

/// Upper bound on grid points for any single evaluation.
pub(crate) const MAX_GRID_POINTS: usize = 1 << 25;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Layout {
    /// All frequencies are integer multiples of `generator`.
    Periodic { generator: Freq },
    /// Coordinates along the listed module axes.
    Axes(Vec<usize>),
}

impl Layout {
    pub fn dims(&self) -> usize {
        match self {
            Layout::Periodic { .. } => 1,
            Layout::Axes(a) => a.len(),
        }
    }

    fn reduce(&self, key: &Freq) -> Vec<i64> {
        match self {
            Layout::Periodic { generator } => {
                let p = generator.coords().iter().position(|&c| c != 0).unwrap();
                vec![key.coords()[p] / generator.coords()[p]]
            }
            Layout::Axes(axes) => axes.iter().map(|&i| key.coords()[i]).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum FieldKind {
    /// Density is `sum_c |component_c(t)|^2`.
    Moduli,
    /// Density is the real part of the single component.
    Direct,
}

/// A nonnegative almost-periodic density given either directly or as a sum of
/// squared moduli of time representations.
#[derive(Clone, Debug)]
pub(crate) struct Field {
    kind: FieldKind,
    module: Arc<FrequencyModule>,
    components: Vec<Vec<(Freq, Complex64)>>,
    omegas: Vec<Vec<(f64, Complex64)>>,
}

impl Field {
    pub fn direct(p: &APFunction) -> Self {
        let comp: Vec<(Freq, Complex64)> = p.terms().map(|(k, c)| (k.clone(), *c)).collect();
        Self::build(FieldKind::Direct, p.module().clone(), vec![comp])
    }

    /// Components are shifted by a common reference key; the moduli are unchanged.
    pub fn moduli(parts: &[APFunction]) -> Self {
        let module = parts[0].module().clone();
        let reference = parts
            .iter()
            .flat_map(|p| p.terms().map(|(k, _)| k.clone()))
            .min()
            .unwrap_or_else(|| module.zero());
        let comps = parts
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| p.terms().map(|(k, c)| (k - &reference, *c)).collect())
            .collect();
        Self::build(FieldKind::Moduli, module, comps)
    }

    fn build(kind: FieldKind, module: Arc<FrequencyModule>, components: Vec<Vec<(Freq, Complex64)>>) -> Self {
        let omegas = components
            .iter()
            .map(|c| c.iter().map(|(k, a)| (module.value(k), *a)).collect())
            .collect();
        Field {
            kind,
            module,
            components,
            omegas,
        }
    }

    pub fn density_at(&self, t: f64) -> f64 {
        let eval = |c: &[(f64, Complex64)]| -> Complex64 {
            c.iter()
                .map(|(w, a)| {
                    let (s, co) = (w * t).sin_cos();
                    a * Complex64::new(co, s)
                })
                .sum()
        };
        match self.kind {
            FieldKind::Direct => eval(&self.omegas[0]).re,
            FieldKind::Moduli => self.omegas.iter().map(|c| eval(c).norm_sqr()).sum(),
        }
    }

    /// Number of exponentials evaluated per density sample.
    pub fn term_count(&self) -> usize {
        self.omegas.iter().map(Vec::len).sum()
    }

    /// Smallest and largest nonzero frequency magnitude present in the density.
    pub fn frequency_range(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut visit = |w: f64| {
            let w = w.abs();
            if w > 1e-300 {
                lo = lo.min(w);
                hi = hi.max(w);
            }
        };
        match self.kind {
            FieldKind::Direct => self.omegas[0].iter().for_each(|(w, _)| visit(*w)),
            FieldKind::Moduli => {
                for c in &self.omegas {
                    for (a, _) in c {
                        for (b, _) in c {
                            visit(a - b);
                        }
                    }
                }
            }
        }
        (hi > 0.0).then_some((lo, hi))
    }

    fn keys(&self) -> impl Iterator<Item = &Freq> {
        self.components.iter().flatten().map(|(k, _)| k)
    }

    pub fn layout(&self) -> Layout {
        let keys: Vec<Freq> = self.keys().cloned().collect();
        if let Some((generator, _)) = rank_one_generator(&keys) {
            return Layout::Periodic { generator };
        }
        let rank = self.module.rank();
        let axes = (0..rank)
            .filter(|&i| {
                let mut it = self.keys().map(|k| k.coords()[i]);
                match it.next() {
                    Some(first) => it.any(|c| c != first) || first != 0,
                    None => false,
                }
            })
            .collect();
        Layout::Axes(axes)
    }

    /// Coordinate span of the density along each reduced dimension.
    pub fn spans(&self, layout: &Layout) -> Vec<i64> {
        let dims = layout.dims();
        let mut out = vec![0i64; dims];
        for comp in &self.components {
            let reduced: Vec<Vec<i64>> = comp.iter().map(|(k, _)| layout.reduce(k)).collect();
            for (d, o) in out.iter_mut().enumerate() {
                let lo = reduced.iter().map(|r| r[d]).min().unwrap_or(0);
                let hi = reduced.iter().map(|r| r[d]).max().unwrap_or(0);
                let span = match self.kind {
                    FieldKind::Direct => hi.abs().max(lo.abs()),
                    FieldKind::Moduli => hi - lo,
                };
                *o = (*o).max(span);
            }
        }
        out
    }

    /// Density values on the uniform grid, row-major with the last axis fastest.
    pub fn grid_values(&self, layout: &Layout, sizes: &[usize]) -> Vec<f64> {
        let total: usize = sizes.iter().product();
        let mut acc = vec![0.0; total];
        for comp in &self.components {
            let reduced: Vec<(Vec<i64>, Complex64)> =
                comp.iter().map(|(k, c)| (layout.reduce(k), *c)).collect();
            let vals = eval_grid(&reduced, sizes);
            match self.kind {
                FieldKind::Direct => acc.iter_mut().zip(&vals).for_each(|(a, v)| *a += v.re),
                FieldKind::Moduli => acc.iter_mut().zip(&vals).for_each(|(a, v)| *a += v.norm_sqr()),
            }
        }
        acc
    }
}

/// Per-dimension grid sizes: a power of two at least `min_order` and at least
/// `oversample` times the span.
pub(crate) fn grid_sizes(spans: &[i64], min_order: usize, oversample: usize) -> Vec<usize> {
    spans
        .iter()
        .map(|&s| {
            if s == 0 {
                1
            } else {
                min_order.max((oversample * s as usize + 1).next_power_of_two())
            }
        })
        .collect()
}

fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let (s, c) = (2.0 * PI * j as f64 / n as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

fn eval_1d(terms: &[(i64, Complex64)], n: usize) -> Vec<Complex64> {
    let tw = twiddles(n);
    let reduced: Vec<(u64, Complex64)> = terms
        .iter()
        .map(|(k, c)| (k.rem_euclid(n as i64) as u64, *c))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    out.par_chunks_mut(4096).enumerate().for_each(|(chunk, slot)| {
        for (i, v) in slot.iter_mut().enumerate() {
            let m = (chunk * 4096 + i) as u64;
            *v = reduced
                .iter()
                .map(|(k, c)| c * tw[((k * m) % n as u64) as usize])
                .sum();
        }
    });
    out
}

/// Values of `sum_j c_j exp(2 pi i k_j . m / N)` for all grid indices `m`.
pub(crate) fn eval_grid(terms: &[(Vec<i64>, Complex64)], sizes: &[usize]) -> Vec<Complex64> {
    match sizes.len() {
        0 => vec![terms.iter().map(|t| t.1).sum()],
        1 => {
            let flat: Vec<(i64, Complex64)> = terms.iter().map(|(k, c)| (k[0], *c)).collect();
            eval_1d(&flat, sizes[0])
        }
        r => {
            let n = sizes[r - 1];
            let mut groups: BTreeMap<&[i64], Vec<(i64, Complex64)>> = BTreeMap::new();
            for (k, c) in terms {
                groups.entry(&k[..r - 1]).or_default().push((k[r - 1], *c));
            }
            let prefixes: Vec<Vec<i64>> = groups.keys().map(|p| p.to_vec()).collect();
            let partials: Vec<Vec<Complex64>> = groups.values().map(|g| eval_1d(g, n)).collect();
            let inner: usize = sizes[..r - 1].iter().product();
            let cols: Vec<Vec<Complex64>> = (0..n)
                .into_par_iter()
                .map(|m| {
                    let sub: Vec<(Vec<i64>, Complex64)> = prefixes
                        .iter()
                        .zip(&partials)
                        .map(|(p, v)| (p.clone(), v[m]))
                        .collect();
                    eval_grid(&sub, &sizes[..r - 1])
                })
                .collect();
            let mut out = vec![Complex64::new(0.0, 0.0); inner * n];
            for (m, col) in cols.into_iter().enumerate() {
                for (i, v) in col.into_iter().enumerate() {
                    out[i * n + m] = v;
                }
            }
            out
        }
    }
}

/// Mean of `f(values)` over the full grid and over the sub-grid of even indices.
pub(crate) fn grid_means(values: &[f64], sizes: &[usize], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut full = 0.0;
    let mut half = 0.0;
    let mut half_count = 0usize;
    let mut idx = vec![0usize; sizes.len()];
    for &v in values {
        let fv = f(v);
        full += fv;
        if idx.iter().all(|i| i % 2 == 0) {
            half += fv;
            half_count += 1;
        }
        for d in (0..sizes.len()).rev() {
            idx[d] += 1;
            if idx[d] < sizes[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    (full / values.len() as f64, half / half_count.max(1) as f64)
}
