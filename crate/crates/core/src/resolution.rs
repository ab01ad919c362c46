//! Resolution measures of canonical time densities: purity, entropy,
//! information and the energy-time uncertainty relations.
//!
//! Purity is exact (a Parseval sum). Entropy `mean(-p ln p)` has no closed form
//! in general and is computed by one of several backends:
//!
//! * `exact-periodic`: all frequencies are multiples of one generator, so the
//!   density is periodic and one period is sampled uniformly;
//! * `torus`: frequencies span a lattice of rank at most 3 over the module
//!   basis; by equidistribution the long-time mean equals the torus mean;
//! * `time-average`: composite quadrature over a doubling ladder of horizons;
//! * `factorized`: a product state over independent frequency sublattices has
//!   a product density, and its entropy is the sum of the factors' entropies.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::apfun::{APDensity, POSITIVITY_EPS};
use crate::canonical::StateVector;
use crate::error::{invalid, Error, Result};
use crate::grid::{grid_means, grid_sizes, Field, Layout, MAX_GRID_POINTS};
use crate::quadrature;

/// Values below this are treated as zero under the logarithm.
pub const CLAMP_EPS: f64 = 1e-300;

/// Horizon doublings allowed by the time-average ladder.
pub const MAX_DOUBLINGS: u32 = 12;

/// Cap on exponential evaluations (samples times terms) spent by one
/// time-average ladder.
pub const TIME_AVERAGE_BUDGET: f64 = 4e9;

/// Oversampling factor of torus grids relative to the density's span.
const OVERSAMPLE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyBackend {
    Auto,
    TimeAverage,
    Torus,
    ExactPeriodic,
    Factorized,
}

impl EntropyBackend {
    pub fn name(self) -> &'static str {
        match self {
            EntropyBackend::Auto => "auto",
            EntropyBackend::TimeAverage => "time-average",
            EntropyBackend::Torus => "torus",
            EntropyBackend::ExactPeriodic => "exact-periodic",
            EntropyBackend::Factorized => "factorized",
        }
    }
}

impl fmt::Display for EntropyBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for EntropyBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => EntropyBackend::Auto,
            "time-average" => EntropyBackend::TimeAverage,
            "torus" => EntropyBackend::Torus,
            "exact-periodic" => EntropyBackend::ExactPeriodic,
            "factorized" => EntropyBackend::Factorized,
            other => return Err(Error::Parse(format!("unknown entropy backend `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyOptions {
    pub backend: EntropyBackend,
    /// Convergence target for the time-average ladder spread.
    pub tolerance: f64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            backend: EntropyBackend::Auto,
            tolerance: 1e-6,
        }
    }
}

impl EntropyOptions {
    pub fn with_backend(backend: EntropyBackend) -> Self {
        EntropyOptions {
            backend,
            ..Self::default()
        }
    }
}

/// An entropy value in nats together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub error: f64,
    pub backend: EntropyBackend,
    /// Grid points or quadrature nodes used.
    pub evaluations: usize,
}

fn neg_p_log_p(p: f64) -> f64 {
    if p <= CLAMP_EPS {
        0.0
    } else {
        -p * p.ln()
    }
}

/// `mean(p^2)`, the Parseval sum of squared density coefficients.
pub fn purity(p: &APDensity) -> f64 {
    p.function().parseval_norm()
}

/// Purity of the canonical density of a state.
pub fn state_purity(psi: &StateVector) -> Result<f64> {
    Ok(purity(&psi.canonical_density()?))
}

fn require_no_shared_resonances(psi: &StateVector) -> Result<()> {
    let s = psi.spectrum();
    if s.is_degenerate() {
        return Err(invalid("closed-form purity needs a nondegenerate spectrum"));
    }
    if s.resonance_report().has_shared_resonances {
        return Err(Error::SharedResonances);
    }
    Ok(())
}

/// `2 - sum_j |c_j|^4`, the purity of any state over a spectrum without shared
/// resonances.
pub fn typical_purity_formula(psi: &StateVector) -> Result<f64> {
    require_no_shared_resonances(psi)?;
    Ok(2.0 - psi.level_populations().iter().map(|p| p * p).sum::<f64>())
}

/// `|purity + sum_j p_j^2 - 2|`, which vanishes without shared resonances.
pub fn exact_ur_residual(psi: &StateVector) -> Result<f64> {
    require_no_shared_resonances(psi)?;
    let sum_sq: f64 = psi.level_populations().iter().map(|p| p * p).sum();
    Ok((state_purity(psi)? + sum_sq - 2.0).abs())
}

/// `-sum_j p_j ln p_j` over the level distribution.
pub fn energy_entropy(psi: &StateVector) -> f64 {
    psi.level_populations().into_iter().map(neg_p_log_p).sum()
}

/// Entropy of a density given by its coefficients.
pub fn entropy(p: &APDensity, options: &EntropyOptions) -> Result<EntropyEstimate> {
    if !p.certificate().passed {
        return Err(Error::PositivityCheckFailed {
            min: p.certificate().min_value,
        });
    }
    field_entropy(&Field::direct(p.function()), options)
}

/// Entropy of the canonical density of a state, evaluated as `sum_d |theta_d|^2`
/// without expanding the density.
pub fn state_entropy(psi: &StateVector, options: &EntropyOptions) -> Result<EntropyEstimate> {
    if options.backend == EntropyBackend::Factorized {
        return factorized_entropy(std::slice::from_ref(psi), &EntropyOptions::default());
    }
    let rep = psi.time_representation();
    field_entropy(&Field::moduli(rep.components()), options)
}

/// Entropy of the product of states over independent frequency sublattices:
/// the sum of the factors' entropies (each computed with `options`).
pub fn factorized_entropy(factors: &[StateVector], options: &EntropyOptions) -> Result<EntropyEstimate> {
    if factors.is_empty() {
        return Err(invalid("need at least one factor"));
    }
    let inner = match options.backend {
        EntropyBackend::Factorized => EntropyOptions {
            backend: EntropyBackend::Auto,
            ..*options
        },
        _ => *options,
    };
    let mut total = EntropyEstimate {
        value: 0.0,
        error: 0.0,
        backend: EntropyBackend::Factorized,
        evaluations: 0,
    };
    for f in factors {
        let e = state_entropy(f, &inner)?;
        total.value += e.value;
        total.error += e.error;
        total.evaluations += e.evaluations;
    }
    Ok(total)
}

fn min_order(dims: usize) -> usize {
    match dims {
        0 | 1 => 2048,
        2 => 512,
        _ => 128,
    }
}

fn grid_plan(field: &Field, layout: &Layout) -> Option<Vec<usize>> {
    let sizes = grid_sizes(&field.spans(layout), min_order(layout.dims()), OVERSAMPLE);
    let total = sizes.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n))?;
    (total <= MAX_GRID_POINTS).then_some(sizes)
}

fn grid_entropy(field: &Field, layout: &Layout, sizes: &[usize], backend: EntropyBackend) -> Result<EntropyEstimate> {
    let values = field.grid_values(layout, sizes);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -POSITIVITY_EPS {
        return Err(Error::PositivityCheckFailed { min });
    }
    let (full, half) = grid_means(&values, sizes, neg_p_log_p);
    Ok(EntropyEstimate {
        value: full,
        error: (full - half).abs(),
        backend,
        evaluations: values.len(),
    })
}

fn field_entropy(field: &Field, options: &EntropyOptions) -> Result<EntropyEstimate> {
    let layout = field.layout();
    let periodic = matches!(layout, Layout::Periodic { .. }) || layout.dims() == 0;
    match options.backend {
        EntropyBackend::ExactPeriodic => {
            if !periodic {
                return Err(Error::BackendInapplicable {
                    backend: "exact-periodic",
                    reason: format!("density frequencies span a rank-{} lattice", layout.dims()),
                });
            }
            let sizes = grid_plan(field, &layout).ok_or_else(|| Error::BackendInapplicable {
                backend: "exact-periodic",
                reason: "period grid exceeds the point budget".into(),
            })?;
            grid_entropy(field, &layout, &sizes, EntropyBackend::ExactPeriodic)
        }
        EntropyBackend::Torus => {
            if layout.dims() > 3 {
                return Err(Error::BackendInapplicable {
                    backend: "torus",
                    reason: format!("density frequencies span {} module axes (max 3)", layout.dims()),
                });
            }
            let sizes = grid_plan(field, &layout).ok_or_else(|| Error::BackendInapplicable {
                backend: "torus",
                reason: "torus grid exceeds the point budget".into(),
            })?;
            grid_entropy(field, &layout, &sizes, EntropyBackend::Torus)
        }
        EntropyBackend::TimeAverage => time_average_entropy(field, options.tolerance),
        EntropyBackend::Factorized => Err(Error::BackendInapplicable {
            backend: "factorized",
            reason: "needs the product factors; use factorized_entropy".into(),
        }),
        EntropyBackend::Auto => {
            if layout.dims() <= 3 {
                if let Some(sizes) = grid_plan(field, &layout) {
                    let backend = if periodic {
                        EntropyBackend::ExactPeriodic
                    } else {
                        EntropyBackend::Torus
                    };
                    return grid_entropy(field, &layout, &sizes, backend);
                }
            }
            time_average_entropy(field, options.tolerance)
        }
    }
}

fn time_average_entropy(field: &Field, tolerance: f64) -> Result<EntropyEstimate> {
    let Some((w_min, w_max)) = field.frequency_range() else {
        let v = neg_p_log_p(field.density_at(0.0));
        return Ok(EntropyEstimate {
            value: v,
            error: 0.0,
            backend: EntropyBackend::TimeAverage,
            evaluations: 1,
        });
    };
    let x0 = 64.0 * 2.0 * PI / w_min;
    let panel = 2.0 * PI / w_max;
    let f = |t: f64| Complex64::new(neg_p_log_p(field.density_at(t)), 0.0);
    let mut integral = 0.0;
    let mut prev = 0.0;
    let mut ladder: Vec<f64> = Vec::new();
    let mut spread = f64::INFINITY;
    let mut x = x0;
    let per_unit = quadrature::PANEL_NODES as f64 * field.term_count() as f64 / panel;
    for _ in 0..=MAX_DOUBLINGS {
        if x * per_unit > TIME_AVERAGE_BUDGET {
            if ladder.len() < 3 {
                return Err(Error::BackendInapplicable {
                    backend: EntropyBackend::TimeAverage.name(),
                    reason: format!(
                        "horizon {x:.3e} needs about {:.1e} term evaluations (budget {TIME_AVERAGE_BUDGET:.0e})",
                        x * per_unit
                    ),
                });
            }
            break;
        }
        integral += quadrature::integrate(f, prev, x, panel).re;
        prev = x;
        ladder.push(integral / x);
        if ladder.len() >= 3 {
            let tail = &ladder[ladder.len() - 3..];
            let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
            spread = hi - lo;
            if spread <= tolerance {
                let evaluations = (x / panel).ceil() as usize * quadrature::PANEL_NODES;
                return Ok(EntropyEstimate {
                    value: *ladder.last().unwrap(),
                    error: spread,
                    backend: EntropyBackend::TimeAverage,
                    evaluations,
                });
            }
        }
        x *= 2.0;
    }
    Err(Error::NonConvergent {
        spread,
        tolerance,
        horizon: prev,
    })
}

/// Result of checking `S(H) + S_ap >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EurCheck {
    pub energy_entropy: f64,
    pub time_entropy: EntropyEstimate,
    /// `S(H) + S_ap`.
    pub slack: f64,
    pub satisfied: bool,
}

/// Check the energy-time entropic uncertainty relation for a state.
pub fn verify_eur(psi: &StateVector, options: &EntropyOptions) -> Result<EurCheck> {
    let h = energy_entropy(psi);
    let s = state_entropy(psi, options)?;
    let slack = h + s.value;
    Ok(EurCheck {
        energy_entropy: h,
        time_entropy: s,
        slack,
        satisfied: slack >= -(s.error + 1e-9),
    })
}

/// Summary of the time resolution of a state. Entropies are in nats.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolutionReport {
    pub purity: f64,
    pub entropy: f64,
    pub entropy_error: f64,
    pub entropy_backend: EntropyBackend,
    pub information: f64,
    pub energy_entropy: f64,
    pub eur_slack: f64,
    pub exact_ur_residual: Option<f64>,
    pub entropy_bits: f64,
    pub information_bits: f64,
    pub energy_entropy_bits: f64,
}

impl ResolutionReport {
    pub fn for_state(psi: &StateVector, options: &EntropyOptions) -> Result<Self> {
        let purity = state_purity(psi)?;
        let s = state_entropy(psi, options)?;
        let h = energy_entropy(psi);
        let exact_ur_residual = exact_ur_residual(psi).ok();
        Ok(ResolutionReport {
            purity,
            entropy: s.value,
            entropy_error: s.error,
            entropy_backend: s.backend,
            information: -s.value,
            energy_entropy: h,
            eur_slack: h + s.value,
            exact_ur_residual,
            entropy_bits: s.value / LN_2,
            information_bits: -s.value / LN_2,
            energy_entropy_bits: h / LN_2,
        })
    }
}

/// `S_ap >= -ln P_ap`, allowing for the entropy error.
pub fn entropy_purity_bound(report: &ResolutionReport) -> bool {
    report.entropy >= -report.purity.ln() - report.entropy_error - 1e-12
}
