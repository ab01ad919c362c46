//! Semiclassical approximations to the time representation.
//!
//! For coefficients `c_n = f(n - n_bar)` concentrated around a large `n_bar`,
//! expanding `E(n)` to second order gives (up to a global phase)
//!
//! ```text
//! theta(t) ~ sum_n f(n) exp(i (n E' + n^2 E''/2) t / hbar),
//! ```
//!
//! which revives on the time scale `tau_r = 4 pi hbar / E''`. For a Gaussian
//! profile the sum can be resummed by Poisson summation into a sum of
//! displaced Gaussians.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::StateVector;
use crate::error::{invalid, Error, Result};
use crate::spectrum::{generate, Family};

/// Profile weights below this (relative to the peak, in probability) are dropped.
pub const PROFILE_TAIL: f64 = 1e-12;

/// Poisson-summation terms below this (relative to the largest) are dropped.
const POISSON_TAIL: f64 = 1e-14;

/// Derivatives of `E(n)` at `n_bar` and the revival time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Expansion {
    pub n_bar: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub revival_time: f64,
}

/// `E'`, `E''` at `n_bar` by central differences with steps 1 and 2 combined by
/// Richardson extrapolation, and `tau_r = 4 pi hbar / E''`.
pub fn expand_spectrum(energy: impl Fn(f64) -> f64, n_bar: f64, hbar: f64) -> Result<Expansion> {
    if !(hbar > 0.0) {
        return Err(invalid("hbar must be positive"));
    }
    let e0 = energy(n_bar);
    let d1 = |h: f64| (energy(n_bar + h) - energy(n_bar - h)) / (2.0 * h);
    let d2 = |h: f64| (energy(n_bar + h) - 2.0 * e0 + energy(n_bar - h)) / (h * h);
    let e1 = (4.0 * d1(1.0) - d1(2.0)) / 3.0;
    let e2 = (4.0 * d2(1.0) - d2(2.0)) / 3.0;
    if !e0.is_finite() || !e1.is_finite() || !e2.is_finite() {
        return Err(invalid("energy function is not finite near n_bar"));
    }
    let scale = e0.abs().max(e1.abs() * n_bar.abs()).max(f64::MIN_POSITIVE);
    if e2.abs() * n_bar.abs().max(1.0).powi(2) <= 1e-9 * scale {
        return Err(Error::RevivalUndefined);
    }
    Ok(Expansion {
        n_bar,
        e0,
        e1,
        e2,
        revival_time: 4.0 * PI * hbar / e2.abs(),
    })
}

/// `E_n = n^{2k/(k+2)}`, the scaling of levels in a `|x|^k` potential.
pub fn powerlaw_energy(k: f64) -> impl Fn(f64) -> f64 {
    let p = 2.0 * k / (k + 2.0);
    move |n: f64| n.powf(p)
}

/// Coefficient profile `f(n)` as a function of `n - n_bar`.
#[derive(Clone)]
pub enum Profile {
    /// `(2 pi sigma^2)^{-1/4} exp(-n^2 / (4 sigma^2))`, unit `sum f^2`.
    Gaussian { sigma: f64 },
    /// `(2M + 1)^{-1/2}` for `|n| <= M`.
    EqualWeight { m: u32 },
    /// Arbitrary real weights on `n_min..=n_max`.
    Custom {
        f: Arc<dyn Fn(i64) -> f64 + Send + Sync>,
        n_min: i64,
        n_max: i64,
    },
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Profile::Gaussian { sigma } => write!(fmt, "Gaussian {{ sigma: {sigma} }}"),
            Profile::EqualWeight { m } => write!(fmt, "EqualWeight {{ m: {m} }}"),
            Profile::Custom { n_min, n_max, .. } => write!(fmt, "Custom {{ {n_min}..={n_max} }}"),
        }
    }
}

impl Profile {
    /// `(n, f(n))` over the support, cut where `f^2` falls below
    /// [`PROFILE_TAIL`] times its peak.
    pub fn weights(&self) -> Vec<(i64, f64)> {
        match self {
            Profile::Gaussian { sigma } => {
                let a = (2.0 * PI * sigma * sigma).powf(-0.25);
                let cut = (sigma * (-2.0 * PROFILE_TAIL.ln()).sqrt()).ceil() as i64;
                (-cut..=cut)
                    .map(|n| (n, a * (-(n * n) as f64 / (4.0 * sigma * sigma)).exp()))
                    .collect()
            }
            Profile::EqualWeight { m } => {
                let m = *m as i64;
                let a = ((2 * m + 1) as f64).sqrt().recip();
                (-m..=m).map(|n| (n, a)).collect()
            }
            Profile::Custom { f, n_min, n_max } => (*n_min..=*n_max).map(|n| (n, f(n))).collect(),
        }
    }
}

/// A semiclassical wave packet: a profile around `n_bar` plus the local
/// expansion of the spectrum.
#[derive(Clone, Debug)]
pub struct SemiclassicalProfile {
    pub expansion: Expansion,
    pub profile: Profile,
    pub hbar: f64,
    weights: Vec<(i64, f64)>,
}

impl SemiclassicalProfile {
    pub fn new(expansion: Expansion, profile: Profile, hbar: f64) -> Result<Self> {
        if let Profile::Gaussian { sigma } = profile {
            if !(sigma > 0.0) {
                return Err(invalid("sigma must be positive"));
            }
        }
        let weights = profile.weights();
        if weights.is_empty() {
            return Err(invalid("profile has empty support"));
        }
        let width = weights.iter().map(|(n, _)| n.unsigned_abs()).max().unwrap_or(0) as f64;
        if width > 0.5 * expansion.n_bar.abs() {
            log::warn!(
                "profile support |n| <= {width} is not small against n_bar = {}",
                expansion.n_bar
            );
        }
        Ok(SemiclassicalProfile {
            expansion,
            profile,
            hbar,
            weights,
        })
    }

    pub fn weights(&self) -> &[(i64, f64)] {
        &self.weights
    }

    pub fn revival_time(&self) -> f64 {
        self.expansion.revival_time
    }

    fn phase(&self, n: i64, t: f64) -> f64 {
        let n = n as f64;
        (n * self.expansion.e1 + 0.5 * n * n * self.expansion.e2) * t / self.hbar
    }

    /// Direct sum `sum_n f(n) exp(i (n E' + n^2 E''/2) t / hbar)`.
    pub fn theta(&self, t: f64) -> Complex64 {
        self.weights
            .iter()
            .map(|&(n, f)| Complex64::from_polar(f, self.phase(n, t)))
            .sum()
    }

    /// `sum_n f(n)^2 exp(i (n E' + n^2 E''/2) tau / hbar)`.
    pub fn autocorrelation(&self, tau: f64) -> Complex64 {
        self.weights
            .iter()
            .map(|&(n, f)| Complex64::from_polar(f * f, self.phase(n, tau)))
            .sum()
    }

    /// Largest `|A(t)|` within half a classical period `2 pi hbar / E'` of
    /// `center`, located on a fine grid. Returns `(t, |A(t)|)`.
    pub fn revival_peak(&self, center: f64) -> (f64, f64) {
        let period = 2.0 * PI * self.hbar / self.expansion.e1.abs();
        let steps = 2000;
        (0..=steps)
            .map(|i| {
                let t = center + period * (i as f64 / steps as f64 - 0.5);
                (t, self.autocorrelation(t).norm())
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }

    /// Poisson-resummed `theta(t)` for a Gaussian profile; errors for other
    /// profiles.
    pub fn gaussian_theta(&self, t: f64) -> Result<Complex64> {
        match self.profile {
            Profile::Gaussian { sigma } => Ok(gaussian_theta(
                sigma,
                self.expansion.e1 / self.hbar,
                self.expansion.e2 / self.hbar,
                t,
            )),
            _ => Err(invalid("Poisson resummation is implemented for Gaussian profiles only")),
        }
    }
}

/// `sum_n (2 pi sigma^2)^{-1/4} exp(-n^2/(4 sigma^2) + i (n E' + n^2 E''/2) t)`
/// by Poisson summation:
///
/// ```text
/// A sum_m sqrt(pi/a) exp(-(2 pi m - E' t)^2 / (4 a)),   a = 1/(4 sigma^2) - i E'' t / 2.
/// ```
///
/// Each term is a Gaussian in `t` centred where the classical phase `E' t`
/// passes `2 pi m`; they spread and overlap as `|a|` grows towards the
/// revival time.
pub fn gaussian_theta(sigma: f64, e1: f64, e2: f64, t: f64) -> Complex64 {
    let amp = (2.0 * PI * sigma * sigma).powf(-0.25);
    let a = Complex64::new(1.0 / (4.0 * sigma * sigma), -0.5 * e2 * t);
    let pref = (Complex64::new(PI, 0.0) / a).sqrt();
    let inv4a = (4.0 * a).inv();
    let b = e1 * t;
    let term = |m: i64| -> Complex64 {
        let x = 2.0 * PI * m as f64 - b;
        pref * (-(x * x) * inv4a).exp()
    };
    let m0 = (b / (2.0 * PI)).round() as i64;
    let mut sum = term(m0);
    let peak = sum.norm().max(f64::MIN_POSITIVE);
    for dir in [-1i64, 1] {
        let mut m = m0 + dir;
        loop {
            let v = term(m);
            sum += v;
            let x = 2.0 * PI * m as f64 - b;
            // the terms decay monotonically once past the centre
            if v.norm() < POISSON_TAIL * peak && x.signum() == dir as f64 {
                break;
            }
            m += dir;
        }
    }
    amp * sum
}

/// `max_t |a(t) - b(t)| / max_t |b(t)|` on a grid.
fn relative_sup_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let err = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    err / scale
}

/// Uniform grid of `n` points on `[0, t_max]`.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0];
    }
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

/// Relative sup error between the Poisson form and the direct sum on `times`.
pub fn gaussian_backend_error(profile: &SemiclassicalProfile, times: &[f64]) -> Result<f64> {
    let poisson = times
        .iter()
        .map(|&t| profile.gaussian_theta(t))
        .collect::<Result<Vec<_>>>()?;
    let direct: Vec<Complex64> = times.iter().map(|&t| profile.theta(t)).collect();
    Ok(relative_sup_error(&poisson, &direct))
}

/// Comparison of the semiclassical density `|theta(t)|^2` with the exact
/// canonical density of the same packet built from the true eigenvalues.
#[derive(Clone, Debug, Serialize)]
pub struct ExactValidation {
    pub revival_time: f64,
    /// `max_t |p_sc - p_exact| / max_t p_exact` over the whole grid.
    pub relative_error: f64,
    /// The same measure restricted to growing windows `[0, fraction * t_max]`.
    pub windows: Vec<(f64, f64)>,
    pub levels: usize,
}

/// Gaussian packet of width `sigma` about `n_bar` on the power-law spectrum
/// `E_n = n^{2k/(k+2)}`, compared with its second-order approximation at
/// `samples` times on `[0, horizon_factor * tau_r]`.
pub fn validate_powerlaw(k: f64, n_bar: u32, sigma: f64, samples: usize, horizon_factor: f64) -> Result<ExactValidation> {
    let energy = powerlaw_energy(k);
    let expansion = expand_spectrum(&energy, n_bar as f64, 1.0)?;
    let sc = SemiclassicalProfile::new(expansion, Profile::Gaussian { sigma }, 1.0)?;
    let weights = sc.weights().to_vec();
    let n_lo = n_bar as i64 + weights.first().unwrap().0;
    let n_hi = n_bar as i64 + weights.last().unwrap().0;
    if n_lo < 1 {
        return Err(invalid("packet reaches below n = 1"));
    }
    let spectrum = Arc::new(generate(&Family::PowerLaw {
        k,
        n_min: n_lo as usize,
        n_max: n_hi as usize,
    })?);
    let amps: Vec<Complex64> = weights.iter().map(|&(_, f)| Complex64::new(f, 0.0)).collect();
    let psi = StateVector::normalized(spectrum, amps)?;
    let rep = psi.time_representation();
    let norm: f64 = weights.iter().map(|(_, f)| f * f).sum();

    let times = time_grid(horizon_factor * sc.revival_time(), samples);
    let pairs: Vec<(f64, f64)> = times
        .par_iter()
        .map(|&t| (rep.density_at(t), sc.theta(t).norm_sqr() / norm))
        .collect();
    let window_error = |upto: usize| -> f64 {
        let scale = pairs[..upto].iter().map(|p| p.0).fold(0.0, f64::max);
        let err = pairs[..upto].iter().map(|p| (p.0 - p.1).abs()).fold(0.0, f64::max);
        err / scale
    };
    let windows = [0.05, 0.1, 0.25, 0.5, 1.0]
        .iter()
        .map(|&f| {
            let upto = ((f * (samples - 1) as f64).round() as usize + 1).clamp(2, samples);
            (f, window_error(upto))
        })
        .collect();
    Ok(ExactValidation {
        revival_time: sc.revival_time(),
        relative_error: window_error(samples),
        windows,
        levels: psi.dimension(),
    })
}
