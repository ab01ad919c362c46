//! Canonical time observables for quantum systems with discrete spectra.
//!
//! - [`spectrum`]: energy levels and the frequency module their differences span.
//! - [`apfun`]: almost-periodic functions keyed by exact frequencies.
//! - [`canonical`]: states, their time representation and canonical density.
//! - [`resolution`]: purity, entropy and uncertainty relations, with several backends.
//! - [`observables`]: general covariant time POMs, noise channels and finite-horizon limits.
//! - [`semiclassical`]: wave-packet revivals from the local expansion of the spectrum.
//! - [`scenario`] and [`io`]: reproducible checks and CSV/JSON exports.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apfun;
pub mod canonical;
pub mod error;
pub mod observables;
mod grid;
pub mod io;
pub mod quadrature;
pub mod resolution;
pub mod scenario;
pub mod semiclassical;
pub mod spectrum;

pub use error::{Error, Result};
