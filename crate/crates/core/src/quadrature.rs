//! Composite Gauss-Legendre quadrature on long intervals.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

/// Nodes per panel.
pub const PANEL_NODES: usize = 16;

/// Panels handled per parallel task. The reduction sums task results in index
/// order, so results depend only on the panel layout, not on thread count.
const PANELS_PER_TASK: usize = 2048;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(PANEL_NODES)
            .expect("rule degree >= 2")
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// `int_a^b f(t) dt` with panels of width at most `panel`.
pub fn integrate<F>(f: F, a: f64, b: f64, panel: f64) -> Complex64
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let panels = ((b - a) / panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let rule = rule();
    let tasks = panels.div_ceil(PANELS_PER_TASK);
    let partial: Vec<Complex64> = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let lo = task * PANELS_PER_TASK;
            let hi = (lo + PANELS_PER_TASK).min(panels);
            let mut sum = Complex64::new(0.0, 0.0);
            for p in lo..hi {
                let left = a + p as f64 * h;
                let mid = left + 0.5 * h;
                let mut s = Complex64::new(0.0, 0.0);
                for &(x, w) in rule {
                    s += w * f(mid + 0.5 * h * x);
                }
                sum += s * (0.5 * h);
            }
            sum
        })
        .collect();
    partial.into_iter().sum()
}

/// Real-valued variant of [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, panel: f64) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate(|t| Complex64::new(f(t), 0.0), a, b, panel).re
}
