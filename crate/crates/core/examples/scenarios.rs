//! Run every named scenario with default parameters and print its metrics.

use std::time::Instant;

use apclock::scenario::{run_scenario, ScenarioParams, SCENARIOS};

fn main() -> apclock::Result<()> {
    let params = ScenarioParams::default();
    for name in SCENARIOS {
        let start = Instant::now();
        let result = run_scenario(name, &params)?;
        println!("{name} ({:.1?})", start.elapsed());
        for (metric, m) in &result.metrics {
            println!("  {metric:<40} {m}");
        }
        for (key, value) in &result.info {
            println!("  {key:<40} {value:.6e}");
        }
    }
    Ok(())
}
