//! JSON and CSV input/output: load a spectrum and a state from JSON, write
//! the density as CSV and the resolution report as JSON.

use std::path::Path;

use apclock::io::{self, density_trace, Export, Format};
use apclock::resolution::{EntropyOptions, ResolutionReport};
use serde_json::json;

fn main() -> apclock::Result<()> {
    let state = json!({
        "spectrum": {"levels": [{"energy": "-1"}, {"energy": "-1/4"}, {"energy": "-1/9"}], "label": "hydrogen n<=3"},
        "amplitudes": [{"level": 0, "re": 1.0}, {"level": 1, "re": 1.0}, {"level": 2, "im": 1.0, "re": 0.0}],
        "normalize": true
    });
    let psi = io::state_from_json(&state, None)?;
    println!("{}", serde_json::to_string_pretty(&io::state_json(&psi))?);

    let dir = std::env::temp_dir();
    let csv = dir.join("apclock-density.csv");
    let period = 2.0 * std::f64::consts::PI / psi.spectrum().min_gap().unwrap();
    io::export(&Export::Density(&density_trace(&psi, period, 500)), Format::Csv, &csv)?;
    let report = ResolutionReport::for_state(&psi, &EntropyOptions::default())?;
    let json_path = dir.join("apclock-report.json");
    io::export(&Export::Report(&report), Format::Json, &json_path)?;
    println!("wrote {} and {}", csv.display(), json_path.display());

    let err = io::export(&Export::Report(&report), Format::Json, Path::new("/no/such/dir/report.json")).unwrap_err();
    println!("writing to a missing directory: {err}");
    Ok(())
}
