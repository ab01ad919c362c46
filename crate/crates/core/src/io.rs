//! JSON and CSV input/output. Every JSON document carries
//! `"schema": "apclock-1"` and a `"kind"` naming its payload.
//!
//! Spectrum files take one of two shapes:
//!
//! * a generator, e.g. `{"family": "hydrogen", "rydberg": 1.0, "n_max": 4}`;
//! * explicit levels, `{"levels": [{"energy": E, "degeneracy": d}, ...]}`,
//!   where `E` is a number, a `"p/q"` string, or an array of rational
//!   coordinates over `"basis"`. Optional keys: `"mode"` (`"exact"` or
//!   `"float"`), `"tolerance"`, `"hbar"`, `"label"`, `"basis"`.
//!
//! Spectra are written back in the explicit form with exact coordinates, so
//! a written spectrum reloads to the same frequency module.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::apfun::APFunction;
use crate::canonical::StateVector;
use crate::error::{invalid, Error, Result};
use crate::observables::CMatrix;
use crate::resolution::ResolutionReport;
use crate::scenario::{ScenarioResult, SCHEMA};
use crate::spectrum::{
    generate, make_spectrum, parse_rational, EnergyValue, Family, ModuleMode, Rational, Spectrum,
    DEFAULT_FREQ_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

/// Something that can be exported.
pub enum Export<'a> {
    /// `(t, p(t))` samples; CSV columns `t,p`.
    Density(&'a [(f64, f64)]),
    /// `(tau, A(tau))` samples; CSV columns `tau,re,im,abs`.
    Autocorrelation(&'a [(f64, Complex64)]),
    /// CSV columns `quantity,value`.
    Report(&'a ResolutionReport),
    /// CSV columns `scenario,metric,value,reference,tolerance,comparison,provenance,pass`.
    Scenario(&'a ScenarioResult),
    /// Any numeric table with named columns.
    Table { kind: &'a str, columns: &'a [&'a str], rows: &'a [Vec<f64>] },
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Attach the schema tag and kind to a JSON object.
pub fn document(kind: &str, body: Value) -> Value {
    let mut doc = json!({ "schema": SCHEMA, "kind": kind });
    if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
        doc.extend(body);
    }
    doc
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn num(x: f64) -> String {
    format!("{x:.17e}")
}

/// Render an export to a string in the given format.
pub fn render(what: &Export, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&to_json(what)?)? + "\n"),
        Format::Csv => match what {
            Export::Density(rows) => csv_string(&["t", "p"], rows.iter().map(|(t, p)| vec![num(*t), num(*p)])),
            Export::Autocorrelation(rows) => csv_string(
                &["tau", "re", "im", "abs"],
                rows.iter()
                    .map(|(t, a)| vec![num(*t), num(a.re), num(a.im), num(a.norm())]),
            ),
            Export::Report(report) => {
                let value = serde_json::to_value(report)?;
                let rows = value
                    .as_object()
                    .expect("report serialises to an object")
                    .iter()
                    .map(|(k, v)| vec![k.clone(), v.as_f64().map_or_else(|| v.to_string(), num)])
                    .collect::<Vec<_>>();
                csv_string(&["quantity", "value"], rows)
            }
            Export::Scenario(result) => {
                let rows = result.metrics.iter().map(|(name, m)| {
                    vec![
                        result.name.clone(),
                        name.clone(),
                        num(m.value),
                        num(m.reference),
                        num(m.tolerance),
                        m.comparison.name().to_string(),
                        m.provenance.name().to_string(),
                        m.pass.to_string(),
                    ]
                });
                csv_string(
                    &["scenario", "metric", "value", "reference", "tolerance", "comparison", "provenance", "pass"],
                    rows,
                )
            }
            Export::Table { columns, rows, .. } => {
                csv_string(columns, rows.iter().map(|r| r.iter().map(|x| num(*x)).collect()))
            }
        },
    }
}

fn to_json(what: &Export) -> Result<Value> {
    Ok(match what {
        Export::Density(rows) => document(
            "density",
            json!({
                "t": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
                "p": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
            }),
        ),
        Export::Autocorrelation(rows) => document(
            "autocorrelation",
            json!({
                "tau": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
                "re": rows.iter().map(|r| r.1.re).collect::<Vec<_>>(),
                "im": rows.iter().map(|r| r.1.im).collect::<Vec<_>>(),
            }),
        ),
        Export::Report(report) => document("report", serde_json::to_value(report)?),
        Export::Scenario(result) => document("scenario", serde_json::to_value(result)?),
        Export::Table { kind, columns, rows } => document(kind, json!({ "columns": columns, "rows": rows })),
    })
}

/// Write an export to `path`; I/O failures carry the path in the message.
pub fn export(what: &Export, format: Format, path: &Path) -> Result<()> {
    let text = render(what, format)?;
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// `n` evenly spaced samples of the canonical density on `[0, t_max]`.
pub fn density_trace(psi: &StateVector, t_max: f64, n: usize) -> Vec<(f64, f64)> {
    sample_times(t_max, n).map(|t| (t, psi.density_at(t))).collect()
}

/// `n` evenly spaced samples of the autocorrelation `<psi|psi_tau>` on `[0, t_max]`.
pub fn autocorrelation_trace(psi: &StateVector, t_max: f64, n: usize) -> Vec<(f64, Complex64)> {
    let a = psi.autocorrelation();
    sample_times(t_max, n).map(|t| (t, a.evaluate(t))).collect()
}

fn sample_times(t_max: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { t_max / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| i as f64 * step)
}

fn rational_string(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// JSON form of a spectrum: explicit levels with exact coordinates over the
/// energy basis, plus derived data (frequencies, resonance summary).
pub fn spectrum_json(s: &Spectrum) -> Value {
    let module = s.module();
    let hbar = s.hbar();
    let denom = module.denominator() as i128;
    let (mode, tolerance) = match module.mode() {
        ModuleMode::Exact => ("exact", None),
        ModuleMode::Float { tolerance } => ("float", Some(tolerance)),
    };
    let levels: Vec<Value> = (0..s.level_count())
        .map(|j| {
            let mut level = json!({
                "energy": s.energy(j),
                "degeneracy": s.degeneracy(j),
            });
            if module.is_exact() {
                let coords: Vec<String> = s
                    .key(j)
                    .coords()
                    .iter()
                    .map(|&k| rational_string(Rational::new(k as i128, denom)))
                    .collect();
                level["coords"] = json!(coords);
            }
            level
        })
        .collect();
    let report = s.resonance_report();
    document(
        "spectrum",
        json!({
            "label": s.label(),
            "hbar": hbar,
            "mode": mode,
            "tolerance": tolerance,
            "basis": module.basis().iter().map(|b| b * hbar).collect::<Vec<_>>(),
            "levels": levels,
            "dimension": s.dimension(),
            "min_gap": s.min_gap(),
            "shared_resonances": report.has_shared_resonances,
            "common_period": report.common_period,
            "heuristic": report.heuristic,
        }),
    )
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn rational(&self) -> Result<Rational> {
        match self {
            Scalar::Text(s) => parse_rational(s),
            Scalar::Number(x) if x.is_finite() => parse_rational(&format!("{x}")),
            Scalar::Number(x) => Err(Error::Parse(format!("not a finite number: {x}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EnergyInput {
    Scalar(Scalar),
    Coords(Vec<Scalar>),
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelInput {
    energy: Option<EnergyInput>,
    coords: Option<Vec<Scalar>>,
    #[serde(default = "one")]
    degeneracy: usize,
}

#[derive(Deserialize)]
struct ExplicitSpectrum {
    levels: Vec<LevelInput>,
    mode: Option<String>,
    tolerance: Option<f64>,
    basis: Option<Vec<f64>>,
    label: Option<String>,
}

/// Parse a spectrum from a JSON value (generator or explicit levels).
pub fn spectrum_from_json(value: &Value) -> Result<Spectrum> {
    let hbar = match value.get("hbar") {
        None | Some(Value::Null) => 1.0,
        Some(h) => h.as_f64().ok_or_else(|| Error::Parse("hbar must be a number".into()))?,
    };
    let spectrum = if value.get("family").is_some() {
        let family: Family = serde_json::from_value(value.clone())?;
        generate(&family)?
    } else {
        let input: ExplicitSpectrum = serde_json::from_value(value.clone())?;
        let s = explicit_spectrum(&input)?;
        match input.label {
            Some(label) => s.with_label(label),
            None => s,
        }
    };
    if hbar == 1.0 {
        Ok(spectrum)
    } else {
        spectrum.with_hbar(hbar)
    }
}

fn explicit_spectrum(input: &ExplicitSpectrum) -> Result<Spectrum> {
    let degs: Vec<usize> = input.levels.iter().map(|l| l.degeneracy).collect();
    let lattice: Option<Vec<&Vec<Scalar>>> = input
        .levels
        .iter()
        .map(|l| match (&l.coords, &l.energy) {
            (Some(c), _) | (None, Some(EnergyInput::Coords(c))) => Some(c),
            _ => None,
        })
        .collect();
    let mode = input.mode.as_deref();
    if mode != Some("float") {
        if let Some(coords) = lattice {
            let basis = input.basis.clone().unwrap_or_else(|| vec![1.0]);
            let coords = coords
                .into_iter()
                .map(|c| c.iter().map(Scalar::rational).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            return Spectrum::from_lattice(coords, &degs, basis);
        }
    }
    let energies = input
        .levels
        .iter()
        .enumerate()
        .map(|(j, l)| match &l.energy {
            Some(EnergyInput::Scalar(Scalar::Number(x))) => Ok(EnergyValue::Real(*x)),
            Some(EnergyInput::Scalar(Scalar::Text(s))) => Ok(EnergyValue::Rational(parse_rational(s)?)),
            Some(EnergyInput::Coords(_)) => Err(invalid(format!("level {j}: coordinate energies need exact mode"))),
            None => match (&l.coords, &input.basis) {
                (Some(c), Some(basis)) if c.len() == basis.len() => {
                    let e = c
                        .iter()
                        .zip(basis)
                        .map(|(x, b)| Ok(x.rational()?.to_f64().unwrap_or(f64::NAN) * b))
                        .sum::<Result<f64>>()?;
                    Ok(EnergyValue::Real(e))
                }
                _ => Err(invalid(format!("level {j} has no energy"))),
            },
        })
        .collect::<Result<Vec<_>>>()?;
    let integral = energies.iter().all(|e| match e {
        EnergyValue::Real(x) => x.fract() == 0.0,
        EnergyValue::Rational(_) => true,
    });
    let mode = match mode {
        Some("exact") => ModuleMode::Exact,
        Some("float") => ModuleMode::Float {
            tolerance: input.tolerance.unwrap_or(DEFAULT_FREQ_TOLERANCE),
        },
        Some(other) => return Err(Error::Parse(format!("unknown spectrum mode `{other}`"))),
        None if integral => ModuleMode::Exact,
        None => ModuleMode::Float {
            tolerance: input.tolerance.unwrap_or(DEFAULT_FREQ_TOLERANCE),
        },
    };
    match (mode, input.basis.as_deref()) {
        (ModuleMode::Exact, Some(&[unit])) => {
            let rationals = energies
                .iter()
                .map(|e| match e {
                    EnergyValue::Rational(r) => Ok(*r),
                    EnergyValue::Real(x) => parse_rational(&format!("{x}")),
                })
                .collect::<Result<Vec<_>>>()?;
            Spectrum::from_rationals(&rationals, &degs, unit)
        }
        _ => make_spectrum(&energies, &degs, mode),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_spectrum(path: &Path) -> Result<Spectrum> {
    spectrum_from_json(&read_json(path)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeInput {
    level: usize,
    #[serde(default)]
    d: usize,
    re: f64,
    #[serde(default)]
    im: f64,
}

/// Parse a state document `{"spectrum": ..., "amplitudes": [...]}`.
///
/// `spectrum` is inline or a path (relative paths resolve against `base`).
/// Amplitudes not listed are zero; listing one twice is an error. The state
/// must be normalised unless `"normalize": true` is given.
pub fn state_from_json(value: &Value, base: Option<&Path>) -> Result<StateVector> {
    let spectrum = match value.get("spectrum") {
        Some(Value::String(p)) => {
            let path = base.map_or_else(|| PathBuf::from(p), |b| b.join(p));
            load_spectrum(&path)?
        }
        Some(v @ Value::Object(_)) => spectrum_from_json(v)?,
        _ => return Err(Error::Parse("state needs a `spectrum` object or path".into())),
    };
    let spectrum = Arc::new(spectrum);
    let amps: Vec<AmplitudeInput> = serde_json::from_value(
        value
            .get("amplitudes")
            .cloned()
            .ok_or_else(|| Error::Parse("state needs `amplitudes`".into()))?,
    )?;
    let normalize = value.get("normalize").and_then(Value::as_bool).unwrap_or(false);
    let mut v = vec![Complex64::new(0.0, 0.0); spectrum.dimension()];
    let mut seen = vec![false; v.len()];
    for a in amps {
        if a.level >= spectrum.level_count() || a.d >= spectrum.degeneracy(a.level) {
            return Err(invalid(format!("no state |E_{}, {}> in this spectrum", a.level, a.d)));
        }
        let i = spectrum.index(a.level, a.d);
        if std::mem::replace(&mut seen[i], true) {
            return Err(invalid(format!("amplitude for |E_{}, {}> given twice", a.level, a.d)));
        }
        v[i] = Complex64::new(a.re, a.im);
    }
    if normalize {
        StateVector::normalized(spectrum, v)
    } else {
        StateVector::new(spectrum, v)
    }
}

pub fn load_state(path: &Path) -> Result<StateVector> {
    state_from_json(&read_json(path)?, path.parent())
}

/// JSON form of a state; reloads with [`state_from_json`].
pub fn state_json(psi: &StateVector) -> Value {
    let s = psi.spectrum();
    let amplitudes: Vec<Value> = psi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| {
            let (level, d) = s.level_of(i);
            json!({ "level": level, "d": d, "re": c.re, "im": c.im })
        })
        .collect();
    document(
        "state",
        json!({
            "spectrum": spectrum_json(s),
            "amplitudes": amplitudes,
            "mean_energy": psi.mean_energy(),
        }),
    )
}

/// JSON form of an almost-periodic function: its frequency module and terms.
pub fn apfunction_json(f: &APFunction) -> Value {
    let module = f.module();
    let terms: Vec<Value> = f
        .terms()
        .map(|(k, c)| json!({ "key": k.coords(), "frequency": module.value(k), "re": c.re, "im": c.im }))
        .collect();
    document(
        "apfunction",
        json!({
            "basis": module.basis(),
            "denominator": module.denominator(),
            "terms": terms,
        }),
    )
}

#[derive(Serialize, Deserialize)]
struct OperatorDoc {
    dim: usize,
    /// Row-major `[re, im]` pairs.
    data: Vec<[f64; 2]>,
}

/// JSON form of a dense complex matrix, row-major `[re, im]` pairs.
pub fn operator_json(m: &CMatrix) -> Value {
    let n = m.nrows();
    let data: Vec<[f64; 2]> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
        .collect();
    document("operator", serde_json::to_value(OperatorDoc { dim: n, data }).expect("plain data"))
}

pub fn operator_from_json(value: &Value) -> Result<CMatrix> {
    let doc: OperatorDoc = serde_json::from_value(value.clone())?;
    if doc.data.len() != doc.dim * doc.dim {
        return Err(Error::DimensionMismatch {
            expected: doc.dim * doc.dim,
            found: doc.data.len(),
        });
    }
    Ok(CMatrix::from_fn(doc.dim, doc.dim, |i, j| {
        let [re, im] = doc.data[i * doc.dim + j];
        Complex64::new(re, im)
    }))
}

pub fn load_operator(path: &Path) -> Result<CMatrix> {
    operator_from_json(&read_json(path)?)
}

/// Write a JSON value to `path`, pretty-printed.
pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::EntropyOptions;
    use crate::spectrum::Family;
    use std::f64::consts::PI;

    fn two_level() -> StateVector {
        let s = Arc::new(generate(&Family::Harmonic { omega: 1.0, n_max: 1 }).unwrap());
        let a = Complex64::new(0.5f64.sqrt(), 0.0);
        StateVector::new(s, vec![a, a]).unwrap()
    }

    #[test]
    fn density_csv_matches_closed_form() {
        let rows = density_trace(&two_level(), 4.0 * PI, 1000);
        let text = render(&Export::Density(&rows), Format::Csv).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(reader.headers().unwrap(), vec!["t", "p"]);
        let mut count = 0;
        for rec in reader.records() {
            let rec = rec.unwrap();
            let t: f64 = rec[0].parse().unwrap();
            let p: f64 = rec[1].parse().unwrap();
            assert!((p - (1.0 + t.cos())).abs() <= 1e-12);
            count += 1;
        }
        assert_eq!(count, 1000);
    }

    #[test]
    fn eigenstate_report() {
        let s = Arc::new(generate(&Family::Hydrogen { rydberg: 1.0, n_max: 3 }).unwrap());
        let psi = StateVector::eigenstate(s, 1, 0).unwrap();
        let report = ResolutionReport::for_state(&psi, &EntropyOptions::default()).unwrap();
        let v: Value = serde_json::from_str(&render(&Export::Report(&report), Format::Json).unwrap()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["kind"], "report");
        assert!((v["purity"].as_f64().unwrap() - 1.0).abs() < 1e-15);
        assert!(v["entropy"].as_f64().unwrap().abs() < 1e-12);
    }

    #[test]
    fn invalid_path_is_reported() {
        let err = export(&Export::Density(&[]), Format::Csv, Path::new("/nonexistent/dir/out.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/dir/out.csv"));
    }

    #[test]
    fn spectrum_inputs() {
        let v = json!({"levels": [{"energy": "-1"}, {"energy": "-1/4"}, {"energy": "-1/9"}]});
        let s = spectrum_from_json(&v).unwrap();
        assert!(s.module().is_exact());
        assert!((s.energy(1) + 0.25).abs() < 1e-15);

        let v = json!({"levels": [{"energy": 0.0}, {"energy": 1.5}, {"energy": 3.0}]});
        assert!(!spectrum_from_json(&v).unwrap().module().is_exact());

        let v = json!({"basis": [1.0, 2f64.sqrt()], "levels": [{"energy": [0, 0]}, {"energy": [1, 0]}, {"energy": ["1/2", 1]}]});
        let s = spectrum_from_json(&v).unwrap();
        assert_eq!(s.module().rank(), 2);

        let v = json!({"family": "isotropic2", "omega": 1.0, "n_max": 2, "hbar": 2.0});
        let s = spectrum_from_json(&v).unwrap();
        assert_eq!(s.dimension(), 6);
        assert_eq!(s.hbar(), 2.0);

        assert!(spectrum_from_json(&json!({"levels": [{"energy": "x"}]})).is_err());
        assert!(spectrum_from_json(&json!({"levels": [{"energy": 1, "colour": 2}]})).is_err());
    }

    #[test]
    fn spectrum_round_trip() {
        for family in [
            Family::Hydrogen { rydberg: 1.0, n_max: 5 },
            Family::Isotropic2 { omega: 0.5, n_max: 3 },
            Family::Anisotropic2 { omega1: 1.0, omega2: 2f64.sqrt(), n_max: 2 },
            Family::PowerLaw { k: 4.0, n_min: 3, n_max: 8 },
        ] {
            let s = generate(&family).unwrap();
            let back = spectrum_from_json(&spectrum_json(&s)).unwrap();
            assert_eq!(back.keys().len(), s.keys().len());
            assert_eq!(back.module().is_exact(), s.module().is_exact());
            if s.module().is_exact() {
                assert_eq!(back.keys(), s.keys());
                assert_eq!(back.module().basis(), s.module().basis());
            }
            for j in 0..s.level_count() {
                assert!((back.energy(j) - s.energy(j)).abs() <= 1e-12 * s.energy(j).abs().max(1.0));
                assert_eq!(back.degeneracy(j), s.degeneracy(j));
            }
        }
    }

    #[test]
    fn state_round_trip_and_validation() {
        let psi = two_level();
        let back = state_from_json(&state_json(&psi), None).unwrap();
        assert_eq!(back.amplitudes(), psi.amplitudes());

        let spectrum = json!({"family": "harmonic", "omega": 1.0, "n_max": 2});
        let unnormalised = json!({"spectrum": spectrum, "amplitudes": [{"level": 0, "re": 1.0}, {"level": 2, "re": 1.0}]});
        assert!(matches!(state_from_json(&unnormalised, None), Err(Error::NotNormalised(_))));
        let mut fixed = unnormalised.clone();
        fixed["normalize"] = json!(true);
        assert!((state_from_json(&fixed, None).unwrap().amplitudes()[2].re - 0.5f64.sqrt()).abs() < 1e-15);
        let twice = json!({"spectrum": spectrum, "amplitudes": [{"level": 0, "re": 1.0}, {"level": 0, "re": 0.0}]});
        assert!(state_from_json(&twice, None).is_err());
        let missing = json!({"spectrum": spectrum, "amplitudes": [{"level": 5, "re": 1.0}]});
        assert!(state_from_json(&missing, None).is_err());
    }

    #[test]
    fn operator_round_trip() {
        let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64 - 0.5));
        assert_eq!(operator_from_json(&operator_json(&m)).unwrap(), m);
        assert!(operator_from_json(&json!({"dim": 2, "data": [[1.0, 0.0]]})).is_err());
    }
}
