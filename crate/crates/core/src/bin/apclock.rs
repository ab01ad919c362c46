use std::f64::consts::{PI, SQRT_2};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use apclock::canonical::{
    anisotropic_product, coherent_phase, correlated_isotropic, isotropic_cutoff, isotropic_product, StateVector,
    TAIL_TOL,
};
use apclock::io::{self, Export, Format};
use apclock::observables::{
    canonical_t0, galapon_diagnostic, kraus_completeness_deviation, normalisation_operator, random_t0,
    validate_t0, OperatorMatrix,
};
use apclock::resolution::{EntropyBackend, EntropyOptions, ResolutionReport};
use apclock::scenario::{run_scenario, ScenarioParams, DEFAULT_SEED, SCENARIOS};
use apclock::semiclassical::{
    expand_spectrum, powerlaw_energy, time_grid, validate_powerlaw, Profile, SemiclassicalProfile,
};
use apclock::spectrum::{generate, Family, Spectrum};
use apclock::{Error, Result};

/// Canonical almost-periodic time observables for discrete spectra.
///
/// Randomness uses ChaCha8 seeded with --seed; runs are reproducible.
#[derive(Parser)]
#[command(name = "apclock", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format; defaults to the extension of --output, else the command's natural format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Entropy backend: auto, exact-periodic, torus, time-average, factorized.
    #[arg(long, global = true, default_value = "auto")]
    backend: EntropyBackend,
    /// Convergence tolerance of the time-average entropy backend.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build a spectrum and print its levels, frequency module and resonances.
    Spectrum(SpectrumArgs),
    /// Build a state and print it as JSON.
    State(StateArgs),
    /// Sample the canonical time density (or the autocorrelation) of a state.
    Density {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_enum, default_value = "density")]
        what: Trace,
        #[arg(long, default_value_t = 4.0 * PI)]
        t_max: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Purity, entropy, information and uncertainty relations of a state.
    Resolution(StateArgs),
    /// Time POMs: canonical and random seeds, validation, Kraus form, limits.
    Pom {
        #[command(subcommand)]
        command: PomCommand,
    },
    /// Second-order (semiclassical) packets on a power-law spectrum.
    Semiclassical(SemiclassicalArgs),
    /// Run a named scenario (or `all`); exit status is 0 iff every metric passes.
    Scenario {
        /// One of the scenario names, or `all`.
        name: String,
        /// Scenario parameter as key=value (u, energy, omega, omega2, n_max, samples, sigma).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Trace {
    Density,
    Autocorr,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Harmonic,
    Isotropic2,
    Anisotropic2,
    Hydrogen,
    Powerlaw,
}

#[derive(Args, Clone)]
struct SpectrumArgs {
    /// Spectrum JSON file (generator or explicit levels).
    #[arg(long, conflicts_with = "family")]
    spectrum: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = SQRT_2)]
    omega2: f64,
    #[arg(long, default_value_t = 1.0)]
    rydberg: f64,
    #[arg(long, default_value_t = 4.0)]
    k: f64,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long)]
    hbar: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Coherent phase state with ratio --u on the harmonic spectrum (--omega).
    CoherentPhase,
    /// |u> (x) |u> on the isotropic two-mode oscillator.
    Isotropic,
    /// The correlated isotropic state with ratio --u.
    Correlated,
    /// |u> (x) |v> on the anisotropic oscillator (--omega, --omega2).
    Anisotropic,
    /// Equal superposition on the given spectrum.
    Equal,
    /// Eigenstate --level (d = 0) of the given spectrum.
    Eigenstate,
    /// Haar-random state on the given spectrum.
    Random,
}

#[derive(Args, Clone)]
struct StateArgs {
    /// State JSON file.
    #[arg(long, conflicts_with = "preset")]
    state: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, default_value_t = 0.5)]
    u: f64,
    #[arg(long, default_value_t = 0.5)]
    v: f64,
    #[arg(long, default_value_t = 0)]
    level: usize,
    #[command(flatten)]
    spectrum: SpectrumArgs,
}

#[derive(Subcommand)]
enum PomCommand {
    /// The canonical seed operator (all entries one).
    Canonical(SpectrumArgs),
    /// A random valid seed operator of the given rank.
    Random {
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// Check that an operator file is a valid seed operator.
    Validate {
        #[arg(long)]
        operator: PathBuf,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// Kraus operators of the channel taking the canonical POM to the given one.
    Kraus {
        #[arg(long)]
        operator: PathBuf,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// Time density tr[rho T_t] of a state under a POM (canonical by default).
    Density {
        #[arg(long)]
        operator: Option<PathBuf>,
        #[arg(long, default_value_t = 4.0 * PI)]
        t_max: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Finite-horizon normalisation operator N(X) with X = --horizon / min gap.
    Limit {
        #[arg(long, default_value_t = 1e3)]
        horizon: f64,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// Commutator and covariance diagnostics of the inverse-difference operator.
    Galapon {
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 401)]
        points: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[command(flatten)]
        state: StateArgs,
    },
}

#[derive(Args)]
struct SemiclassicalArgs {
    /// Power-law exponent: E_n = n^(2k/(k+2)).
    #[arg(long, default_value_t = 4.0)]
    k: f64,
    #[arg(long, default_value_t = 200)]
    n_bar: u32,
    /// Gaussian width; ignored with --equal-weight.
    #[arg(long, default_value_t = 5.0)]
    sigma: f64,
    /// Use M equal weights instead of a Gaussian.
    #[arg(long)]
    equal_weight: Option<u32>,
    /// Horizon as a multiple of the revival time.
    #[arg(long, default_value_t = 1.0)]
    revivals: f64,
    #[arg(long, default_value_t = 2048)]
    points: usize,
    /// Compare with the exact density on the true spectrum instead of tracing.
    #[arg(long)]
    validate: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

impl Cli {
    fn entropy(&self) -> EntropyOptions {
        EntropyOptions {
            backend: self.backend,
            tolerance: self.tolerance,
        }
    }

    fn format(&self, natural: Format) -> Format {
        match self.format {
            Some(FormatArg::Csv) => Format::Csv,
            Some(FormatArg::Json) => Format::Json,
            None => match self.output.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some("csv") => Format::Csv,
                Some("json") => Format::Json,
                _ => natural,
            },
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => fs::write(path, text).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json(&self, value: &Value) -> Result<()> {
        self.emit(&(serde_json::to_string_pretty(value)? + "\n"))
    }

    fn emit_export(&self, what: &Export, natural: Format) -> Result<()> {
        self.emit(&io::render(what, self.format(natural))?)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn build_spectrum(a: &SpectrumArgs) -> Result<Arc<Spectrum>> {
    let spectrum = match (&a.spectrum, a.family) {
        (Some(path), _) => io::load_spectrum(path)?,
        (None, family) => generate(&match family.unwrap_or(FamilyArg::Hydrogen) {
            FamilyArg::Harmonic => Family::Harmonic {
                omega: a.omega,
                n_max: a.n_max,
            },
            FamilyArg::Isotropic2 => Family::Isotropic2 {
                omega: a.omega,
                n_max: a.n_max,
            },
            FamilyArg::Anisotropic2 => Family::Anisotropic2 {
                omega1: a.omega,
                omega2: a.omega2,
                n_max: a.n_max,
            },
            FamilyArg::Hydrogen => Family::Hydrogen {
                rydberg: a.rydberg,
                n_max: a.n_max,
            },
            FamilyArg::Powerlaw => Family::PowerLaw {
                k: a.k,
                n_min: a.n_min,
                n_max: a.n_max,
            },
        })?,
    };
    Ok(Arc::new(match a.hbar {
        Some(h) => spectrum.with_hbar(h)?,
        None => spectrum,
    }))
}

fn build_state(cli: &Cli, a: &StateArgs) -> Result<StateVector> {
    if let Some(path) = &a.state {
        return io::load_state(path);
    }
    let omega = a.spectrum.omega;
    match a.preset.unwrap_or(Preset::Equal) {
        Preset::CoherentPhase => coherent_phase(a.u, omega),
        Preset::Isotropic => isotropic_product(a.u, omega, isotropic_cutoff(a.u, TAIL_TOL)),
        Preset::Correlated => correlated_isotropic(a.u, omega),
        Preset::Anisotropic => anisotropic_product(a.u, a.v, omega, a.spectrum.omega2),
        Preset::Equal => Ok(StateVector::equal_superposition(build_spectrum(&a.spectrum)?)),
        Preset::Eigenstate => StateVector::eigenstate(build_spectrum(&a.spectrum)?, a.level, 0),
        Preset::Random => Ok(StateVector::random(build_spectrum(&a.spectrum)?, &mut cli.rng())),
    }
}

fn build_t0(path: Option<&PathBuf>, spectrum: Arc<Spectrum>) -> Result<apclock::observables::TimePOM> {
    match path {
        Some(path) => validate_t0(OperatorMatrix::new(spectrum, io::load_operator(path)?)?),
        None => Ok(canonical_t0(spectrum)),
    }
}

/// Returns whether the command succeeded in the sense of its exit status.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Spectrum(a) => {
            let s = build_spectrum(a)?;
            match cli.format(Format::Json) {
                Format::Json => cli.emit_json(&io::spectrum_json(&s))?,
                Format::Csv => {
                    let rows: Vec<Vec<f64>> = (0..s.level_count())
                        .map(|j| vec![s.energy(j), s.degeneracy(j) as f64])
                        .collect();
                    let what = Export::Table {
                        kind: "spectrum",
                        columns: &["energy", "degeneracy"],
                        rows: &rows,
                    };
                    cli.emit(&io::render(&what, Format::Csv)?)?
                }
            }
        }
        Command::State(a) => cli.emit_json(&io::state_json(&build_state(cli, a)?))?,
        Command::Density {
            state,
            what,
            t_max,
            points,
        } => {
            let psi = build_state(cli, state)?;
            match what {
                Trace::Density => cli.emit_export(&Export::Density(&io::density_trace(&psi, *t_max, *points)), Format::Csv)?,
                Trace::Autocorr => cli.emit_export(
                    &Export::Autocorrelation(&io::autocorrelation_trace(&psi, *t_max, *points)),
                    Format::Csv,
                )?,
            }
        }
        Command::Resolution(a) => {
            let report = ResolutionReport::for_state(&build_state(cli, a)?, &cli.entropy())?;
            cli.emit_export(&Export::Report(&report), Format::Json)?;
        }
        Command::Pom { command } => run_pom(cli, command)?,
        Command::Semiclassical(a) => run_semiclassical(cli, a)?,
        Command::Scenario { name, params } => return run_scenarios(cli, name, params),
    }
    Ok(true)
}

fn run_pom(cli: &Cli, command: &PomCommand) -> Result<()> {
    match command {
        PomCommand::Canonical(a) => cli.emit_json(&io::operator_json(canonical_t0(build_spectrum(a)?).t0().matrix())),
        PomCommand::Random { rank, spectrum } => {
            let pom = random_t0(build_spectrum(spectrum)?, *rank, &mut cli.rng())?;
            cli.emit_json(&io::operator_json(pom.t0().matrix()))
        }
        PomCommand::Validate { operator, spectrum } => {
            let pom = build_t0(Some(operator), build_spectrum(spectrum)?)?;
            cli.emit_json(&io::document(
                "pom-validation",
                json!({ "valid": true, "gamma": pom.gamma(), "hermitian_deviation": pom.t0().hermitian_deviation() }),
            ))
        }
        PomCommand::Kraus { operator, spectrum } => {
            let kraus = build_t0(Some(operator), build_spectrum(spectrum)?)?.kraus_decompose()?;
            cli.emit_json(&io::document(
                "kraus",
                json!({
                    "completeness_deviation": kraus_completeness_deviation(&kraus),
                    "operators": kraus.iter().map(|k| io::operator_json(k.matrix())).collect::<Vec<_>>(),
                }),
            ))
        }
        PomCommand::Density {
            operator,
            t_max,
            points,
            state,
        } => {
            let psi = build_state(cli, state)?;
            let pom = build_t0(operator.as_ref(), psi.spectrum().clone())?;
            let step = if *points > 1 { t_max / (*points - 1) as f64 } else { 0.0 };
            let rows = (0..*points)
                .map(|i| {
                    let t = i as f64 * step;
                    Ok((t, pom.density_pure(&psi, t)?))
                })
                .collect::<Result<Vec<_>>>()?;
            cli.emit_export(&Export::Density(&rows), Format::Csv)
        }
        PomCommand::Limit { horizon, spectrum } => {
            let s = build_spectrum(spectrum)?;
            let gap = s.min_gap().ok_or_else(|| Error::InvalidParameter("need at least two levels".into()))?;
            let lim = normalisation_operator(s, horizon / gap)?;
            let null_rank = lim.p0().trace().re.round();
            cli.emit_json(&io::document(
                "pom-limit",
                json!({
                    "horizon": lim.horizon(),
                    "identity_deviation": lim.identity_deviation(),
                    "bound": 2.0 / horizon,
                    "null_rank": null_rank,
                    "n": io::operator_json(lim.n()),
                }),
            ))
        }
        PomCommand::Galapon {
            t_max,
            points,
            samples,
            state,
        } => {
            let psi = build_state(cli, state)?;
            let taus: Vec<f64> = (0..*points)
                .map(|i| i as f64 * t_max / (*points).max(2).saturating_sub(1) as f64)
                .collect();
            let report = galapon_diagnostic(&psi, &taus, *samples, &mut cli.rng())?;
            cli.emit_json(&io::document("galapon", serde_json::to_value(&report)?))
        }
    }
}

fn run_semiclassical(cli: &Cli, a: &SemiclassicalArgs) -> Result<()> {
    if a.validate {
        let v = validate_powerlaw(a.k, a.n_bar, a.sigma, a.points, a.revivals)?;
        return cli.emit_json(&io::document("semiclassical-validation", serde_json::to_value(&v)?));
    }
    let expansion = expand_spectrum(powerlaw_energy(a.k), a.n_bar as f64, 1.0)?;
    let profile = match a.equal_weight {
        Some(m) => Profile::EqualWeight { m },
        None => Profile::Gaussian { sigma: a.sigma },
    };
    let p = SemiclassicalProfile::new(expansion, profile, 1.0)?;
    let rows: Vec<Vec<f64>> = time_grid(a.revivals * p.revival_time(), a.points)
        .into_iter()
        .map(|t| {
            let poisson = p.gaussian_theta(t).map_or(f64::NAN, |z| z.norm_sqr());
            vec![t, p.theta(t).norm_sqr(), poisson, p.autocorrelation(t).norm()]
        })
        .collect();
    cli.emit_export(
        &Export::Table {
            kind: "semiclassical",
            columns: &["t", "density", "density_poisson", "autocorrelation_abs"],
            rows: &rows,
        },
        Format::Csv,
    )
}

fn run_scenarios(cli: &Cli, name: &str, raw: &[String]) -> Result<bool> {
    let mut params = ScenarioParams {
        seed: cli.seed,
        backend: cli.backend,
        tolerance: cli.tolerance,
        ..ScenarioParams::default()
    };
    for kv in raw {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got `{kv}`")))?;
        params.set(k.trim(), v.trim())?;
    }
    let names: Vec<&str> = if name == "all" { SCENARIOS.to_vec() } else { vec![name] };
    let mut results = Vec::new();
    for n in names {
        let mut r = run_scenario(n, &params)?;
        for (metric, m) in &r.metrics {
            eprintln!("{n:>15}  {metric:<36} {m}");
        }
        if let Some(path) = &cli.output {
            r.artifacts.push(path.display().to_string());
        }
        results.push(r);
    }
    let passed = results.iter().all(|r| r.passed);
    match (cli.format(Format::Json), results.as_slice()) {
        (Format::Json, [one]) => cli.emit_export(&Export::Scenario(one), Format::Json)?,
        (Format::Json, many) => cli.emit_json(&io::document(
            "scenarios",
            json!({
                "passed": passed,
                "scenarios": many.iter().map(serde_json::to_value).collect::<std::result::Result<Vec<_>, _>>()?,
            }),
        ))?,
        (Format::Csv, many) => {
            let mut text = String::new();
            for (i, r) in many.iter().enumerate() {
                let csv = io::render(&Export::Scenario(r), Format::Csv)?;
                // one header for the whole table
                text.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |(_, rest)| rest) });
            }
            cli.emit(&text)?
        }
    }
    eprintln!("{}", if passed { "all metrics pass" } else { "some metrics FAIL" });
    Ok(passed)
}
