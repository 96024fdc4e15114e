//! Command-line frontend.
//!
//! Every run prints a header with the toolkit version, the generator and the fully
//! resolved [`RunConfig`]. JSON output wraps the result as
//! `{"version", "generator", "config", "result", "findings"}`; CSV output carries the
//! same header as `#` comment lines.
//!
//! Exit codes: 0 success, 1 usage or operational error, 2 a violated inequality or
//! invariant, 3 a numerical validation failure on the input.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics;
use crate::error::{Error, Result};
use crate::io::{read_state, DensityJson, ParsedState};
use crate::measures::{
    self, c_d, c_f_with, e_d, e_f_with, e_gme_pure, log_negativity, parse_cut, Bipartition, GmeBase, RoofOptions,
    MCS_TOL,
};
use crate::multilevel;
use crate::protocols::{self, OutcomeChoice, VerifyConfig};
use crate::rng::GENERATOR;
use crate::states::{is_mcs, mcs_from_matrix, CoherentAmplitudes};
use crate::VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

pub const TOLERANCE_ENV: &str = "COHENT_TOLERANCE";
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "cohent", version, about = "Coherence and multipartite entanglement resource toolkit")]
#[command(after_help = "Exit codes: 0 success, 1 usage error, 2 violation found, 3 input failed numerical validation.")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random samples (verify).
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    /// Tolerance for inequality and invariant checks.
    #[arg(long, global = true, env = TOLERANCE_ENV, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; csv is available for dynamics and verify.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert single-party coherence into multipartite entanglement with U_mcn.
    Convert {
        /// State JSON file or inline JSON.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 2)]
        ancillas: usize,
    },
    /// One LICC step: incoherent measurement on one party, correction on another.
    Licc {
        /// Maximally correlated state, or a single-party state converted first.
        #[arg(long)]
        state: String,
        /// Register size used when a single-party state is converted first.
        #[arg(long, default_value_t = 3)]
        parties: usize,
        #[arg(long, default_value_t = 2)]
        measured: usize,
        #[arg(long, default_value_t = 1)]
        correction: usize,
        /// Force this outcome instead of sampling it.
        #[arg(long)]
        outcome: Option<usize>,
    },
    /// Qubit coherence to GHZ-class entanglement and back.
    Cyclic {
        #[arg(long)]
        state: String,
    },
    /// Coherence and entanglement measures of a state.
    Measures {
        #[arg(long)]
        state: String,
        /// Cut such as "A|BC"; every cut when omitted.
        #[arg(long)]
        cut: Option<String>,
    },
    /// Randomized check of the conversion inequalities.
    Verify {
        /// Local dimension.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Number of ancillas.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Re-run a single sample from its reported seed.
        #[arg(long)]
        replay: Option<u64>,
    },
    /// Multi-level decomposability of a pure state or a 4-level amplitude vector.
    Multilevel {
        /// State JSON or amplitude list, file or inline.
        state: String,
    },
    /// Depolarizing dynamics of maximally correlated qubit states.
    Dynamics {
        #[arg(long, default_value_t = 51)]
        alpha_steps: usize,
        #[arg(long, default_value_t = 51)]
        p_steps: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Convert { .. } => "convert",
            Command::Licc { .. } => "licc",
            Command::Cyclic { .. } => "cyclic",
            Command::Measures { .. } => "measures",
            Command::Verify { .. } => "verify",
            Command::Multilevel { .. } => "multilevel",
            Command::Dynamics { .. } => "dynamics",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Dynamics { .. } => Format::Csv,
            _ => Format::Json,
        }
    }

    fn supports_csv(&self) -> bool {
        matches!(self, Command::Dynamics { .. } | Command::Verify { .. })
    }

    fn input(&self) -> Option<String> {
        match self {
            Command::Convert { state, .. }
            | Command::Licc { state, .. }
            | Command::Cyclic { state }
            | Command::Measures { state, .. }
            | Command::Multilevel { state } => Some(state.clone()),
            _ => None,
        }
    }

    fn options(&self) -> BTreeMap<String, Value> {
        let pairs: Vec<(&str, Value)> = match self {
            Command::Convert { ancillas, .. } => vec![("ancillas", json!(ancillas))],
            Command::Licc { parties, measured, correction, outcome, .. } => vec![
                ("parties", json!(parties)),
                ("measured", json!(measured)),
                ("correction", json!(correction)),
                ("outcome", json!(outcome)),
            ],
            Command::Cyclic { .. } | Command::Multilevel { .. } => vec![],
            Command::Measures { cut, .. } => vec![("cut", json!(cut))],
            Command::Verify { d, n, replay } => vec![("d", json!(d)), ("n", json!(n)), ("replay", json!(replay))],
            Command::Dynamics { alpha_steps, p_steps } => {
                vec![("alpha_steps", json!(alpha_steps)), ("p_steps", json!(p_steps))]
            }
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub input: Option<String>,
    pub output: Option<String>,
    pub format: Format,
    pub options: BTreeMap<String, Value>,
}

type CsvWriter = Box<dyn FnOnce(&mut dyn Write) -> Result<()>>;

/// What a subcommand produced, before rendering.
struct Outcome {
    result: Value,
    /// Human-readable descriptions of violated checks.
    findings: Vec<String>,
    csv: Option<CsvWriter>,
}

impl Outcome {
    fn json(result: Value, findings: Vec<String>) -> Self {
        Outcome { result, findings, csv: None }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Runs the command line `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    EXIT_OK
                }
                _ => {
                    let _ = e.print();
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                eprintln!(
                    "usage: cohent <convert|licc|cyclic|measures|verify|multilevel|dynamics> [options]; see --help"
                );
                EXIT_USAGE
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let g = cli.global;
    let cmd = cli.command;
    let format = g.format.unwrap_or_else(|| cmd.default_format());
    if format == Format::Csv && !cmd.supports_csv() {
        return Err(Error::Config(format!("csv output is not available for {}", cmd.name())));
    }
    if !(g.tolerance.is_finite() && g.tolerance > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {}", g.tolerance)));
    }
    let config = RunConfig {
        subcommand: cmd.name().to_string(),
        seed: g.seed,
        samples: g.samples,
        tolerance: g.tolerance,
        input: cmd.input(),
        output: g.out.as_ref().map(|p| p.display().to_string()),
        format,
        options: cmd.options(),
    };

    let outcome = match cmd {
        Command::Convert { state, ancillas } => run_convert(&config, &read_state(&state)?, ancillas)?,
        Command::Licc { state, parties, measured, correction, outcome } => {
            run_licc(&config, &read_state(&state)?, parties, measured, correction, outcome)?
        }
        Command::Cyclic { state } => run_cyclic(&config, &read_state(&state)?)?,
        Command::Measures { state, cut } => run_measures(&config, &read_state(&state)?, cut.as_deref())?,
        Command::Verify { d, n, replay } => run_verify(&config, d, n, replay)?,
        Command::Multilevel { state } => run_multilevel(&read_state(&state)?)?,
        Command::Dynamics { alpha_steps, p_steps } => run_dynamics(&config, alpha_steps, p_steps)?,
    };

    let code = if outcome.findings.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    for f in &outcome.findings {
        eprintln!("violation: {f}");
    }
    match &g.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            render(&config, outcome, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            render(&config, outcome, &mut w)?;
            w.flush()?;
        }
    }
    Ok(code)
}

fn render(config: &RunConfig, outcome: Outcome, w: &mut dyn Write) -> Result<()> {
    match config.format {
        Format::Json => {
            let doc = json!({
                "version": VERSION,
                "generator": GENERATOR,
                "config": config,
                "result": outcome.result,
                "findings": outcome.findings,
            });
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)?;
        }
        Format::Csv => {
            writeln!(w, "# cohent {VERSION}")?;
            writeln!(w, "# generator: {GENERATOR}")?;
            writeln!(w, "# config: {}", serde_json::to_string(config)?)?;
            let csv = outcome.csv.ok_or_else(|| Error::Config("no csv rendering".into()))?;
            csv(w)?;
        }
    }
    Ok(())
}

fn roof(config: &RunConfig) -> RoofOptions {
    RoofOptions { seed: config.seed, ..RoofOptions::default() }
}

fn run_convert(config: &RunConfig, input: &ParsedState, ancillas: usize) -> Result<Outcome> {
    let (out, report) = protocols::convert_with(&input.density, ancillas, &roof(config))?;
    let mut findings = Vec::new();
    if report.max_residual > config.tolerance {
        findings.push(format!("conversion residual {} exceeds tolerance", report.max_residual));
    }
    let result = json!({ "report": to_value(&report)?, "output_state": to_value(&DensityJson::from(&out))? });
    Ok(Outcome::json(result, findings))
}

fn run_licc(
    config: &RunConfig,
    input: &ParsedState,
    parties: usize,
    measured: usize,
    correction: usize,
    outcome: Option<usize>,
) -> Result<Outcome> {
    let rho = if input.density.n_parties() == 1 {
        if parties < 2 {
            return Err(Error::Config("an LICC step needs at least two parties".into()));
        }
        mcs_from_matrix(&input.density, parties)?
    } else {
        input.density.clone()
    };
    let choice = match outcome {
        Some(k) => OutcomeChoice::Forced(k),
        None => OutcomeChoice::Sampled(config.seed),
    };
    let step = protocols::licc_step(&rho, measured, correction, choice)?;
    let opts = roof(config);
    let before = (c_d(&rho), c_f_with(&rho, &opts));
    let after = (c_d(&step.state), c_f_with(&step.state, &opts));
    let mut findings = Vec::new();
    if after.0.value - before.0.value > config.tolerance {
        findings.push(format!("C_d increased from {} to {}", before.0.value, after.0.value));
    }
    if after.1.value - before.1.value > config.tolerance {
        findings.push(format!("C_f increased from {} to {}", before.1.value, after.1.value));
    }
    let result = json!({
        "input_state": to_value(&DensityJson::from(&rho))?,
        "outcome": step.outcome,
        "probability": step.probability,
        "probabilities": step.probabilities,
        "output_state": to_value(&DensityJson::from(&step.state))?,
        "before": { "c_d": to_value(&before.0)?, "c_f": to_value(&before.1)? },
        "after": { "c_d": to_value(&after.0)?, "c_f": to_value(&after.1)? },
    });
    Ok(Outcome::json(result, findings))
}

fn run_cyclic(config: &RunConfig, input: &ParsedState) -> Result<Outcome> {
    let trace = protocols::cyclic(&input.density, config.seed)?;
    let mut findings = Vec::new();
    if trace.loss > config.tolerance {
        findings.push(format!("cyclic loss {} exceeds tolerance", trace.loss));
    }
    Ok(Outcome::json(to_value(&trace)?, findings))
}

fn run_measures(config: &RunConfig, input: &ParsedState, cut: Option<&str>) -> Result<Outcome> {
    let rho = &input.density;
    let n = rho.n_parties();
    let opts = roof(config);
    let mut result = serde_json::Map::new();
    result.insert("dims".into(), json!(rho.dims()));
    result.insert("c_d".into(), to_value(&c_d(rho))?);
    result.insert("c_f".into(), to_value(&c_f_with(rho, &opts))?);
    if n >= 2 {
        let cuts = match cut {
            Some(text) => vec![parse_cut(text, n)?],
            None => Bipartition::all(n),
        };
        let mut rows = Vec::new();
        for c in &cuts {
            rows.push(json!({
                "cut": c.to_string(),
                "e_d": to_value(&e_d(rho, c)?)?,
                "e_f": to_value(&e_f_with(rho, c, &opts)?)?,
                "log_negativity": log_negativity(rho, c)?,
                "coherent_information": measures::coherent_information(rho, c)?,
            }));
        }
        result.insert("cuts".into(), Value::Array(rows));
    } else if cut.is_some() {
        return Err(Error::Config("a cut needs at least two parties".into()));
    }
    if n >= 2 && is_mcs(rho, MCS_TOL) {
        result.insert("e_r_m".into(), to_value(&measures::e_r_m_mcs(rho)?)?);
        result.insert("e_f_gme".into(), to_value(&measures::e_f_gme_mcs_with(rho, &opts)?)?);
    } else if n >= 3 {
        if let Some(psi) = input.pure_vector() {
            let (ed, at) = e_gme_pure(&psi, rho.dims(), GmeBase::Distillable)?;
            let (ef, _) = e_gme_pure(&psi, rho.dims(), GmeBase::Formation)?;
            result.insert("e_d_gme".into(), to_value(&ed)?);
            result.insert("e_f_gme".into(), to_value(&ef)?);
            result.insert("gme_cut".into(), json!(at.to_string()));
        }
    }
    if n >= 3 && rho.dims().iter().all(|&d| d == 2) {
        result.insert("tau_med".into(), to_value(&measures::tau_med(rho)?)?);
        result.insert("tau_mef".into(), to_value(&measures::tau_mef_with(rho, &opts)?)?);
    }
    Ok(Outcome::json(Value::Object(result), Vec::new()))
}

fn run_verify(config: &RunConfig, d: usize, n: usize, replay: Option<u64>) -> Result<Outcome> {
    let cfg = VerifyConfig { samples: config.samples, d, n, seed: config.seed, tolerance: config.tolerance };
    cfg.validate()?;
    let reports = match replay {
        Some(s) => protocols::replay_sample(&cfg, s)?,
        None => protocols::verify_theorems(&cfg)?,
    };
    let findings: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.violations.iter().map(move |v| format!("{} sample {} (seed {}): {}", r.id, v.sample, v.seed, v.detail))
        })
        .collect();
    let checks: usize = reports.iter().map(|r| r.checks).sum();
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let result = json!({
        "checks": checks,
        "violations": violations,
        "passed": violations == 0,
        "reports": to_value(&reports)?,
    });
    let csv_reports = reports.clone();
    let csv = move |w: &mut dyn Write| -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "id",
            "relation",
            "samples",
            "checks",
            "certified",
            "inconclusive",
            "violations",
            "min_margin",
            "max_margin",
        ])?;
        for r in &csv_reports {
            let margin = |m: Option<f64>| m.map(|x| crate::io::format_sig(x, 12)).unwrap_or_default();
            out.write_record([
                r.id.clone(),
                r.relation.clone(),
                r.samples.to_string(),
                r.checks.to_string(),
                r.certified.to_string(),
                r.inconclusive.to_string(),
                r.violations.len().to_string(),
                margin(r.min_margin),
                margin(r.max_margin),
            ])?;
        }
        out.flush()?;
        Ok(())
    };
    Ok(Outcome { result, findings, csv: Some(Box::new(csv)) })
}

/// Amplitude vectors of length `k²` with no party structure are read as two `k`-level parties.
fn square_dims(dims: &[usize]) -> Vec<usize> {
    if let [n] = dims {
        let k = (*n as f64).sqrt().round() as usize;
        if k >= 2 && k * k == *n {
            return vec![k, k];
        }
    }
    dims.to_vec()
}

fn run_multilevel(input: &ParsedState) -> Result<Outcome> {
    let psi = input.pure_vector().ok_or_else(|| Error::Domain("multilevel analysis needs a pure state".into()))?;
    let dims = input.density.dims();
    if dims == [4] {
        let amps = CoherentAmplitudes::new(psi.clone())?;
        let obs = multilevel::observation1(&amps)?;
        let mcs = crate::states::mcs_vector(&amps, 2);
        let kraft = multilevel::kraft_decomposable(&mcs)?;
        let result = json!({
            "amplitudes": psi.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "product": multilevel::is_product_amplitudes(&amps),
            "observation1": to_value(&obs)?,
            "kraft": to_value(&kraft)?,
            "agree": obs.decomposable == kraft.decomposable,
        });
        let findings = if obs.decomposable == kraft.decomposable {
            Vec::new()
        } else {
            vec!["amplitude and Schmidt-coefficient verdicts disagree".to_string()]
        };
        return Ok(Outcome::json(result, findings));
    }
    let dims = square_dims(dims);
    Ok(Outcome::json(to_value(&multilevel::multilevel_report(&psi, &dims)?)?, Vec::new()))
}

fn run_dynamics(config: &RunConfig, alpha_steps: usize, p_steps: usize) -> Result<Outcome> {
    let alphas = dynamics::unit_grid(alpha_steps)?;
    let ps = dynamics::unit_grid(p_steps)?;
    let points = dynamics::sweep(&alphas, &ps)?;
    let findings: Vec<String> = points
        .iter()
        .filter(|pt| pt.max_discrepancy() > config.tolerance)
        .map(|pt| {
            format!("closed form and pipeline differ by {} at alpha={} p={}", pt.max_discrepancy(), pt.alpha, pt.p)
        })
        .collect();
    let result = if config.format == Format::Json { to_value(&points)? } else { Value::Null };
    let csv = move |w: &mut dyn Write| dynamics::write_csv(&points, w);
    Ok(Outcome { result, findings, csv: Some(Box::new(csv)) })
}
