use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pdtomo::model::rng::derive_seed;
use pdtomo::model::{add_shot_noise, random_devices, synthesize, CorrelationConfig, CorrelationKind, ModelError};
use pdtomo::schemes::enumerate;
use pdtomo::DataTensor;

use crate::analysis::{analyze, settings_for_all_schemes, AnalysisOptions, AnalysisReport};
use crate::io::{read_tensor, tensor_to_json, write_text};
use crate::CliError;

const SEED_ENV: &str = "PDTOMO_SEED";

/// Partial-determinant tests for correlated SPAM errors in multiqudit
/// tomography data.
#[derive(Debug, Parser)]
#[command(name = "pdtomo", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a data tensor from seeded random devices.
    Generate(GenerateArgs),
    /// List every scheme of a class.
    Enumerate(EnumerateArgs),
    /// Run PDs of every (or selected) scheme on a data tensor.
    Analyze(AnalyzeArgs),
    /// Generate clean and correlated data and show which schemes fire.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Number of measured qudits.
    #[arg(long)]
    m: usize,
    /// Qudit dimension.
    #[arg(long)]
    d: usize,
    /// `N,M1,...,Mm`; defaults to enough settings for every scheme.
    #[arg(long, value_delimiter = ',')]
    settings: Option<Vec<usize>>,
    /// `none`, `spam:q` or `nonlocal:p,q` (1-based qudits).
    #[arg(long, default_value = "none")]
    correlation: String,
    /// Correlation strength.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Master seed; PDTOMO_SEED overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add Gaussian shot noise of this many shots.
    #[arg(long)]
    shots: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Number of qudits whose measurements go on the column side.
    #[arg(long)]
    k: usize,
    /// Print corners, square templates and schemes as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Tensor file (`.json`, or `.csv` with `--d`).
    #[arg(long)]
    input: PathBuf,
    /// Qudit dimension for CSV input.
    #[arg(long)]
    d: Option<usize>,
    /// Classes to sweep; all when absent.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Triviality threshold on the Frobenius score.
    #[arg(long)]
    threshold: Option<f64>,
    /// Explicit schemes, e.g. `--schemes '[2d^2;1:2d^2]' '(12)[2d^2;1:2d^2]'`.
    #[arg(long, num_args = 1..)]
    schemes: Vec<String>,
    /// Use the (r+1)×(r+1) leading block of each square.
    #[arg(long)]
    reduced: bool,
    /// JSON report path.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Demo(a) => demo(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pdtomo: {e}");
            e.exit_code()
        }
    }
}

fn seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn model_error(e: ModelError) -> CliError {
    match e {
        ModelError::ConditioningFailure { .. } => CliError::Conditioning(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_text(p, text),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

struct Synthesis {
    m: usize,
    d: usize,
    settings: Vec<usize>,
    correlation: CorrelationKind,
    epsilon: f64,
    seed: u64,
    shots: Option<u64>,
}

fn synthesize_tensor(s: &Synthesis) -> Result<DataTensor, CliError> {
    if s.settings.len() != s.m + 1 {
        return Err(CliError::Usage(format!(
            "--settings needs {} counts (N,M1,...,Mm), got {}",
            s.m + 1,
            s.settings.len()
        )));
    }
    let config = if s.correlation == CorrelationKind::None {
        CorrelationConfig::none()
    } else {
        CorrelationConfig::new(s.correlation, s.epsilon, derive_seed(s.seed, "correlation", &[]))
            .map_err(model_error)?
    };
    let devices = random_devices(s.m, s.d, s.settings[0], &s.settings[1..], s.seed).map_err(model_error)?;
    let clean = synthesize(&devices, &config).map_err(model_error)?;
    match s.shots {
        Some(n) => add_shot_noise(&clean, n, derive_seed(s.seed, "shots", &[])).map_err(model_error),
        None => Ok(clean),
    }
}

fn generate(a: GenerateArgs) -> Result<(), CliError> {
    let correlation: CorrelationKind = a
        .correlation
        .parse()
        .map_err(|e: ModelError| CliError::Usage(e.to_string()))?;
    if !(0.0..=1.0).contains(&a.epsilon) {
        return Err(CliError::Usage(format!("--epsilon must lie in [0, 1], got {}", a.epsilon)));
    }
    let settings = match a.settings {
        Some(s) => s,
        None => settings_for_all_schemes(a.m, a.d)?,
    };
    let t = synthesize_tensor(&Synthesis {
        m: a.m,
        d: a.d,
        settings,
        correlation,
        epsilon: a.epsilon,
        seed: seed(a.seed)?,
        shots: a.shots,
    })?;
    emit(a.output.as_ref(), &tensor_to_json(&t))
}

fn cmd_enumerate(a: EnumerateArgs) -> Result<(), CliError> {
    let report = enumerate(a.m, a.d, a.k).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = String::new();
    if a.json {
        let squares: Vec<_> = report
            .squares
            .iter()
            .map(|s| {
                serde_json::json!({
                    "corner": report.corners[s.corner],
                    "template": s.template.to_string(),
                    "variants": s.variants,
                    "stabilizer": s.stabilizer,
                })
            })
            .collect();
        let json = serde_json::json!({
            "m": report.m,
            "d": report.d,
            "k": report.k,
            "count": report.count(),
            "corners": report.corners,
            "squares": squares,
            "schemes": report.schemes.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "symmetry_notes": report.symmetry_notes,
        });
        out = serde_json::to_string_pretty(&json).expect("json");
        out.push('\n');
    } else {
        for s in &report.schemes {
            let _ = writeln!(out, "{s}");
        }
        eprintln!("{} schemes (m={}, d={}, k={})", report.count(), a.m, a.d, a.k);
        for note in &report.symmetry_notes {
            eprintln!("note: {note}");
        }
    }
    emit(None, &out)
}

fn finish(report: &AnalysisReport) -> Result<(), CliError> {
    match report.failed() {
        0 => Ok(()),
        failed => Err(CliError::SchemeFailures {
            failed,
            total: report.summary.schemes,
        }),
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let t = read_tensor(&a.input, a.d)?;
    let opts = AnalysisOptions {
        classes: a.k,
        schemes: a.schemes,
        threshold: a.threshold,
        reduced: a.reduced,
        deterministic: a.deterministic,
    };
    let report = analyze(&t, &opts)?;
    if let Some(path) = &a.output {
        write_text(path, &report.to_json())?;
    }
    if a.json {
        emit(None, &report.to_json())?;
    } else {
        emit(None, &report.table())?;
    }
    finish(&report)
}

fn demo(a: DemoArgs) -> Result<(), CliError> {
    let seed = seed(a.seed)?;
    let (m, d) = (a.m, 2);
    let settings = settings_for_all_schemes(m, d)?;
    let mut kinds = vec![CorrelationKind::None];
    kinds.extend(CorrelationKind::all(m));
    let opts = AnalysisOptions {
        deterministic: true,
        ..AnalysisOptions::default()
    };
    let mut out = String::new();
    let (mut failures, mut total) = (0, 0);
    for kind in kinds {
        let t = synthesize_tensor(&Synthesis {
            m,
            d,
            settings: settings.clone(),
            correlation: kind,
            epsilon: a.epsilon,
            seed,
            shots: None,
        })?;
        let report = analyze(&t, &opts)?;
        failures += report.failed();
        total += report.summary.schemes;
        let fired: Vec<&str> = report
            .records
            .iter()
            .filter(|r| r.trivial == Some(false))
            .map(|r| r.scheme.as_str())
            .collect();
        let predicted = report
            .records
            .iter()
            .filter(|r| r.sensitivity.is_sensitive_to(kind))
            .count();
        let agree = report.records.iter().all(|r| match r.trivial {
            Some(t) => t != r.sensitivity.is_sensitive_to(kind),
            None => true,
        });
        let _ = writeln!(
            out,
            "{kind} (epsilon {}): {} of {} schemes nontrivial, {predicted} predicted{}",
            if kind == CorrelationKind::None { 0.0 } else { a.epsilon },
            fired.len(),
            report.records.len(),
            if agree { "" } else { " (MISMATCH)" }
        );
        for s in fired.iter().take(6) {
            let _ = writeln!(out, "    {s}");
        }
        if fired.len() > 6 {
            let _ = writeln!(out, "    ... {} more", fired.len() - 6);
        }
    }
    emit(None, &out)?;
    if failures > 0 {
        return Err(CliError::SchemeFailures {
            failed: failures,
            total,
        });
    }
    Ok(())
}
