//! `voxsrc` command-line front end.

mod analyze;
mod config;
mod extract;
mod manifest;
mod tune;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use voxsrc::{Error, Result, VERSION};

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "voxsrc", version, about = "Pitch, voicing and voice-quality features for singing and speech")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Does not affect outputs.
    #[arg(long, short = 'j', global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a pitch-feature CSV per input WAV.
    Extract(extract::ExtractArgs),
    /// Write a voice-quality report (JSON) and per-frame CSV per input WAV.
    Vq(extract::VqArgs),
    /// Grid-search max-f0 and lowpass cutoff against annotated pitch.
    Tune(tune::TuneArgs),
    /// Score the configured tracker and estimate a voicing threshold.
    Eval(tune::EvalArgs),
    /// Cohort distributions and style comparisons over an annotated corpus.
    Analyze(analyze::AnalyzeArgs),
}

/// Whether a batch finished cleanly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    Partial,
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() || matches!(e, Error::Parse { .. }) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Extract(a) => extract::extract(a, cfg),
        Command::Vq(a) => extract::vq(a, cfg),
        Command::Tune(a) => tune::tune(a, cfg),
        Command::Eval(a) => tune::eval(a, cfg),
        Command::Analyze(a) => analyze::analyze(a, cfg),
    })
}

/// Common header of every JSON artifact.
#[derive(Serialize)]
struct Envelope<'a, I: Serialize, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    run_config: &'a RunConfig,
    inputs: I,
    #[serde(flatten)]
    payload: T,
}

fn write_artifact(path: &Path, command: &'static str, cfg: &RunConfig, inputs: impl Serialize, payload: impl Serialize) -> Result<()> {
    voxsrc::export::write_json(
        path,
        &Envelope {
            tool: "voxsrc",
            version: VERSION,
            command,
            run_config: cfg,
            inputs,
            payload,
        },
    )
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })
}

/// Prints per-item failures and maps them to an outcome.
fn report_failures<S: AsRef<str>>(failures: &[S]) -> Outcome {
    for f in failures {
        eprintln!("error: {}", f.as_ref());
    }
    if failures.is_empty() {
        Outcome::Complete
    } else {
        eprintln!("{} item(s) failed", failures.len());
        Outcome::Partial
    }
}

/// Output file name for an input, rejecting clashes between inputs.
fn output_stems(inputs: &[PathBuf]) -> Result<Vec<String>> {
    let stems: Vec<String> = inputs
        .iter()
        .map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into()))
        .collect();
    let mut sorted = stems.clone();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfig(format!("two inputs share the output name `{}`", w[0])));
    }
    Ok(stems)
}

fn csv_artifact(path: &Path, body: impl FnOnce(&mut dyn std::io::Write) -> std::io::Result<()>) -> Result<()> {
    voxsrc::export::write_atomic(path, |w| body(w).map_err(|e| Error::Io { path: path.to_path_buf(), source: e }))
}
