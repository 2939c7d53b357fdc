use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use voxsrc::export::{write_pitch_csv, write_vq_csv};
use voxsrc::pitch::extract_pitch;
use voxsrc::signal_io::load_wav;
use voxsrc::voice_quality::extract_vq_stream;
use voxsrc::Result;

use super::config::{PitchArgs, RunConfig};
use super::{create_dir, csv_artifact, output_stems, report_failures, write_artifact, Outcome};

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Input WAV files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Directory for `<name>.pitch.csv` outputs.
    #[arg(long, short)]
    out_dir: PathBuf,
    #[command(flatten)]
    pitch: PitchArgs,
}

#[derive(Debug, Args)]
pub struct VqArgs {
    /// Input WAV files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Directory for `<name>.vq.json` and `<name>.vq.csv` outputs.
    #[arg(long, short)]
    out_dir: PathBuf,
    #[command(flatten)]
    pitch: PitchArgs,
}

#[derive(Serialize)]
struct Input<'a> {
    audio_path: &'a std::path::Path,
}

/// Runs `job` over every input in parallel; returns the failure messages
/// in input order.
fn batch(inputs: &[PathBuf], job: impl Fn(&PathBuf, &str) -> Result<()> + Sync) -> Result<Vec<String>> {
    let stems = output_stems(inputs)?;
    let results: Vec<Result<()>> = inputs.par_iter().zip(stems.par_iter()).map(|(p, s)| job(p, s)).collect();
    Ok(results.into_iter().filter_map(|r| r.err().map(|e| e.to_string())).collect())
}

pub fn extract(args: ExtractArgs, mut cfg: RunConfig) -> Result<Outcome> {
    args.pitch.apply(&mut cfg);
    cfg.pitch.validate()?;
    create_dir(&args.out_dir)?;
    let failures = batch(&args.inputs, |path, stem| {
        let audio = load_wav(path)?;
        let track = extract_pitch(&audio, &cfg.pitch)?;
        let out = args.out_dir.join(format!("{stem}.pitch.csv"));
        csv_artifact(&out, |w| write_pitch_csv(w, &track, &cfg))
    })?;
    Ok(report_failures(&failures))
}

#[derive(Serialize)]
struct VqPayload<'a> {
    report: &'a voxsrc::voice_quality::VqReport,
}

pub fn vq(args: VqArgs, mut cfg: RunConfig) -> Result<Outcome> {
    args.pitch.apply(&mut cfg);
    let cfg = cfg.resolve()?;
    create_dir(&args.out_dir)?;
    let threshold = cfg.threshold();
    let failures = batch(&args.inputs, |path, stem| {
        let audio = load_wav(path)?;
        let track = extract_pitch(&audio, &cfg.pitch)?;
        let (report, frames) = extract_vq_stream(&audio, &track, threshold)?;
        write_artifact(
            &args.out_dir.join(format!("{stem}.vq.json")),
            "vq",
            &cfg,
            Input { audio_path: path },
            VqPayload { report: &report },
        )?;
        csv_artifact(&args.out_dir.join(format!("{stem}.vq.csv")), |w| write_vq_csv(w, &frames, &cfg))
    })?;
    Ok(report_failures(&failures))
}
