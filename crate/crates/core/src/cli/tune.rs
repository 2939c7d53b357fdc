use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use voxsrc::evaluation::{
    estimate_voicing_threshold, evaluate, grid_search, pool, DatasetItem, GroundTruthTrack, PitchEvalResult, ThresholdEstimate,
};
use voxsrc::export::{write_tuning_csv, UNDEFINED};
use voxsrc::pitch::extract_pitch;
use voxsrc::signal_io::load_wav;
use voxsrc::{Error, Result};

use super::config::{PitchArgs, RunConfig, TruthArgs};
use super::manifest::{load_manifest, ManifestRow};
use super::{create_dir, csv_artifact, report_failures, write_artifact, Outcome};

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// CSV manifest pairing audio_path with ground_truth_path.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory.
    #[arg(long, short)]
    out_dir: PathBuf,
    /// Comma-separated max-f0 grid, Hz.
    #[arg(long, value_delimiter = ',')]
    max_f0_grid: Option<Vec<f64>>,
    /// Comma-separated lowpass-cutoff grid, Hz.
    #[arg(long, value_delimiter = ',')]
    lowpass_grid: Option<Vec<f64>>,
    #[command(flatten)]
    pitch: PitchArgs,
    #[command(flatten)]
    truth: TruthArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// CSV manifest pairing audio_path with ground_truth_path.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory.
    #[arg(long, short)]
    out_dir: PathBuf,
    #[command(flatten)]
    pitch: PitchArgs,
    #[command(flatten)]
    truth: TruthArgs,
}

#[derive(Serialize)]
struct ManifestInput<'a> {
    manifest: &'a std::path::Path,
}

fn load_item(row: &ManifestRow, cfg: &RunConfig) -> Result<DatasetItem> {
    let missing = |what: &str| Error::InvalidConfig(format!("utterance `{}` has no {what}", row.utterance_id));
    let audio = load_wav(row.audio_path.as_ref().ok_or_else(|| missing("audio_path"))?)?;
    let truth = GroundTruthTrack::load(row.ground_truth_path.as_ref().ok_or_else(|| missing("ground_truth_path"))?, &cfg.ground_truth)?;
    Ok(DatasetItem { id: row.utterance_id.clone(), audio, truth })
}

/// Loads every row in parallel; unreadable rows become failure messages.
fn load_dataset(rows: &[ManifestRow], cfg: &RunConfig) -> (Vec<DatasetItem>, Vec<String>) {
    let loaded: Vec<Result<DatasetItem>> = rows.par_iter().map(|r| load_item(r, cfg)).collect();
    let mut items = Vec::new();
    let mut failures = Vec::new();
    for (row, r) in rows.iter().zip(loaded) {
        match r {
            Ok(item) => items.push(item),
            Err(e) => failures.push(format!("{}: {e}", row.utterance_id)),
        }
    }
    (items, failures)
}

#[derive(Serialize)]
struct TunePayload<'a> {
    result: &'a voxsrc::evaluation::TuningResult,
    load_failures: &'a [String],
}

pub fn tune(args: TuneArgs, mut cfg: RunConfig) -> Result<Outcome> {
    args.pitch.apply(&mut cfg);
    args.truth.apply(&mut cfg);
    if let Some(g) = args.max_f0_grid {
        cfg.grid.max_f0_hz = g;
    }
    if let Some(g) = args.lowpass_grid {
        cfg.grid.lowpass_cutoff_hz = g;
    }
    cfg.pitch.validate()?;
    let rows = load_manifest(&args.manifest)?;
    create_dir(&args.out_dir)?;
    let (items, load_failures) = load_dataset(&rows, &cfg);
    if items.is_empty() {
        report_failures(&load_failures);
        return Err(Error::Undefined("no usable utterance in the manifest".into()));
    }
    let result = grid_search(&items, &cfg.grid.max_f0_hz, &cfg.grid.lowpass_cutoff_hz, &cfg.pitch)?;
    let input = ManifestInput { manifest: &args.manifest };
    write_artifact(
        &args.out_dir.join("tuning.json"),
        "tune",
        &cfg,
        input,
        TunePayload { result: &result, load_failures: &load_failures },
    )?;
    csv_artifact(&args.out_dir.join("tuning.csv"), |w| write_tuning_csv(w, &result, &cfg))?;
    if let Some(best) = result.best {
        println!("best: max_f0 {} Hz, lowpass {} Hz", best.max_f0_hz, best.lowpass_cutoff_hz);
    }
    let mut failures = load_failures;
    failures.extend(result.failures.iter().map(|f| {
        format!("{} (max_f0 {}, lowpass {}): {}", f.utterance_id, f.max_f0_hz, f.lowpass_cutoff_hz, f.message)
    }));
    Ok(report_failures(&failures))
}

#[derive(Serialize)]
struct UtteranceScore {
    utterance_id: String,
    #[serde(flatten)]
    result: PitchEvalResult,
}

#[derive(Serialize)]
struct EvalPayload<'a> {
    pooled: &'a PitchEvalResult,
    utterances: &'a [UtteranceScore],
    voicing_threshold: Option<ThresholdEstimate>,
    failures: &'a [String],
}

type Scored = (PitchEvalResult, Vec<(f64, bool)>);

fn score(item: &DatasetItem, cfg: &RunConfig) -> Result<Scored> {
    let track = extract_pitch(&item.audio, &cfg.pitch)?;
    let result = evaluate(&track, &item.truth)?;
    // POV of the nearest frame against the reference voicing
    let half = 0.5 * track.frame_shift_s() + 1e-9;
    let mut labelled = Vec::new();
    for &(t, f0) in item.truth.entries() {
        if let Some(i) = track.nearest_frame(t) {
            if (track.frames[i].time_s - t).abs() <= half {
                labelled.push((track.frames[i].pov_feature, f0 > 0.0));
            }
        }
    }
    Ok((result, labelled))
}

pub fn eval(args: EvalArgs, mut cfg: RunConfig) -> Result<Outcome> {
    args.pitch.apply(&mut cfg);
    args.truth.apply(&mut cfg);
    cfg.pitch.validate()?;
    let rows = load_manifest(&args.manifest)?;
    create_dir(&args.out_dir)?;
    let (items, mut failures) = load_dataset(&rows, &cfg);
    let scored: Vec<Result<Scored>> = items.par_iter().map(|i| score(i, &cfg)).collect();
    let mut utterances = Vec::new();
    let mut pov = Vec::new();
    let mut voiced = Vec::new();
    for (item, s) in items.iter().zip(scored) {
        match s {
            Ok((result, labelled)) => {
                for (p, v) in labelled {
                    pov.push(p);
                    voiced.push(v);
                }
                utterances.push(UtteranceScore { utterance_id: item.id.clone(), result });
            }
            Err(e) => failures.push(format!("{}: {e}", item.id)),
        }
    }
    if utterances.is_empty() {
        report_failures(&failures);
        return Err(Error::Undefined("no utterance could be scored".into()));
    }
    let results: Vec<PitchEvalResult> = utterances.iter().map(|u| u.result.clone()).collect();
    let pooled = pool(&results);
    let threshold = match estimate_voicing_threshold(&pov, &voiced) {
        Ok(t) => Some(t),
        Err(e) => {
            eprintln!("warning: no voicing threshold estimated: {e}");
            None
        }
    };
    write_artifact(
        &args.out_dir.join("eval.json"),
        "eval",
        &cfg,
        ManifestInput { manifest: &args.manifest },
        EvalPayload { pooled: &pooled, utterances: &utterances, voicing_threshold: threshold, failures: &failures },
    )?;
    csv_artifact(&args.out_dir.join("eval.csv"), |w| {
        writeln!(w, "# voxsrc {}", voxsrc::VERSION)?;
        writeln!(w, "# run_config {}", serde_json::to_string(&cfg)?)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["utterance_id", "gpe", "fpe_cents", "n_voiced_ref", "n_gross", "n_unmatched"])
            .map_err(std::io::Error::other)?;
        for (id, r) in utterances.iter().map(|u| (u.utterance_id.as_str(), &u.result)).chain([("pooled", &pooled)]) {
            let fpe = r.fpe_cents.map_or_else(|| UNDEFINED.to_string(), |v| v.to_string());
            out.write_record([id.to_string(), r.gpe.to_string(), fpe, r.n_voiced_ref.to_string(), r.n_gross.to_string(), r.n_unmatched.to_string()])
                .map_err(std::io::Error::other)?;
        }
        out.flush()?;
        Ok(())
    })?;
    println!("GPE {:.4}  FPE {}", pooled.gpe, pooled.fpe_cents.map_or("undefined".into(), |f| format!("{f:.2} cents")));
    if let Some(t) = threshold {
        println!(
            "voicing threshold {:.6} (error rate {:.4}{})",
            t.threshold,
            t.error_rate,
            if t.inverted { ", labels look inverted" } else { "" }
        );
    }
    Ok(report_failures(&failures))
}
