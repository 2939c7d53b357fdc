use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use voxsrc::corpus::{
    duration_distribution, load_annotations, pitch_distribution, pov_class_separation, vq_style_comparison, AnnotationIssue, CohortReport,
    CohortSpec, Metadata, PhoneSegment, SpeakerCohort, VqComparison,
};
use voxsrc::export::{read_pitch_csv, write_histogram_csv, write_vq_comparison_csv};
use voxsrc::pitch::{extract_pitch, PitchTrack};
use voxsrc::signal_io::load_wav;
use voxsrc::voice_quality::{extract_vq, VqReport};
use voxsrc::{Error, Result};

use super::config::{HistogramArgs, PitchArgs, RunConfig};
use super::manifest::{load_manifest, ManifestRow};
use super::{create_dir, csv_artifact, report_failures, write_artifact, Outcome};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSV manifest with annotation_path, style and gender per utterance.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory.
    #[arg(long, short)]
    out_dir: PathBuf,
    /// Read `<utterance_id>.pitch.csv` from here instead of tracking audio.
    #[arg(long)]
    features_dir: Option<PathBuf>,
    /// Also compare voice quality between styles (needs audio).
    #[arg(long)]
    vq: bool,
    #[command(flatten)]
    pitch: PitchArgs,
    #[command(flatten)]
    histogram: HistogramArgs,
}

#[derive(Serialize)]
struct Inputs<'a> {
    manifest: &'a Path,
    features_dir: Option<&'a Path>,
    vq: bool,
}

#[derive(Serialize)]
struct Separation {
    class_a: String,
    class_b: String,
    /// `None` when the two histograms do not overlap at all.
    bhattacharyya: Option<f64>,
    disjoint: bool,
    a: CohortReport,
    b: CohortReport,
}

#[derive(Serialize)]
struct FlaggedIssue {
    utterance_id: String,
    #[serde(flatten)]
    issue: AnnotationIssue,
}

#[derive(Serialize)]
struct AnalysisPayload {
    durations: Vec<CohortReport>,
    pitch: Vec<CohortReport>,
    pov_separation: Vec<Separation>,
    vq: Option<VqComparison>,
    unknown_phones: Vec<String>,
    annotation_issues: Vec<FlaggedIssue>,
    skipped: Vec<String>,
    failures: Vec<String>,
}

struct Loaded {
    id: String,
    segments: Vec<PhoneSegment>,
    issues: Vec<AnnotationIssue>,
    track: PitchTrack,
    vq: Option<VqReport>,
}

fn load_utterance(row: &ManifestRow, args: &AnalyzeArgs, cfg: &RunConfig) -> Result<Loaded> {
    let id = &row.utterance_id;
    let missing = |what: &str| Error::InvalidConfig(format!("utterance `{id}` has no {what}"));
    row.meta.ok_or_else(|| missing("style"))?;
    let annotations = load_annotations(row.annotation_path.as_ref().ok_or_else(|| missing("annotation_path"))?, id)?;
    let audio = match (&args.features_dir, args.vq) {
        (Some(_), false) => None,
        _ => Some(load_wav(row.audio_path.as_ref().ok_or_else(|| missing("audio_path"))?)?),
    };
    let track = match &args.features_dir {
        Some(dir) => read_pitch_csv(&dir.join(format!("{id}.pitch.csv")))?,
        None => extract_pitch(audio.as_ref().unwrap(), &cfg.pitch)?,
    };
    let vq = match (&audio, args.vq) {
        (Some(a), true) => Some(extract_vq(a, &track, cfg.threshold())?),
        _ => None,
    };
    Ok(Loaded { id: id.clone(), segments: annotations.segments, issues: annotations.issues, track, vq })
}

/// Runs one cohort analysis; an empty cohort is skipped with a note.
fn keep<T>(result: Result<T>, skipped: &mut Vec<String>) -> Result<Option<T>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::EmptyCohort(name)) => {
            eprintln!("warning: cohort `{name}` matched no data; skipped");
            skipped.push(name);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

pub fn analyze(args: AnalyzeArgs, mut cfg: RunConfig) -> Result<Outcome> {
    args.pitch.apply(&mut cfg);
    args.histogram.apply(&mut cfg);
    let cfg = cfg.resolve()?;
    let classes = cfg.phone_table()?;
    let cohorts: Vec<CohortSpec> = cfg.cohorts.iter().map(|c| c.resolve(&classes)).collect::<Result<_>>()?;
    let by_name: BTreeMap<&str, &CohortSpec> = cohorts.iter().map(|c| (c.name.as_str(), c)).collect();
    if by_name.len() != cohorts.len() {
        return Err(Error::InvalidConfig("cohort names must be unique".into()));
    }
    for (a, b) in &cfg.pov_pairs {
        for n in [a, b] {
            if !by_name.contains_key(n.as_str()) {
                return Err(Error::InvalidConfig(format!("POV pair names unknown cohort `{n}`")));
            }
        }
    }
    let rows = load_manifest(&args.manifest)?;
    create_dir(&args.out_dir)?;

    let loaded: Vec<Result<Loaded>> = rows.par_iter().map(|r| load_utterance(r, &args, &cfg)).collect();
    let mut failures = Vec::new();
    let mut metadata = Metadata::new();
    let mut segments = Vec::new();
    let mut tracks = BTreeMap::new();
    let mut vq_reports = BTreeMap::new();
    let mut annotation_issues = Vec::new();
    for (row, l) in rows.iter().zip(loaded) {
        match l {
            Ok(u) => {
                metadata.insert(u.id.clone(), row.meta.unwrap());
                segments.extend(u.segments);
                annotation_issues.extend(u.issues.into_iter().map(|issue| FlaggedIssue { utterance_id: u.id.clone(), issue }));
                if let Some(v) = u.vq {
                    vq_reports.insert(u.id.clone(), v);
                }
                tracks.insert(u.id, u.track);
            }
            Err(e) => failures.push(format!("{}: {e}", row.utterance_id)),
        }
    }

    let unknown_phones = classes.unknown(segments.iter().map(|s| s.label.as_str()));
    if !unknown_phones.is_empty() {
        eprintln!("warning: {} unknown phone symbol(s) excluded: {}", unknown_phones.len(), unknown_phones.join(" "));
        let unknown: BTreeSet<&str> = unknown_phones.iter().map(String::as_str).collect();
        segments.retain(|s| !unknown.contains(s.label.as_str()));
    }

    let mut skipped = Vec::new();
    let mut durations = Vec::new();
    let mut pitch = Vec::new();
    for c in &cohorts {
        if let Some(r) = keep(duration_distribution(&segments, &metadata, c, &cfg.histogram), &mut skipped)? {
            durations.push(r);
        }
        if let Some(r) = keep(pitch_distribution(&segments, &metadata, &tracks, c, &cfg.pitch_histogram, cfg.threshold()), &mut skipped)? {
            pitch.push(r);
        }
    }
    skipped.sort();
    skipped.dedup();
    let mut pov_separation = Vec::new();
    for (a, b) in &cfg.pov_pairs {
        let r = pov_class_separation(&segments, &metadata, &tracks, by_name[a.as_str()], by_name[b.as_str()], &cfg.histogram);
        if let Some((ra, rb, d)) = keep(r, &mut skipped)? {
            pov_separation.push(Separation {
                class_a: a.clone(),
                class_b: b.clone(),
                bhattacharyya: d.is_finite().then_some(d),
                disjoint: d.is_infinite(),
                a: ra,
                b: rb,
            });
        }
    }
    let vq = if args.vq {
        let mut speakers: Vec<SpeakerCohort> = Vec::new();
        for c in &cohorts {
            if !speakers.contains(&c.speakers) {
                speakers.push(c.speakers);
            }
        }
        let named: Vec<(String, SpeakerCohort)> = speakers
            .into_iter()
            .filter(|s| vq_reports.keys().any(|id| s.matches(&metadata[id])))
            .map(|s| (format!("{}_{}", s.style, s.gender), s))
            .collect();
        if named.is_empty() {
            skipped.push("vq".into());
            None
        } else {
            Some(vq_style_comparison(&vq_reports, &metadata, &named)?)
        }
    } else {
        None
    };

    let histograms = |reports: &[CohortReport]| -> Vec<(String, voxsrc::evaluation::HistogramDistribution)> {
        reports.iter().map(|r| (r.cohort.clone(), r.histogram.clone())).collect()
    };
    let write_hist = |name: &str, named: Vec<(String, voxsrc::evaluation::HistogramDistribution)>| {
        let refs: Vec<(&str, &voxsrc::evaluation::HistogramDistribution)> = named.iter().map(|(n, h)| (n.as_str(), h)).collect();
        csv_artifact(&args.out_dir.join(name), |w| write_histogram_csv(w, &refs, &cfg))
    };
    write_hist("durations.csv", histograms(&durations))?;
    write_hist("pitch.csv", histograms(&pitch))?;
    let pov_named: Vec<_> = pov_separation
        .iter()
        .flat_map(|s| {
            let pair = format!("{}/{}", s.class_a, s.class_b);
            [(format!("{pair}:{}", s.class_a), s.a.histogram.clone()), (format!("{pair}:{}", s.class_b), s.b.histogram.clone())]
        })
        .collect();
    write_hist("pov.csv", pov_named)?;
    if let Some(v) = &vq {
        csv_artifact(&args.out_dir.join("vq.csv"), |w| write_vq_comparison_csv(w, v, &cfg))?;
    }
    for s in &pov_separation {
        match s.bhattacharyya {
            Some(d) => println!("D_B({}, {}) = {d:.4}", s.class_a, s.class_b),
            None => println!("D_B({}, {}) = inf (disjoint)", s.class_a, s.class_b),
        }
    }
    let payload = AnalysisPayload { durations, pitch, pov_separation, vq, unknown_phones, annotation_issues, skipped, failures };
    write_artifact(
        &args.out_dir.join("analysis.json"),
        "analyze",
        &cfg,
        Inputs { manifest: &args.manifest, features_dir: args.features_dir.as_deref(), vq: args.vq },
        &payload,
    )?;
    Ok(report_failures(&payload.failures))
}
