use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::annotations::PhoneSegment;
use super::cohort::{CohortSpec, Metadata, SpeakerCohort, UtteranceMeta};
use super::stats::{Spread, Summary};
use crate::evaluation::{bhattacharyya, HistogramDistribution, HistogramSpec};
use crate::pitch::{PitchFrame, PitchTrack};
use crate::voice_quality::VqReport;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortReport {
    pub cohort: String,
    /// Segments or frames that entered the histogram.
    pub count: usize,
    pub summary: Summary,
    pub histogram: HistogramDistribution,
}

fn meta_of<'a>(metadata: &'a Metadata, id: &str) -> Result<&'a UtteranceMeta> {
    metadata
        .get(id)
        .ok_or_else(|| Error::InvalidConfig(format!("no style/gender metadata for utterance `{id}`")))
}

fn matching<'a>(segments: &'a [PhoneSegment], metadata: &Metadata, cohort: &CohortSpec) -> Result<Vec<&'a PhoneSegment>> {
    let mut out = Vec::new();
    for s in segments {
        if cohort.matches(meta_of(metadata, &s.utterance_id)?, &s.label) {
            out.push(s);
        }
    }
    Ok(out)
}

fn frames_in<'a>(track: &'a PitchTrack, seg: &PhoneSegment) -> &'a [PitchFrame] {
    let lo = track.frames.partition_point(|f| f.time_s < seg.start_s);
    let hi = track.frames.partition_point(|f| f.time_s < seg.end_s);
    &track.frames[lo..hi.max(lo)]
}

fn frame_values(
    segments: &[PhoneSegment],
    metadata: &Metadata,
    tracks: &BTreeMap<String, PitchTrack>,
    cohort: &CohortSpec,
    pick: impl Fn(&PitchFrame) -> Option<f64>,
) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for seg in matching(segments, metadata, cohort)? {
        let track = tracks
            .get(&seg.utterance_id)
            .ok_or_else(|| Error::InvalidConfig(format!("no pitch track for utterance `{}`", seg.utterance_id)))?;
        values.extend(frames_in(track, seg).iter().filter_map(&pick));
    }
    if values.is_empty() {
        return Err(Error::EmptyCohort(cohort.name.clone()));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn report(cohort: &str, values: &[f64], edges: Vec<f64>) -> Result<CohortReport> {
    Ok(CohortReport {
        cohort: cohort.to_string(),
        count: values.len(),
        summary: Summary::of(values).ok_or_else(|| Error::EmptyCohort(cohort.to_string()))?,
        histogram: HistogramDistribution::from_samples(values, edges)?,
    })
}

/// Histogram of segment durations in seconds.
pub fn duration_distribution(segments: &[PhoneSegment], metadata: &Metadata, cohort: &CohortSpec, bins: &HistogramSpec) -> Result<CohortReport> {
    let mut values: Vec<f64> = matching(segments, metadata, cohort)?.iter().map(|s| s.duration_s()).collect();
    if values.is_empty() {
        return Err(Error::EmptyCohort(cohort.name.clone()));
    }
    values.sort_by(f64::total_cmp);
    report(&cohort.name, &values, bins.edges(&[&values])?)
}

/// Histogram of the pitch of voiced frames (POV feature below
/// `voiced_threshold`) whose centres fall inside matching segments.
pub fn pitch_distribution(
    segments: &[PhoneSegment],
    metadata: &Metadata,
    tracks: &BTreeMap<String, PitchTrack>,
    cohort: &CohortSpec,
    bins: &HistogramSpec,
    voiced_threshold: f64,
) -> Result<CohortReport> {
    let values = frame_values(segments, metadata, tracks, cohort, |f| {
        (f.pov_feature < voiced_threshold).then_some(f.pitch_hz)
    })?;
    report(&cohort.name, &values, bins.edges(&[&values])?)
}

/// POV-feature histograms of all frames inside each cohort's segments,
/// binned over the pooled range, and their Bhattacharyya distance.
pub fn pov_class_separation(
    segments: &[PhoneSegment],
    metadata: &Metadata,
    tracks: &BTreeMap<String, PitchTrack>,
    class_a: &CohortSpec,
    class_b: &CohortSpec,
    bins: &HistogramSpec,
) -> Result<(CohortReport, CohortReport, f64)> {
    let a = frame_values(segments, metadata, tracks, class_a, |f| Some(f.pov_feature))?;
    let b = frame_values(segments, metadata, tracks, class_b, |f| Some(f.pov_feature))?;
    let edges = bins.edges(&[&a, &b])?;
    let ra = report(&class_a.name, &a, edges.clone())?;
    let rb = report(&class_b.name, &b, edges)?;
    let d = bhattacharyya(&ra.histogram, &rb.histogram)?;
    Ok((ra, rb, d))
}

/// Per-cohort spread of each measure; `None` where no utterance in the
/// cohort has the measure defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqCohortStats {
    pub cohort: String,
    pub n_utterances: usize,
    pub jitta_s: Option<Spread>,
    pub rap: Option<Spread>,
    pub shimmer: Option<Spread>,
    pub hnr_db: Option<Spread>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqComparison {
    pub cohorts: Vec<VqCohortStats>,
}

impl VqComparison {
    pub const MEASURES: [&'static str; 4] = ["jitta_s", "rap", "shimmer", "hnr_db"];

    /// Side-by-side view: `(measure, one spread per cohort)`.
    pub fn table(&self) -> Vec<(&'static str, Vec<Option<Spread>>)> {
        Self::MEASURES
            .iter()
            .map(|&m| {
                let row = self
                    .cohorts
                    .iter()
                    .map(|c| match m {
                        "jitta_s" => c.jitta_s,
                        "rap" => c.rap,
                        "shimmer" => c.shimmer,
                        _ => c.hnr_db,
                    })
                    .collect();
                (m, row)
            })
            .collect()
    }
}

/// Groups utterance-level reports by speaker cohort.
pub fn vq_style_comparison(reports: &BTreeMap<String, VqReport>, metadata: &Metadata, cohorts: &[(String, SpeakerCohort)]) -> Result<VqComparison> {
    let mut out = Vec::with_capacity(cohorts.len());
    for (name, cohort) in cohorts {
        let mut members = Vec::new();
        for (id, r) in reports {
            if cohort.matches(meta_of(metadata, id)?) {
                members.push(r);
            }
        }
        if members.is_empty() {
            return Err(Error::EmptyCohort(name.clone()));
        }
        let spread = |f: fn(&VqReport) -> Option<f64>| {
            let v: Vec<f64> = members.iter().filter_map(|r| f(r)).collect();
            Spread::of(&v)
        };
        out.push(VqCohortStats {
            cohort: name.clone(),
            n_utterances: members.len(),
            jitta_s: spread(|r| r.jitta_s),
            rap: spread(|r| r.rap),
            shimmer: spread(|r| r.shimmer),
            hnr_db: spread(|r| r.hnr_db),
        });
    }
    Ok(VqComparison { cohorts: out })
}
