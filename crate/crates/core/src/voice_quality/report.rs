use serde::{Deserialize, Serialize};

use super::cycles::{detect_cycles, CycleSequence};
use super::hnr::{hnr, HnrResult};
use super::perturbation::{jitta, rap, shimmer};
use crate::pitch::PitchTrack;
use crate::signal_io::AudioBuffer;
use crate::{Error, Result};

/// Span of the sliding window behind the per-frame stream.
pub const VQ_WINDOW_S: f64 = 0.1;
const MIN_WINDOW_CYCLES: usize = 3;

/// Utterance-level voice quality. `None` (JSON `null`) marks a measure that
/// is undefined for the utterance, e.g. too few cycles or no voiced frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqReport {
    pub jitta_s: Option<f64>,
    pub rap: Option<f64>,
    pub shimmer: Option<f64>,
    pub hnr_db: Option<f64>,
    pub n_cycles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqFrame {
    pub time_s: f64,
    pub jitta_s: Option<f64>,
    pub rap: Option<f64>,
    pub shimmer: Option<f64>,
    pub hnr_db: Option<f64>,
}

fn defined(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn report_from(cycles: &CycleSequence, hnr: Option<&HnrResult>) -> Result<VqReport> {
    Ok(VqReport {
        jitta_s: defined(jitta(cycles))?,
        rap: defined(rap(cycles))?,
        shimmer: defined(shimmer(cycles))?,
        hnr_db: hnr.map(|h| h.mean_db),
        n_cycles: cycles.n_cycles(),
    })
}

pub fn extract_vq(audio: &AudioBuffer, track: &PitchTrack, voiced_threshold: f64) -> Result<VqReport> {
    let cycles = detect_cycles(audio, track, voiced_threshold)?;
    let hnr = defined_hnr(audio, track, voiced_threshold)?;
    report_from(&cycles, hnr.as_ref())
}

fn defined_hnr(audio: &AudioBuffer, track: &PitchTrack, voiced_threshold: f64) -> Result<Option<HnrResult>> {
    match hnr(audio, track, voiced_threshold) {
        Ok(h) => Ok(Some(h)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Utterance report plus one row per pitch frame. Each row measures the
/// cycles starting inside a [`VQ_WINDOW_S`] window centred on the frame;
/// windows with fewer than three cycles (or an undefined measure) carry the
/// utterance value instead.
pub fn extract_vq_stream(
    audio: &AudioBuffer,
    track: &PitchTrack,
    voiced_threshold: f64,
) -> Result<(VqReport, Vec<VqFrame>)> {
    let cycles = detect_cycles(audio, track, voiced_threshold)?;
    let hnr = defined_hnr(audio, track, voiced_threshold)?;
    let report = report_from(&cycles, hnr.as_ref())?;
    let half = 0.5 * VQ_WINDOW_S;
    let stream = track
        .frames
        .iter()
        .map(|f| {
            let (t0, t1) = (f.time_s - half, f.time_s + half);
            let local = cycles.window(t0, t1);
            let (mut j, mut r, mut s) = (report.jitta_s, report.rap, report.shimmer);
            if local.n_cycles() >= MIN_WINDOW_CYCLES {
                j = jitta(&local).ok().or(j);
                r = rap(&local).ok().or(r);
                s = shimmer(&local).ok().or(s);
            }
            let h = hnr
                .as_ref()
                .and_then(|h| {
                    let (sum, n) = h
                        .frames
                        .iter()
                        .filter(|fr| fr.time_s >= t0 && fr.time_s < t1)
                        .fold((0.0, 0usize), |(s, n), fr| (s + fr.hnr_db, n + 1));
                    (n > 0).then(|| sum / n as f64)
                })
                .or(report.hnr_db);
            VqFrame {
                time_s: f.time_s,
                jitta_s: j,
                rap: r,
                shimmer: s,
                hnr_db: h,
            }
        })
        .collect();
    Ok((report, stream))
}
