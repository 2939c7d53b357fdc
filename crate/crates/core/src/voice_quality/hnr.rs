use serde::{Deserialize, Serialize};

use crate::pitch::PitchTrack;
use crate::signal_io::AudioBuffer;
use crate::{Error, Result};

pub const HNR_CEILING_DB: f64 = 60.0;
pub const HNR_FLOOR_DB: f64 = -20.0;
/// Analysis windows span at least this many periods.
const PERIODS_PER_WINDOW: f64 = 3.0;
/// Lags searched around the tracked period, as a fraction of it.
const LAG_SEARCH: f64 = 0.1;

/// `10 log10(r / (1 - r))`, clamped to `[HNR_FLOOR_DB, HNR_CEILING_DB]`.
pub fn hnr_from_correlation(r: f64) -> f64 {
    if r >= 1.0 {
        return HNR_CEILING_DB;
    }
    if r <= 0.0 {
        return HNR_FLOOR_DB;
    }
    (10.0 * (r / (1.0 - r)).log10()).clamp(HNR_FLOOR_DB, HNR_CEILING_DB)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameHnr {
    pub time_s: f64,
    pub correlation: f64,
    pub hnr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HnrResult {
    pub frames: Vec<FrameHnr>,
    pub mean_db: f64,
}

/// Per-voiced-frame HNR from the normalised autocorrelation at the tracked
/// period (refined to the best lag within 10% of it), and the mean over
/// voiced frames whose analysis window lies inside the signal.
pub fn hnr(audio: &AudioBuffer, track: &PitchTrack, voiced_threshold: f64) -> Result<HnrResult> {
    let rate = audio.sample_rate_hz() as f64;
    let x = audio.samples();
    let frame_len = track.config.framing().frame_length_samples(audio.sample_rate_hz());
    let mut frames = Vec::new();
    for (i, f) in track.frames.iter().enumerate() {
        if !track.is_voiced(i, voiced_threshold) {
            continue;
        }
        let period = rate / f.pitch_hz;
        if let Some(r) = correlation_at_period(x, f.time_s * rate, period, frame_len) {
            frames.push(FrameHnr {
                time_s: f.time_s,
                correlation: r,
                hnr_db: hnr_from_correlation(r),
            });
        }
    }
    if frames.is_empty() {
        return Err(Error::Undefined("HNR needs at least one voiced frame".into()));
    }
    let mean_db = frames.iter().map(|f| f.hnr_db).sum::<f64>() / frames.len() as f64;
    Ok(HnrResult { frames, mean_db })
}

fn correlation_at_period(x: &[f64], centre: f64, period: f64, frame_len: usize) -> Option<f64> {
    let window = frame_len.max((PERIODS_PER_WINDOW * period).ceil() as usize);
    let lag_lo = ((1.0 - LAG_SEARCH) * period).floor().max(1.0) as usize;
    let lag_hi = ((1.0 + LAG_SEARCH) * period).ceil() as usize + 1;
    let span = window + lag_hi;
    // frames whose centred window leaves the signal are skipped, not shifted
    let start = (centre - 0.5 * span as f64).round();
    if start < 0.0 || start as usize + span > x.len() {
        return None;
    }
    let start = start as usize;
    let seg = &x[start..start + span];
    let mean = seg.iter().sum::<f64>() / span as f64;
    let w: Vec<f64> = seg.iter().map(|v| v - mean).collect();
    let a = &w[..window];
    let ea: f64 = a.iter().map(|v| v * v).sum();
    let values: Vec<f64> = (lag_lo - 1..=lag_hi)
        .map(|lag| {
            let b = &w[lag..lag + window];
            let eb: f64 = b.iter().map(|v| v * v).sum();
            let d: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
            let den = (ea * eb).sqrt();
            if den > 0.0 {
                d / den
            } else {
                0.0
            }
        })
        .collect();
    let mut best = 1;
    for k in 1..values.len() - 1 {
        if values[k] > values[best] {
            best = k;
        }
    }
    let (p, q, r) = (values[best - 1], values[best], values[best + 1]);
    let curvature = p - 2.0 * q + r;
    let peak = if curvature < 0.0 && q >= p && q >= r {
        let off = (0.5 * (p - r) / curvature).clamp(-0.5, 0.5);
        q - 0.25 * (p - r) * off
    } else {
        q
    };
    Some(peak)
}
