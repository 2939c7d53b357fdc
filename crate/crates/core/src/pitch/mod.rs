//! Soft-voicing pitch tracking.
//!
//! Every frame receives a pitch; how confident the tracker is that the frame
//! is voiced is carried separately by the POV feature, which is low for
//! strongly voiced frames. The pipeline is
//!
//! 1. low-pass and resample to the processing rate,
//! 2. per-frame NCCF over integer lags, interpolated onto a log-spaced lag grid,
//! 3. a Viterbi search over the lag grid with a squared log-lag jump penalty,
//! 4. per-frame POV feature, log pitch, mean-normalised log pitch and delta.

mod config;
mod features;
mod nccf;
mod pov;
mod tracker;
mod viterbi;

pub use config::{PitchConfig, LAG_GRID_STEP};
pub use features::{compute_delta, normalize_log_pitch, normalize_track};
pub use nccf::{compute_nccf, LagInterpolator};
pub use pov::{default_voiced_threshold, nccf_to_pov, voicing_probability, DEFAULT_VOICED_NCCF, POV_FEATURE_MAX, POV_FEATURE_MIN};
pub use tracker::extract_pitch;
pub use viterbi::{path_cost, viterbi_pitch, Lattice};

use serde::{Deserialize, Serialize};

/// Per-frame tracker output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchFrame {
    /// Frame centre.
    pub time_s: f64,
    /// Peak normalised cross-correlation at the selected lag, in `[-1, 1]`.
    pub nccf: f64,
    pub pitch_hz: f64,
    /// Low for strongly voiced frames.
    pub pov_feature: f64,
    pub log_pitch: f64,
    pub normalized_log_pitch: f64,
    pub delta_pitch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchTrack {
    pub frames: Vec<PitchFrame>,
    pub config: PitchConfig,
}

impl PitchTrack {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_shift_s(&self) -> f64 {
        self.config.frame_shift_ms / 1000.0
    }

    /// Index of the frame whose centre is closest to `time_s`.
    pub fn nearest_frame(&self, time_s: f64) -> Option<usize> {
        let first = self.frames.first()?.time_s;
        let idx = ((time_s - first) / self.frame_shift_s()).round();
        Some(idx.clamp(0.0, (self.frames.len() - 1) as f64) as usize)
    }

    pub fn is_voiced(&self, index: usize, voiced_threshold: f64) -> bool {
        self.frames[index].pov_feature < voiced_threshold
    }
}
