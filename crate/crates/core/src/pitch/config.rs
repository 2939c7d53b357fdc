use serde::{Deserialize, Serialize};

use crate::signal_io::FramingSpec;
use crate::{Error, Result};

/// Ratio between neighbouring lags of the Viterbi search grid, as a
/// log-lag increment (about 8.7 cents).
pub const LAG_GRID_STEP: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PitchConfig {
    pub min_f0_hz: f64,
    pub max_f0_hz: f64,
    pub lowpass_cutoff_hz: f64,
    pub frame_shift_ms: f64,
    pub frame_length_ms: f64,
    /// Weight of the squared log-lag jump between consecutive frames.
    pub penalty_factor: f64,
    /// Added to the NCCF denominator of the search lattice, relative to the
    /// squared mean frame energy of the utterance. Quiet frames lose
    /// correlation so the search interpolates through them.
    pub nccf_ballast: f64,
    pub normalization_window_frames: usize,
    pub delta_context_frames: usize,
    /// Lower bound on the internal rate; raised automatically so the
    /// low-pass cutoff stays below 0.8 of the processing Nyquist frequency.
    pub processing_rate_hz: u32,
    /// Linear preference for short lags: lattice scores are scaled by
    /// `1 - lag_weight * lag / max_lag`. Breaks ties between a period and its
    /// multiples.
    pub lag_weight: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            min_f0_hz: 50.0,
            max_f0_hz: 1000.0,
            lowpass_cutoff_hz: 1500.0,
            frame_shift_ms: 10.0,
            frame_length_ms: 25.0,
            penalty_factor: 0.1,
            nccf_ballast: 0.01,
            normalization_window_frames: 151,
            delta_context_frames: 2,
            processing_rate_hz: 4000,
            lag_weight: 0.3,
        }
    }
}

impl PitchConfig {
    /// Settings used for spoken speech before re-tuning for singing.
    pub fn speech_defaults() -> Self {
        Self {
            max_f0_hz: 400.0,
            lowpass_cutoff_hz: 1000.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.min_f0_hz > 0.0 && self.min_f0_hz.is_finite()) {
            return bad(format!("min_f0_hz must be positive, got {}", self.min_f0_hz));
        }
        if !(self.max_f0_hz > self.min_f0_hz && self.max_f0_hz.is_finite()) {
            return bad(format!(
                "max_f0_hz ({}) must exceed min_f0_hz ({})",
                self.max_f0_hz, self.min_f0_hz
            ));
        }
        if !(self.lowpass_cutoff_hz >= self.max_f0_hz && self.lowpass_cutoff_hz.is_finite()) {
            return bad(format!(
                "lowpass_cutoff_hz ({}) must be at least max_f0_hz ({})",
                self.lowpass_cutoff_hz, self.max_f0_hz
            ));
        }
        self.framing().validate()?;
        if !(self.penalty_factor >= 0.0 && self.penalty_factor.is_finite()) {
            return bad(format!("penalty_factor must be non-negative, got {}", self.penalty_factor));
        }
        if !(self.nccf_ballast >= 0.0 && self.nccf_ballast.is_finite()) {
            return bad(format!("nccf_ballast must be non-negative, got {}", self.nccf_ballast));
        }
        if self.normalization_window_frames == 0 || self.normalization_window_frames.is_multiple_of(2) {
            return bad(format!(
                "normalization_window_frames must be odd and positive, got {}",
                self.normalization_window_frames
            ));
        }
        if self.delta_context_frames == 0 {
            return bad("delta_context_frames must be at least 1".into());
        }
        if self.processing_rate_hz == 0 {
            return bad("processing_rate_hz must be positive".into());
        }
        if !(0.0..1.0).contains(&self.lag_weight) {
            return bad(format!("lag_weight must be in [0, 1), got {}", self.lag_weight));
        }
        let rate = self.effective_processing_rate() as f64;
        if rate / self.max_f0_hz < 2.0 {
            return bad(format!(
                "max_f0_hz {} leaves fewer than two samples per period at {} Hz",
                self.max_f0_hz, rate
            ));
        }
        Ok(())
    }

    pub fn framing(&self) -> FramingSpec {
        FramingSpec {
            frame_length_ms: self.frame_length_ms,
            frame_shift_ms: self.frame_shift_ms,
        }
    }

    /// `max(processing_rate_hz, 2.5 * lowpass_cutoff_hz rounded up to 1 kHz)`.
    pub fn effective_processing_rate(&self) -> u32 {
        let needed = ((2.5 * self.lowpass_cutoff_hz) / 1000.0).ceil() as u32 * 1000;
        self.processing_rate_hz.max(needed)
    }

    /// Log-spaced candidate lags (in samples at the processing rate) from
    /// `rate / max_f0` to `rate / min_f0`.
    pub fn lag_grid(&self) -> Vec<f64> {
        let rate = self.effective_processing_rate() as f64;
        let min_lag = rate / self.max_f0_hz;
        let max_lag = rate / self.min_f0_hz;
        let n = ((max_lag / min_lag).ln() / (1.0 + LAG_GRID_STEP).ln()).floor() as usize + 1;
        (0..n)
            .map(|k| min_lag * (1.0 + LAG_GRID_STEP).powi(k as i32))
            .collect()
    }
}
