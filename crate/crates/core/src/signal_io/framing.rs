use serde::{Deserialize, Serialize};

use super::AudioBuffer;
use crate::{Error, Result};

// Absorbs rounding in (D - L) / S when the quotient is an exact integer.
const COUNT_EPS: f64 = 1e-9;

/// Frame length and shift, both in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramingSpec {
    pub frame_length_ms: f64,
    pub frame_shift_ms: f64,
}

impl Default for FramingSpec {
    fn default() -> Self {
        Self {
            frame_length_ms: 25.0,
            frame_shift_ms: 10.0,
        }
    }
}

impl FramingSpec {
    pub fn new(frame_length_ms: f64, frame_shift_ms: f64) -> Result<Self> {
        let spec = Self {
            frame_length_ms,
            frame_shift_ms,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frame_length_ms > 0.0 && self.frame_length_ms.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "frame length must be positive, got {} ms",
                self.frame_length_ms
            )));
        }
        if !(self.frame_shift_ms > 0.0 && self.frame_shift_ms.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "frame shift must be positive, got {} ms",
                self.frame_shift_ms
            )));
        }
        if self.frame_shift_ms > self.frame_length_ms {
            return Err(Error::InvalidConfig(format!(
                "frame shift {} ms exceeds frame length {} ms",
                self.frame_shift_ms, self.frame_length_ms
            )));
        }
        Ok(())
    }

    /// `floor((D - L) / S) + 1` for `D >= L`, otherwise 0.
    pub fn frame_count(&self, duration_ms: f64) -> usize {
        if duration_ms + COUNT_EPS < self.frame_length_ms {
            return 0;
        }
        let q = (duration_ms - self.frame_length_ms) / self.frame_shift_ms;
        (q + COUNT_EPS).floor().max(0.0) as usize + 1
    }

    pub fn frame_start_ms(&self, index: usize) -> f64 {
        index as f64 * self.frame_shift_ms
    }

    pub fn frame_center_s(&self, index: usize) -> f64 {
        (self.frame_start_ms(index) + 0.5 * self.frame_length_ms) / 1000.0
    }

    pub fn frame_length_samples(&self, sample_rate_hz: u32) -> usize {
        ms_to_samples(self.frame_length_ms, sample_rate_hz)
    }

    pub fn frame_start_sample(&self, index: usize, sample_rate_hz: u32) -> usize {
        ms_to_samples(self.frame_start_ms(index), sample_rate_hz)
    }
}

pub(crate) fn ms_to_samples(ms: f64, sample_rate_hz: u32) -> usize {
    (ms * sample_rate_hz as f64 / 1000.0).round() as usize
}

/// Splits audio into frames. Frame `i` starts at `i * frame_shift`. Audio
/// shorter than one frame yields no frames.
pub fn frame_signal<'a>(audio: &'a AudioBuffer, spec: &FramingSpec) -> Result<Vec<&'a [f64]>> {
    spec.validate()?;
    let rate = audio.sample_rate_hz();
    let len = spec.frame_length_samples(rate);
    let count = spec.frame_count(audio.duration_ms());
    let samples = audio.samples();
    Ok((0..count)
        .map(|i| {
            let start = spec.frame_start_sample(i, rate).min(samples.len());
            let end = (start + len).min(samples.len());
            &samples[start..end]
        })
        .collect())
}
