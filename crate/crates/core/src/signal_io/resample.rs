//! Polyphase windowed-sinc sample-rate conversion.
//!
//! The conversion ratio is reduced to `up / down`; output sample `n` sits at
//! input position `n * down / up`, so only `up` distinct fractional offsets
//! (phases) occur and their filter taps are tabulated once.

use super::AudioBuffer;
use crate::{Error, Result};

/// Fraction of the lower Nyquist frequency used as the default cutoff.
pub const DEFAULT_ROLLOFF: f64 = 0.85;
/// Zero crossings of the sinc kept on each side of the centre tap.
const ZERO_CROSSINGS: f64 = 16.0;
const KAISER_BETA: f64 = 8.0;
const MAX_TABULATED_PHASES: u64 = 4096;

#[derive(Debug, Clone)]
pub struct Resampler {
    in_rate: u32,
    out_rate: u32,
    up: u64,
    down: u64,
    cutoff_hz: f64,
    half_width: usize,
    table: Option<Vec<Vec<f64>>>,
}

impl Resampler {
    /// `cutoff_hz` is clamped to `DEFAULT_ROLLOFF` times the lower Nyquist
    /// frequency; pass `None` to use that bound directly.
    pub fn new(in_rate: u32, out_rate: u32, cutoff_hz: Option<f64>) -> Result<Self> {
        if in_rate == 0 || out_rate == 0 {
            return Err(Error::InvalidConfig(format!(
                "sample rates must be positive (got {in_rate} -> {out_rate})"
            )));
        }
        let limit = 0.5 * in_rate.min(out_rate) as f64 * DEFAULT_ROLLOFF;
        let cutoff_hz = match cutoff_hz {
            Some(c) if !(c > 0.0) => {
                return Err(Error::InvalidConfig(format!("cutoff must be positive, got {c}")))
            }
            Some(c) => c.min(limit),
            None => limit,
        };
        let g = gcd(in_rate as u64, out_rate as u64);
        let up = out_rate as u64 / g;
        let down = in_rate as u64 / g;
        let half_width = (ZERO_CROSSINGS * in_rate as f64 / (2.0 * cutoff_hz)).ceil() as usize;
        let mut r = Self {
            in_rate,
            out_rate,
            up,
            down,
            cutoff_hz,
            half_width,
            table: None,
        };
        if up <= MAX_TABULATED_PHASES {
            r.table = Some((0..up).map(|p| r.taps(p)).collect());
        }
        Ok(r)
    }

    pub fn cutoff_hz(&self) -> f64 {
        self.cutoff_hz
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        ((input_len as u128 * self.up as u128 + (self.down as u128 / 2)) / self.down as u128) as usize
    }

    // Taps for input samples base-H+1 ..= base+H at fractional offset phase/up.
    fn taps(&self, phase: u64) -> Vec<f64> {
        let h = self.half_width as f64;
        let frac = phase as f64 / self.up as f64;
        let norm = 2.0 * self.cutoff_hz / self.in_rate as f64;
        let i0_beta = bessel_i0(KAISER_BETA);
        (0..2 * self.half_width)
            .map(|j| {
                let u = h - 1.0 - j as f64 + frac;
                let x = u / h;
                if x.abs() >= 1.0 {
                    return 0.0;
                }
                let window = bessel_i0(KAISER_BETA * (1.0 - x * x).sqrt()) / i0_beta;
                norm * sinc(norm * u) * window
            })
            .collect()
    }

    pub fn process(&self, input: &[f64]) -> Vec<f64> {
        let n_out = self.output_len(input.len());
        let hw = self.half_width as i64;
        let mut out = Vec::with_capacity(n_out);
        let mut scratch;
        for n in 0..n_out as u64 {
            let pos = n * self.down;
            let base = (pos / self.up) as i64;
            let phase = pos % self.up;
            let taps: &[f64] = match &self.table {
                Some(t) => &t[phase as usize],
                None => {
                    scratch = self.taps(phase);
                    &scratch
                }
            };
            let first = base - hw + 1;
            let mut acc = 0.0;
            for (j, &w) in taps.iter().enumerate() {
                let k = first + j as i64;
                if k >= 0 && (k as usize) < input.len() {
                    acc += w * input[k as usize];
                }
            }
            out.push(acc);
        }
        out
    }

    pub fn apply(&self, audio: &AudioBuffer) -> Result<AudioBuffer> {
        if audio.sample_rate_hz() != self.in_rate {
            return Err(Error::InvalidConfig(format!(
                "resampler built for {} Hz input, got {} Hz",
                self.in_rate,
                audio.sample_rate_hz()
            )));
        }
        AudioBuffer::new(self.process(audio.samples()), self.out_rate)
    }
}

/// Converts `audio` to `target_hz`. Identical rates return the input
/// unchanged; both down- and upsampling are supported.
pub fn resample(audio: &AudioBuffer, target_hz: u32) -> Result<AudioBuffer> {
    if target_hz == 0 {
        return Err(Error::InvalidConfig("target sample rate must be positive".into()));
    }
    if target_hz == audio.sample_rate_hz() {
        return Ok(audio.clone());
    }
    Resampler::new(audio.sample_rate_hz(), target_hz, None)?.apply(audio)
}

/// Converts to `target_hz` with an explicit anti-aliasing cutoff. Unlike
/// [`resample`], equal rates still run the low-pass filter.
pub fn resample_with_cutoff(audio: &AudioBuffer, target_hz: u32, cutoff_hz: f64) -> Result<AudioBuffer> {
    Resampler::new(audio.sample_rate_hz(), target_hz, Some(cutoff_hz))?.apply(audio)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half = 0.5 * x;
    for k in 1..64 {
        term *= half / k as f64;
        let t2 = term * term;
        sum += t2;
        if t2 < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(freq: f64, rate: u32, secs: f64) -> AudioBuffer {
        let n = (secs * rate as f64) as usize;
        AudioBuffer::new(
            (0..n).map(|i| (2.0 * PI * freq * i as f64 / rate as f64).sin()).collect(),
            rate,
        )
        .unwrap()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    // Plain O(n^2) DFT magnitude peak, independent of the resampler.
    fn dominant_bin(x: &[f64]) -> usize {
        let n = x.len();
        (1..n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, v) in x.iter().enumerate() {
                    let a = 2.0 * PI * (k * t) as f64 / n as f64;
                    re += v * a.cos();
                    im -= v * a.sin();
                }
                (k, re * re + im * im)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0
    }

    #[test]
    fn identity_is_unchanged() {
        let a = sine(220.0, 16000, 0.1);
        assert_eq!(resample(&a, 16000).unwrap(), a);
    }

    #[test]
    fn tone_frequency_survives_downsampling() {
        let a = sine(220.0, 16000, 0.5);
        let b = resample(&a, 4000).unwrap();
        assert_eq!(b.sample_rate_hz(), 4000);
        assert!((b.len() as i64 - 2000).abs() <= 1);
        // bin spacing = 4000 / 2000 = 2 Hz
        let bin = dominant_bin(b.samples());
        assert!((bin as i64 - 110).abs() <= 1, "bin {bin}");
    }

    #[test]
    fn out_of_band_tone_is_attenuated() {
        let a = sine(3500.0, 16000, 1.0);
        let b = resample(&a, 4000).unwrap();
        // ignore filter start-up at the edges
        let interior = &b.samples()[100..b.len() - 100];
        let ratio = rms(interior) / rms(a.samples());
        assert!(ratio < 0.01, "residual ratio {ratio}");
    }

    #[test]
    fn round_trip_preserves_tone() {
        let a = sine(300.0, 16000, 0.25);
        let down = resample(&a, 6000).unwrap();
        let back = resample(&down, 16000).unwrap();
        assert!((back.len() as i64 - a.len() as i64).abs() <= 1);
        let n = 1000;
        let bin_a = dominant_bin(&a.samples()[1000..1000 + n]);
        let bin_b = dominant_bin(&back.samples()[1000..1000 + n]);
        assert!((bin_a as i64 - bin_b as i64).abs() <= 1);
    }

    #[test]
    fn odd_ratio_and_upsampling() {
        let a = sine(440.0, 44100, 0.2);
        let b = resample(&a, 4000).unwrap();
        assert!((b.duration_s() - a.duration_s()).abs() <= 1.0 / 4000.0);
        let c = resample(&sine(440.0, 8000, 0.2), 22050).unwrap();
        assert!((c.duration_s() - 0.2).abs() <= 1.0 / 22050.0);
        // passband gain close to unity
        let interior = &c.samples()[500..c.len() - 500];
        assert!((rms(interior) - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.01);
    }

    #[test]
    fn zero_target_is_error() {
        assert!(resample(&sine(100.0, 8000, 0.01), 0).is_err());
    }
}
