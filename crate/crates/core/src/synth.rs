//! Deterministic test signals: tones, vibrato, glottal-like pulse trains and
//! seeded noise.

use std::f64::consts::PI;

use rand::{rngs::StdRng, SeedableRng};
use rand_distr::{Distribution, Normal};

use crate::signal_io::AudioBuffer;

/// Typical singing vibrato rates, in Hz.
pub const VIBRATO_RATE_RANGE_HZ: (f64, f64) = (5.5, 7.5);
/// Mean female F0 when singing and when speaking, in Hz.
pub const FEMALE_SUNG_MEAN_F0_HZ: f64 = 342.0;
pub const FEMALE_SPOKEN_MEAN_F0_HZ: f64 = 237.0;

fn buffer(samples: Vec<f64>, rate: u32) -> AudioBuffer {
    AudioBuffer::new(samples, rate).expect("synthesised audio has a positive rate")
}

fn sample_count(duration_s: f64, rate: u32) -> usize {
    (duration_s * rate as f64).round() as usize
}

pub fn sine(freq_hz: f64, duration_s: f64, rate: u32, amplitude: f64) -> AudioBuffer {
    let n = sample_count(duration_s, rate);
    buffer(
        (0..n)
            .map(|i| amplitude * (2.0 * PI * freq_hz * i as f64 / rate as f64).sin())
            .collect(),
        rate,
    )
}

/// Sinusoidal frequency modulation of a carrier by `depth_semitones` at
/// `rate_hz`.
#[derive(Debug, Clone, Copy)]
pub struct Vibrato {
    pub carrier_hz: f64,
    pub rate_hz: f64,
    pub depth_semitones: f64,
}

impl Vibrato {
    pub fn instantaneous_hz(&self, t: f64) -> f64 {
        self.carrier_hz * 2f64.powf(self.depth_semitones / 12.0 * (2.0 * PI * self.rate_hz * t).sin())
    }

    /// Phase accumulated by trapezoidal integration of the analytic
    /// instantaneous frequency at 16 sub-steps per sample.
    pub fn render(&self, duration_s: f64, rate: u32, amplitude: f64) -> AudioBuffer {
        let n = sample_count(duration_s, rate);
        let dt = 1.0 / rate as f64;
        let sub = 16;
        let h = dt / sub as f64;
        let mut phase = 0.0f64;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(amplitude * phase.sin());
            let t0 = i as f64 * dt;
            for s in 0..sub {
                let a = t0 + s as f64 * h;
                phase += PI * h * (self.instantaneous_hz(a) + self.instantaneous_hz(a + h));
            }
        }
        buffer(out, rate)
    }
}

/// Gaussian pulses of width `sigma_s` placed at cumulative sums of `periods_s`
/// (the first pulse at `start_s`), with per-pulse `amplitudes` cycled as
/// needed.
pub fn pulse_train(
    start_s: f64,
    periods_s: &[f64],
    amplitudes: &[f64],
    sigma_s: f64,
    duration_s: f64,
    rate: u32,
) -> AudioBuffer {
    assert!(!periods_s.is_empty() && !amplitudes.is_empty());
    let n = sample_count(duration_s, rate);
    let mut out = vec![0.0; n];
    let reach = (6.0 * sigma_s * rate as f64).ceil() as i64;
    let mut t = start_s;
    let mut k = 0;
    while t < duration_s + 6.0 * sigma_s {
        let amp = amplitudes[k % amplitudes.len()];
        let centre = t * rate as f64;
        let c = centre.round() as i64;
        for i in (c - reach).max(0)..=(c + reach).min(n as i64 - 1) {
            let d = (i as f64 - centre) / (sigma_s * rate as f64);
            out[i as usize] += amp * (-0.5 * d * d).exp();
        }
        t += periods_s[k % periods_s.len()];
        k += 1;
    }
    buffer(out, rate)
}

/// Constant-rate pulse train with unit amplitude and 0.25 ms pulses.
pub fn periodic_pulses(f0_hz: f64, duration_s: f64, rate: u32) -> AudioBuffer {
    pulse_train(0.005, &[1.0 / f0_hz], &[1.0], 0.25e-3, duration_s, rate)
}

pub fn white_noise(n: usize, std_dev: f64, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let dist = Normal::new(0.0, std_dev).expect("finite standard deviation");
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

pub fn noise(duration_s: f64, rate: u32, std_dev: f64, seed: u64) -> AudioBuffer {
    buffer(white_noise(sample_count(duration_s, rate), std_dev, seed), rate)
}

/// Removes the mean and adds white noise so that the ratio of signal power
/// to noise power is `snr_db`.
pub fn add_noise_at_snr(audio: &AudioBuffer, snr_db: f64, seed: u64) -> AudioBuffer {
    let x = audio.samples();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let centred: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let power = centred.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    let std_dev = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let noise = white_noise(x.len(), std_dev, seed);
    buffer(
        centred.iter().zip(&noise).map(|(a, b)| a + b).collect(),
        audio.sample_rate_hz(),
    )
}

/// Concatenates buffers of the same rate.
pub fn concat(parts: &[AudioBuffer]) -> AudioBuffer {
    let rate = parts.first().map(|p| p.sample_rate_hz()).unwrap_or(16000);
    assert!(parts.iter().all(|p| p.sample_rate_hz() == rate), "mixed sample rates");
    buffer(parts.iter().flat_map(|p| p.samples().iter().copied()).collect(), rate)
}

pub fn silence(duration_s: f64, rate: u32) -> AudioBuffer {
    buffer(vec![0.0; sample_count(duration_s, rate)], rate)
}
