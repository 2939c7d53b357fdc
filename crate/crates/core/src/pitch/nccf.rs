use std::ops::RangeInclusive;

use crate::{Error, Result};

/// Normalised cross-correlation of a `window_len` window at the start of
/// `segment` with its copy shifted by each lag:
///
/// `nccf(l) = sum w[i] w[i+l] / sqrt(e(0) e(l) + ballast)`
///
/// where `w` is the segment with its mean removed and `e(l)` is the energy
/// of the window starting at `l`. Values lie in `[-1, 1]`.
pub fn compute_nccf(
    segment: &[f64],
    window_len: usize,
    lags: RangeInclusive<usize>,
    ballast: f64,
) -> Result<Vec<f64>> {
    if lags.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "empty lag range {}..={}",
            lags.start(),
            lags.end()
        )));
    }
    if window_len == 0 {
        return Err(Error::InvalidConfig("NCCF window must be non-empty".into()));
    }
    if !(ballast >= 0.0) {
        return Err(Error::InvalidConfig(format!("ballast must be non-negative, got {ballast}")));
    }
    if segment.len() < window_len + lags.end() {
        return Err(Error::Domain(format!(
            "segment of {} samples too short for window {} and lag {}",
            segment.len(),
            window_len,
            lags.end()
        )));
    }
    let parts = inner_products(segment, window_len, lags);
    Ok(parts.normalize(ballast))
}

/// Raw inner products and energies behind an NCCF, so that several ballast
/// settings can share one pass over the samples.
pub(crate) struct NccfParts {
    pub(crate) dot: Vec<f64>,
    pub(crate) e0: f64,
    pub(crate) e_lag: Vec<f64>,
}

impl NccfParts {
    pub(crate) fn normalize(&self, ballast: f64) -> Vec<f64> {
        self.dot
            .iter()
            .zip(&self.e_lag)
            .map(|(&d, &el)| {
                let den = (self.e0 * el + ballast).sqrt();
                if den > 0.0 {
                    (d / den).clamp(-1.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

pub(crate) fn inner_products(segment: &[f64], window_len: usize, lags: RangeInclusive<usize>) -> NccfParts {
    let used = &segment[..window_len + lags.end()];
    let mean = used.iter().sum::<f64>() / used.len() as f64;
    let w: Vec<f64> = used.iter().map(|s| s - mean).collect();
    let head = &w[..window_len];
    let e0 = head.iter().map(|v| v * v).sum::<f64>();

    let first = *lags.start();
    let mut e = w[first..first + window_len].iter().map(|v| v * v).sum::<f64>();
    let mut dot = Vec::with_capacity(lags.clone().count());
    let mut e_lag = Vec::with_capacity(dot.capacity());
    for lag in lags {
        if lag > first {
            // slide the energy window by one sample
            let out = w[lag - 1];
            let inn = w[lag + window_len - 1];
            e += inn * inn - out * out;
            e = e.max(0.0);
        }
        let d = head.iter().zip(&w[lag..lag + window_len]).map(|(a, b)| a * b).sum::<f64>();
        dot.push(d);
        e_lag.push(e);
    }
    NccfParts { dot, e0, e_lag }
}

/// Band-limited interpolation of a function sampled at integer lags
/// `0, 1, 2, ...` onto fractional target lags, with a Hann-windowed sinc.
/// Negative lags are mirrored, since correlation is even in the lag.
#[derive(Debug, Clone)]
pub struct LagInterpolator {
    taps: Vec<(i64, Vec<f64>)>,
    required_len: usize,
}

impl LagInterpolator {
    pub const HALF_WIDTH: usize = 8;

    pub fn new(targets: &[f64]) -> Self {
        let hw = Self::HALF_WIDTH as i64;
        let mut required_len = 0usize;
        let taps = targets
            .iter()
            .map(|&t| {
                let base = t.floor() as i64;
                let first = base - hw + 1;
                let weights: Vec<f64> = (0..2 * hw)
                    .map(|j| {
                        let u = t - (first + j) as f64;
                        let x = u / hw as f64;
                        if x.abs() >= 1.0 {
                            return 0.0;
                        }
                        let window = 0.5 * (1.0 + (std::f64::consts::PI * x).cos());
                        sinc(u) * window
                    })
                    .collect();
                required_len = required_len.max((first + 2 * hw) as usize);
                (first, weights)
            })
            .collect();
        Self { taps, required_len }
    }

    /// Number of integer-lag samples (from lag 0) the interpolator reads.
    pub fn required_len(&self) -> usize {
        self.required_len
    }

    pub fn interpolate(&self, values: &[f64]) -> Vec<f64> {
        debug_assert!(values.len() >= self.required_len);
        self.taps
            .iter()
            .map(|(first, w)| {
                w.iter()
                    .enumerate()
                    .map(|(j, wj)| wj * values[(first + j as i64).unsigned_abs() as usize])
                    .sum::<f64>()
            })
            .collect()
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, SeedableRng};
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    #[test]
    fn sine_correlates_at_its_period() {
        let seg: Vec<f64> = (0..200).map(|i| (2.0 * PI * 200.0 * i as f64 / 4000.0).sin()).collect();
        let v = compute_nccf(&seg, 100, 4..=80, 0.0).unwrap();
        assert!(v[20 - 4] >= 0.99);
        assert!(v[10 - 4] < -0.99);
        assert!(v.iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn white_noise_rarely_correlates() {
        let mut rng = StdRng::seed_from_u64(7);
        let trials = 1000;
        let mut below = 0;
        for _ in 0..trials {
            let seg: Vec<f64> = (0..180).map(|_| StandardNormal.sample(&mut rng)).collect();
            let v = compute_nccf(&seg, 100, 4..=80, 0.0).unwrap();
            if v.iter().cloned().fold(f64::MIN, f64::max) < 0.6 {
                below += 1;
            }
        }
        assert!(below as f64 / trials as f64 >= 0.99, "{below}/{trials}");
    }

    #[test]
    fn zero_window_with_ballast_is_zero() {
        let v = compute_nccf(&[0.0; 200], 100, 0..=80, 1e-3).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
        let v = compute_nccf(&[0.0; 200], 100, 0..=80, 0.0).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_bad_ranges() {
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 10..=4;
        assert!(compute_nccf(&[0.0; 200], 100, empty, 0.0).unwrap_err().is_config_error());
        assert!(matches!(compute_nccf(&[0.0; 50], 40, 0..=20, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn sliding_energy_matches_direct_sum() {
        let seg: Vec<f64> = (0..300).map(|i| ((i * 37 % 101) as f64 / 50.0 - 1.0) * (1.0 + i as f64 / 300.0)).collect();
        let parts = inner_products(&seg, 120, 3..=150);
        let mean = seg[..270].iter().sum::<f64>() / 270.0;
        for (k, lag) in (3..=150).enumerate() {
            let direct: f64 = seg[lag..lag + 120].iter().map(|v| (v - mean).powi(2)).sum();
            assert!((direct - parts.e_lag[k]).abs() < 1e-9 * direct.max(1.0));
        }
    }

    #[test]
    fn interpolator_reconstructs_band_limited_function() {
        // cos at 0.22 cycles per lag, sampled at integers
        let f = |x: f64| (2.0 * PI * 0.22 * x).cos();
        let values: Vec<f64> = (0..120).map(|i| f(i as f64)).collect();
        let targets: Vec<f64> = (0..200).map(|k| 4.0 + k as f64 * 0.37).collect();
        let interp = LagInterpolator::new(&targets);
        assert!(interp.required_len() <= values.len());
        for (t, v) in targets.iter().zip(interp.interpolate(&values)) {
            assert!((v - f(*t)).abs() < 0.02, "lag {t}: {v} vs {}", f(*t));
        }
    }
}
