use super::pov::voicing_probability;
use super::PitchTrack;

/// Short-time mean subtraction: each value minus the weighted mean of the
/// values in a centred window of `window` frames (truncated at the edges).
/// Windows whose weights sum to zero fall back to a plain mean.
pub fn normalize_log_pitch(log_pitch: &[f64], weights: &[f64], window: usize) -> Vec<f64> {
    assert_eq!(log_pitch.len(), weights.len(), "one weight per frame");
    let n = log_pitch.len();
    let half = window / 2;
    // prefix sums make every window O(1)
    let mut sw = vec![0.0; n + 1];
    let mut swx = vec![0.0; n + 1];
    let mut sx = vec![0.0; n + 1];
    for i in 0..n {
        sw[i + 1] = sw[i] + weights[i];
        swx[i + 1] = swx[i] + weights[i] * log_pitch[i];
        sx[i + 1] = sx[i] + log_pitch[i];
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let wsum = sw[hi] - sw[lo];
            let mean = if wsum > 1e-12 {
                (swx[hi] - swx[lo]) / wsum
            } else {
                (sx[hi] - sx[lo]) / (hi - lo) as f64
            };
            log_pitch[i] - mean
        })
        .collect()
}

/// Recomputes the normalised log pitch of a track, weighting frames by the
/// voicing probability implied by their NCCF.
pub fn normalize_track(track: &PitchTrack) -> Vec<f64> {
    let log_pitch: Vec<f64> = track.frames.iter().map(|f| f.log_pitch).collect();
    let weights: Vec<f64> = track.frames.iter().map(|f| voicing_probability(f.nccf)).collect();
    normalize_log_pitch(&log_pitch, &weights, track.config.normalization_window_frames)
}

/// Regression delta over `context` frames on each side, replicating the edge
/// frames: `d(i) = sum_k k (v(i+k) - v(i-k)) / (2 sum_k k^2)`.
pub fn compute_delta(values: &[f64], context: usize) -> Vec<f64> {
    assert!(context >= 1, "delta context must be at least 1");
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let at = |i: i64| values[i.clamp(0, n as i64 - 1) as usize];
    let denom = 2.0 * (1..=context).map(|k| (k * k) as f64).sum::<f64>();
    (0..n as i64)
        .map(|i| {
            (1..=context as i64)
                .map(|k| k as f64 * (at(i + k) - at(i - k)))
                .sum::<f64>()
                / denom
        })
        .collect()
}
