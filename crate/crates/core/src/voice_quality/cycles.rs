use serde::{Deserialize, Serialize};

use crate::pitch::PitchTrack;
use crate::signal_io::AudioBuffer;
use crate::{Error, Result};

/// Periods may stray this factor beyond `[1/max_f0, 1/min_f0]`.
pub const PERIOD_TOLERANCE: f64 = 1.3;
/// Search range for the next mark, relative to the local period.
const SEARCH_LO: f64 = 0.7;
const SEARCH_HI: f64 = 1.3;
/// Peak snapping radius around the correlation estimate, relative to period.
const SNAP_RADIUS: f64 = 0.15;
/// Below this normalised correlation consecutive periods are not treated as
/// repetitions of the same cycle and the run is broken.
const MIN_CYCLE_CORRELATION: f64 = 0.5;

/// Glottal cycle marks grouped into contiguous runs.
///
/// A run with `k` periods has `k + 1` marks; periods never straddle the gap
/// between two runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CycleSequence {
    pub boundaries_s: Vec<f64>,
    pub periods_s: Vec<f64>,
    /// Peak `|x|` around the mark that opens each period.
    pub peak_amplitudes: Vec<f64>,
    /// Number of periods in each run, in order.
    pub run_lengths: Vec<usize>,
}

impl CycleSequence {
    /// A single run built directly from periods and amplitudes, starting at
    /// time zero.
    pub fn from_periods(periods_s: &[f64], peak_amplitudes: &[f64]) -> Result<Self> {
        if periods_s.len() != peak_amplitudes.len() {
            return Err(Error::Domain(format!(
                "{} periods but {} amplitudes",
                periods_s.len(),
                peak_amplitudes.len()
            )));
        }
        if periods_s.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::Domain("periods must be positive".into()));
        }
        let mut boundaries = vec![0.0];
        for p in periods_s {
            boundaries.push(boundaries.last().unwrap() + p);
        }
        Ok(Self {
            boundaries_s: boundaries,
            periods_s: periods_s.to_vec(),
            peak_amplitudes: peak_amplitudes.to_vec(),
            run_lengths: if periods_s.is_empty() { vec![] } else { vec![periods_s.len()] },
        })
    }

    pub fn is_empty(&self) -> bool {
        self.periods_s.is_empty()
    }

    pub fn n_cycles(&self) -> usize {
        self.periods_s.len()
    }

    /// `(periods, amplitudes)` per run.
    pub fn runs(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        let mut start = 0;
        self.run_lengths.iter().map(move |&len| {
            let r = (&self.periods_s[start..start + len], &self.peak_amplitudes[start..start + len]);
            start += len;
            r
        })
    }

    /// Start time of each period.
    pub fn period_starts(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.periods_s.len());
        let mut mark = 0;
        for &len in &self.run_lengths {
            out.extend_from_slice(&self.boundaries_s[mark..mark + len]);
            mark += len + 1;
        }
        out
    }

    /// Cycles whose period starts in `[t0, t1)`, keeping run structure.
    pub fn window(&self, t0: f64, t1: f64) -> CycleSequence {
        let mut out = CycleSequence::default();
        let mut mark = 0;
        let mut period = 0;
        for &len in &self.run_lengths {
            let mut current = 0;
            for k in 0..len {
                let start = self.boundaries_s[mark + k];
                if start >= t0 && start < t1 {
                    if current == 0 {
                        out.boundaries_s.push(start);
                    }
                    out.boundaries_s.push(self.boundaries_s[mark + k + 1]);
                    out.periods_s.push(self.periods_s[period + k]);
                    out.peak_amplitudes.push(self.peak_amplitudes[period + k]);
                    current += 1;
                } else if current > 0 {
                    out.run_lengths.push(current);
                    current = 0;
                }
            }
            if current > 0 {
                out.run_lengths.push(current);
            }
            mark += len + 1;
            period += len;
        }
        out
    }

    fn push_run(&mut self, marks: &[f64], amps: &[f64]) {
        if marks.len() < 2 {
            return;
        }
        self.boundaries_s.extend_from_slice(marks);
        for w in marks.windows(2) {
            self.periods_s.push(w[1] - w[0]);
        }
        self.peak_amplitudes.extend_from_slice(&amps[..marks.len() - 1]);
        self.run_lengths.push(marks.len() - 1);
    }
}

/// Finds glottal cycle marks inside voiced regions (frames with a POV
/// feature below `voiced_threshold`).
///
/// Each run is seeded at the largest `|x|` within the first period of the
/// region. The next mark is predicted by maximising the normalised
/// cross-correlation between the period-length window around the current
/// mark and a window shifted by 0.7 to 1.3 local periods, then snapped to the
/// nearest `|x|` peak. Mark times and peak values use parabolic
/// interpolation.
pub fn detect_cycles(audio: &AudioBuffer, track: &PitchTrack, voiced_threshold: f64) -> Result<CycleSequence> {
    let mut cycles = CycleSequence::default();
    if track.is_empty() || audio.is_empty() {
        return Ok(cycles);
    }
    let rate = audio.sample_rate_hz() as f64;
    let x = audio.samples();
    let half_shift = 0.5 * track.frame_shift_s();
    let min_period = 1.0 / (track.config.max_f0_hz * PERIOD_TOLERANCE);
    let max_period = PERIOD_TOLERANCE / track.config.min_f0_hz;

    for (first, last) in voiced_regions(track, voiced_threshold) {
        // regions touching either end of the track extend to the signal edge
        let t0 = if first == 0 { 0.0 } else { track.frames[first].time_s - half_shift };
        let t1 = if last + 1 == track.len() {
            audio.duration_s()
        } else {
            (track.frames[last].time_s + half_shift).min(audio.duration_s())
        };
        let period_at = |t: f64| {
            let idx = track.nearest_frame(t).unwrap().clamp(first, last);
            rate / track.frames[idx].pitch_hz
        };
        let lo = (t0 * rate).ceil() as usize;
        let hi = ((t1 * rate).floor() as usize).min(x.len());
        let mut pos = lo as f64;
        let mut marks = Vec::new();
        let mut amps = Vec::new();
        'region: loop {
            let period = period_at(pos / rate);
            // (re)seed at the largest peak in the next period
            let seed_end = (pos + period).min(hi as f64) as usize;
            if seed_end <= pos as usize + 2 || pos + 1.5 * period > hi as f64 {
                break;
            }
            let Some(seed) = peak_in(x, pos as usize, seed_end) else { break };
            // a seed on the window edge may sit on the flank of a pulse
            let radius = SNAP_RADIUS * period;
            let seed = peak_in(x, (seed - radius).ceil().max(0.0) as usize, ((seed + radius) as usize + 1).min(hi)).unwrap_or(seed);
            let mut mark = seed;
            marks.clear();
            amps.clear();
            marks.push(mark);
            amps.push(peak_amplitude(x, mark, period));
            loop {
                let period = period_at(mark / rate);
                if mark + SEARCH_HI * period + 0.5 * period >= hi as f64 {
                    break 'region;
                }
                let Some((shift, corr)) = best_shift(x, mark, period) else { break 'region };
                if corr < MIN_CYCLE_CORRELATION {
                    cycles.push_marks(&marks, &amps, rate);
                    pos = mark + period;
                    continue 'region;
                }
                let predicted = mark + shift;
                let radius = SNAP_RADIUS * period;
                let next = peak_in(x, (predicted - radius).ceil().max(0.0) as usize, ((predicted + radius) as usize + 1).min(x.len()))
                    .filter(|p| (p - predicted).abs() <= radius)
                    .unwrap_or(predicted);
                let p_s = (next - mark) / rate;
                if !(p_s >= min_period && p_s <= max_period) || next <= mark {
                    cycles.push_marks(&marks, &amps, rate);
                    pos = mark + period;
                    continue 'region;
                }
                mark = next;
                marks.push(mark);
                amps.push(peak_amplitude(x, mark, period));
            }
        }
        cycles.push_marks(&marks, &amps, rate);
    }
    Ok(cycles)
}

impl CycleSequence {
    fn push_marks(&mut self, marks: &[f64], amps: &[f64], rate: f64) {
        let times: Vec<f64> = marks.iter().map(|m| m / rate).collect();
        self.push_run(&times, amps);
    }
}

fn voiced_regions(track: &PitchTrack, threshold: f64) -> Vec<(usize, usize)> {
    let mut regions = Vec::new();
    let mut start = None;
    for i in 0..track.len() {
        match (track.is_voiced(i, threshold), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                regions.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        regions.push((s, track.len() - 1));
    }
    regions
}

// Sub-sample position of the largest |x| in [lo, hi).
fn peak_in(x: &[f64], lo: usize, hi: usize) -> Option<f64> {
    let hi = hi.min(x.len());
    if lo >= hi {
        return None;
    }
    let mut best = lo;
    for i in lo..hi {
        if x[i].abs() > x[best].abs() {
            best = i;
        }
    }
    Some(best as f64 + parabolic(x, best).0)
}

// Vertex offset and value of the parabola through |x| at i-1, i, i+1.
fn parabolic(x: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= x.len() {
        return (0.0, x[i].abs());
    }
    let (a, b, c) = (x[i - 1].abs(), x[i].abs(), x[i + 1].abs());
    let curvature = a - 2.0 * b + c;
    if curvature >= 0.0 || b < a || b < c {
        return (0.0, b);
    }
    let off = (0.5 * (a - c) / curvature).clamp(-0.5, 0.5);
    (off, b - 0.25 * (a - c) * off)
}

fn peak_amplitude(x: &[f64], mark: f64, period: f64) -> f64 {
    let lo = (mark - 0.5 * period).max(0.0).ceil() as usize;
    let hi = ((mark + 0.5 * period) as usize + 1).min(x.len());
    let mut best = lo.min(x.len() - 1);
    for i in lo..hi {
        if x[i].abs() > x[best].abs() {
            best = i;
        }
    }
    parabolic(x, best).1
}

// Shift in [0.7, 1.3] periods maximising the normalised correlation of the
// period-length windows centred on `mark` and `mark + shift`. Near the start
// of the signal both windows slide right together.
fn best_shift(x: &[f64], mark: f64, period: f64) -> Option<(f64, f64)> {
    let half = (0.5 * period).round() as i64;
    let centre = mark.round() as i64;
    let start = (centre - half).max(0);
    let len = (2 * half) as usize;
    let lo = (SEARCH_LO * period).floor() as i64;
    let hi = (SEARCH_HI * period).ceil() as i64;
    if (start + hi) as usize + len > x.len() {
        return None;
    }
    let a = &x[start as usize..start as usize + len];
    let ea: f64 = a.iter().map(|v| v * v).sum();
    let corr_at = |s: i64| -> f64 {
        let b = &x[(start + s) as usize..(start + s) as usize + len];
        let eb: f64 = b.iter().map(|v| v * v).sum();
        let d: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
        let den = (ea * eb).sqrt();
        if den > 0.0 {
            d / den
        } else {
            0.0
        }
    };
    let values: Vec<f64> = (lo - 1..=hi + 1).map(corr_at).collect();
    let mut best = 1;
    for k in 1..values.len() - 1 {
        if values[k] > values[best] {
            best = k;
        }
    }
    let (a0, b0, c0) = (values[best - 1], values[best], values[best + 1]);
    let curvature = a0 - 2.0 * b0 + c0;
    let off = if curvature < 0.0 { (0.5 * (a0 - c0) / curvature).clamp(-0.5, 0.5) } else { 0.0 };
    let refined = (lo - 1 + best as i64) as f64 + off;
    Some((centre as f64 + refined - mark, b0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_periods_builds_one_run() {
        let c = CycleSequence::from_periods(&[0.01, 0.011], &[1.0, 0.9]).unwrap();
        assert_eq!(c.boundaries_s.len(), 3);
        assert_eq!(c.run_lengths, vec![2]);
        assert!(CycleSequence::from_periods(&[0.01], &[]).is_err());
        assert!(CycleSequence::from_periods(&[-0.01], &[1.0]).is_err());
    }

    #[test]
    fn window_keeps_runs_separate() {
        let mut c = CycleSequence::default();
        c.push_run(&[0.0, 0.01, 0.02, 0.03], &[1.0, 1.0, 1.0, 1.0]);
        c.push_run(&[0.1, 0.11, 0.12], &[2.0, 2.0, 2.0]);
        assert_eq!(c.period_starts(), vec![0.0, 0.01, 0.02, 0.1, 0.11]);
        let w = c.window(0.015, 0.115);
        assert_eq!(w.run_lengths, vec![1, 2]);
        assert_eq!(w.boundaries_s, vec![0.02, 0.03, 0.1, 0.11, 0.12]);
        assert_eq!(w.peak_amplitudes, vec![1.0, 2.0, 2.0]);
    }
}
