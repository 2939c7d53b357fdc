use super::CycleSequence;
use crate::{Error, Result};

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mean absolute difference between consecutive periods, in seconds.
pub fn jitta(cycles: &CycleSequence) -> Result<f64> {
    mean(cycles.runs().flat_map(|(p, _)| p.windows(2).map(|w| (w[1] - w[0]).abs())))
        .ok_or_else(|| Error::Undefined("jitta needs at least two consecutive periods".into()))
}

/// Mean absolute deviation of each period from the three-period average
/// centred on it, divided by the mean period.
pub fn rap(cycles: &CycleSequence) -> Result<f64> {
    let dev = mean(cycles.runs().flat_map(|(p, _)| {
        p.windows(3).map(|w| (w[1] - (w[0] + w[1] + w[2]) / 3.0).abs())
    }))
    .ok_or_else(|| Error::Undefined("rap needs at least three consecutive periods".into()))?;
    let mean_period = mean(cycles.periods_s.iter().copied()).expect("non-empty when a triple exists");
    Ok(dev / mean_period)
}

/// Mean absolute difference between consecutive cycle peak amplitudes,
/// divided by the mean amplitude.
pub fn shimmer(cycles: &CycleSequence) -> Result<f64> {
    let diff = mean(cycles.runs().flat_map(|(_, a)| a.windows(2).map(|w| (w[1] - w[0]).abs())))
        .ok_or_else(|| Error::Undefined("shimmer needs at least two consecutive cycles".into()))?;
    let mean_amp = mean(cycles.peak_amplitudes.iter().copied()).unwrap_or(0.0);
    if !(mean_amp > 0.0) {
        return Err(Error::Undefined("shimmer needs positive cycle amplitudes".into()));
    }
    Ok(diff / mean_amp)
}
