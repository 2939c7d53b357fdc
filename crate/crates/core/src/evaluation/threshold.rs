use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    /// Frames with a POV feature strictly below this are called voiced.
    pub threshold: f64,
    /// Fraction of frames misclassified at `threshold`.
    pub error_rate: f64,
    /// Set when calling the high-POV side voiced would do better, i.e. the
    /// labels run against the feature's orientation.
    pub inverted: bool,
}

/// Threshold on the POV feature minimising total voiced/unvoiced
/// classification error. Candidates are midpoints between consecutive
/// distinct values plus one below and one above the data; ties go to the
/// lower threshold.
pub fn estimate_voicing_threshold(pov_values: &[f64], voiced: &[bool]) -> Result<ThresholdEstimate> {
    if pov_values.len() != voiced.len() {
        return Err(Error::InvalidConfig(format!(
            "{} POV values but {} voicing labels",
            pov_values.len(),
            voiced.len()
        )));
    }
    if pov_values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("POV values must be finite".into()));
    }
    let n_voiced = voiced.iter().filter(|&&v| v).count();
    let n = voiced.len();
    if n_voiced == 0 || n_voiced == n {
        return Err(Error::Undefined("threshold estimation needs both voiced and unvoiced frames".into()));
    }
    let mut order: Vec<(f64, bool)> = pov_values.iter().copied().zip(voiced.iter().copied()).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Sweep thresholds upwards; below threshold = voiced. `errors` counts
    // voiced frames above plus unvoiced frames below; `flipped` the same for
    // the opposite orientation.
    let below_all = order[0].0 - 1.0;
    let mut errors = n_voiced;
    let mut best = (below_all, errors);
    let mut best_flipped = n - n_voiced;
    let mut i = 0;
    while i < n {
        let value = order[i].0;
        while i < n && order[i].0 == value {
            if order[i].1 {
                errors -= 1;
            } else {
                errors += 1;
            }
            i += 1;
        }
        let threshold = if i < n { 0.5 * (value + order[i].0) } else { value + 1.0 };
        if errors < best.1 {
            best = (threshold, errors);
        }
        best_flipped = best_flipped.min(n - errors);
    }
    Ok(ThresholdEstimate {
        threshold: best.0,
        error_rate: best.1 as f64 / n as f64,
        inverted: best_flipped < best.1,
    })
}
