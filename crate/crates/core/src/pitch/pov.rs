//! Mapping from correlation strength to the POV feature.
//!
//! The feature is `(1.0001 - nccf)^0.15 - 1`: strictly decreasing, so a
//! strongly periodic frame (nccf near 1) gets the lowest value. Its range is
//! fixed at `[POV_FEATURE_MIN, POV_FEATURE_MAX]`. Voicing thresholds are
//! expressed on this scale.

use crate::{Error, Result};

const OFFSET: f64 = 1.0001;
const EXPONENT: f64 = 0.15;

/// Feature value at `nccf = 1`: `0.0001^0.15 - 1`.
pub const POV_FEATURE_MIN: f64 = -0.7488113568490462;
/// Feature value at `nccf = -1`: `2.0001^0.15 - 1`.
pub const POV_FEATURE_MAX: f64 = 0.10957779366205322;

/// Correlation at which [`default_voiced_threshold`] is placed.
pub const DEFAULT_VOICED_NCCF: f64 = 0.5;

pub fn nccf_to_pov(nccf: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&nccf) {
        return Err(Error::Domain(format!("NCCF {nccf} outside [-1, 1]")));
    }
    Ok(pov_unchecked(nccf))
}

pub(crate) fn pov_unchecked(nccf: f64) -> f64 {
    (OFFSET - nccf).powf(EXPONENT) - 1.0
}

/// POV threshold equivalent to an NCCF of [`DEFAULT_VOICED_NCCF`]; frames
/// with a POV feature below it count as voiced when no threshold has been
/// estimated from annotated data.
pub fn default_voiced_threshold() -> f64 {
    pov_unchecked(DEFAULT_VOICED_NCCF)
}

/// Voicing probability in `(0, 1)` from `|nccf|`, used to weight frames in
/// the log-pitch mean subtraction.
pub fn voicing_probability(nccf: f64) -> f64 {
    let n = nccf.abs().min(1.0);
    let r = -5.2 + 5.4 * (7.5 * (n - 1.0)).exp() + 4.8 * n - 2.0 * (-10.0 * n).exp()
        + 4.2 * (20.0 * (n - 1.0)).exp();
    1.0 / (1.0 + (-r).exp())
}
