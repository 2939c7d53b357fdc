use serde::{Deserialize, Serialize};

use super::GroundTruthTrack;
use crate::pitch::PitchTrack;
use crate::{Error, Result};

/// Deviation above which a frame counts as a gross error.
pub const GPE_THRESHOLD_SEMITONES: f64 = 1.0;

pub fn semitone_deviation(f_est: f64, f_ref: f64) -> Result<f64> {
    if !(f_est > 0.0 && f_ref > 0.0) {
        return Err(Error::Domain(format!("frequencies must be positive, got {f_est} and {f_ref}")));
    }
    Ok((12.0 * (f_est / f_ref).log2()).abs())
}

/// Reference-voiced frames paired with the nearest estimate frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    /// `(estimated_hz, reference_hz)` per matched reference-voiced frame.
    pub pairs: Vec<(f64, f64)>,
    /// Reference-voiced frames with no estimate frame within half a shift.
    pub unmatched: usize,
}

pub fn align(est: &PitchTrack, reference: &GroundTruthTrack) -> Alignment {
    let half = 0.5 * est.frame_shift_s() + 1e-9;
    let mut pairs = Vec::new();
    let mut unmatched = 0;
    for &(t, f_ref) in reference.entries() {
        if f_ref <= 0.0 {
            continue;
        }
        match est.nearest_frame(t).map(|i| &est.frames[i]) {
            Some(frame) if (frame.time_s - t).abs() <= half => pairs.push((frame.pitch_hz, f_ref)),
            _ => unmatched += 1,
        }
    }
    Alignment { pairs, unmatched }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchEvalResult {
    pub gpe: f64,
    /// `None` when every frame is a gross error.
    pub fpe_cents: Option<f64>,
    /// Matched reference-voiced frames (the GPE denominator).
    pub n_voiced_ref: usize,
    pub n_gross: usize,
    pub n_unmatched: usize,
    /// Absolute errors in cents of the frames within the GPE threshold,
    /// sorted ascending.
    #[serde(skip)]
    pub(crate) fine_cents: Vec<f64>,
}

impl PitchEvalResult {
    pub(crate) fn from_deviations(deviations: impl IntoIterator<Item = f64>, n_unmatched: usize) -> Self {
        let mut n = 0;
        let mut fine = Vec::new();
        for d in deviations {
            n += 1;
            if d <= GPE_THRESHOLD_SEMITONES {
                fine.push(100.0 * d);
            }
        }
        Self::pooled(n, fine, n_unmatched)
    }

    pub(crate) fn pooled(n_voiced_ref: usize, mut fine_cents: Vec<f64>, n_unmatched: usize) -> Self {
        fine_cents.sort_by(f64::total_cmp);
        let n_gross = n_voiced_ref - fine_cents.len();
        let gpe = if n_voiced_ref == 0 { f64::NAN } else { n_gross as f64 / n_voiced_ref as f64 };
        let fpe_cents = (!fine_cents.is_empty()).then(|| fine_cents.iter().sum::<f64>() / fine_cents.len() as f64);
        Self {
            gpe,
            fpe_cents,
            n_voiced_ref,
            n_gross,
            n_unmatched,
            fine_cents,
        }
    }
}

/// Frame-weighted combination of several utterances' results.
pub fn pool(results: &[PitchEvalResult]) -> PitchEvalResult {
    let n = results.iter().map(|r| r.n_voiced_ref).sum();
    let unmatched = results.iter().map(|r| r.n_unmatched).sum();
    let fine = results.iter().flat_map(|r| r.fine_cents.iter().copied()).collect();
    PitchEvalResult::pooled(n, fine, unmatched)
}

/// GPE and FPE of `est` against `reference`.
///
/// Every matched reference-voiced frame enters the GPE denominator whatever
/// the tracker's own voicing says; FPE averages the remaining frames.
pub fn evaluate(est: &PitchTrack, reference: &GroundTruthTrack) -> Result<PitchEvalResult> {
    let alignment = align(est, reference);
    if alignment.pairs.is_empty() {
        return Err(Error::Undefined("no voiced reference frames to score".into()));
    }
    let deviations = alignment
        .pairs
        .iter()
        .map(|&(e, r)| semitone_deviation(e, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(PitchEvalResult::from_deviations(deviations, alignment.unmatched))
}

pub fn gpe(est: &PitchTrack, reference: &GroundTruthTrack) -> Result<f64> {
    evaluate(est, reference).map(|r| r.gpe)
}

pub fn fpe(est: &PitchTrack, reference: &GroundTruthTrack) -> Result<f64> {
    evaluate(est, reference)?
        .fpe_cents
        .ok_or_else(|| Error::Undefined("no frame within the gross-error threshold".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::{PitchConfig, PitchFrame};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn track(pitches: &[f64]) -> PitchTrack {
        let config = PitchConfig::default();
        let frames = pitches
            .iter()
            .enumerate()
            .map(|(i, &p)| PitchFrame {
                time_s: 0.0125 + 0.01 * i as f64,
                nccf: 0.9,
                pitch_hz: p,
                pov_feature: -0.5,
                log_pitch: p.ln(),
                normalized_log_pitch: 0.0,
                delta_pitch: 0.0,
            })
            .collect();
        PitchTrack { frames, config }
    }

    fn truth(pitches: &[f64]) -> GroundTruthTrack {
        GroundTruthTrack::from_values(pitches, 0.01, 0.0125).unwrap()
    }

    #[test]
    fn semitone_examples() {
        assert_eq!(semitone_deviation(200.0, 200.0).unwrap(), 0.0);
        assert_relative_eq!(semitone_deviation(300.0, 200.0).unwrap(), 12.0 * 1.5f64.log2(), epsilon = 1e-12);
        assert!((semitone_deviation(300.0, 200.0).unwrap() - 7.02).abs() < 0.005);
        assert!(semitone_deviation(0.0, 200.0).is_err());
        assert!(semitone_deviation(200.0, -1.0).is_err());
    }

    #[test]
    fn gpe_examples() {
        let r = truth(&[200.0, 200.0, 200.0]);
        assert_eq!(gpe(&track(&[200.0, 200.0, 200.0]), &r).unwrap(), 0.0);
        assert_relative_eq!(gpe(&track(&[200.0, 200.0, 300.0]), &r).unwrap(), 1.0 / 3.0);
        let shifted = 200.0 * 2f64.powf(0.99 / 12.0);
        assert_eq!(gpe(&track(&[shifted; 3]), &r).unwrap(), 0.0);
    }

    #[test]
    fn fpe_examples() {
        assert_eq!(fpe(&track(&[200.0]), &truth(&[200.0])).unwrap(), 0.0);
        let one = fpe(&track(&[202.0]), &truth(&[200.0])).unwrap();
        assert_relative_eq!(one, 1200.0 * 1.01f64.log2(), epsilon = 1e-9);
        assert!((one - 17.2).abs() < 0.05);
        let mixed = fpe(&track(&[202.0, 300.0]), &truth(&[200.0, 200.0])).unwrap();
        assert_relative_eq!(mixed, one, epsilon = 1e-12);
        assert!(matches!(fpe(&track(&[300.0]), &truth(&[200.0])), Err(Error::Undefined(_))));
    }

    #[test]
    fn unvoiced_and_unmatched_reference_frames() {
        // reference frames 0 and 2 unvoiced; the last one lies past the estimate
        let r = truth(&[0.0, 200.0, 0.0, 200.0, 200.0]);
        let res = evaluate(&track(&[100.0, 200.0, 100.0, 300.0]), &r).unwrap();
        assert_eq!(res.n_voiced_ref, 2);
        assert_eq!(res.n_unmatched, 1);
        assert_eq!(res.gpe, 0.5);
        let both = pool(&[res.clone(), evaluate(&track(&[200.0]), &truth(&[202.0])).unwrap()]);
        assert_eq!((both.n_voiced_ref, both.n_gross, both.n_unmatched), (3, 1, 1));
        assert_eq!(both.fine_cents.len(), 2);
        assert!(matches!(evaluate(&track(&[200.0]), &truth(&[0.0, 0.0])), Err(Error::Undefined(_))));
    }

    #[test]
    fn unvoiced_estimates_still_count() {
        let mut est = track(&[200.0, 400.0]);
        est.frames[1].pov_feature = 0.1;
        assert_eq!(gpe(&est, &truth(&[200.0, 200.0])).unwrap(), 0.5);
    }

    proptest! {
        #[test]
        fn deviation_is_scale_invariant(f in 20.0f64..2000.0, g in 20.0f64..2000.0, k in 0.01f64..100.0) {
            let a = semitone_deviation(f, g).unwrap();
            let b = semitone_deviation(f * k, g * k).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn gross_and_fine_partition_the_frames(
            pairs in prop::collection::vec((50.0f64..1000.0, prop::option::weighted(0.8, 50.0f64..1000.0)), 1..60)
        ) {
            let est: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let refs: Vec<f64> = pairs.iter().map(|p| p.1.unwrap_or(0.0)).collect();
            let voiced = refs.iter().filter(|&&f| f > 0.0).count();
            prop_assume!(voiced > 0);
            let res = evaluate(&track(&est), &truth(&refs)).unwrap();
            prop_assert!((0.0..=1.0).contains(&res.gpe));
            prop_assert_eq!(res.n_voiced_ref, voiced);
            prop_assert_eq!(res.n_gross + res.fine_cents.len(), voiced);
            let within = res.fine_cents.len() as f64 / voiced as f64;
            prop_assert!((res.gpe + within - 1.0).abs() < 1e-12);
            prop_assert!(res.fine_cents.iter().all(|&c| c <= 100.0 * GPE_THRESHOLD_SEMITONES));
        }
    }
}
