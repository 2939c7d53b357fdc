use super::config::{PitchConfig, LAG_GRID_STEP};
use super::features::{compute_delta, normalize_log_pitch};
use super::nccf::{inner_products, LagInterpolator};
use super::pov::{pov_unchecked, voicing_probability};
use super::viterbi::{viterbi_pitch, Lattice};
use super::{PitchFrame, PitchTrack};
use crate::signal_io::{resample_with_cutoff, AudioBuffer};
use crate::{Error, Result};

/// Runs the full tracker: low-pass and resample, NCCF lattice, Viterbi,
/// then POV, log pitch, normalised log pitch and delta pitch per frame.
pub fn extract_pitch(audio: &AudioBuffer, config: &PitchConfig) -> Result<PitchTrack> {
    config.validate()?;
    audio.require_non_empty()?;
    let framing = config.framing();
    let n_frames = framing.frame_count(audio.duration_ms());
    if n_frames == 0 {
        return Err(Error::Domain(format!(
            "audio of {:.1} ms is shorter than one {} ms frame",
            audio.duration_ms(),
            config.frame_length_ms
        )));
    }

    let rate = config.effective_processing_rate();
    let signal = resample_with_cutoff(audio, rate, config.lowpass_cutoff_hz)?.into_samples();
    let window = framing.frame_length_samples(rate);

    let lags = config.lag_grid();
    let max_lag = *lags.last().expect("lag grid is never empty");
    let interp = LagInterpolator::new(&lags);
    let max_int_lag = interp.required_len() - 1;

    let mean_square = signal.iter().map(|s| s * s).sum::<f64>() / signal.len() as f64;
    let ballast = config.nccf_ballast * (mean_square * window as f64).powi(2);

    let mut lattice_scores = Vec::with_capacity(n_frames);
    let mut pov_nccf = Vec::with_capacity(n_frames);
    let mut segment = vec![0.0; window + max_int_lag];
    for i in 0..n_frames {
        let start = framing.frame_start_sample(i, rate);
        segment.iter_mut().for_each(|s| *s = 0.0);
        if start < signal.len() {
            let end = (start + segment.len()).min(signal.len());
            segment[..end - start].copy_from_slice(&signal[start..end]);
        }
        let parts = inner_products(&segment, window, 0..=max_int_lag);
        let scored = interp.interpolate(&parts.normalize(ballast));
        lattice_scores.push(
            scored
                .iter()
                .zip(&lags)
                .map(|(v, lag)| v.clamp(-1.0, 1.0) * (1.0 - config.lag_weight * lag / max_lag))
                .collect::<Vec<f64>>(),
        );
        pov_nccf.push(interp.interpolate(&parts.normalize(0.0)));
    }

    let lattice = Lattice::new(lags.clone(), lattice_scores)?;
    let path = viterbi_pitch(&lattice, config.penalty_factor)?;

    let mut nccf = Vec::with_capacity(n_frames);
    let mut pitch = Vec::with_capacity(n_frames);
    for (values, &k) in pov_nccf.iter().zip(&path) {
        let (offset, peak) = refine_peak(values, k);
        let log_lag = lags[k].ln() + offset * (1.0 + LAG_GRID_STEP).ln();
        let hz = (rate as f64 / log_lag.exp()).clamp(config.min_f0_hz, config.max_f0_hz);
        pitch.push(hz);
        nccf.push(peak.clamp(-1.0, 1.0));
    }

    let log_pitch: Vec<f64> = pitch.iter().map(|p| p.ln()).collect();
    let weights: Vec<f64> = nccf.iter().map(|&n| voicing_probability(n)).collect();
    let normalized = normalize_log_pitch(&log_pitch, &weights, config.normalization_window_frames);
    let delta = compute_delta(&log_pitch, config.delta_context_frames);

    let frames = (0..n_frames)
        .map(|i| PitchFrame {
            time_s: framing.frame_center_s(i),
            nccf: nccf[i],
            pitch_hz: pitch[i],
            pov_feature: pov_unchecked(nccf[i]),
            log_pitch: log_pitch[i],
            normalized_log_pitch: normalized[i],
            delta_pitch: delta[i],
        })
        .collect();
    Ok(PitchTrack {
        frames,
        config: config.clone(),
    })
}

// Parabolic refinement around state k when it is a local maximum; returns
// the offset in grid steps and the interpolated peak value.
fn refine_peak(values: &[f64], k: usize) -> (f64, f64) {
    if k == 0 || k + 1 >= values.len() {
        return (0.0, values[k]);
    }
    let (a, b, c) = (values[k - 1], values[k], values[k + 1]);
    let curvature = a - 2.0 * b + c;
    if b < a || b < c || curvature >= 0.0 {
        return (0.0, b);
    }
    let offset = (0.5 * (a - c) / curvature).clamp(-0.5, 0.5);
    (offset, b - 0.25 * (a - c) * offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refine_peak_recovers_parabola_vertex() {
        // y = 1 - (x - 0.3)^2 sampled at -1, 0, 1
        let f = |x: f64| 1.0 - (x - 0.3) * (x - 0.3);
        let (off, peak) = refine_peak(&[f(-1.0), f(0.0), f(1.0)], 1);
        assert!((off - 0.3).abs() < 1e-12);
        assert!((peak - 1.0).abs() < 1e-12);
        assert_eq!(refine_peak(&[0.1, 0.5, 0.9], 1), (0.0, 0.5));
        assert_eq!(refine_peak(&[0.9, 0.5], 0), (0.0, 0.9));
    }

    #[test]
    fn too_short_audio_is_domain_error() {
        let a = AudioBuffer::new(vec![0.0; 100], 16000).unwrap();
        assert!(matches!(extract_pitch(&a, &PitchConfig::default()), Err(Error::Domain(_))));
        let e = AudioBuffer::new(vec![], 16000).unwrap();
        assert!(extract_pitch(&e, &PitchConfig::default()).is_err());
    }
}
