use voxsrc::pitch::{default_voiced_threshold, extract_pitch, PitchConfig, PitchTrack};
use voxsrc::signal_io::AudioBuffer;
use voxsrc::synth::{self, Vibrato};

fn semitones(a: f64, b: f64) -> f64 {
    12.0 * (a / b).log2()
}

fn fraction_within_semitone(track: &PitchTrack, f0: f64) -> f64 {
    let ok = track
        .frames
        .iter()
        .filter(|f| semitones(f.pitch_hz, f0).abs() <= 1.0)
        .count();
    ok as f64 / track.len() as f64
}

fn fraction_voiced(track: &PitchTrack) -> f64 {
    let t = default_voiced_threshold();
    track.frames.iter().filter(|f| f.pov_feature < t).count() as f64 / track.len() as f64
}

fn mean_cents(track: &PitchTrack, f0: f64) -> f64 {
    track
        .frames
        .iter()
        .map(|f| 100.0 * semitones(f.pitch_hz, f0).abs())
        .sum::<f64>()
        / track.len() as f64
}

#[test]
fn sine_220_is_tracked_and_voiced() {
    let audio = synth::sine(220.0, 2.0, 16000, 0.5);
    let track = extract_pitch(&audio, &PitchConfig::default()).unwrap();
    assert_eq!(track.len(), 198);
    assert!(fraction_within_semitone(&track, 220.0) >= 0.95);
    assert!(fraction_voiced(&track) >= 0.95);
    eprintln!("220 Hz mean error {:.2} cents", mean_cents(&track, 220.0));
}

#[test]
fn high_tones_are_tracked() {
    for f0 in [440.0, 660.0, 880.0, 990.0] {
        let audio = synth::sine(f0, 1.0, 16000, 0.5);
        let track = extract_pitch(&audio, &PitchConfig::default()).unwrap();
        let frac = fraction_within_semitone(&track, f0);
        eprintln!("{f0} Hz: within {frac:.3}, mean {:.2} cents", mean_cents(&track, f0));
        assert!(frac >= 0.95);
    }
}

#[test]
fn vibrato_follows_instantaneous_frequency() {
    let v = Vibrato { carrier_hz: 440.0, rate_hz: 6.0, depth_semitones: 1.0 };
    let audio = v.render(2.0, 16000, 0.5);
    let track = extract_pitch(&audio, &PitchConfig::default()).unwrap();
    let mae = track
        .frames
        .iter()
        .map(|f| 100.0 * semitones(f.pitch_hz, v.instantaneous_hz(f.time_s)).abs())
        .sum::<f64>()
        / track.len() as f64;
    eprintln!("vibrato MAE {mae:.2} cents");
    assert!(mae < 50.0);
}

#[test]
fn pitch_is_interpolated_through_silence() {
    let tone = synth::sine(200.0, 0.5, 16000, 0.5);
    let audio = synth::concat(&[tone.clone(), synth::silence(0.1, 16000), tone]);
    let track = extract_pitch(&audio, &PitchConfig::default()).unwrap();
    for f in &track.frames {
        if f.time_s > 0.5 && f.time_s < 0.6 {
            assert!(semitones(f.pitch_hz, 200.0).abs() < 1.0, "{} Hz at {}", f.pitch_hz, f.time_s);
        }
        // analysis window (25 ms plus the longest lag) entirely inside the gap
        if f.time_s > 0.52 && f.time_s < 0.56 {
            assert!(f.pov_feature > default_voiced_threshold());
        }
    }
}

#[test]
fn white_noise_is_unvoiced_on_average() {
    let audio = synth::noise(2.0, 16000, 0.3, 42);
    let track = extract_pitch(&audio, &PitchConfig::default()).unwrap();
    let mean_pov = track.frames.iter().map(|f| f.pov_feature).sum::<f64>() / track.len() as f64;
    eprintln!("noise mean pov {mean_pov:.4} threshold {:.4}", default_voiced_threshold());
    assert!(mean_pov > default_voiced_threshold());
}

#[test]
fn scaling_the_input_leaves_the_track_unchanged_without_ballast() {
    let config = PitchConfig {
        nccf_ballast: 0.0,
        ..PitchConfig::default()
    };
    let audio = synth::concat(&[synth::sine(180.0, 0.4, 16000, 0.5), synth::sine(260.0, 0.4, 16000, 0.5)]);
    let a = extract_pitch(&audio, &config).unwrap();
    let b = extract_pitch(&audio.scaled(0.01), &config).unwrap();
    for (x, y) in a.frames.iter().zip(&b.frames) {
        assert!((x.pitch_hz - y.pitch_hz).abs() <= 1e-6 * x.pitch_hz);
        assert!((x.pov_feature - y.pov_feature).abs() <= 1e-6);
    }
}

#[test]
fn extraction_is_deterministic() {
    let audio = synth::add_noise_at_snr(&synth::sine(300.0, 0.5, 16000, 0.5), 5.0, 1);
    let a = extract_pitch(&audio, &PitchConfig::default()).unwrap();
    let b = extract_pitch(&audio, &PitchConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn two_seconds_of_audio_take_under_a_second() {
    let audio = synth::sine(880.0, 2.0, 16000, 0.5);
    let start = std::time::Instant::now();
    let track = extract_pitch(&audio, &PitchConfig::default()).unwrap();
    let elapsed = start.elapsed();
    eprintln!("{} frames in {elapsed:?}", track.len());
    assert!(elapsed.as_secs_f64() < 1.0);
    assert!(mean_cents(&track, 880.0) < 20.0);
}

#[test]
fn other_sample_rates_are_resampled() {
    for rate in [8000, 22050, 44100] {
        let track = extract_pitch(&synth::sine(330.0, 0.5, rate, 0.5), &PitchConfig::default()).unwrap();
        assert!(fraction_within_semitone(&track, 330.0) >= 0.95, "{rate} Hz");
    }
}

#[test]
fn too_short_input_is_a_domain_error() {
    let audio = AudioBuffer::new(vec![0.1; 100], 16000).unwrap();
    assert!(matches!(extract_pitch(&audio, &PitchConfig::default()), Err(voxsrc::Error::Domain(_))));
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn pitch_stays_in_the_search_range(seed in any::<u64>(), f0 in 60.0f64..900.0, snr in -5.0f64..30.0, max_f0 in 400.0f64..1000.0) {
            let config = PitchConfig { max_f0_hz: max_f0, lowpass_cutoff_hz: 1000.0, ..PitchConfig::default() };
            let audio = synth::add_noise_at_snr(&synth::sine(f0, 0.3, 16000, 0.5), snr, seed);
            let track = extract_pitch(&audio, &config).unwrap();
            for f in &track.frames {
                prop_assert!(f.pitch_hz >= config.min_f0_hz * 0.999 && f.pitch_hz <= config.max_f0_hz * 1.001, "{}", f.pitch_hz);
                prop_assert!((-1.0..=1.0).contains(&f.nccf));
                prop_assert!(f.pov_feature >= voxsrc::pitch::POV_FEATURE_MIN && f.pov_feature <= voxsrc::pitch::POV_FEATURE_MAX, "{} {}", f.pov_feature, f.nccf);
                prop_assert!((f.log_pitch - f.pitch_hz.ln()).abs() < 1e-12);
            }
            prop_assert_eq!(track.len(), config.framing().frame_count(audio.duration_ms()));
        }
    }
}
