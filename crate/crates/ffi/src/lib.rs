//! C ABI over `voxsrc`.
//!
//! Objects are opaque handles created by `vx_audio_*` and `vx_extract_pitch`
//! and released with the matching `*_free`. Every fallible call returns a
//! [`VxStatus`]; on failure `vx_last_error_message` describes the error for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use voxsrc::evaluation::{bhattacharyya, semitone_deviation, HistogramDistribution};
use voxsrc::pitch::{default_voiced_threshold, extract_pitch, PitchConfig, PitchTrack};
use voxsrc::signal_io::{load_wav, AudioBuffer};
use voxsrc::voice_quality::extract_vq;
use voxsrc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    UnsupportedEncoding = 4,
    /// Input outside the domain of the operation.
    Domain = 5,
    /// The requested statistic is undefined for this input.
    Undefined = 6,
    IndexOutOfRange = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

/// Mono audio.
pub struct VxAudio(AudioBuffer);

/// Pitch track produced by [`vx_extract_pitch`].
pub struct VxPitchTrack(PitchTrack);

/// Tracker settings; start from [`vx_pitch_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VxPitchConfig {
    pub min_f0_hz: f64,
    pub max_f0_hz: f64,
    pub lowpass_cutoff_hz: f64,
    pub frame_shift_ms: f64,
    pub frame_length_ms: f64,
    pub penalty_factor: f64,
    pub nccf_ballast: f64,
    pub lag_weight: f64,
    pub normalization_window_frames: u32,
    pub delta_context_frames: u32,
    pub processing_rate_hz: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VxPitchFrame {
    pub time_s: f64,
    pub nccf: f64,
    pub pitch_hz: f64,
    pub pov_feature: f64,
    pub log_pitch: f64,
    pub normalized_log_pitch: f64,
    pub delta_pitch: f64,
}

/// Utterance voice quality; a measure is valid only when its `has_` flag is
/// set.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VxVqReport {
    pub jitta_s: f64,
    pub rap: f64,
    pub shimmer: f64,
    pub hnr_db: f64,
    pub has_jitta: bool,
    pub has_rap: bool,
    pub has_shimmer: bool,
    pub has_hnr: bool,
    pub n_cycles: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> VxStatus {
    match e {
        Error::Io { .. } | Error::Wav { .. } => VxStatus::Io,
        Error::UnsupportedEncoding { .. } => VxStatus::UnsupportedEncoding,
        Error::Domain(_) => VxStatus::Domain,
        Error::Undefined(_) | Error::EmptyCohort(_) => VxStatus::Undefined,
        _ => VxStatus::InvalidArgument,
    }
}

// Runs `f`, recording errors and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), (VxStatus, String)>) -> VxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VxStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error (panic)");
            VxStatus::Internal
        }
    }
}

fn lib(e: Error) -> (VxStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (VxStatus, String) {
    (VxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], (VxStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vx_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message for the last failed call on this thread; valid until the next
/// failing call on the same thread. Empty if nothing failed yet.
#[no_mangle]
pub extern "C" fn vx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Copies `len` samples in `[-1, 1]` into a new audio handle.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vx_audio_from_samples(samples: *const f64, len: usize, sample_rate_hz: u32, out: *mut *mut VxAudio) -> VxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let data = slice(samples, len, "samples")?;
        let audio = AudioBuffer::new(data.to_vec(), sample_rate_hz).map_err(lib)?;
        *out = Box::into_raw(Box::new(VxAudio(audio)));
        Ok(())
    })
}

/// Loads a PCM WAV file (multi-channel input is averaged to mono).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vx_audio_load_wav(path: *const c_char, out: *mut *mut VxAudio) -> VxStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (VxStatus::InvalidArgument, "path is not valid UTF-8".to_string()))?;
        let audio = load_wav(path).map_err(lib)?;
        *out = Box::into_raw(Box::new(VxAudio(audio)));
        Ok(())
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `audio` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vx_audio_len(audio: *const VxAudio) -> usize {
    audio.as_ref().map_or(0, |a| a.0.len())
}

/// Sample rate; 0 for a null handle.
///
/// # Safety
/// `audio` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vx_audio_sample_rate(audio: *const VxAudio) -> u32 {
    audio.as_ref().map_or(0, |a| a.0.sample_rate_hz())
}

/// # Safety
/// `audio` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vx_audio_free(audio: *mut VxAudio) {
    if !audio.is_null() {
        drop(Box::from_raw(audio));
    }
}

impl From<&PitchConfig> for VxPitchConfig {
    fn from(c: &PitchConfig) -> Self {
        Self {
            min_f0_hz: c.min_f0_hz,
            max_f0_hz: c.max_f0_hz,
            lowpass_cutoff_hz: c.lowpass_cutoff_hz,
            frame_shift_ms: c.frame_shift_ms,
            frame_length_ms: c.frame_length_ms,
            penalty_factor: c.penalty_factor,
            nccf_ballast: c.nccf_ballast,
            lag_weight: c.lag_weight,
            normalization_window_frames: c.normalization_window_frames as u32,
            delta_context_frames: c.delta_context_frames as u32,
            processing_rate_hz: c.processing_rate_hz,
        }
    }
}

impl From<&VxPitchConfig> for PitchConfig {
    fn from(c: &VxPitchConfig) -> Self {
        PitchConfig {
            min_f0_hz: c.min_f0_hz,
            max_f0_hz: c.max_f0_hz,
            lowpass_cutoff_hz: c.lowpass_cutoff_hz,
            frame_shift_ms: c.frame_shift_ms,
            frame_length_ms: c.frame_length_ms,
            penalty_factor: c.penalty_factor,
            nccf_ballast: c.nccf_ballast,
            lag_weight: c.lag_weight,
            normalization_window_frames: c.normalization_window_frames as usize,
            delta_context_frames: c.delta_context_frames as usize,
            processing_rate_hz: c.processing_rate_hz,
        }
    }
}

#[no_mangle]
pub extern "C" fn vx_pitch_config_default() -> VxPitchConfig {
    VxPitchConfig::from(&PitchConfig::default())
}

/// Runs the pitch tracker. A null `config` means the defaults.
///
/// # Safety
/// `audio` must be a live handle, `config` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vx_extract_pitch(audio: *const VxAudio, config: *const VxPitchConfig, out: *mut *mut VxPitchTrack) -> VxStatus {
    guard(|| {
        let audio = audio.as_ref().ok_or_else(|| null("audio"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let config = config.as_ref().map_or_else(PitchConfig::default, PitchConfig::from);
        let track = extract_pitch(&audio.0, &config).map_err(lib)?;
        *out = Box::into_raw(Box::new(VxPitchTrack(track)));
        Ok(())
    })
}

/// Number of frames; 0 for a null handle.
///
/// # Safety
/// `track` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vx_pitch_track_len(track: *const VxPitchTrack) -> usize {
    track.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `track` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vx_pitch_track_frame(track: *const VxPitchTrack, index: usize, out: *mut VxPitchFrame) -> VxStatus {
    guard(|| {
        let track = track.as_ref().ok_or_else(|| null("track"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let f = track
            .0
            .frames
            .get(index)
            .ok_or_else(|| (VxStatus::IndexOutOfRange, format!("frame {index} of {}", track.0.len())))?;
        *out = VxPitchFrame {
            time_s: f.time_s,
            nccf: f.nccf,
            pitch_hz: f.pitch_hz,
            pov_feature: f.pov_feature,
            log_pitch: f.log_pitch,
            normalized_log_pitch: f.normalized_log_pitch,
            delta_pitch: f.delta_pitch,
        };
        Ok(())
    })
}

/// # Safety
/// `track` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vx_pitch_track_free(track: *mut VxPitchTrack) {
    if !track.is_null() {
        drop(Box::from_raw(track));
    }
}

/// POV-feature value below which frames are treated as voiced by default.
#[no_mangle]
pub extern "C" fn vx_default_voiced_threshold() -> f64 {
    default_voiced_threshold()
}

/// Jitta, RAP, shimmer and HNR over the voiced frames of `track`.
/// Undefined measures come back with their `has_` flag cleared.
///
/// # Safety
/// `audio` and `track` must be live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vx_extract_vq(audio: *const VxAudio, track: *const VxPitchTrack, voiced_threshold: f64, out: *mut VxVqReport) -> VxStatus {
    guard(|| {
        let audio = audio.as_ref().ok_or_else(|| null("audio"))?;
        let track = track.as_ref().ok_or_else(|| null("track"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = extract_vq(&audio.0, &track.0, voiced_threshold).map_err(lib)?;
        *out = VxVqReport {
            jitta_s: r.jitta_s.unwrap_or(f64::NAN),
            rap: r.rap.unwrap_or(f64::NAN),
            shimmer: r.shimmer.unwrap_or(f64::NAN),
            hnr_db: r.hnr_db.unwrap_or(f64::NAN),
            has_jitta: r.jitta_s.is_some(),
            has_rap: r.rap.is_some(),
            has_shimmer: r.shimmer.is_some(),
            has_hnr: r.hnr_db.is_some(),
            n_cycles: r.n_cycles,
        };
        Ok(())
    })
}

/// `|12 log2(f_est / f_ref)|`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vx_semitone_deviation(f_est: f64, f_ref: f64, out: *mut f64) -> VxStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = semitone_deviation(f_est, f_ref).map_err(lib)?;
        Ok(())
    })
}

/// Bhattacharyya distance between two distributions over the same `n`
/// bins. Non-overlapping inputs give `INFINITY`.
///
/// # Safety
/// `a` and `b` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vx_bhattacharyya(a: *const f64, b: *const f64, n: usize, out: *mut f64) -> VxStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if n == 0 {
            return Err((VxStatus::InvalidArgument, "need at least one bin".into()));
        }
        let edges: Vec<f64> = (0..=n).map(|k| k as f64).collect();
        let ha = HistogramDistribution::from_probabilities(edges.clone(), slice(a, n, "a")?.to_vec()).map_err(lib)?;
        let hb = HistogramDistribution::from_probabilities(edges, slice(b, n, "b")?.to_vec()).map_err(lib)?;
        *out = bhattacharyya(&ha, &hb).map_err(lib)?;
        Ok(())
    })
}
