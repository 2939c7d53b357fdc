#ifndef VOXSRC_H
#define VOXSRC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VxStatus {
  VX_STATUS_OK = 0,
  VX_STATUS_NULL_POINTER = 1,
  VX_STATUS_INVALID_ARGUMENT = 2,
  VX_STATUS_IO = 3,
  VX_STATUS_UNSUPPORTED_ENCODING = 4,
  /**
   * Input outside the domain of the operation.
   */
  VX_STATUS_DOMAIN = 5,
  /**
   * The requested statistic is undefined for this input.
   */
  VX_STATUS_UNDEFINED = 6,
  VX_STATUS_INDEX_OUT_OF_RANGE = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  VX_STATUS_INTERNAL = 8,
} VxStatus;

/**
 * Mono audio.
 */
typedef struct VxAudio VxAudio;

/**
 * Pitch track produced by [`vx_extract_pitch`].
 */
typedef struct VxPitchTrack VxPitchTrack;

/**
 * Tracker settings; start from [`vx_pitch_config_default`].
 */
typedef struct VxPitchConfig {
  double min_f0_hz;
  double max_f0_hz;
  double lowpass_cutoff_hz;
  double frame_shift_ms;
  double frame_length_ms;
  double penalty_factor;
  double nccf_ballast;
  double lag_weight;
  uint32_t normalization_window_frames;
  uint32_t delta_context_frames;
  uint32_t processing_rate_hz;
} VxPitchConfig;

typedef struct VxPitchFrame {
  double time_s;
  double nccf;
  double pitch_hz;
  double pov_feature;
  double log_pitch;
  double normalized_log_pitch;
  double delta_pitch;
} VxPitchFrame;

/**
 * Utterance voice quality; a measure is valid only when its `has_` flag is
 * set.
 */
typedef struct VxVqReport {
  double jitta_s;
  double rap;
  double shimmer;
  double hnr_db;
  bool has_jitta;
  bool has_rap;
  bool has_shimmer;
  bool has_hnr;
  size_t n_cycles;
} VxVqReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *vx_version(void);

/**
 * Message for the last failed call on this thread; valid until the next
 * failing call on the same thread. Empty if nothing failed yet.
 */
const char *vx_last_error_message(void);

/**
 * Copies `len` samples in `[-1, 1]` into a new audio handle.
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out` must be writable.
 */
enum VxStatus vx_audio_from_samples(const double *samples,
                                    size_t len,
                                    uint32_t sample_rate_hz,
                                    struct VxAudio **out);

/**
 * Loads a PCM WAV file (multi-channel input is averaged to mono).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum VxStatus vx_audio_load_wav(const char *path, struct VxAudio **out);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `audio` must be null or a live handle.
 */
size_t vx_audio_len(const struct VxAudio *audio);

/**
 * Sample rate; 0 for a null handle.
 *
 * # Safety
 * `audio` must be null or a live handle.
 */
uint32_t vx_audio_sample_rate(const struct VxAudio *audio);

/**
 * # Safety
 * `audio` must be null or a handle not yet freed.
 */
void vx_audio_free(struct VxAudio *audio);

struct VxPitchConfig vx_pitch_config_default(void);

/**
 * Runs the pitch tracker. A null `config` means the defaults.
 *
 * # Safety
 * `audio` must be a live handle, `config` null or readable, `out` writable.
 */
enum VxStatus vx_extract_pitch(const struct VxAudio *audio,
                               const struct VxPitchConfig *config,
                               struct VxPitchTrack **out);

/**
 * Number of frames; 0 for a null handle.
 *
 * # Safety
 * `track` must be null or a live handle.
 */
size_t vx_pitch_track_len(const struct VxPitchTrack *track);

/**
 * # Safety
 * `track` must be a live handle and `out` writable.
 */
enum VxStatus vx_pitch_track_frame(const struct VxPitchTrack *track,
                                   size_t index,
                                   struct VxPitchFrame *out);

/**
 * # Safety
 * `track` must be null or a handle not yet freed.
 */
void vx_pitch_track_free(struct VxPitchTrack *track);

/**
 * POV-feature value below which frames are treated as voiced by default.
 */
double vx_default_voiced_threshold(void);

/**
 * Jitta, RAP, shimmer and HNR over the voiced frames of `track`.
 * Undefined measures come back with their `has_` flag cleared.
 *
 * # Safety
 * `audio` and `track` must be live handles, `out` writable.
 */
enum VxStatus vx_extract_vq(const struct VxAudio *audio,
                            const struct VxPitchTrack *track,
                            double voiced_threshold,
                            struct VxVqReport *out);

/**
 * `|12 log2(f_est / f_ref)|`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VxStatus vx_semitone_deviation(double f_est, double f_ref, double *out);

/**
 * Bhattacharyya distance between two distributions over the same `n`
 * bins. Non-overlapping inputs give `INFINITY`.
 *
 * # Safety
 * `a` and `b` must point to `n` readable doubles; `out` must be writable.
 */
enum VxStatus vx_bhattacharyya(const double *a, const double *b, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VOXSRC_H */
