//! Scoring against reference pitch annotations, voicing-threshold
//! estimation, histogram distances and the configuration grid search.

mod ground_truth;
mod histogram;
mod metrics;
mod threshold;
mod tuning;

pub use ground_truth::{GroundTruthFormat, GroundTruthTrack, PitchUnits};
pub use histogram::{bhattacharyya, Binning, HistogramDistribution, HistogramSpec};
pub use metrics::{align, evaluate, fpe, gpe, pool, semitone_deviation, Alignment, PitchEvalResult, GPE_THRESHOLD_SEMITONES};
pub use threshold::{estimate_voicing_threshold, ThresholdEstimate};
pub use tuning::{grid_search, default_grid, DEFAULT_LOWPASS_GRID_HZ, DEFAULT_MAX_F0_GRID_HZ, DatasetItem, GridPoint, GridRow, TuningFailure, TuningResult};
