//! Voice-quality perturbation measures: jitta, rap, shimmer and HNR.
//!
//! Period and amplitude perturbation are measured on glottal cycle marks
//! found inside voiced regions of a [`PitchTrack`](crate::pitch::PitchTrack);
//! HNR comes from the normalised autocorrelation at the tracked period.

mod cycles;
mod hnr;
mod perturbation;
mod report;

pub use cycles::{detect_cycles, CycleSequence, PERIOD_TOLERANCE};
pub use hnr::{hnr, hnr_from_correlation, FrameHnr, HnrResult, HNR_CEILING_DB, HNR_FLOOR_DB};
pub use perturbation::{jitta, rap, shimmer};
pub use report::{extract_vq, extract_vq_stream, VqFrame, VqReport, VQ_WINDOW_S};
