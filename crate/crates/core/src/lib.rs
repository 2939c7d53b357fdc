//! Voice-source feature extraction for monophonic singing and speech.
//!
//! The crate is organised around a soft-voicing pitch tracker that assigns a
//! pitch to every frame together with a probability-of-voicing feature, plus
//! the voice-quality perturbation measures (jitta, rap, shimmer, HNR) that are
//! computed on top of it. The [`evaluation`] module scores and tunes the
//! tracker against annotated ground truth and [`corpus`] runs the sung vs.
//! spoken distributional analyses over phone-annotated corpora.
//!
//! ```no_run
//! use voxsrc::{pitch::{extract_pitch, PitchConfig}, signal_io::load_wav};
//!
//! let audio = load_wav("take.wav")?;
//! let track = extract_pitch(&audio, &PitchConfig::default())?;
//! for frame in &track.frames {
//!     println!("{:.2} {:.1} {:.3}", frame.time_s, frame.pitch_hz, frame.pov_feature);
//! }
//! # Ok::<(), voxsrc::Error>(())
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod export;
pub mod pitch;
pub mod signal_io;
pub mod synth;
pub mod voice_quality;

pub use error::{Error, Result};

/// Tool version embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
