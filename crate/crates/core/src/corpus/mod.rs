//! Phone-annotated corpus analyses: duration, pitch and POV distributions
//! per cohort and voice-quality statistics per singing/speaking style.

mod analysis;
mod annotations;
mod cohort;
mod phones;
mod stats;

pub use analysis::{
    duration_distribution, pitch_distribution, pov_class_separation, vq_style_comparison, CohortReport, VqCohortStats,
    VqComparison,
};
pub use annotations::{load_annotations, AnnotationIssue, Annotations, PhoneSegment};
pub use cohort::{CohortSpec, Gender, Metadata, SpeakerCohort, Style, UtteranceMeta};
pub use phones::{normalize_label, PhoneClasses};
pub use stats::{percentile, Spread, Summary};
