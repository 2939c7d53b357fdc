use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use voxsrc::corpus::{CohortSpec, Gender, PhoneClasses, SpeakerCohort, Style};
use voxsrc::evaluation::{default_grid, Binning, GroundTruthFormat, HistogramSpec, PitchUnits};
use voxsrc::pitch::{default_voiced_threshold, PitchConfig};
use voxsrc::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub max_f0_hz: Vec<f64>,
    pub lowpass_cutoff_hz: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        let (max_f0_hz, lowpass_cutoff_hz) = default_grid();
        Self { max_f0_hz, lowpass_cutoff_hz }
    }
}

/// Cohort as written in a config file; exactly one of `phone_class` and
/// `phones` names the phone set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortDef {
    pub name: String,
    pub style: Style,
    #[serde(default)]
    pub gender: Gender,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phone_class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phones: Option<Vec<String>>,
}

impl CohortDef {
    pub fn resolve(&self, classes: &PhoneClasses) -> Result<CohortSpec> {
        let speakers = SpeakerCohort { style: self.style, gender: self.gender };
        match (&self.phone_class, &self.phones) {
            (Some(class), None) => {
                let set = classes
                    .class(class)
                    .ok_or_else(|| Error::InvalidConfig(format!("cohort `{}`: unknown phone class `{class}`", self.name)))?;
                CohortSpec::new(&self.name, speakers, set)
            }
            (None, Some(phones)) => CohortSpec::new(&self.name, speakers, phones),
            _ => Err(Error::InvalidConfig(format!("cohort `{}` needs exactly one of phone_class or phones", self.name))),
        }
    }
}

fn default_cohorts() -> Vec<CohortDef> {
    let mut out = Vec::new();
    for style in [Style::Sung, Style::Spoken] {
        for class in ["vowels", "voiced_fricatives", "unvoiced_fricatives"] {
            out.push(CohortDef {
                name: format!("{style}_{class}"),
                style,
                gender: Gender::Any,
                phone_class: Some(class.to_string()),
                phones: None,
            });
        }
    }
    out
}

fn default_pov_pairs() -> Vec<(String, String)> {
    ["sung", "spoken"]
        .iter()
        .map(|s| (format!("{s}_voiced_fricatives"), format!("{s}_unvoiced_fricatives")))
        .collect()
}

/// Everything that influences a run's outputs. Loaded from `--config`,
/// then overridden by flags, then echoed into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pitch: PitchConfig,
    /// POV-feature threshold below which frames count as voiced.
    pub voiced_threshold: Option<f64>,
    pub ground_truth: GroundTruthFormat,
    pub grid: GridSpec,
    pub histogram: HistogramSpec,
    pub pitch_histogram: HistogramSpec,
    pub cohorts: Vec<CohortDef>,
    pub pov_pairs: Vec<(String, String)>,
    /// Replacement for the built-in phone-class table.
    pub phone_classes: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pitch: PitchConfig::default(),
            voiced_threshold: None,
            ground_truth: GroundTruthFormat::default(),
            grid: GridSpec::default(),
            histogram: HistogramSpec::default(),
            pitch_histogram: HistogramSpec::default(),
            cohorts: default_cohorts(),
            pov_pairs: default_pov_pairs(),
            phone_classes: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    /// Fills in the voicing threshold, warning when the built-in default is
    /// used, and validates the pitch settings.
    pub fn resolve(mut self) -> Result<Self> {
        self.pitch.validate()?;
        if self.voiced_threshold.is_none() {
            let t = default_voiced_threshold();
            eprintln!(
                "warning: no voiced_threshold configured; using the built-in {t:.4} (POV feature at NCCF 0.5). \
                 `voxsrc eval` estimates one from annotated data"
            );
            self.voiced_threshold = Some(t);
        }
        Ok(self)
    }

    pub fn threshold(&self) -> f64 {
        self.voiced_threshold.unwrap_or_else(default_voiced_threshold)
    }

    pub fn phone_table(&self) -> Result<PhoneClasses> {
        match &self.phone_classes {
            Some(p) => PhoneClasses::load(p),
            None => Ok(PhoneClasses::builtin()),
        }
    }
}

/// Flags that override the pitch section of the config.
#[derive(Debug, Clone, Default, Args)]
pub struct PitchArgs {
    /// Lowest pitch searched.
    #[arg(long, value_name = "HZ")]
    pub min_f0: Option<f64>,
    /// Highest pitch searched.
    #[arg(long, value_name = "HZ")]
    pub max_f0: Option<f64>,
    /// Low-pass cutoff applied before resampling.
    #[arg(long, value_name = "HZ")]
    pub lowpass: Option<f64>,
    /// Frame shift.
    #[arg(long, value_name = "MS")]
    pub frame_shift_ms: Option<f64>,
    /// Analysis window length.
    #[arg(long, value_name = "MS")]
    pub frame_length_ms: Option<f64>,
    /// Viterbi penalty on log-pitch jumps.
    #[arg(long)]
    pub penalty: Option<f64>,
    /// POV-feature threshold for voiced frames.
    #[arg(long, allow_hyphen_values = true)]
    pub voiced_threshold: Option<f64>,
}

impl PitchArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.pitch;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut p.min_f0_hz, self.min_f0);
        set(&mut p.max_f0_hz, self.max_f0);
        set(&mut p.lowpass_cutoff_hz, self.lowpass);
        set(&mut p.frame_shift_ms, self.frame_shift_ms);
        set(&mut p.frame_length_ms, self.frame_length_ms);
        set(&mut p.penalty_factor, self.penalty);
        if self.voiced_threshold.is_some() {
            cfg.voiced_threshold = self.voiced_threshold;
        }
    }
}

/// Flags for reading ground-truth files.
#[derive(Debug, Clone, Default, Args)]
pub struct TruthArgs {
    /// Annotation units.
    #[arg(long, value_enum)]
    pub gt_units: Option<UnitsArg>,
    /// Hop of single-column annotation files, seconds.
    #[arg(long, value_name = "S")]
    pub gt_hop: Option<f64>,
    /// Time of the first row of single-column files, seconds.
    #[arg(long, value_name = "S")]
    pub gt_start: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum UnitsArg {
    Hz,
    Semitones,
}

impl TruthArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(u) = self.gt_units {
            cfg.ground_truth.units = match u {
                UnitsArg::Hz => PitchUnits::Hz,
                UnitsArg::Semitones => PitchUnits::Semitones,
            };
        }
        if self.gt_hop.is_some() {
            cfg.ground_truth.hop_s = self.gt_hop;
        }
        if let Some(s) = self.gt_start {
            cfg.ground_truth.first_time_s = s;
        }
    }
}

/// Flags for histogram binning in `analyze`.
#[derive(Debug, Clone, Default, Args)]
pub struct HistogramArgs {
    /// Number of bins for every histogram.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Bin pitch on a log-frequency axis.
    #[arg(long)]
    pub log_pitch: bool,
}

impl HistogramArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(b) = self.bins {
            cfg.histogram.bins = b;
            cfg.pitch_histogram.bins = b;
        }
        if self.log_pitch {
            cfg.pitch_histogram.scale = Binning::Log;
        }
    }
}
