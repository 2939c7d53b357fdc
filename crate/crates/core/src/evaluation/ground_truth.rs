use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Units of the annotated values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PitchUnits {
    #[default]
    Hz,
    /// MIDI note numbers, `440 * 2^((m - 69) / 12)` Hz; 0 marks unvoiced.
    Semitones,
}

/// How to read a ground-truth file.
///
/// Two-column files hold `time_s value` rows and their hop is inferred from
/// the times. Single-column files hold one value per frame and need `hop_s`;
/// the first frame sits at `first_time_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroundTruthFormat {
    pub units: PitchUnits,
    pub hop_s: Option<f64>,
    pub first_time_s: f64,
}

impl Default for GroundTruthFormat {
    fn default() -> Self {
        Self {
            units: PitchUnits::Hz,
            hop_s: None,
            first_time_s: 0.0,
        }
    }
}

/// Reference pitch on a regular time grid; `f0_hz == 0` means unvoiced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthTrack {
    entries: Vec<(f64, f64)>,
    hop_s: f64,
}

// spacing slack for times printed with limited precision
const HOP_TOLERANCE: f64 = 0.01;

impl GroundTruthTrack {
    pub fn new(entries: Vec<(f64, f64)>, hop_s: f64) -> Result<Self> {
        if !(hop_s > 0.0 && hop_s.is_finite()) {
            return Err(Error::InvalidConfig(format!("ground-truth hop must be positive, got {hop_s}")));
        }
        for (i, &(t, f)) in entries.iter().enumerate() {
            if !t.is_finite() || !(f >= 0.0 && f.is_finite()) {
                return Err(Error::Domain(format!("ground-truth entry {i} is ({t}, {f})")));
            }
            if i > 0 {
                let gap = t - entries[i - 1].0;
                if (gap - hop_s).abs() > HOP_TOLERANCE * hop_s {
                    return Err(Error::Domain(format!(
                        "ground-truth entry {i} at {t} s breaks the {hop_s} s hop"
                    )));
                }
            }
        }
        Ok(Self { entries, hop_s })
    }

    /// Frame-per-value track starting at `first_time_s`.
    pub fn from_values(f0_hz: &[f64], hop_s: f64, first_time_s: f64) -> Result<Self> {
        let entries = f0_hz
            .iter()
            .enumerate()
            .map(|(i, &f)| (first_time_s + i as f64 * hop_s, f))
            .collect();
        Self::new(entries, hop_s)
    }

    pub fn load(path: &Path, format: &GroundTruthFormat) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let values = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(path, n + 1, format!("bad number: {e}")))?;
            if let Some((_, first)) = rows.first() {
                if first.len() != values.len() {
                    return Err(Error::parse(path, n + 1, "inconsistent column count"));
                }
            }
            if values.is_empty() || values.len() > 2 {
                return Err(Error::parse(path, n + 1, "expected `time value` or a single value"));
            }
            rows.push((n + 1, values));
        }
        let to_hz = |line: usize, v: f64| -> Result<f64> {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::parse(path, line, format!("negative or non-finite pitch {v}")));
            }
            Ok(match format.units {
                PitchUnits::Hz => v,
                PitchUnits::Semitones if v == 0.0 => 0.0,
                PitchUnits::Semitones => midi_to_hz(v),
            })
        };
        let two_columns = rows.first().is_some_and(|(_, v)| v.len() == 2);
        let mut entries = Vec::with_capacity(rows.len());
        for (line, v) in &rows {
            let value = *v.last().unwrap();
            let time = if two_columns {
                v[0]
            } else {
                let hop = format.hop_s.ok_or_else(|| {
                    Error::InvalidConfig(format!("{}: single-column ground truth needs a hop", path.display()))
                })?;
                format.first_time_s + entries.len() as f64 * hop
            };
            entries.push((time, to_hz(*line, value)?));
        }
        let hop = match (format.hop_s, two_columns) {
            (Some(h), _) => h,
            (None, true) if entries.len() >= 2 => {
                (entries[entries.len() - 1].0 - entries[0].0) / (entries.len() - 1) as f64
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "{}: cannot infer the hop from fewer than two rows",
                    path.display()
                )))
            }
        };
        Self::new(entries, hop).map_err(|e| match e {
            Error::Domain(m) => Error::Domain(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn hop_s(&self) -> f64 {
        self.hop_s
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_voiced(&self) -> usize {
        self.entries.iter().filter(|e| e.1 > 0.0).count()
    }
}

fn midi_to_hz(m: f64) -> f64 {
    440.0 * 2f64.powf((m - 69.0) / 12.0)
}
