use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, PitchEvalResult};
use super::GroundTruthTrack;
use crate::pitch::{extract_pitch, PitchConfig};
use crate::signal_io::AudioBuffer;
use crate::{Error, Result};

pub const DEFAULT_MAX_F0_GRID_HZ: [f64; 7] = [400.0, 500.0, 600.0, 700.0, 800.0, 900.0, 1000.0];
pub const DEFAULT_LOWPASS_GRID_HZ: [f64; 3] = [1000.0, 1500.0, 2000.0];

/// The 7 x 3 max-f0 by lowpass-cutoff grid.
pub fn default_grid() -> (Vec<f64>, Vec<f64>) {
    (DEFAULT_MAX_F0_GRID_HZ.to_vec(), DEFAULT_LOWPASS_GRID_HZ.to_vec())
}

pub struct DatasetItem {
    pub id: String,
    pub audio: AudioBuffer,
    pub truth: GroundTruthTrack,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub max_f0_hz: f64,
    pub lowpass_cutoff_hz: f64,
}

/// Scores of one configuration pooled over every usable utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub max_f0_hz: f64,
    pub lowpass_cutoff_hz: f64,
    /// `None` when no utterance could be scored.
    pub gpe: Option<f64>,
    pub fpe_cents: Option<f64>,
    pub n_voiced_ref: usize,
    pub n_gross: usize,
    pub n_unmatched: usize,
    pub n_failed: usize,
}

impl GridRow {
    pub fn point(&self) -> GridPoint {
        GridPoint {
            max_f0_hz: self.max_f0_hz,
            lowpass_cutoff_hz: self.lowpass_cutoff_hz,
        }
    }
}

/// An utterance left out of one configuration's totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningFailure {
    pub utterance_id: String,
    pub max_f0_hz: f64,
    pub lowpass_cutoff_hz: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    /// One row per configuration, max-f0 major, both axes ascending.
    pub grid: Vec<GridRow>,
    /// Lowest GPE, then lowest FPE; `None` only if nothing could be scored.
    pub best: Option<GridPoint>,
    pub failures: Vec<TuningFailure>,
}

fn canonical(values: &[f64], what: &str) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidConfig(format!("{what} grid is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(format!("{what} grid has a non-finite value")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

/// Tracks every utterance under every (max-f0, lowpass) pair on top of
/// `base` and pools GPE/FPE over frames. Utterances that fail are listed
/// and skipped. The result does not depend on the order of the dataset or
/// of the grid values.
pub fn grid_search(dataset: &[DatasetItem], max_f0_values: &[f64], lowpass_values: &[f64], base: &PitchConfig) -> Result<TuningResult> {
    if dataset.is_empty() {
        return Err(Error::InvalidConfig("tuning dataset is empty".into()));
    }
    let max_f0s = canonical(max_f0_values, "max-f0")?;
    let lowpasses = canonical(lowpass_values, "lowpass-cutoff")?;
    let mut configs = Vec::with_capacity(max_f0s.len() * lowpasses.len());
    for &max_f0_hz in &max_f0s {
        for &lowpass_cutoff_hz in &lowpasses {
            let config = PitchConfig {
                max_f0_hz,
                lowpass_cutoff_hz,
                ..base.clone()
            };
            config.validate()?;
            configs.push(config);
        }
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.sort_by(|&a, &b| dataset[a].id.cmp(&dataset[b].id));

    let jobs: Vec<(usize, usize)> = (0..configs.len()).flat_map(|c| order.iter().map(move |&u| (c, u))).collect();
    let outcomes: Vec<Result<PitchEvalResult>> = jobs
        .par_iter()
        .map(|&(c, u)| {
            let item = &dataset[u];
            let track = extract_pitch(&item.audio, &configs[c])?;
            evaluate(&track, &item.truth)
        })
        .collect();

    let mut grid = Vec::with_capacity(configs.len());
    let mut failures = Vec::new();
    for (c, config) in configs.iter().enumerate() {
        let mut n_voiced = 0;
        let mut n_unmatched = 0;
        let mut n_failed = 0;
        let mut fine = Vec::new();
        for (k, &u) in order.iter().enumerate() {
            match &outcomes[c * order.len() + k] {
                Ok(r) => {
                    n_voiced += r.n_voiced_ref;
                    n_unmatched += r.n_unmatched;
                    fine.extend_from_slice(&r.fine_cents);
                }
                Err(e) => {
                    n_failed += 1;
                    failures.push(TuningFailure {
                        utterance_id: dataset[u].id.clone(),
                        max_f0_hz: config.max_f0_hz,
                        lowpass_cutoff_hz: config.lowpass_cutoff_hz,
                        message: e.to_string(),
                    });
                }
            }
        }
        let pooled = PitchEvalResult::pooled(n_voiced, fine, n_unmatched);
        grid.push(GridRow {
            max_f0_hz: config.max_f0_hz,
            lowpass_cutoff_hz: config.lowpass_cutoff_hz,
            gpe: (n_voiced > 0).then_some(pooled.gpe),
            fpe_cents: pooled.fpe_cents,
            n_voiced_ref: n_voiced,
            n_gross: pooled.n_gross,
            n_unmatched,
            n_failed,
        });
    }
    failures.sort_by(|a, b| {
        (a.max_f0_hz, a.lowpass_cutoff_hz)
            .partial_cmp(&(b.max_f0_hz, b.lowpass_cutoff_hz))
            .unwrap()
            .then_with(|| a.utterance_id.cmp(&b.utterance_id))
            .then_with(|| a.message.cmp(&b.message))
    });
    let key = |r: &GridRow| (r.gpe.unwrap_or(f64::INFINITY), r.fpe_cents.unwrap_or(f64::INFINITY));
    let best = grid
        .iter()
        .filter(|r| r.gpe.is_some())
        .min_by(|a, b| {
            let (ka, kb) = (key(a), key(b));
            ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
        })
        .map(GridRow::point);
    Ok(TuningResult { grid, best, failures })
}
