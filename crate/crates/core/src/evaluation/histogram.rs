use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binning {
    #[default]
    Uniform,
    /// Bins of equal width in log frequency; needs positive data.
    Log,
}

/// Binning rule; without an explicit range the bins span the pooled data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistogramSpec {
    pub bins: usize,
    pub scale: Binning,
    pub range: Option<(f64, f64)>,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self {
            bins: 50,
            scale: Binning::Uniform,
            range: None,
        }
    }
}

impl HistogramSpec {
    /// Bin edges covering every finite value in `samples`.
    pub fn edges(&self, samples: &[&[f64]]) -> Result<Vec<f64>> {
        if self.bins == 0 {
            return Err(Error::InvalidConfig("histogram needs at least one bin".into()));
        }
        let (mut lo, mut hi) = match self.range {
            Some(r) => r,
            None => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for v in samples.iter().flat_map(|s| s.iter()).filter(|v| v.is_finite()) {
                    lo = lo.min(*v);
                    hi = hi.max(*v);
                }
                if lo > hi {
                    return Err(Error::Undefined("no finite samples to bin".into()));
                }
                (lo, hi)
            }
        };
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidConfig(format!("bad histogram range ({lo}, {hi})")));
        }
        let n = self.bins as f64;
        let edges = match self.scale {
            Binning::Uniform => {
                if hi - lo <= 1e-9 * lo.abs().max(hi.abs()).max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    (lo, hi) = (mid - 0.5, mid + 0.5);
                }
                (0..=self.bins).map(|k| lo + (hi - lo) * k as f64 / n).collect::<Vec<_>>()
            }
            Binning::Log => {
                if lo <= 0.0 {
                    return Err(Error::Domain(format!("log binning needs positive values, got {lo}")));
                }
                if hi / lo - 1.0 <= 1e-9 {
                    let mid = (lo * hi).sqrt();
                    (lo, hi) = (mid / 1.05, mid * 1.05);
                }
                let (a, b) = (lo.ln(), hi.ln());
                (0..=self.bins).map(|k| (a + (b - a) * k as f64 / n).exp()).collect::<Vec<_>>()
            }
        };
        Ok(pin_ends(edges, lo, hi))
    }
}

// exp/ln round trips can move the outer edges off the data range
fn pin_ends(mut edges: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    let last = edges.len() - 1;
    edges[0] = lo;
    edges[last] = hi;
    edges
}

/// Normalised histogram: `probabilities[k]` is the mass in
/// `[bin_edges[k], bin_edges[k + 1])`, the last bin closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramDistribution {
    bin_edges: Vec<f64>,
    probabilities: Vec<f64>,
    counts: Vec<u64>,
}

impl HistogramDistribution {
    /// Bins finite samples inside the edges; anything else is dropped.
    pub fn from_samples(samples: &[f64], bin_edges: Vec<f64>) -> Result<Self> {
        validate_edges(&bin_edges)?;
        let mut counts = vec![0u64; bin_edges.len() - 1];
        for &v in samples {
            if let Some(k) = bin_index(&bin_edges, v) {
                counts[k] += 1;
            }
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Undefined("no samples fall inside the histogram range".into()));
        }
        let probabilities = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(Self {
            bin_edges,
            probabilities,
            counts,
        })
    }

    /// Wraps an existing distribution. Probabilities must be non-negative
    /// and sum to 1 within 1e-9; counts are left empty.
    pub fn from_probabilities(bin_edges: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        validate_edges(&bin_edges)?;
        if probabilities.len() + 1 != bin_edges.len() {
            return Err(Error::MismatchedBins);
        }
        if probabilities.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::Domain("probabilities must be finite and non-negative".into()));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self {
            bin_edges,
            probabilities,
            counts: Vec::new(),
        })
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Empty for distributions built with [`Self::from_probabilities`].
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn n_bins(&self) -> usize {
        self.probabilities.len()
    }

    pub fn bin_of(&self, value: f64) -> Option<usize> {
        bin_index(&self.bin_edges, value)
    }
}

fn validate_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::InvalidConfig("histogram needs at least two edges".into()));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("histogram edges must be finite and increasing".into()));
    }
    Ok(())
}

fn bin_index(edges: &[f64], v: f64) -> Option<usize> {
    let last = edges.len() - 1;
    if !v.is_finite() || v < edges[0] || v > edges[last] {
        return None;
    }
    // first edge strictly greater than v, minus one
    let k = edges.partition_point(|&e| e <= v);
    Some(k.saturating_sub(1).min(last - 1))
}

/// `-ln(sum_k sqrt(a_k * b_k))`. Distributions with no overlap give
/// `f64::INFINITY`.
pub fn bhattacharyya(a: &HistogramDistribution, b: &HistogramDistribution) -> Result<f64> {
    if a.bin_edges != b.bin_edges {
        return Err(Error::MismatchedBins);
    }
    let overlap: f64 = a
        .probabilities
        .iter()
        .zip(&b.probabilities)
        .map(|(p, q)| (p * q).sqrt())
        .sum();
    // divide out rounding in the normalisation so identical inputs give 0
    let mass = (a.probabilities.iter().sum::<f64>() * b.probabilities.iter().sum::<f64>()).sqrt();
    let coefficient = overlap / mass;
    if coefficient <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-coefficient.ln()).max(0.0))
}
