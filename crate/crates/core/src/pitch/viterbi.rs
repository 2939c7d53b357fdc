use crate::{Error, Result};

/// Per-frame local scores over a shared set of candidate lags.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    /// Candidate lags, strictly increasing and positive.
    pub lags: Vec<f64>,
    /// `scores[frame][state]`; higher is better.
    pub scores: Vec<Vec<f64>>,
}

impl Lattice {
    pub fn new(lags: Vec<f64>, scores: Vec<Vec<f64>>) -> Result<Self> {
        let l = Self { lags, scores };
        l.validate()?;
        Ok(l)
    }

    fn validate(&self) -> Result<()> {
        if self.lags.is_empty() || self.scores.is_empty() {
            return Err(Error::MalformedLattice("lattice has no frames or no lags".into()));
        }
        if !self.lags.iter().all(|&l| l > 0.0 && l.is_finite()) {
            return Err(Error::MalformedLattice("lags must be positive and finite".into()));
        }
        if !self.lags.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::MalformedLattice("lags must be strictly increasing".into()));
        }
        for (t, row) in self.scores.iter().enumerate() {
            if row.len() != self.lags.len() {
                return Err(Error::MalformedLattice(format!(
                    "frame {t} has {} scores for {} lags",
                    row.len(),
                    self.lags.len()
                )));
            }
            if row.iter().any(|s| !s.is_finite()) {
                return Err(Error::MalformedLattice(format!("frame {t} has a non-finite score")));
            }
        }
        Ok(())
    }

    pub fn num_frames(&self) -> usize {
        self.scores.len()
    }

    pub fn num_states(&self) -> usize {
        self.lags.len()
    }
}

/// Total cost of a state path: `sum(-score) + penalty * sum(dlog(lag)^2)`.
pub fn path_cost(lattice: &Lattice, penalty_factor: f64, path: &[usize]) -> f64 {
    let mut cost = 0.0;
    for (t, &s) in path.iter().enumerate() {
        cost -= lattice.scores[t][s];
        if t > 0 {
            let d = lattice.lags[s].ln() - lattice.lags[path[t - 1]].ln();
            cost += penalty_factor * d * d;
        }
    }
    cost
}

/// Minimum-cost state path through the lattice (see [`path_cost`]).
///
/// The transition cost is a convex function of the log-lag difference and the
/// lags are sorted, so the cost matrix between consecutive frames is Monge and
/// the best predecessor index is non-decreasing in the current index. Each
/// frame is therefore relaxed by divide and conquer in `O(n log n)` rather
/// than `O(n^2)`.
pub fn viterbi_pitch(lattice: &Lattice, penalty_factor: f64) -> Result<Vec<usize>> {
    lattice.validate()?;
    if !(penalty_factor >= 0.0 && penalty_factor.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "penalty factor must be non-negative, got {penalty_factor}"
        )));
    }
    let n = lattice.num_states();
    let x: Vec<f64> = lattice.lags.iter().map(|l| l.ln()).collect();

    let mut cost: Vec<f64> = lattice.scores[0].iter().map(|s| -s).collect();
    let mut back: Vec<Vec<u32>> = Vec::with_capacity(lattice.num_frames());
    back.push(Vec::new());
    let mut next = vec![0.0; n];
    let mut arg = vec![0u32; n];
    for row in &lattice.scores[1..] {
        relax(&cost, &x, penalty_factor, &mut next, &mut arg);
        for (c, s) in next.iter_mut().zip(row) {
            *c -= s;
        }
        std::mem::swap(&mut cost, &mut next);
        back.push(arg.clone());
    }

    let mut state = argmin(&cost);
    let mut path = vec![0usize; lattice.num_frames()];
    for t in (0..lattice.num_frames()).rev() {
        path[t] = state;
        if t > 0 {
            state = back[t][state] as usize;
        }
    }
    Ok(path)
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &c) in v.iter().enumerate() {
        if c < v[best] {
            best = i;
        }
    }
    best
}

// out[i] = min_j prev[j] + p (x_i - x_j)^2, arg[i] = leftmost minimiser.
fn relax(prev: &[f64], x: &[f64], p: f64, out: &mut [f64], arg: &mut [u32]) {
    let n = prev.len();
    // (i_lo, i_hi, j_lo, j_hi), half-open in i, closed in j
    let mut stack = vec![(0usize, n, 0usize, n - 1)];
    while let Some((ilo, ihi, jlo, jhi)) = stack.pop() {
        if ilo >= ihi {
            continue;
        }
        let mid = (ilo + ihi) / 2;
        let xi = x[mid];
        let mut best_j = jlo;
        let mut best = f64::INFINITY;
        for j in jlo..=jhi {
            let d = xi - x[j];
            let c = prev[j] + p * d * d;
            if c < best {
                best = c;
                best_j = j;
            }
        }
        out[mid] = best;
        arg[mid] = best_j as u32;
        stack.push((ilo, mid, jlo, best_j));
        stack.push((mid + 1, ihi, best_j, jhi));
    }
}
