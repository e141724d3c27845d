//! Two alignment-score thresholds from a three-way clustering of the scores.
//!
//! Scores are split into low, middle and high groups by exact 1-D k-means
//! (k = 3). Optimal 1-D clusters are contiguous in sorted order, so a small
//! dynamic program over split points gives the global optimum directly,
//! where Lloyd iterations could stop in a local one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualThresholds {
    pub mu_low: f64,
    pub mu_high: f64,
    /// Group means, ascending.
    pub centers: [f64; 3],
}

/// Supervision tier of a scored prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Box,
    Mask,
    Discard,
}

impl DualThresholds {
    pub fn new(mu_low: f64, mu_high: f64) -> Result<Self> {
        if !(0.0 <= mu_low && mu_low <= mu_high && mu_high <= 1.0) {
            return Err(Error::invalid(
                "thresholds",
                format!("need 0 <= mu_low <= mu_high <= 1, got ({mu_low}, {mu_high})"),
            ));
        }
        Ok(Self {
            mu_low,
            mu_high,
            centers: [mu_low, (mu_low + mu_high) / 2.0, mu_high],
        })
    }

    /// Above `mu_high` → box; within `[mu_low, mu_high]` → mask; else discard.
    pub fn tier(&self, score: f64) -> Tier {
        if score > self.mu_high {
            Tier::Box
        } else if score >= self.mu_low {
            Tier::Mask
        } else {
            Tier::Discard
        }
    }
}

/// Within-group sum of squared deviations of `sorted[i..j]` via prefix sums.
struct PrefixSse {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl PrefixSse {
    fn new(sorted: &[f64]) -> Self {
        let mut sum = vec![0.0; sorted.len() + 1];
        let mut sum_sq = vec![0.0; sorted.len() + 1];
        for (i, v) in sorted.iter().enumerate() {
            sum[i + 1] = sum[i] + v;
            sum_sq[i + 1] = sum_sq[i] + v * v;
        }
        Self { sum, sum_sq }
    }

    fn sse(&self, i: usize, j: usize) -> f64 {
        let n = (j - i) as f64;
        let s = self.sum[j] - self.sum[i];
        (self.sum_sq[j] - self.sum_sq[i] - s * s / n).max(0.0)
    }
}

/// Sorted scores and the optimal split `(a, b)`: groups are `[0, a)`,
/// `[a, b)`, `[b, n)`.
pub(crate) fn optimal_split(scores: &[f64]) -> Result<(Vec<f64>, usize, usize)> {
    if scores.len() < 3 {
        return Err(Error::InsufficientScores(scores.len()));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::invalid("scores", format!("non-finite score {bad}")));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let pre = PrefixSse::new(&sorted);

    // two[j] = best cost of splitting sorted[..j] into two groups, and where.
    let mut two = vec![(f64::INFINITY, 0usize); n + 1];
    for (j, slot) in two.iter_mut().enumerate().skip(2) {
        for a in 1..j {
            let cost = pre.sse(0, a) + pre.sse(a, j);
            if cost < slot.0 - 1e-15 {
                *slot = (cost, a);
            }
        }
    }
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for b in 2..n {
        let cost = two[b].0 + pre.sse(b, n);
        if cost < best.0 - 1e-15 {
            best = (cost, two[b].1, b);
        }
    }
    Ok((sorted, best.1, best.2))
}

pub fn dual_thresholds(scores: &[f64]) -> Result<DualThresholds> {
    let (sorted, a, b) = optimal_split(scores)?;
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let centers = [mean(&sorted[..a]), mean(&sorted[a..b]), mean(&sorted[b..])];
    Ok(DualThresholds {
        mu_low: (centers[0] + centers[1]) / 2.0,
        mu_high: (centers[1] + centers[2]) / 2.0,
        centers,
    })
}
