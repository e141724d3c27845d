//! Presence series `g`, its forward difference, and the static/dynamic test.

use serde::{Deserialize, Serialize};

use super::NeighborhoodSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceProfile {
    /// 1 where the click neighborhood holds any point.
    pub g: Vec<u8>,
    /// `g[t + 1] - g[t]`.
    pub delta_g: Vec<i8>,
    /// Index of the clicked frame.
    pub center: usize,
    /// Length in frames of the presence run that contains the clicked frame.
    pub delta_t: usize,
    /// `delta_t / T`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionState {
    Static,
    Dynamic,
}

pub fn persistence_profile(series: &NeighborhoodSeries) -> PersistenceProfile {
    let g = series
        .frames
        .iter()
        .map(|f| u8::from(!f.indices.is_empty()))
        .collect();
    PersistenceProfile::from_presence(g, series.center)
}

impl PersistenceProfile {
    /// Builds the profile from a presence series.
    ///
    /// The run is bounded by the last appearance (`Δg = +1`) before the
    /// clicked frame and the next disappearance (`Δg = -1`) at or after it.
    /// An empty clicked frame has `delta_t = 0`.
    pub fn from_presence(g: Vec<u8>, center: usize) -> Self {
        assert!(
            center < g.len(),
            "center {center} outside series of {}",
            g.len()
        );
        let delta_g: Vec<i8> = g.windows(2).map(|w| w[1] as i8 - w[0] as i8).collect();
        let delta_t = if g[center] == 0 {
            0
        } else {
            let start = delta_g[..center]
                .iter()
                .rposition(|&d| d == 1)
                .map_or(0, |i| i + 1);
            let end = delta_g[center..]
                .iter()
                .position(|&d| d == -1)
                .map_or(g.len() - 1, |i| center + i);
            end - start + 1
        };
        let ratio = delta_t as f64 / g.len() as f64;
        Self {
            g,
            delta_g,
            center,
            delta_t,
            ratio,
        }
    }

    pub fn frames(&self) -> usize {
        self.g.len()
    }
}

/// Static iff the presence ratio strictly exceeds `tau_duration`.
pub fn classify_motion(profile: &PersistenceProfile, tau_duration: f64) -> MotionState {
    debug_assert!(tau_duration > 0.0 && tau_duration < 1.0);
    if profile.ratio > tau_duration {
        MotionState::Static
    } else {
        MotionState::Dynamic
    }
}
