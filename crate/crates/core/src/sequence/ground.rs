//! Single-plane RANSAC ground removal.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PointCloudFrame;
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundConfig {
    pub iterations: usize,
    /// Points within this distance of the plane are ground, meters.
    pub inlier_band: f64,
    /// Maximum angle between the plane normal and `+z`, degrees.
    pub max_tilt_deg: f64,
    /// Below this inlier fraction the frame is left untouched.
    pub min_inlier_fraction: f64,
}

impl Default for GroundConfig {
    fn default() -> Self {
        Self {
            iterations: 500,
            inlier_band: 0.2,
            max_tilt_deg: 30.0,
            min_inlier_fraction: 0.1,
        }
    }
}

impl GroundConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("ground.iterations", "must be >= 1"));
        }
        if !(self.inlier_band > 0.0) {
            return Err(Error::invalid("ground.inlier_band", "must be > 0"));
        }
        if !(0.0..90.0).contains(&self.max_tilt_deg) {
            return Err(Error::invalid("ground.max_tilt_deg", "must be in [0, 90)"));
        }
        if !(0.0..=1.0).contains(&self.min_inlier_fraction) {
            return Err(Error::invalid(
                "ground.min_inlier_fraction",
                "must be in [0, 1]",
            ));
        }
        Ok(())
    }
}

/// Plane `normal · p + offset = 0` with `normal.z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundPlane {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl GroundPlane {
    fn from_normal(n: Vector3<f64>, through: Vector3<f64>) -> Option<Self> {
        let norm = n.norm();
        if !(norm > 1e-12) {
            return None;
        }
        let mut n = n / norm;
        if n.z < 0.0 {
            n = -n;
        }
        Some(Self {
            normal: [n.x, n.y, n.z],
            offset: -n.dot(&through),
        })
    }

    pub fn distance(&self, p: &Point3) -> f64 {
        (self.normal[0] * p.x + self.normal[1] * p.y + self.normal[2] * p.z + self.offset).abs()
    }

    pub fn tilt(&self) -> f64 {
        self.normal[2].clamp(-1.0, 1.0).acos()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundRemoval {
    /// Copy of the input frame with ground points removed.
    pub frame: PointCloudFrame,
    pub plane: Option<GroundPlane>,
    pub removed: usize,
    /// No acceptable plane: `frame` holds every input point.
    pub no_plane_found: bool,
}

fn v(p: &Point3) -> Vector3<f64> {
    Vector3::new(p.x, p.y, p.z)
}

fn count_inliers(points: &[Point3], plane: &GroundPlane, band: f64) -> usize {
    points.iter().filter(|p| plane.distance(p) <= band).count()
}

/// Total-least-squares plane through the inliers of `plane`.
fn refit(points: &[Point3], plane: &GroundPlane, band: f64) -> Option<GroundPlane> {
    let inliers: Vec<Vector3<f64>> = points
        .iter()
        .filter(|p| plane.distance(p) <= band)
        .map(v)
        .collect();
    if inliers.len() < 3 {
        return None;
    }
    let mean = inliers.iter().sum::<Vector3<f64>>() / inliers.len() as f64;
    let cov = inliers
        .iter()
        .map(|q| (q - mean) * (q - mean).transpose())
        .sum::<Matrix3<f64>>();
    let eig = SymmetricEigen::new(cov);
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    GroundPlane::from_normal(eig.eigenvectors.column(imin).into_owned(), mean)
}

/// Removes the dominant near-horizontal plane from a sensor-frame sweep.
///
/// Sampling is seeded from `seed` and the frame id, so results do not depend
/// on which worker processes the frame.
pub fn remove_ground(frame: &PointCloudFrame, cfg: &GroundConfig, seed: u64) -> GroundRemoval {
    let unchanged = || GroundRemoval {
        frame: frame.clone(),
        plane: None,
        removed: 0,
        no_plane_found: true,
    };
    let pts = &frame.points;
    if pts.len() < 3 {
        return unchanged();
    }
    let max_tilt = cfg.max_tilt_deg.to_radians();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, frame.frame_id as u64));

    let mut best: Option<(GroundPlane, usize)> = None;
    for _ in 0..cfg.iterations {
        let i = rng.random_range(0..pts.len());
        let j = rng.random_range(0..pts.len());
        let k = rng.random_range(0..pts.len());
        if i == j || j == k || i == k {
            continue;
        }
        let (a, b, c) = (v(&pts[i]), v(&pts[j]), v(&pts[k]));
        let Some(plane) = GroundPlane::from_normal((b - a).cross(&(c - a)), a) else {
            continue;
        };
        if plane.tilt() > max_tilt {
            continue;
        }
        let n = count_inliers(pts, &plane, cfg.inlier_band);
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((plane, n));
        }
    }
    let Some((mut plane, mut inliers)) = best else {
        return unchanged();
    };
    if let Some(refined) = refit(pts, &plane, cfg.inlier_band) {
        let n = count_inliers(pts, &refined, cfg.inlier_band);
        if refined.tilt() <= max_tilt && n >= inliers {
            plane = refined;
            inliers = n;
        }
    }
    if (inliers as f64) < cfg.min_inlier_fraction * pts.len() as f64 {
        log::warn!(
            "frame {}: no ground plane ({} of {} points in band)",
            frame.frame_id,
            inliers,
            pts.len()
        );
        return unchanged();
    }
    let kept: Vec<Point3> = pts
        .iter()
        .copied()
        .filter(|p| plane.distance(p) > cfg.inlier_band)
        .collect();
    GroundRemoval {
        removed: pts.len() - kept.len(),
        frame: PointCloudFrame {
            points: kept,
            ..frame.clone()
        },
        plane: Some(plane),
        no_plane_found: false,
    }
}
