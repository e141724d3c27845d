use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::PredictionRecord;
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Box3D, Point3};

/// Global scene augmentation: flips, then a yaw rotation, then uniform scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentationSpec {
    /// Yaw rotation about `+z`, radians.
    pub rotation: f64,
    /// Negate `x` (mirror across the `y` axis).
    pub flip_x: bool,
    /// Negate `y` (mirror across the `x` axis).
    pub flip_y: bool,
    pub scale: f64,
}

impl Default for AugmentationSpec {
    fn default() -> Self {
        Self {
            rotation: 0.0,
            flip_x: false,
            flip_y: false,
            scale: 1.0,
        }
    }
}

impl AugmentationSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.rotation.is_finite() {
            return Err(Error::invalid("augmentation.rotation", "not finite"));
        }
        if !(0.5..=2.0).contains(&self.scale) {
            return Err(Error::invalid(
                "augmentation.scale",
                format!("must be in [0.5, 2.0], got {}", self.scale),
            ));
        }
        Ok(())
    }

    fn flip_xy(&self, x: f64, y: f64) -> (f64, f64) {
        (
            if self.flip_x { -x } else { x },
            if self.flip_y { -y } else { y },
        )
    }

    fn flip_yaw(&self, mut theta: f64) -> f64 {
        if self.flip_x {
            theta = PI - theta;
        }
        if self.flip_y {
            theta = -theta;
        }
        theta
    }

    fn forward_xyz(&self, x: f64, y: f64, z: f64) -> (f64, f64, f64) {
        let (x, y) = self.flip_xy(x, y);
        let (s, c) = self.rotation.sin_cos();
        let (x, y) = (c * x - s * y, s * x + c * y);
        (x * self.scale, y * self.scale, z * self.scale)
    }

    fn inverse_xyz(&self, x: f64, y: f64, z: f64) -> (f64, f64, f64) {
        let (x, y, z) = (x / self.scale, y / self.scale, z / self.scale);
        let (s, c) = self.rotation.sin_cos();
        let (x, y) = (c * x + s * y, -s * x + c * y);
        let (x, y) = self.flip_xy(x, y);
        (x, y, z)
    }

    pub fn apply_point(&self, p: &Point3) -> Point3 {
        let (x, y, z) = self.forward_xyz(p.x, p.y, p.z);
        Point3::new(x, y, z, p.intensity)
    }

    pub fn apply_box(&self, b: &Box3D) -> Box3D {
        let (x, y, z) = self.forward_xyz(b.x, b.y, b.z);
        Box3D {
            x,
            y,
            z,
            l: b.l * self.scale,
            w: b.w * self.scale,
            h: b.h * self.scale,
            theta: normalize_angle(self.flip_yaw(b.theta) + self.rotation),
        }
    }

    pub fn invert_box(&self, b: &Box3D) -> Box3D {
        let (x, y, z) = self.inverse_xyz(b.x, b.y, b.z);
        Box3D {
            x,
            y,
            z,
            l: b.l / self.scale,
            w: b.w / self.scale,
            h: b.h / self.scale,
            theta: normalize_angle(self.flip_yaw(b.theta - self.rotation)),
        }
    }
}

pub fn apply_augmentation_points(spec: &AugmentationSpec, points: &[Point3]) -> Vec<Point3> {
    points.iter().map(|p| spec.apply_point(p)).collect()
}

pub fn apply_augmentation(spec: &AugmentationSpec, boxes: &[Box3D]) -> Vec<Box3D> {
    boxes.iter().map(|b| spec.apply_box(b)).collect()
}

pub fn invert_augmentation(spec: &AugmentationSpec, boxes: &[Box3D]) -> Vec<Box3D> {
    boxes.iter().map(|b| spec.invert_box(b)).collect()
}

/// Maps detector output on the augmented scene back to the original frame.
pub fn invert_predictions(
    spec: &AugmentationSpec,
    preds: &[PredictionRecord],
) -> Vec<PredictionRecord> {
    preds
        .iter()
        .map(|p| PredictionRecord {
            bbox: spec.invert_box(&p.bbox),
            ..p.clone()
        })
        .collect()
}
