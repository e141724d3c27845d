//! Points, poses and oriented boxes.
//!
//! World and sensor frames are right-handed with `z` up. Box yaw is measured
//! counter-clockwise from the `+x` axis and `l` runs along the heading.

mod iou;
mod lshape;

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use iou::{bev_iou, convex_polygon_area, iou_3d};
pub use lshape::{fit_lshape_box, fit_lshape_box_with, EdgePlacement, LShapeParams};

/// Tolerance for accepting a matrix as a proper rotation.
pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// Wraps an angle into `[-π, π)`. Angles already in range are returned
/// unchanged, bit for bit.
pub fn normalize_angle(theta: f64) -> f64 {
    if (-PI..PI).contains(&theta) {
        return theta;
    }
    let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can return exactly 2π for tiny negative inputs.
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Signed difference `a - b` wrapped into `[-π, π)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub intensity: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64, intensity: f64) -> Self {
        Self { x, y, z, intensity }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.intensity.is_finite()
    }

    pub fn bev(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn bev_distance(&self, to: [f64; 2]) -> f64 {
        (self.x - to[0]).hypot(self.y - to[1])
    }

    fn coords(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

/// Arithmetic mean of the point coordinates, or `None` for an empty slice.
pub fn centroid(points: &[Point3]) -> Option<[f64; 3]> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy, sz) = points.iter().fold((0.0, 0.0, 0.0), |(sx, sy, sz), p| {
        (sx + p.x, sy + p.y, sz + p.z)
    });
    Some([sx / n, sy / n, sz / n])
}

/// Rigid transform `p ↦ R·p + t`, used as the sensor→world ego pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        Self::with_tolerance(rotation, translation, ROTATION_TOLERANCE)
    }

    /// Accepts `rotation` if it is orthonormal within `tol`, then snaps it to
    /// the nearest proper rotation. Used for poses read from text files,
    /// which rarely carry full double precision.
    pub fn with_tolerance(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        tol: f64,
    ) -> Result<Self> {
        if !rotation
            .iter()
            .chain(translation.iter())
            .all(|v| v.is_finite())
        {
            return Err(Error::invalid("pose", "non-finite entry"));
        }
        let gram_err = (rotation.transpose() * rotation - Matrix3::identity()).amax();
        let det = rotation.determinant();
        if gram_err > tol || (det - 1.0).abs() > tol {
            return Err(Error::invalid(
                "pose rotation",
                format!(
                    "not a proper rotation (orthonormality error {gram_err:.3e}, det {det:.9})"
                ),
            ));
        }
        let rotation = if gram_err > ROTATION_TOLERANCE {
            Rotation3::from_matrix(&rotation).into_inner()
        } else {
            rotation
        };
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Yaw-only pose, the common case for ground vehicles.
    pub fn from_yaw(yaw: f64, translation: [f64; 3]) -> Self {
        Self {
            rotation: *Rotation3::from_axis_angle(&Vector3::z_axis(), yaw).matrix(),
            translation: Vector3::from(translation),
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// Yaw of the rotated `+x` axis.
    pub fn yaw(&self) -> f64 {
        self.rotation[(1, 0)].atan2(self.rotation[(0, 0)])
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        let q = self.rotation * p.coords() + self.translation;
        Point3::new(q.x, q.y, q.z, p.intensity)
    }

    /// Row-major 3×4 `[R | t]`, the on-disk pose layout.
    #[rustfmt::skip]
    pub fn to_row_major(&self) -> [f64; 12] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[(0, 0)], r[(0, 1)], r[(0, 2)], t.x,
            r[(1, 0)], r[(1, 1)], r[(1, 2)], t.y,
            r[(2, 0)], r[(2, 1)], r[(2, 2)], t.z,
        ]
    }

    pub fn from_row_major(m: &[f64; 12], tol: f64) -> Result<Self> {
        let rotation = Matrix3::new(m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10]);
        Self::with_tolerance(rotation, Vector3::new(m[3], m[7], m[11]), tol)
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

pub fn transform_points(pose: &Pose, points: &[Point3]) -> Vec<Point3> {
    points.iter().map(|p| pose.apply(p)).collect()
}

/// Oriented 3D box. `(x, y, z)` is the geometric center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct Box3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub l: f64,
    pub w: f64,
    pub h: f64,
    pub theta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    x: f64,
    y: f64,
    z: f64,
    l: f64,
    w: f64,
    h: f64,
    theta: f64,
}

impl TryFrom<RawBox> for Box3D {
    type Error = Error;

    fn try_from(r: RawBox) -> Result<Self> {
        Box3D::new(r.x, r.y, r.z, r.l, r.w, r.h, r.theta)
    }
}

impl Box3D {
    /// Validates extents and wraps `theta` into `[-π, π)`.
    pub fn new(x: f64, y: f64, z: f64, l: f64, w: f64, h: f64, theta: f64) -> Result<Self> {
        for (name, v) in [("x", x), ("y", y), ("z", z), ("theta", theta)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("box.{name}"), "not finite"));
            }
        }
        for (name, v) in [("l", l), ("w", w), ("h", h)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    format!("box.{name}"),
                    format!("extent must be > 0, got {v}"),
                ));
            }
        }
        Ok(Self {
            x,
            y,
            z,
            l,
            w,
            h,
            theta: normalize_angle(theta),
        })
    }

    pub fn bev(&self) -> BevBox {
        BevBox {
            x: self.x,
            y: self.y,
            l: self.l,
            w: self.w,
            theta: self.theta,
        }
    }

    pub fn z_min(&self) -> f64 {
        self.z - self.h / 2.0
    }

    pub fn z_max(&self) -> f64 {
        self.z + self.h / 2.0
    }

    pub fn volume(&self) -> f64 {
        self.l * self.w * self.h
    }

    pub fn contains(&self, p: &Point3, tol: f64) -> bool {
        p.z >= self.z_min() - tol && p.z <= self.z_max() + tol && self.bev().contains(p.bev(), tol)
    }

    /// Eight corners, bottom face first, each face counter-clockwise.
    pub fn corners(&self) -> [[f64; 3]; 8] {
        let c = self.bev().corners();
        let (lo, hi) = (self.z_min(), self.z_max());
        std::array::from_fn(|i| {
            let [x, y] = c[i % 4];
            [x, y, if i < 4 { lo } else { hi }]
        })
    }
}

/// Bird's-eye-view footprint of a [`Box3D`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BevBox {
    pub x: f64,
    pub y: f64,
    pub l: f64,
    pub w: f64,
    pub theta: f64,
}

impl BevBox {
    pub fn axes(&self) -> ([f64; 2], [f64; 2]) {
        let (s, c) = self.theta.sin_cos();
        ([c, s], [-s, c])
    }

    /// Counter-clockwise corners.
    pub fn corners(&self) -> [[f64; 2]; 4] {
        let (u, v) = self.axes();
        let (hl, hw) = (self.l / 2.0, self.w / 2.0);
        [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)].map(|(a, b)| {
            [
                self.x + a * hl * u[0] + b * hw * v[0],
                self.y + a * hl * u[1] + b * hw * v[1],
            ]
        })
    }

    /// Coordinates of `p` in the box frame (along heading, across heading).
    pub fn to_local(&self, p: [f64; 2]) -> [f64; 2] {
        let (u, v) = self.axes();
        let d = [p[0] - self.x, p[1] - self.y];
        [d[0] * u[0] + d[1] * u[1], d[0] * v[0] + d[1] * v[1]]
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        let [a, b] = self.to_local(p);
        a.abs() <= self.l / 2.0 + tol && b.abs() <= self.w / 2.0 + tol
    }

    pub fn area(&self) -> f64 {
        self.l * self.w
    }

    pub fn circumradius(&self) -> f64 {
        self.l.hypot(self.w) / 2.0
    }
}
