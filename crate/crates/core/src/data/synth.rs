//! Synthetic LiDAR sequences with known boxes.
//!
//! Objects are boxes on a flat ground plane at `z = 0`, moving at constant
//! velocity along their heading. Each object's surface points are sampled
//! once in its own frame, so a static object shows the same points in every
//! frame up to sensor noise. Side faces turned away from the sensor are
//! culled; there is no occlusion between objects.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GroundTruthBox;
use crate::error::{Error, Result};
use crate::geometry::{Box3D, Point3, Pose};
use crate::rng::derive_seed;
use crate::sequence::PointCloudFrame;

const OBJECT_INTENSITY: f64 = 0.5;
const GROUND_INTENSITY: f64 = 0.1;

/// Constant-speed, constant-yaw-rate ego motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EgoSpec {
    pub start: [f64; 2],
    pub heading: f64,
    /// m/s.
    pub speed: f64,
    /// rad/s.
    pub yaw_rate: f64,
    pub sensor_height: f64,
}

impl Default for EgoSpec {
    fn default() -> Self {
        Self {
            start: [0.0, 0.0],
            heading: 0.0,
            speed: 0.0,
            yaw_rate: 0.0,
            sensor_height: 1.8,
        }
    }
}

impl EgoSpec {
    pub fn pose_at(&self, t: f64) -> Pose {
        let yaw = self.heading + self.yaw_rate * t;
        let [x0, y0] = self.start;
        let (x, y) = if self.yaw_rate.abs() < 1e-12 {
            let d = self.speed * t;
            (x0 + d * self.heading.cos(), y0 + d * self.heading.sin())
        } else {
            let r = self.speed / self.yaw_rate;
            (
                x0 + r * (yaw.sin() - self.heading.sin()),
                y0 - r * (yaw.cos() - self.heading.cos()),
            )
        };
        Pose::from_yaw(yaw, [x, y, self.sensor_height])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub class_label: String,
    /// Length, width, height, meters.
    pub size: [f64; 3],
    /// BEV center at `t = 0`.
    pub start: [f64; 2],
    pub heading: f64,
    /// Speed along the heading, m/s; 0 for a static object.
    #[serde(default)]
    pub speed: f64,
    /// Surface points per square meter.
    pub density: f64,
}

impl ObjectSpec {
    pub fn is_static(&self) -> bool {
        self.speed == 0.0
    }

    pub fn box_at(&self, t: f64) -> Result<Box3D> {
        let [l, w, h] = self.size;
        let d = self.speed * t;
        Box3D::new(
            self.start[0] + d * self.heading.cos(),
            self.start[1] + d * self.heading.sin(),
            h / 2.0,
            l,
            w,
            h,
            self.heading,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSceneSpec {
    pub sequence_id: String,
    pub seed: u64,
    pub frames: usize,
    /// Seconds between frames.
    pub frame_interval: f64,
    #[serde(default)]
    pub ego: EgoSpec,
    /// Standard deviation of per-coordinate Gaussian noise, meters.
    pub noise_sigma: f64,
    /// Points farther than this from the sensor in BEV are not returned.
    pub max_range: f64,
    /// Ground returns per frame, uniform over the sensor's range disk.
    pub ground_points: usize,
    pub objects: Vec<ObjectSpec>,
}

impl SynthSceneSpec {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, field: String, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(field, reason))
            }
        };
        check(self.frames >= 1, "frames".into(), "must be >= 1")?;
        check(
            self.frame_interval > 0.0,
            "frame_interval".into(),
            "must be > 0",
        )?;
        check(
            self.noise_sigma >= 0.0 && self.noise_sigma.is_finite(),
            "noise_sigma".into(),
            "must be >= 0",
        )?;
        check(self.max_range > 0.0, "max_range".into(), "must be > 0")?;
        let e = &self.ego;
        check(
            [
                e.start[0],
                e.start[1],
                e.heading,
                e.speed,
                e.yaw_rate,
                e.sensor_height,
            ]
            .iter()
            .all(|v| v.is_finite()),
            "ego".into(),
            "values must be finite",
        )?;
        for (i, o) in self.objects.iter().enumerate() {
            let f = |name: &str| format!("objects[{i}].{name}");
            check(
                !o.class_label.is_empty(),
                f("class_label"),
                "must not be empty",
            )?;
            check(
                o.size.iter().all(|v| *v > 0.0 && v.is_finite()),
                f("size"),
                "extents must be > 0",
            )?;
            check(
                o.density > 0.0 && o.density.is_finite(),
                f("density"),
                "must be > 0",
            )?;
            check(o.speed.is_finite(), f("speed"), "must be finite")?;
            check(
                o.start.iter().all(|v| v.is_finite()) && o.heading.is_finite(),
                f("start"),
                "must be finite",
            )?;
        }
        Ok(())
    }

    /// Object classes in sorted order.
    pub fn classes(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .objects
            .iter()
            .map(|o| o.class_label.as_str())
            .collect();
        set.into_iter().map(String::from).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SynthScene {
    /// Sensor-frame sweeps, coordinates rounded to `f32`.
    pub frames: Vec<PointCloudFrame>,
    /// Boxes of objects whose center is within range, per frame.
    pub gt: Vec<GroundTruthBox>,
    /// Per frame and point: index of the object the point belongs to, or
    /// `None` for ground.
    pub point_instances: Vec<Vec<Option<u64>>>,
}

/// A surface sample in the object frame with the face it lies on.
/// Faces 0..4 are the sides with outward normals +x, -x, +y, -y; 4 is the top.
struct Sample {
    local: [f64; 3],
    face: u8,
}

fn sample_surface(o: &ObjectSpec, rng: &mut ChaCha8Rng) -> Vec<Sample> {
    let [l, w, h] = o.size;
    let mut out = Vec::new();
    let count = |area: f64| (o.density * area).round() as usize;
    for face in 0..5u8 {
        let n = match face {
            0 | 1 => count(w * h),
            2 | 3 => count(l * h),
            _ => count(l * w),
        };
        for _ in 0..n {
            let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
            let local = match face {
                0 => [l / 2.0, (a - 0.5) * w, b * h],
                1 => [-l / 2.0, (a - 0.5) * w, b * h],
                2 => [(a - 0.5) * l, w / 2.0, b * h],
                3 => [(a - 0.5) * l, -w / 2.0, b * h],
                _ => [(a - 0.5) * l, (b - 0.5) * w, h],
            };
            out.push(Sample { local, face });
        }
    }
    out
}

/// Whether the sensor at `eye` (object frame) sees the given face.
fn face_visible(face: u8, o: &ObjectSpec, eye: [f64; 3]) -> bool {
    let [l, w, h] = o.size;
    match face {
        0 => eye[0] > l / 2.0,
        1 => eye[0] < -l / 2.0,
        2 => eye[1] > w / 2.0,
        3 => eye[1] < -w / 2.0,
        _ => eye[2] > h,
    }
}

fn quantize(p: Point3) -> Point3 {
    let q = |v: f64| v as f32 as f64;
    Point3::new(q(p.x), q(p.y), q(p.z), q(p.intensity))
}

pub fn generate_synthetic_scene(spec: &SynthSceneSpec) -> Result<SynthScene> {
    spec.validate()?;
    let surfaces: Vec<Vec<Sample>> = spec
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, u64::MAX - i as u64));
            sample_surface(o, &mut rng)
        })
        .collect();
    let noise = Normal::new(0.0, spec.noise_sigma)
        .map_err(|e| Error::invalid("noise_sigma", e.to_string()))?;

    let per_frame: Vec<Result<(PointCloudFrame, Vec<GroundTruthBox>, Vec<Option<u64>>)>> = (0
        ..spec.frames)
        .into_par_iter()
        .map(|fi| {
            let t = fi as f64 * spec.frame_interval;
            let frame_id = fi as i64;
            let pose = spec.ego.pose_at(t);
            let to_sensor = pose.inverse();
            let sensor = *pose.translation();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, fi as u64));
            let mut jitter = |p: [f64; 3]| {
                [
                    p[0] + noise.sample(&mut rng),
                    p[1] + noise.sample(&mut rng),
                    p[2] + noise.sample(&mut rng),
                ]
            };
            let in_range = |x: f64, y: f64| (x - sensor.x).hypot(y - sensor.y) <= spec.max_range;

            let mut points = Vec::new();
            let mut owners = Vec::new();
            let mut gt = Vec::new();
            for (oi, (o, surface)) in spec.objects.iter().zip(&surfaces).enumerate() {
                let b = o.box_at(t)?;
                if in_range(b.x, b.y) {
                    gt.push(GroundTruthBox {
                        frame_id,
                        instance_id: oi as u64,
                        class_label: o.class_label.clone(),
                        bbox: b,
                    });
                }
                let (s, c) = b.theta.sin_cos();
                let (dx, dy) = (sensor.x - b.x, sensor.y - b.y);
                let eye = [c * dx + s * dy, -s * dx + c * dy, sensor.z];
                for sample in surface {
                    if !face_visible(sample.face, o, eye) {
                        continue;
                    }
                    let [u, v, z] = sample.local;
                    let [x, y, z] = jitter([b.x + c * u - s * v, b.y + s * u + c * v, z]);
                    if in_range(x, y) {
                        points.push(to_sensor.apply(&Point3::new(x, y, z, OBJECT_INTENSITY)));
                        owners.push(Some(oi as u64));
                    }
                }
            }
            let mut ground_rng =
                ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, (1 << 32) + fi as u64));
            for _ in 0..spec.ground_points {
                let r = spec.max_range * ground_rng.random::<f64>().sqrt();
                let a = TAU * ground_rng.random::<f64>();
                let [x, y, z] = jitter([sensor.x + r * a.cos(), sensor.y + r * a.sin(), 0.0]);
                points.push(to_sensor.apply(&Point3::new(x, y, z, GROUND_INTENSITY)));
                owners.push(None);
            }
            let frame = PointCloudFrame {
                frame_id,
                timestamp: t,
                points: points.into_iter().map(quantize).collect(),
                pose,
            };
            Ok((frame, gt, owners))
        })
        .collect();

    let mut scene = SynthScene {
        frames: Vec::with_capacity(spec.frames),
        gt: Vec::new(),
        point_instances: Vec::with_capacity(spec.frames),
    };
    for r in per_frame {
        let (frame, gt, owners) = r?;
        scene.frames.push(frame);
        scene.gt.extend(gt);
        scene.point_instances.push(owners);
    }
    Ok(scene)
}
