//! Frame windows around a click and the point-persistence motion test.

mod ground;
mod persistence;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point3, Pose};

pub use ground::{remove_ground, GroundConfig, GroundPlane, GroundRemoval};
pub use persistence::{classify_motion, persistence_profile, MotionState, PersistenceProfile};

/// One LiDAR sweep with points in the sensor frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloudFrame {
    pub frame_id: i64,
    pub timestamp: f64,
    pub points: Vec<Point3>,
    /// Sensor → world.
    pub pose: Pose,
}

/// A sweep after ground removal, expressed in the world frame.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldFrame {
    pub frame_id: i64,
    pub timestamp: f64,
    pub points: Vec<Point3>,
    /// Set when no ground plane was found and the points are unfiltered.
    pub ground_warning: bool,
}

impl WorldFrame {
    /// Transforms a sensor-frame sweep into the world frame as is.
    pub fn from_sensor(frame: &PointCloudFrame) -> Self {
        Self {
            frame_id: frame.frame_id,
            timestamp: frame.timestamp,
            points: crate::geometry::transform_points(&frame.pose, &frame.points),
            ground_warning: false,
        }
    }

    /// Ground removal in the sensor frame followed by the world transform.
    pub fn prepare(frame: &PointCloudFrame, ground: &GroundConfig, seed: u64) -> Self {
        let removal = remove_ground(frame, ground, seed);
        let mut world = Self::from_sensor(&removal.frame);
        world.ground_warning = removal.no_plane_found;
        world
    }
}

/// A single coarse BEV click, world frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClickAnnotation {
    pub frame_id: i64,
    pub x: f64,
    pub y: f64,
    pub class_label: String,
}

impl ClickAnnotation {
    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

/// Checks that frame ids are strictly increasing.
pub fn validate_sequence<'a>(frame_ids: impl IntoIterator<Item = &'a i64>) -> Result<()> {
    let mut prev: Option<i64> = None;
    for &id in frame_ids {
        if let Some(p) = prev {
            if id <= p {
                return Err(Error::invalid(
                    "sequence",
                    format!("frame ids must be strictly increasing ({p} then {id})"),
                ));
            }
        }
        prev = Some(id);
    }
    Ok(())
}

/// Up to `2k + 1` consecutive world frames centered on a clicked frame.
///
/// Near either end of a sequence the window is truncated rather than padded,
/// so `len()` may be smaller than `2k + 1`.
#[derive(Debug, Clone, Copy)]
pub struct FrameWindow<'a> {
    frames: &'a [WorldFrame],
    center: usize,
    k: usize,
}

impl<'a> FrameWindow<'a> {
    pub fn frames(&self) -> &'a [WorldFrame] {
        self.frames
    }

    /// Index of the clicked frame within [`frames`](Self::frames).
    pub fn center_index(&self) -> usize {
        self.center
    }

    pub fn center_frame(&self) -> &'a WorldFrame {
        &self.frames[self.center]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of frames actually in the window.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

pub fn build_window(sequence: &[WorldFrame], frame_id: i64, k: usize) -> Result<FrameWindow<'_>> {
    let idx = sequence
        .binary_search_by_key(&frame_id, |f| f.frame_id)
        .map_err(|_| Error::FrameNotFound(frame_id))?;
    let lo = idx.saturating_sub(k);
    let hi = (idx + k).min(sequence.len() - 1);
    Ok(FrameWindow {
        frames: &sequence[lo..=hi],
        center: idx - lo,
        k,
    })
}

/// Points of one frame whose BEV distance to the click is within the radius.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameNeighbors {
    pub frame_id: i64,
    /// Indices into that frame's world points, ascending.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodSeries {
    pub radius: f64,
    pub click: [f64; 2],
    pub frames: Vec<FrameNeighbors>,
    /// Index of the clicked frame in `frames`.
    pub center: usize,
}

impl NeighborhoodSeries {
    pub fn counts(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.indices.len()).collect()
    }
}

pub fn neighborhood_series(
    window: &FrameWindow<'_>,
    click: &ClickAnnotation,
    radius: f64,
) -> Result<NeighborhoodSeries> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(
            "radius",
            format!("must be > 0, got {radius}"),
        ));
    }
    let c = click.position();
    let r2 = radius * radius;
    let frames = window
        .frames()
        .iter()
        .map(|f| FrameNeighbors {
            frame_id: f.frame_id,
            indices: f
                .points
                .iter()
                .enumerate()
                .filter(|(_, p)| {
                    let (dx, dy) = (p.x - c[0], p.y - c[1]);
                    dx * dx + dy * dy <= r2
                })
                .map(|(i, _)| i)
                .collect(),
        })
        .collect();
    Ok(NeighborhoodSeries {
        radius,
        click: c,
        frames,
        center: window.center_index(),
    })
}
