//! Dataset files, click simulation, the synthetic scene generator and label
//! evaluation.

mod clicks;
mod detections;
mod eval;
pub mod io;
mod synth;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use clicks::{simulate_clicks, SimulatedClick, Sparsity};
pub use detections::simulate_detections;
pub use eval::{evaluate_labels, ClassEval, EvalReport, ThresholdEval};
pub use synth::{generate_synthetic_scene, EgoSpec, ObjectSpec, SynthScene, SynthSceneSpec};

use crate::error::{Error, Result};
use crate::geometry::Box3D;
use crate::sequence::{validate_sequence, PointCloudFrame};

/// A ground-truth box of one object instance in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthBox {
    pub frame_id: i64,
    pub instance_id: u64,
    pub class_label: String,
    #[serde(rename = "box")]
    pub bbox: Box3D,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameEntry {
    pub frame_id: i64,
    pub timestamp: f64,
    /// Binary point file, relative to the manifest.
    pub path: PathBuf,
}

/// Describes one sequence on disk. Paths are relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub sequence_id: String,
    pub frames: Vec<FrameEntry>,
    /// One pose per frame, in frame order.
    pub poses: PathBuf,
    pub classes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<PathBuf>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.frames.is_empty() {
            return Err(Error::invalid("manifest.frames", "no frames"));
        }
        validate_sequence(self.frames.iter().map(|f| &f.frame_id))
    }
}

/// A manifest with its directory, for resolving relative paths.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub root: PathBuf,
}

impl Dataset {
    pub const MANIFEST: &'static str = "manifest.json";

    /// Opens a manifest file, or `manifest.json` inside a directory.
    pub fn open(path: &Path) -> Result<Self> {
        let file = if path.is_dir() {
            path.join(Self::MANIFEST)
        } else {
            path.to_path_buf()
        };
        let manifest: DatasetManifest = io::read_json(&file)?;
        manifest.validate()?;
        let root = file.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { manifest, root })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.root.join(p)
    }

    /// Reads all frames and poses, in manifest order.
    pub fn load_sequence(&self) -> Result<Vec<PointCloudFrame>> {
        let poses = io::read_poses(&self.resolve(&self.manifest.poses))?;
        if poses.len() != self.manifest.frames.len() {
            return Err(Error::MissingPose {
                frames: self.manifest.frames.len(),
                poses: poses.len(),
            });
        }
        self.manifest
            .frames
            .par_iter()
            .zip(poses)
            .map(|(entry, pose)| {
                Ok(PointCloudFrame {
                    frame_id: entry.frame_id,
                    timestamp: entry.timestamp,
                    points: io::read_points(&self.resolve(&entry.path))?,
                    pose,
                })
            })
            .collect()
    }

    pub fn load_ground_truth(&self) -> Result<Vec<GroundTruthBox>> {
        let path = self.manifest.ground_truth.as_ref().ok_or_else(|| {
            Error::invalid("manifest.ground_truth", "dataset has no ground truth")
        })?;
        io::read_jsonl(&self.resolve(path))
    }
}

/// Writes a sequence as `manifest.json`, `poses.txt`, `frames/NNNNNN.bin`
/// and, when given, `gt.jsonl` under `dir`.
pub fn write_dataset(
    dir: &Path,
    sequence_id: &str,
    frames: &[PointCloudFrame],
    classes: &[String],
    gt: Option<&[GroundTruthBox]>,
) -> Result<Dataset> {
    let entries: Vec<FrameEntry> = frames
        .iter()
        .map(|f| FrameEntry {
            frame_id: f.frame_id,
            timestamp: f.timestamp,
            path: PathBuf::from(format!("frames/{:06}.bin", f.frame_id)),
        })
        .collect();
    frames
        .par_iter()
        .zip(&entries)
        .try_for_each(|(f, e)| io::write_points(&dir.join(&e.path), &f.points))?;
    let poses: Vec<_> = frames.iter().map(|f| f.pose).collect();
    io::write_poses(&dir.join("poses.txt"), &poses)?;
    let ground_truth = match gt {
        Some(gt) => {
            io::write_jsonl(&dir.join("gt.jsonl"), gt)?;
            Some(PathBuf::from("gt.jsonl"))
        }
        None => None,
    };
    let manifest = DatasetManifest {
        sequence_id: sequence_id.into(),
        frames: entries,
        poses: PathBuf::from("poses.txt"),
        classes: classes.to_vec(),
        ground_truth,
    };
    manifest.validate()?;
    io::write_json(&dir.join(Dataset::MANIFEST), &manifest)?;
    Ok(Dataset {
        manifest,
        root: dir.to_path_buf(),
    })
}
