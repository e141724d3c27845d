use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GroundTruthBox;
use crate::error::{Error, Result};
use crate::sequence::ClickAnnotation;

/// Which instances get clicked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sparsity {
    /// One instance per frame, chosen uniformly.
    OnePerFrame,
    /// Every instance in every frame.
    AllInstances,
}

/// A click together with the instance it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedClick {
    pub instance_id: u64,
    pub click: ClickAnnotation,
}

/// Perturbed clicks on ground-truth boxes.
///
/// Each click is the box center plus an offset drawn uniformly from
/// `[-delta*l/2, delta*l/2] x [-delta*w/2, delta*w/2]` in the box frame.
/// Boxes are visited by frame id, then instance id, so the result depends
/// only on the seed and the set of boxes.
pub fn simulate_clicks(
    gt: &[GroundTruthBox],
    delta: f64,
    sparsity: Sparsity,
    seed: u64,
) -> Result<Vec<SimulatedClick>> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid(
            "delta",
            format!("must be >= 0, got {delta}"),
        ));
    }
    let mut sorted: Vec<&GroundTruthBox> = gt.iter().collect();
    sorted.sort_by_key(|g| (g.frame_id, g.instance_id));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for frame in sorted.chunk_by(|a, b| a.frame_id == b.frame_id) {
        let chosen: Vec<&GroundTruthBox> = match sparsity {
            Sparsity::AllInstances => frame.to_vec(),
            Sparsity::OnePerFrame => vec![frame[rng.random_range(0..frame.len())]],
        };
        for g in chosen {
            let b = &g.bbox;
            let u = delta * b.l / 2.0 * rng.random_range(-1.0..=1.0);
            let v = delta * b.w / 2.0 * rng.random_range(-1.0..=1.0);
            let (s, c) = b.theta.sin_cos();
            out.push(SimulatedClick {
                instance_id: g.instance_id,
                click: ClickAnnotation {
                    frame_id: g.frame_id,
                    x: b.x + c * u - s * v,
                    y: b.y + s * u + c * v,
                    class_label: g.class_label.clone(),
                },
            });
        }
    }
    Ok(out)
}
