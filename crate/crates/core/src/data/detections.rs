//! A stand-in detector for demos and tests: noisy copies of ground-truth
//! boxes, once on the original scene and once on an augmented copy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::GroundTruthBox;
use crate::error::Result;
use crate::geometry::Box3D;
use crate::refinement::{AugmentationSpec, PredictionRecord};
use crate::rng::derive_seed;

/// BEV center noise of the augmented-scene prediction for the three
/// consistency grades an instance can get, meters.
const AUGMENTED_SIGMA: [f64; 3] = [0.03, 0.5, 1.5];
const ORIGINAL_SIGMA: f64 = 0.05;

fn jitter(b: &Box3D, sigma: f64, rng: &mut ChaCha8Rng) -> Result<Box3D> {
    let n = Normal::new(0.0, sigma).expect("sigma >= 0");
    Box3D::new(
        b.x + n.sample(rng),
        b.y + n.sample(rng),
        b.z,
        b.l,
        b.w,
        b.h,
        b.theta + 0.05 * n.sample(rng),
    )
}

/// Returns predictions on the original scene and predictions on the scene
/// transformed by `spec` (in augmented coordinates).
///
/// Each instance is drawn independently from a stream keyed by its frame
/// and instance id, so output does not depend on input order beyond the
/// order of the returned records, which follows `gt`.
pub fn simulate_detections(
    gt: &[GroundTruthBox],
    spec: &AugmentationSpec,
    seed: u64,
) -> Result<(Vec<PredictionRecord>, Vec<PredictionRecord>)> {
    spec.validate()?;
    let mut original = Vec::with_capacity(gt.len());
    let mut augmented = Vec::with_capacity(gt.len());
    for g in gt {
        let key = derive_seed(g.frame_id as u64, g.instance_id);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, key));
        let grade = rng.random_range(0..AUGMENTED_SIGMA.len());
        let confidence = rng.random_range(0.75..=1.0);
        let a = jitter(&g.bbox, ORIGINAL_SIGMA, &mut rng)?;
        let b = jitter(&g.bbox, AUGMENTED_SIGMA[grade], &mut rng)?;
        original.push(PredictionRecord::new(
            g.frame_id,
            g.class_label.clone(),
            confidence,
            a,
        )?);
        augmented.push(PredictionRecord::new(
            g.frame_id,
            g.class_label.clone(),
            confidence,
            spec.apply_box(&b),
        )?);
    }
    Ok((original, augmented))
}
