//! Detector-side refinement over externally produced prediction files.
//!
//! One pass filters confident predictions, scores them by agreement with
//! predictions made on an augmented copy of the scene, upgrades mask labels
//! that a confident box explains, and expands supervision with newly mined
//! box and mask labels.

mod augment;
mod loss;
mod thresholds;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use augment::{
    apply_augmentation, apply_augmentation_points, invert_augmentation, invert_predictions,
    AugmentationSpec,
};
pub use loss::{
    assign_supervision, match_predictions, mixed_loss, smooth_l1, MixedLossBreakdown,
    SupervisionSets,
};
pub use thresholds::{dual_thresholds, DualThresholds, Tier};

use crate::error::{Error, Result};
use crate::geometry::{bev_iou, fit_lshape_box, Box3D};
use crate::labelgen::{BoxLabel, MaskLabel, PseudoLabel};
use crate::sequence::WorldFrame;

/// A detector box with its class and confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPrediction")]
pub struct PredictionRecord {
    pub frame_id: i64,
    pub class_label: String,
    pub confidence: f64,
    #[serde(rename = "box")]
    pub bbox: Box3D,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrediction {
    frame_id: i64,
    class_label: String,
    confidence: f64,
    #[serde(rename = "box")]
    bbox: Box3D,
}

impl TryFrom<RawPrediction> for PredictionRecord {
    type Error = Error;

    fn try_from(raw: RawPrediction) -> Result<Self> {
        PredictionRecord::new(raw.frame_id, raw.class_label, raw.confidence, raw.bbox)
    }
}

impl PredictionRecord {
    pub fn new(frame_id: i64, class_label: String, confidence: f64, bbox: Box3D) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::invalid(
                "prediction.confidence",
                format!("must be in [0, 1], got {confidence}"),
            ));
        }
        Ok(Self {
            frame_id,
            class_label,
            confidence,
            bbox,
        })
    }

    fn same_group(&self, frame_id: i64, class_label: &str) -> bool {
        self.frame_id == frame_id && self.class_label == class_label
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentScore {
    pub prediction: PredictionRecord,
    pub score: f64,
}

/// Keeps predictions with `confidence >= threshold`, in input order.
pub fn filter_high_confidence(preds: &[PredictionRecord], threshold: f64) -> Vec<PredictionRecord> {
    preds
        .iter()
        .filter(|p| p.confidence >= threshold)
        .cloned()
        .collect()
}

/// Greedy one-to-one assignment: candidates `(iou, left, right)` are taken in
/// order of descending IoU, ties broken by indices.
fn greedy_match(
    mut candidates: Vec<(f64, usize, usize)>,
    n_left: usize,
    n_right: usize,
) -> Vec<(f64, usize, usize)> {
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut left = vec![false; n_left];
    let mut right = vec![false; n_right];
    let mut out = Vec::new();
    for (iou, l, r) in candidates {
        if !left[l] && !right[r] {
            left[l] = true;
            right[r] = true;
            out.push((iou, l, r));
        }
    }
    out
}

/// Tight box around a mask, used only for overlap tests.
fn mask_box(mask: &MaskLabel) -> Option<Box3D> {
    fit_lshape_box(&mask.points).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Upgrade {
    /// Index into the label list.
    pub label_index: usize,
    /// Index into the prediction list.
    pub prediction_index: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UpgradeReport {
    pub masks_considered: usize,
    /// Masks whose points admit no box fit; always retained.
    pub masks_unfittable: usize,
    pub upgrades: Vec<Upgrade>,
    pub masks_retained: usize,
}

/// Replaces mask labels by the confident prediction box that overlaps them
/// best, one prediction per mask.
pub fn mask2box(
    labels: &[PseudoLabel],
    preds: &[PredictionRecord],
    match_iou_min: f64,
) -> (Vec<PseudoLabel>, UpgradeReport) {
    let mut report = UpgradeReport::default();
    let mut candidates = Vec::new();
    for (li, label) in labels.iter().enumerate() {
        let PseudoLabel::Mask(mask) = label else {
            continue;
        };
        report.masks_considered += 1;
        let Some(fitted) = mask_box(mask) else {
            report.masks_unfittable += 1;
            continue;
        };
        for (pi, p) in preds.iter().enumerate() {
            if p.same_group(mask.frame_id, &mask.class_label) {
                let iou = bev_iou(&fitted, &p.bbox);
                if iou >= match_iou_min && iou > 0.0 {
                    candidates.push((iou, li, pi));
                }
            }
        }
    }
    let mut out = labels.to_vec();
    let mut matched = greedy_match(candidates, labels.len(), preds.len());
    matched.sort_by_key(|m| m.1);
    for (iou, li, pi) in matched {
        let PseudoLabel::Mask(mask) = &labels[li] else {
            unreachable!()
        };
        out[li] = PseudoLabel::Box(BoxLabel {
            frame_id: mask.frame_id,
            class_label: mask.class_label.clone(),
            bbox: preds[pi].bbox,
            source_click: mask.source_click.clone(),
        });
        report.upgrades.push(Upgrade {
            label_index: li,
            prediction_index: pi,
            iou,
        });
    }
    report.masks_retained = report.masks_considered - report.upgrades.len();
    (out, report)
}

/// Scores each original prediction by the BEV IoU of its greedy match among
/// the realigned predictions of the same frame and class; 0 if unmatched.
pub fn alignment_scores(
    original: &[PredictionRecord],
    realigned: &[PredictionRecord],
) -> Vec<AlignmentScore> {
    let mut candidates = Vec::new();
    for (i, o) in original.iter().enumerate() {
        for (j, r) in realigned.iter().enumerate() {
            if r.same_group(o.frame_id, &o.class_label) {
                let iou = bev_iou(&o.bbox, &r.bbox);
                if iou > 0.0 {
                    candidates.push((iou, i, j));
                }
            }
        }
    }
    let mut score = vec![0.0; original.len()];
    for (iou, i, _) in greedy_match(candidates, original.len(), realigned.len()) {
        score[i] = iou.clamp(0.0, 1.0);
    }
    original
        .iter()
        .zip(score)
        .map(|(p, score)| AlignmentScore {
            prediction: p.clone(),
            score,
        })
        .collect()
}

/// Turns scored predictions into new labels by tier: boxes above `mu_high`,
/// masks of the in-box points within the band, nothing below `mu_low`.
///
/// `frames` must be sorted by frame id. `min_pts` gives the minimum mask size
/// per class.
pub fn expand_supervision<F>(
    scored: &[AlignmentScore],
    thresholds: &DualThresholds,
    frames: &[WorldFrame],
    min_pts: F,
) -> Vec<PseudoLabel>
where
    F: Fn(&str) -> usize,
{
    let mut out = Vec::new();
    for s in scored {
        let p = &s.prediction;
        match thresholds.tier(s.score) {
            Tier::Box => out.push(PseudoLabel::Box(BoxLabel {
                frame_id: p.frame_id,
                class_label: p.class_label.clone(),
                bbox: p.bbox,
                source_click: None,
            })),
            Tier::Mask => {
                let Ok(fi) = frames.binary_search_by_key(&p.frame_id, |f| f.frame_id) else {
                    continue;
                };
                let inside: Vec<_> = frames[fi]
                    .points
                    .iter()
                    .filter(|q| p.bbox.contains(q, 0.0))
                    .copied()
                    .collect();
                if inside.len() >= min_pts(&p.class_label).max(1) {
                    let mask = MaskLabel::new(p.frame_id, p.class_label.clone(), inside, None)
                        .expect("non-empty");
                    out.push(PseudoLabel::Mask(mask));
                }
            }
            Tier::Discard => {}
        }
    }
    out
}

/// Parameters of one refinement pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefineConfig {
    /// Confidence cut for usable predictions.
    pub conf_threshold: f64,
    /// Minimum BEV IoU for a mask upgrade or for a prediction to count as
    /// already labeled.
    pub match_iou_min: f64,
    /// Weight of the mask position term in the mixed loss.
    pub lambda: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            conf_threshold: 0.7,
            match_iou_min: 0.3,
            lambda: 0.2,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.conf_threshold) {
            return Err(Error::invalid("refine.conf_threshold", "must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.match_iou_min) {
            return Err(Error::invalid("refine.match_iou_min", "must be in [0, 1]"));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::NegativeLambda(self.lambda));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierCounts {
    #[serde(rename = "box")]
    pub boxes: usize,
    #[serde(rename = "mask")]
    pub masks: usize,
    pub discard: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub labels_in: usize,
    pub labels_out: usize,
    pub predictions: usize,
    pub augmented_predictions: usize,
    pub high_confidence: usize,
    pub high_confidence_augmented: usize,
    /// `None` when there were too few scores; expansion is then skipped.
    pub thresholds: Option<DualThresholds>,
    pub threshold_error: Option<String>,
    /// Tiers of the predictions not already covered by a label.
    pub tiers: TierCounts,
    /// Predictions skipped because they overlap an existing label.
    pub already_labeled: usize,
    pub expanded_boxes: usize,
    pub expanded_masks: usize,
    pub upgrade: UpgradeReport,
    /// Alignment scores of all confident predictions in ten bins over [0, 1].
    pub score_histogram: [usize; 10],
}

fn histogram(scores: &[AlignmentScore]) -> [usize; 10] {
    let mut h = [0; 10];
    for s in scores {
        h[((s.score * 10.0) as usize).min(9)] += 1;
    }
    h
}

fn covered(p: &PredictionRecord, labels: &[PseudoLabel], iou_min: f64) -> bool {
    labels.iter().any(|l| {
        if !p.same_group(l.frame_id(), l.class_label()) {
            return false;
        }
        let b = match l {
            PseudoLabel::Box(b) => Some(b.bbox),
            PseudoLabel::Mask(m) => mask_box(m),
        };
        b.is_some_and(|b| bev_iou(&b, &p.bbox) >= iou_min.max(f64::MIN_POSITIVE))
    })
}

/// Checks that both prediction files cover the same frames and that all of
/// them exist in the sequence.
fn check_scope(
    preds: &[PredictionRecord],
    augmented: &[PredictionRecord],
    frames: &[WorldFrame],
) -> Result<()> {
    let a: BTreeSet<i64> = preds.iter().map(|p| p.frame_id).collect();
    let b: BTreeSet<i64> = augmented.iter().map(|p| p.frame_id).collect();
    let known: BTreeSet<i64> = frames.iter().map(|f| f.frame_id).collect();
    let mut bad: BTreeSet<i64> = a.symmetric_difference(&b).copied().collect();
    bad.extend(a.union(&b).filter(|f| !known.contains(f)));
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::ScopeMismatch(bad.into_iter().collect()))
    }
}

/// One refine and expand pass.
///
/// `augmented` holds predictions made on the scene transformed by `spec`;
/// they are mapped back before scoring. New labels are appended after the
/// (possibly upgraded) input labels, skipping predictions that overlap an
/// existing label of the same class.
pub fn refine_labels<F>(
    labels: &[PseudoLabel],
    preds: &[PredictionRecord],
    augmented: &[PredictionRecord],
    spec: &AugmentationSpec,
    frames: &[WorldFrame],
    cfg: &RefineConfig,
    min_pts: F,
) -> Result<(Vec<PseudoLabel>, RefinementReport)>
where
    F: Fn(&str) -> usize,
{
    cfg.validate()?;
    spec.validate()?;
    check_scope(preds, augmented, frames)?;

    let confident = filter_high_confidence(preds, cfg.conf_threshold);
    let realigned =
        invert_predictions(spec, &filter_high_confidence(augmented, cfg.conf_threshold));
    let scored = alignment_scores(&confident, &realigned);
    let values: Vec<f64> = scored.iter().map(|s| s.score).collect();
    let (thresholds, threshold_error) = match dual_thresholds(&values) {
        Ok(t) => (Some(t), None),
        Err(e @ Error::InsufficientScores(_)) => {
            log::warn!("{e}; skipping supervision expansion");
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };

    let (mut out, upgrade) = mask2box(labels, &confident, cfg.match_iou_min);

    let mut tiers = TierCounts::default();
    let mut already_labeled = 0;
    let (mut expanded_boxes, mut expanded_masks) = (0, 0);
    if let Some(t) = &thresholds {
        let fresh: Vec<AlignmentScore> = scored
            .iter()
            .filter(|s| {
                let c = covered(&s.prediction, &out, cfg.match_iou_min);
                already_labeled += usize::from(c);
                !c
            })
            .cloned()
            .collect();
        for s in &fresh {
            match t.tier(s.score) {
                Tier::Box => tiers.boxes += 1,
                Tier::Mask => tiers.masks += 1,
                Tier::Discard => tiers.discard += 1,
            }
        }
        let new = expand_supervision(&fresh, t, frames, min_pts);
        expanded_boxes = new.iter().filter(|l| l.is_box()).count();
        expanded_masks = new.len() - expanded_boxes;
        out.extend(new);
    }

    let report = RefinementReport {
        labels_in: labels.len(),
        labels_out: out.len(),
        predictions: preds.len(),
        augmented_predictions: augmented.len(),
        high_confidence: confident.len(),
        high_confidence_augmented: realigned.len(),
        thresholds,
        threshold_error,
        tiers,
        already_labeled,
        expanded_boxes,
        expanded_masks,
        upgrade,
        score_histogram: histogram(&scored),
    };
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;

    fn bx(x: f64, y: f64, l: f64, w: f64) -> Box3D {
        Box3D::new(x, y, 0.75, l, w, 1.5, 0.0).unwrap()
    }

    fn pred(frame: i64, class: &str, conf: f64, b: Box3D) -> PredictionRecord {
        PredictionRecord::new(frame, class.into(), conf, b).unwrap()
    }

    /// Points on a regular grid filling the BEV footprint of `b` (axis-aligned).
    fn fill(b: &Box3D, step: f64) -> Vec<Point3> {
        let nx = (b.l / step).round() as usize;
        let ny = (b.w / step).round() as usize;
        let mut pts = Vec::new();
        for i in 0..=nx {
            for j in 0..=ny {
                let x = b.x - b.l / 2.0 + i as f64 * b.l / nx as f64;
                let y = b.y - b.w / 2.0 + j as f64 * b.w / ny as f64;
                pts.push(Point3::new(x, y, 0.2 + 0.1 * ((i + j) % 10) as f64, 0.0));
            }
        }
        pts
    }

    fn mask_of(frame: i64, class: &str, b: &Box3D) -> PseudoLabel {
        PseudoLabel::Mask(MaskLabel::new(frame, class.into(), fill(b, 0.25), None).unwrap())
    }

    #[test]
    fn confidence_filter() {
        let b = bx(0.0, 0.0, 1.0, 1.0);
        let preds: Vec<_> = [0.2, 0.6, 0.9]
            .iter()
            .map(|&c| pred(0, "car", c, b))
            .collect();
        let kept = filter_high_confidence(&preds, 0.5);
        assert_eq!(kept, preds[1..].to_vec());
        assert_eq!(filter_high_confidence(&preds, 0.0), preds);
        assert!(filter_high_confidence(&preds, 1.0).is_empty());
    }

    #[test]
    fn rejects_out_of_range_confidence() {
        assert!(PredictionRecord::new(0, "car".into(), 1.2, bx(0.0, 0.0, 1.0, 1.0)).is_err());
        let json = r#"{"frame_id":0,"class_label":"car","confidence":-0.1,"box":{"x":0,"y":0,"z":0,"l":1,"w":1,"h":1,"theta":0}}"#;
        assert!(serde_json::from_str::<PredictionRecord>(json).is_err());
    }

    #[test]
    fn exact_mask_upgrades_with_unit_iou() {
        let b = bx(10.0, 5.0, 4.0, 2.0);
        let labels = vec![mask_of(1, "car", &b)];
        let (out, report) = mask2box(&labels, &[pred(1, "car", 0.9, b)], 0.3);
        assert!(out[0].is_box());
        assert!((report.upgrades[0].iou - 1.0).abs() < 1e-9);
        assert_eq!(report.masks_retained, 0);
    }

    #[test]
    fn distant_prediction_leaves_mask() {
        let b = bx(10.0, 5.0, 4.0, 2.0);
        let labels = vec![mask_of(1, "car", &b)];
        let (out, report) = mask2box(
            &labels,
            &[pred(1, "car", 0.9, bx(30.0, 5.0, 4.0, 2.0))],
            0.3,
        );
        assert_eq!(out, labels);
        assert_eq!(report.masks_retained, 1);
        // Wrong class or frame never matches.
        let (out, _) = mask2box(
            &labels,
            &[pred(1, "truck", 0.9, b), pred(2, "car", 0.9, b)],
            0.3,
        );
        assert_eq!(out, labels);
    }

    #[test]
    fn one_prediction_upgrades_the_better_mask() {
        // Prediction [0,4]x[0,2]. Mask A shifted 4/9 m in x: IoU (4-s)/(4+s) = 0.8.
        // Mask B shifted 1 m: IoU 3/5 = 0.6.
        let p = bx(2.0, 1.0, 4.0, 2.0);
        let a = bx(2.0 + 4.0 / 9.0, 1.0, 4.0, 2.0);
        let b = bx(3.0, 1.0, 4.0, 2.0);
        let oracle = |s: f64| (4.0 - s) / (4.0 + s);
        assert!((oracle(4.0 / 9.0) - 0.8).abs() < 1e-12 && (oracle(1.0) - 0.6).abs() < 1e-12);

        let labels = vec![mask_of(0, "car", &b), mask_of(0, "car", &a)];
        let (out, report) = mask2box(&labels, &[pred(0, "car", 0.9, p)], 0.3);
        assert!(!out[0].is_box() && out[1].is_box());
        assert_eq!(report.upgrades.len(), 1);
        assert_eq!(report.upgrades[0].label_index, 1);
        assert!(
            (report.upgrades[0].iou - 0.8).abs() < 1e-6,
            "{}",
            report.upgrades[0].iou
        );
    }

    #[test]
    fn box_labels_pass_through() {
        let b = bx(0.0, 0.0, 4.0, 2.0);
        let labels = vec![PseudoLabel::Box(BoxLabel {
            frame_id: 0,
            class_label: "car".into(),
            bbox: b,
            source_click: None,
        })];
        let (out, report) = mask2box(&labels, &[pred(0, "car", 0.9, bx(0.5, 0.0, 4.0, 2.0))], 0.3);
        assert_eq!(out, labels);
        assert_eq!(report.masks_considered, 0);
    }

    #[test]
    fn alignment_examples() {
        let o = vec![
            pred(0, "car", 0.9, bx(0.0, 0.0, 4.0, 2.0)),
            pred(0, "car", 0.8, bx(10.0, 0.0, 4.0, 2.0)),
        ];
        assert!(alignment_scores(&o, &o)
            .iter()
            .all(|s| (s.score - 1.0).abs() < 1e-12));
        assert!(alignment_scores(&o, &[]).iter().all(|s| s.score == 0.0));

        // Shifts giving IoU 0.9 and 0.4 against a 4 m box: s = 4(1-u)/(1+u).
        let shift = |u: f64| 4.0 * (1.0 - u) / (1.0 + u);
        let one = vec![o[0].clone()];
        let re = vec![
            pred(0, "car", 0.9, bx(shift(0.4), 0.0, 4.0, 2.0)),
            pred(0, "car", 0.9, bx(shift(0.9), 0.0, 4.0, 2.0)),
        ];
        let s = alignment_scores(&one, &re);
        assert!((s[0].score - 0.9).abs() < 1e-9);
    }

    #[test]
    fn expansion_tiers() {
        let b = bx(5.0, 5.0, 4.0, 2.0);
        let frames = vec![WorldFrame {
            frame_id: 0,
            timestamp: 0.0,
            points: fill(&b, 0.5),
            ground_warning: false,
        }];
        let t = DualThresholds::new(0.3, 0.7).unwrap();
        let scored: Vec<_> = [0.95, 0.5, 0.1]
            .iter()
            .map(|&score| AlignmentScore {
                prediction: pred(0, "car", 0.9, b),
                score,
            })
            .collect();
        let out = expand_supervision(&scored, &t, &frames, |_| 5);
        assert_eq!(out.len(), 2);
        assert!(out[0].is_box());
        let PseudoLabel::Mask(m) = &out[1] else {
            panic!()
        };
        assert_eq!(m.points.len(), 45);
        // Too few in-box points: the mask is dropped.
        assert_eq!(
            expand_supervision(&scored[1..2], &t, &frames, |_| 100).len(),
            0
        );
    }

    #[test]
    fn scope_mismatch_lists_frames() {
        let b = bx(0.0, 0.0, 4.0, 2.0);
        let frames: Vec<_> = (0..2)
            .map(|i| WorldFrame {
                frame_id: i,
                timestamp: 0.0,
                points: vec![],
                ground_warning: false,
            })
            .collect();
        let err = refine_labels(
            &[],
            &[pred(0, "car", 0.9, b), pred(5, "car", 0.9, b)],
            &[pred(0, "car", 0.9, b), pred(1, "car", 0.9, b)],
            &AugmentationSpec::default(),
            &frames,
            &RefineConfig::default(),
            |_| 5,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ScopeMismatch(ref f) if f == &vec![1, 5]));
    }

    #[test]
    fn refine_pass_counts() {
        let spec = AugmentationSpec {
            rotation: 0.4,
            flip_x: true,
            flip_y: false,
            scale: 1.1,
        };
        let mut frames = Vec::new();
        let mut preds = Vec::new();
        let mut aug = Vec::new();
        let shift = |u: f64| 4.0 * (1.0 - u) / (1.0 + u);
        for f in 0..3i64 {
            let mut points = Vec::new();
            for (k, u) in [0.95, 0.5, 0.05].iter().enumerate() {
                let b = bx(20.0 * k as f64, 10.0 * f as f64, 4.0, 2.0);
                points.extend(fill(&b, 0.5));
                preds.push(pred(f, "car", 0.9, b));
                let moved = bx(b.x + shift(*u), b.y, 4.0, 2.0);
                aug.push(pred(f, "car", 0.9, spec.apply_box(&moved)));
            }
            frames.push(WorldFrame {
                frame_id: f,
                timestamp: f as f64,
                points,
                ground_warning: false,
            });
        }
        let (out, report) = refine_labels(
            &[],
            &preds,
            &aug,
            &spec,
            &frames,
            &RefineConfig::default(),
            |_| 5,
        )
        .unwrap();
        assert_eq!(
            report.tiers,
            TierCounts {
                boxes: 3,
                masks: 3,
                discard: 3
            }
        );
        assert_eq!((report.expanded_boxes, report.expanded_masks), (3, 3));
        assert_eq!(out.len(), 6);
        assert_eq!(report.score_histogram.iter().sum::<usize>(), 9);

        // A second pass over its own output adds nothing new.
        let (again, report) = refine_labels(
            &out,
            &preds,
            &aug,
            &spec,
            &frames,
            &RefineConfig::default(),
            |_| 5,
        )
        .unwrap();
        assert_eq!(
            again.len(),
            out.len() + report.expanded_boxes + report.expanded_masks
        );
        assert_eq!(report.already_labeled, 6);
    }
}
