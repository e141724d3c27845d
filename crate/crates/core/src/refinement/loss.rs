//! Reference mixed-supervision loss: box regression on box labels,
//! classification on all labels, BEV center position on mask labels.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{greedy_match, mask_box, PredictionRecord};
use crate::error::{Error, Result};
use crate::geometry::bev_iou;
use crate::labelgen::{BoxLabel, MaskLabel, PseudoLabel};

/// Confidence floor inside the log of the cross-entropy.
const CONF_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SupervisionSets<'a> {
    pub regression: Vec<&'a BoxLabel>,
    pub classification: Vec<&'a PseudoLabel>,
    pub position: Vec<&'a MaskLabel>,
}

pub fn assign_supervision(labels: &[PseudoLabel]) -> SupervisionSets<'_> {
    let mut sets = SupervisionSets::default();
    for l in labels {
        sets.classification.push(l);
        match l {
            PseudoLabel::Box(b) => sets.regression.push(b),
            PseudoLabel::Mask(m) => sets.position.push(m),
        }
    }
    sets
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedLossBreakdown {
    pub reg: f64,
    pub cls: f64,
    pub pos: f64,
    pub total: f64,
    pub lambda: f64,
    /// Box labels.
    pub n_box: usize,
    /// Mask labels.
    pub n_mask: usize,
    /// All labels.
    pub n_all: usize,
    /// Box labels with a matched prediction (the regression mean runs over these).
    pub n_box_matched: usize,
    /// Mask labels with a matched prediction (the position mean runs over these).
    pub n_mask_matched: usize,
}

/// Smooth-L1 with `beta = 1`.
pub fn smooth_l1(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        0.5 * a * a
    } else {
        a - 0.5
    }
}

/// Heading residual wrapped to `[-pi/2, pi/2)`; a box and its 180° flip agree.
fn yaw_residual(a: f64, b: f64) -> f64 {
    (a - b + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2
}

/// Pairs each label with at most one prediction of the same frame and class,
/// greedily by descending BEV IoU. Masks are compared through their fitted box.
pub fn match_predictions<'p>(
    labels: &[PseudoLabel],
    preds: &'p [PredictionRecord],
    iou_min: f64,
) -> Vec<Option<&'p PredictionRecord>> {
    let mut candidates = Vec::new();
    for (li, l) in labels.iter().enumerate() {
        let b = match l {
            PseudoLabel::Box(b) => Some(b.bbox),
            PseudoLabel::Mask(m) => mask_box(m),
        };
        let Some(b) = b else { continue };
        for (pi, p) in preds.iter().enumerate() {
            if p.same_group(l.frame_id(), l.class_label()) {
                let iou = bev_iou(&b, &p.bbox);
                if iou > 0.0 && iou >= iou_min {
                    candidates.push((iou, li, pi));
                }
            }
        }
    }
    let mut out = vec![None; labels.len()];
    for (_, li, pi) in greedy_match(candidates, labels.len(), preds.len()) {
        out[li] = Some(&preds[pi]);
    }
    out
}

fn mean(sum: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Evaluates the mixed loss for labels paired with `matched[i]`.
pub fn mixed_loss(
    labels: &[PseudoLabel],
    matched: &[Option<&PredictionRecord>],
    lambda: f64,
) -> Result<MixedLossBreakdown> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    if labels.len() != matched.len() {
        return Err(Error::invalid(
            "matched",
            format!("{} labels but {} match slots", labels.len(), matched.len()),
        ));
    }
    let (mut reg, mut cls, mut pos) = (0.0, 0.0, 0.0);
    let (mut n_box, mut n_mask, mut n_box_matched, mut n_mask_matched) = (0, 0, 0, 0);
    for (label, pred) in labels.iter().zip(matched) {
        let conf = pred.map_or(0.0, |p| p.confidence);
        cls += -conf.max(CONF_FLOOR).ln();
        match (label, pred) {
            (PseudoLabel::Box(_), None) => n_box += 1,
            (PseudoLabel::Mask(_), None) => n_mask += 1,
            (PseudoLabel::Box(b), Some(p)) => {
                n_box += 1;
                n_box_matched += 1;
                let (t, q) = (&b.bbox, &p.bbox);
                reg += [
                    q.x - t.x,
                    q.y - t.y,
                    q.z - t.z,
                    q.l - t.l,
                    q.w - t.w,
                    q.h - t.h,
                ]
                .into_iter()
                .chain([yaw_residual(q.theta, t.theta)])
                .map(smooth_l1)
                .sum::<f64>();
            }
            (PseudoLabel::Mask(m), Some(p)) => {
                n_mask += 1;
                n_mask_matched += 1;
                pos += smooth_l1(p.bbox.x - m.centroid[0]) + smooth_l1(p.bbox.y - m.centroid[1]);
            }
        }
    }
    let reg = mean(reg, n_box_matched);
    let cls = mean(cls, labels.len());
    let pos = mean(pos, n_mask_matched);
    Ok(MixedLossBreakdown {
        reg,
        cls,
        pos,
        total: reg + cls + lambda * pos,
        lambda,
        n_box,
        n_mask,
        n_all: labels.len(),
        n_box_matched,
        n_mask_matched,
    })
}
