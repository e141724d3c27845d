use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::GroundTruthBox;
use crate::error::{Error, Result};
use crate::geometry::{bev_iou, fit_lshape_box, iou_3d, Box3D};
use crate::labelgen::PseudoLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEval {
    pub threshold: f64,
    pub recall: f64,
    pub precision: f64,
    /// False when there is no ground truth; `recall` is then reported as 0.
    pub recall_defined: bool,
    /// False when there are no labels; `precision` is then reported as 0.
    pub precision_defined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEval {
    pub labels: usize,
    pub gt: usize,
    /// Label and ground-truth pairs with positive BEV overlap.
    pub matched: usize,
    /// Mean over matched pairs; 0 when nothing matched.
    pub mean_bev_iou: f64,
    pub mean_iou_3d: f64,
    pub at: Vec<ThresholdEval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall: ClassEval,
    pub per_class: BTreeMap<String, ClassEval>,
    /// Mask labels whose points admit no box and so never match.
    pub unfittable_masks: usize,
}

#[derive(Default)]
struct Tally {
    labels: usize,
    gt: usize,
    pairs: Vec<(f64, f64)>,
}

impl Tally {
    fn finish(&self, thresholds: &[f64]) -> ClassEval {
        let n = self.pairs.len();
        let mean = |f: fn(&(f64, f64)) -> f64| {
            if n == 0 {
                0.0
            } else {
                self.pairs.iter().map(f).sum::<f64>() / n as f64
            }
        };
        let ratio = |k: usize, d: usize| if d == 0 { 0.0 } else { k as f64 / d as f64 };
        ClassEval {
            labels: self.labels,
            gt: self.gt,
            matched: n,
            mean_bev_iou: mean(|p| p.0),
            mean_iou_3d: mean(|p| p.1),
            at: thresholds
                .iter()
                .map(|&t| {
                    let hits = self.pairs.iter().filter(|p| p.0 >= t).count();
                    ThresholdEval {
                        threshold: t,
                        recall: ratio(hits, self.gt),
                        precision: ratio(hits, self.labels),
                        recall_defined: self.gt > 0,
                        precision_defined: self.labels > 0,
                    }
                })
                .collect(),
        }
    }
}

/// Scores labels against ground truth.
///
/// Within each frame and class, labels and ground-truth boxes are paired
/// greedily by descending BEV IoU, one to one. Mask labels are compared
/// through their fitted box. A pair counts toward recall and precision at a
/// threshold when its BEV IoU reaches it.
pub fn evaluate_labels(
    labels: &[PseudoLabel],
    gt: &[GroundTruthBox],
    thresholds: &[f64],
) -> Result<EvalReport> {
    let gt_frames: BTreeSet<i64> = gt.iter().map(|g| g.frame_id).collect();
    let outside: BTreeSet<i64> = labels
        .iter()
        .map(PseudoLabel::frame_id)
        .filter(|f| !gt_frames.contains(f))
        .collect();
    if !outside.is_empty() {
        return Err(Error::ScopeMismatch(outside.into_iter().collect()));
    }

    let mut unfittable_masks = 0;
    let mut groups: BTreeMap<(&str, i64), (Vec<Option<Box3D>>, Vec<Box3D>)> = BTreeMap::new();
    for l in labels {
        let b = match l {
            PseudoLabel::Box(b) => Some(b.bbox),
            PseudoLabel::Mask(m) => {
                let fit = fit_lshape_box(&m.points).ok();
                unfittable_masks += usize::from(fit.is_none());
                fit
            }
        };
        groups
            .entry((l.class_label(), l.frame_id()))
            .or_default()
            .0
            .push(b);
    }
    for g in gt {
        groups
            .entry((&g.class_label, g.frame_id))
            .or_default()
            .1
            .push(g.bbox);
    }

    let mut per_class: BTreeMap<&str, Tally> = BTreeMap::new();
    for ((class, _), (ls, gs)) in &groups {
        let tally = per_class.entry(class).or_default();
        tally.labels += ls.len();
        tally.gt += gs.len();
        let mut cand = Vec::new();
        for (i, l) in ls.iter().enumerate() {
            let Some(l) = l else { continue };
            for (j, g) in gs.iter().enumerate() {
                let iou = bev_iou(l, g);
                if iou > 0.0 {
                    cand.push((iou, i, j));
                }
            }
        }
        cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let (mut lu, mut gu) = (vec![false; ls.len()], vec![false; gs.len()]);
        for (iou, i, j) in cand {
            if !lu[i] && !gu[j] {
                lu[i] = true;
                gu[j] = true;
                tally
                    .pairs
                    .push((iou, iou_3d(ls[i].as_ref().unwrap(), &gs[j])));
            }
        }
    }

    let mut all = Tally::default();
    for t in per_class.values() {
        all.labels += t.labels;
        all.gt += t.gt;
        all.pairs.extend(&t.pairs);
    }
    Ok(EvalReport {
        overall: all.finish(thresholds),
        per_class: per_class
            .iter()
            .map(|(c, t)| (c.to_string(), t.finish(thresholds)))
            .collect(),
        unfittable_masks,
    })
}
