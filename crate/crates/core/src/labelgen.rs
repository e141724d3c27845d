//! Click-to-label generation.
//!
//! Each click is classified static or dynamic from point persistence in a
//! frame window. Static clicks get a box fitted on the points aggregated over
//! the whole window; dynamic clicks get the single-frame point mask of the
//! nearest cluster.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{dbscan, nearest_cluster, ClusterParams, Projection};
use crate::error::{Error, Result};
use crate::geometry::{centroid, fit_lshape_box, Box3D, Point3};
use crate::sequence::{
    build_window, classify_motion, neighborhood_series, persistence_profile, ClickAnnotation,
    FrameWindow, GroundConfig, MotionState, NeighborhoodSeries, PointCloudFrame, WorldFrame,
};

/// Box-level label: regression and classification target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxLabel {
    pub frame_id: i64,
    pub class_label: String,
    #[serde(rename = "box")]
    pub bbox: Box3D,
    /// `None` for labels mined from detector output.
    pub source_click: Option<ClickAnnotation>,
}

/// Mask-level label: foreground points of one object in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMask")]
pub struct MaskLabel {
    pub frame_id: i64,
    pub class_label: String,
    #[serde(with = "point_rows")]
    pub points: Vec<Point3>,
    pub centroid: [f64; 3],
    pub source_click: Option<ClickAnnotation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMask {
    frame_id: i64,
    class_label: String,
    #[serde(with = "point_rows")]
    points: Vec<Point3>,
    centroid: [f64; 3],
    source_click: Option<ClickAnnotation>,
}

impl TryFrom<RawMask> for MaskLabel {
    type Error = Error;

    fn try_from(raw: RawMask) -> Result<Self> {
        let mean = centroid(&raw.points).ok_or_else(|| Error::invalid("mask.points", "empty"))?;
        for (m, c) in mean.iter().zip(raw.centroid) {
            if (m - c).abs() > 1e-9 * (1.0 + m.abs()) {
                return Err(Error::invalid(
                    "mask.centroid",
                    format!("{:?} is not the mean of the points {mean:?}", raw.centroid),
                ));
            }
        }
        Ok(MaskLabel {
            frame_id: raw.frame_id,
            class_label: raw.class_label,
            points: raw.points,
            centroid: raw.centroid,
            source_click: raw.source_click,
        })
    }
}

impl MaskLabel {
    /// Builds a mask from a non-empty point set; `None` if `points` is empty.
    pub fn new(
        frame_id: i64,
        class_label: String,
        points: Vec<Point3>,
        source_click: Option<ClickAnnotation>,
    ) -> Option<Self> {
        let centroid = centroid(&points)?;
        Some(Self {
            frame_id,
            class_label,
            points,
            centroid,
            source_click,
        })
    }
}

/// Masks store points as `[x, y, z, intensity]` rows.
mod point_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::geometry::Point3;

    pub fn serialize<S: Serializer>(points: &[Point3], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[f64; 4]> = points
            .iter()
            .map(|p| [p.x, p.y, p.z, p.intensity])
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Point3>, D::Error> {
        let rows = Vec::<[f64; 4]>::deserialize(d)?;
        Ok(rows
            .into_iter()
            .map(|[x, y, z, i]| Point3::new(x, y, z, i))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PseudoLabel {
    Box(BoxLabel),
    Mask(MaskLabel),
}

impl PseudoLabel {
    pub fn frame_id(&self) -> i64 {
        match self {
            PseudoLabel::Box(b) => b.frame_id,
            PseudoLabel::Mask(m) => m.frame_id,
        }
    }

    pub fn class_label(&self) -> &str {
        match self {
            PseudoLabel::Box(b) => &b.class_label,
            PseudoLabel::Mask(m) => &m.class_label,
        }
    }

    pub fn source_click(&self) -> Option<&ClickAnnotation> {
        match self {
            PseudoLabel::Box(b) => b.source_click.as_ref(),
            PseudoLabel::Mask(m) => m.source_click.as_ref(),
        }
    }

    pub fn is_box(&self) -> bool {
        matches!(self, PseudoLabel::Box(_))
    }
}

/// Per-class search radius and clustering parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    /// Click neighborhood radius, meters.
    pub radius: f64,
    pub eps: f64,
    pub min_pts: usize,
}

impl ClassConfig {
    pub fn cluster_params(&self) -> ClusterParams {
        ClusterParams {
            eps: self.eps,
            min_pts: self.min_pts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabelGenConfig {
    /// Window half-width in frames.
    pub k: usize,
    /// Presence ratio above which a click is static.
    pub tau_duration: f64,
    pub classes: BTreeMap<String, ClassConfig>,
    pub ground: GroundConfig,
}

impl Default for LabelGenConfig {
    fn default() -> Self {
        let class = |radius, eps, min_pts| ClassConfig {
            radius,
            eps,
            min_pts,
        };
        let classes = [
            ("car", class(2.0, 0.7, 5)),
            ("pedestrian", class(0.5, 0.4, 4)),
            ("cyclist", class(1.0, 0.5, 4)),
            ("truck", class(4.0, 0.7, 5)),
            ("bus", class(4.0, 0.7, 5)),
        ]
        .into_iter()
        .map(|(name, c)| (name.to_string(), c))
        .collect();
        Self {
            k: 5,
            tau_duration: 0.6,
            classes,
            ground: GroundConfig::default(),
        }
    }
}

impl LabelGenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_duration > 0.0 && self.tau_duration < 1.0) {
            return Err(Error::invalid(
                "labelgen.tau_duration",
                format!("must be in (0, 1), got {}", self.tau_duration),
            ));
        }
        if self.classes.is_empty() {
            return Err(Error::invalid(
                "labelgen.classes",
                "at least one class is required",
            ));
        }
        for (name, c) in &self.classes {
            if !(c.radius.is_finite() && c.radius > 0.0) {
                return Err(Error::invalid(
                    format!("labelgen.classes.{name}.radius"),
                    format!("must be > 0, got {}", c.radius),
                ));
            }
            c.cluster_params().validate().map_err(|e| match e {
                Error::Invalid { field, reason } => {
                    Error::invalid(format!("labelgen.classes.{name}.{field}"), reason)
                }
                other => other,
            })?;
        }
        self.ground.validate()
    }

    pub fn class(&self, name: &str) -> Result<&ClassConfig> {
        self.classes
            .get(name)
            .ok_or_else(|| Error::invalid("class_label", format!("unknown class {name:?}")))
    }
}

/// Ground removal plus world transform for every frame, in parallel.
pub fn prepare_frames(
    frames: &[PointCloudFrame],
    ground: &GroundConfig,
    seed: u64,
) -> Vec<WorldFrame> {
    frames
        .par_iter()
        .map(|f| WorldFrame::prepare(f, ground, seed))
        .collect()
}

struct Fitted<T> {
    label: T,
    cluster_size: usize,
}

fn click2box_from_series(
    window: &FrameWindow<'_>,
    series: &NeighborhoodSeries,
    click: &ClickAnnotation,
    class: &ClassConfig,
) -> Result<Fitted<BoxLabel>> {
    let dense: Vec<Point3> = window
        .frames()
        .iter()
        .zip(&series.frames)
        .flat_map(|(frame, nbrs)| nbrs.indices.iter().map(|&i| frame.points[i]))
        .collect();
    let clusters = dbscan(&dense, &class.cluster_params(), Projection::Full3D);
    let cluster = nearest_cluster(&clusters, click.position())?;
    let bbox = fit_lshape_box(&cluster.points(&dense))?;
    Ok(Fitted {
        label: BoxLabel {
            frame_id: click.frame_id,
            class_label: click.class_label.clone(),
            bbox,
            source_click: Some(click.clone()),
        },
        cluster_size: cluster.len(),
    })
}

/// Box label from the points near the click aggregated over the window.
pub fn click2box(
    window: &FrameWindow<'_>,
    click: &ClickAnnotation,
    cfg: &LabelGenConfig,
) -> Result<BoxLabel> {
    let class = cfg.class(&click.class_label)?;
    let series = neighborhood_series(window, click, class.radius)?;
    click2box_from_series(window, &series, click, class).map(|f| f.label)
}

fn click2mask_inner(
    frame: &WorldFrame,
    click: &ClickAnnotation,
    class: &ClassConfig,
) -> Result<Fitted<MaskLabel>> {
    let c = click.position();
    let reach = 2.0 * class.radius;
    let local: Vec<Point3> = frame
        .points
        .iter()
        .copied()
        .filter(|p| p.bev_distance(c) <= reach)
        .collect();
    let clusters = dbscan(&local, &class.cluster_params(), Projection::Full3D);
    let cluster = nearest_cluster(&clusters, c)?;
    let label = MaskLabel::new(
        click.frame_id,
        click.class_label.clone(),
        cluster.points(&local),
        Some(click.clone()),
    )
    .ok_or(Error::NoClusterFound)?;
    Ok(Fitted {
        label,
        cluster_size: cluster.len(),
    })
}

/// Mask label from the clicked frame alone.
pub fn click2mask(
    frame: &WorldFrame,
    click: &ClickAnnotation,
    cfg: &LabelGenConfig,
) -> Result<MaskLabel> {
    let class = cfg.class(&click.class_label)?;
    click2mask_inner(frame, click, class).map(|f| f.label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Box,
    Mask,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickDiagnostic {
    pub click_index: usize,
    pub frame_id: i64,
    pub class_label: String,
    pub motion: Option<MotionState>,
    pub window_frames: usize,
    pub delta_t: usize,
    pub ratio: f64,
    pub cluster_size: Option<usize>,
    pub outcome: Outcome,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedClick {
    pub click_index: usize,
    pub frame_id: i64,
    /// Stable error code, e.g. `no_cluster_found`.
    pub reason: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub clicks: usize,
    pub static_count: usize,
    pub dynamic_count: usize,
    pub box_labels: usize,
    pub mask_labels: usize,
    pub skipped: Vec<SkippedClick>,
    pub per_click: Vec<ClickDiagnostic>,
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::NoClusterFound => "no_cluster_found",
        Error::DegenerateCluster(_) => "degenerate_cluster",
        Error::FrameNotFound(_) => "frame_not_found",
        Error::Invalid { .. } => "invalid_click",
        _ => "error",
    }
}

fn label_one(
    frames: &[WorldFrame],
    index: usize,
    click: &ClickAnnotation,
    cfg: &LabelGenConfig,
) -> (Result<PseudoLabel>, ClickDiagnostic) {
    let mut diag = ClickDiagnostic {
        click_index: index,
        frame_id: click.frame_id,
        class_label: click.class_label.clone(),
        motion: None,
        window_frames: 0,
        delta_t: 0,
        ratio: 0.0,
        cluster_size: None,
        outcome: Outcome::Skipped,
        error: None,
    };
    let result = (|| -> Result<PseudoLabel> {
        let class = cfg.class(&click.class_label)?;
        if !(click.x.is_finite() && click.y.is_finite()) {
            return Err(Error::invalid("click", "non-finite coordinates"));
        }
        let window = build_window(frames, click.frame_id, cfg.k)?;
        let series = neighborhood_series(&window, click, class.radius)?;
        let profile = persistence_profile(&series);
        let motion = classify_motion(&profile, cfg.tau_duration);
        diag.window_frames = window.len();
        diag.delta_t = profile.delta_t;
        diag.ratio = profile.ratio;
        diag.motion = Some(motion);
        match motion {
            MotionState::Static => {
                let fitted = click2box_from_series(&window, &series, click, class)?;
                diag.cluster_size = Some(fitted.cluster_size);
                Ok(PseudoLabel::Box(fitted.label))
            }
            MotionState::Dynamic => {
                let fitted = click2mask_inner(window.center_frame(), click, class)?;
                diag.cluster_size = Some(fitted.cluster_size);
                Ok(PseudoLabel::Mask(fitted.label))
            }
        }
    })();
    match &result {
        Ok(label) => {
            diag.outcome = if label.is_box() {
                Outcome::Box
            } else {
                Outcome::Mask
            };
        }
        Err(e) => {
            log::warn!("click {index} (frame {}): skipped: {e}", click.frame_id);
            diag.error = Some(e.to_string());
        }
    }
    (result, diag)
}

/// Runs the per-click pipeline over prepared (ground-removed, world-frame)
/// frames. Failed clicks are reported, never fatal. Labels keep click order.
pub fn generate_pseudo_labels(
    frames: &[WorldFrame],
    clicks: &[ClickAnnotation],
    cfg: &LabelGenConfig,
) -> (Vec<PseudoLabel>, GenerationReport) {
    let results: Vec<_> = clicks
        .par_iter()
        .enumerate()
        .map(|(i, click)| label_one(frames, i, click, cfg))
        .collect();

    let mut report = GenerationReport {
        clicks: clicks.len(),
        ..Default::default()
    };
    let mut labels = Vec::new();
    for (result, diag) in results {
        match diag.motion {
            Some(MotionState::Static) => report.static_count += 1,
            Some(MotionState::Dynamic) => report.dynamic_count += 1,
            None => {}
        }
        match result {
            Ok(label) => {
                if label.is_box() {
                    report.box_labels += 1;
                } else {
                    report.mask_labels += 1;
                }
                labels.push(label);
            }
            Err(e) => report.skipped.push(SkippedClick {
                click_index: diag.click_index,
                frame_id: diag.frame_id,
                reason: error_code(&e).to_string(),
                message: e.to_string(),
            }),
        }
        report.per_click.push(diag);
    }
    (labels, report)
}
