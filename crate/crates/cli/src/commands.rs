use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clicklabel_core::data::io::{read_json, read_jsonl, write_json, write_jsonl};
use clicklabel_core::data::{
    evaluate_labels, generate_synthetic_scene, simulate_clicks, simulate_detections, write_dataset,
    ClassEval, Dataset, EvalReport, GroundTruthBox, SynthSceneSpec,
};
use clicklabel_core::labelgen::{generate_pseudo_labels, prepare_frames, PseudoLabel};
use clicklabel_core::refinement::{
    match_predictions, mixed_loss, refine_labels, AugmentationSpec, PredictionRecord,
};
use clicklabel_core::sequence::{ClickAnnotation, WorldFrame};

use crate::config::PipelineConfig;
use crate::{
    ClicksArgs, EvalArgs, Failure, GenlabelsArgs, LossArgs, RefineArgs, SimdetArgs, SynthArgs,
};

/// The bundled demo scene.
pub const DEMO_SPEC: &str = include_str!("../assets/demo_scene.json");

/// Minimum in-box points for a mined mask of a class missing from the config.
const DEFAULT_MIN_PTS: usize = 5;

fn require_seed(cfg: &PipelineConfig, command: &str) -> Result<u64, Failure> {
    cfg.seed.ok_or_else(|| {
        Failure::Input(format!(
            "{command} is randomized: pass --seed or set seed in the config"
        ))
    })
}

fn report_path(out: &Path, report: &Option<PathBuf>) -> PathBuf {
    report
        .clone()
        .unwrap_or_else(|| out.with_extension("report.json"))
}

fn load_world(
    dataset: &Path,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<(Dataset, Vec<WorldFrame>), Failure> {
    let ds = Dataset::open(dataset)?;
    let frames = ds.load_sequence()?;
    Ok((ds, prepare_frames(&frames, &cfg.labelgen.ground, seed)))
}

pub fn synth(a: &SynthArgs, cfg: &PipelineConfig) -> Result<(), Failure> {
    let mut spec: SynthSceneSpec = match &a.spec {
        Some(path) => read_json(path)?,
        None => serde_json::from_str(DEMO_SPEC)
            .map_err(|e| Failure::Invariant(format!("bundled demo spec: {e}")))?,
    };
    if let Some(seed) = cfg.seed {
        spec.seed = seed;
    }
    let scene = generate_synthetic_scene(&spec)?;
    let ds = write_dataset(
        &a.out,
        &spec.sequence_id,
        &scene.frames,
        &spec.classes(),
        Some(&scene.gt),
    )?;
    log::info!(
        "wrote {} frames and {} boxes to {}",
        ds.manifest.frames.len(),
        scene.gt.len(),
        a.out.display()
    );
    Ok(())
}

pub fn clicks(a: &ClicksArgs, cfg: &PipelineConfig) -> Result<(), Failure> {
    let seed = require_seed(cfg, "clicks")?;
    let ds = Dataset::open(&a.dataset)?;
    let gt = ds.load_ground_truth()?;
    let delta = a.delta.unwrap_or(cfg.clicks.delta);
    let sparsity = a.sparsity.map(Into::into).unwrap_or(cfg.clicks.sparsity);
    let clicks: Vec<ClickAnnotation> = simulate_clicks(&gt, delta, sparsity, seed)?
        .into_iter()
        .map(|c| c.click)
        .collect();
    write_jsonl(&a.out, &clicks)?;
    log::info!("wrote {} clicks", clicks.len());
    Ok(())
}

pub fn genlabels(a: &GenlabelsArgs, cfg: &PipelineConfig) -> Result<(), Failure> {
    let seed = require_seed(cfg, "genlabels")?;
    let clicks: Vec<ClickAnnotation> = read_jsonl(&a.clicks)?;
    let (_, frames) = load_world(&a.dataset, cfg, seed)?;
    let (labels, report) = generate_pseudo_labels(&frames, &clicks, &cfg.labelgen);
    if report.box_labels + report.mask_labels != labels.len()
        || labels.len() + report.skipped.len() != clicks.len()
    {
        return Err(Failure::Invariant(
            "label counts disagree with the report".into(),
        ));
    }
    write_jsonl(&a.out, &labels)?;
    write_json(&report_path(&a.out, &a.report), &report)?;
    log::info!(
        "{} clicks: {} box, {} mask, {} skipped",
        clicks.len(),
        report.box_labels,
        report.mask_labels,
        report.skipped.len()
    );
    Ok(())
}

pub fn simdet(a: &SimdetArgs, cfg: &PipelineConfig) -> Result<(), Failure> {
    let seed = require_seed(cfg, "simdet")?;
    let gt: Vec<GroundTruthBox> = Dataset::open(&a.dataset)?.load_ground_truth()?;
    let spec: AugmentationSpec = read_json(&a.augspec)?;
    let (original, augmented) = simulate_detections(&gt, &spec, seed)?;
    write_jsonl(&a.out, &original)?;
    write_jsonl(&a.out_augmented, &augmented)?;
    Ok(())
}

pub fn refine(a: &RefineArgs, cfg: &PipelineConfig) -> Result<(), Failure> {
    let seed = require_seed(cfg, "refine")?;
    let labels: Vec<PseudoLabel> = read_jsonl(&a.labels)?;
    let preds: Vec<PredictionRecord> = read_jsonl(&a.predictions)?;
    let augmented: Vec<PredictionRecord> = read_jsonl(&a.augmented)?;
    let spec: AugmentationSpec = read_json(&a.augspec)?;
    let (_, frames) = load_world(&a.dataset, cfg, seed)?;
    let min_pts = |class: &str| {
        cfg.labelgen
            .classes
            .get(class)
            .map_or(DEFAULT_MIN_PTS, |c| c.min_pts)
    };
    let (out, report) = refine_labels(
        &labels,
        &preds,
        &augmented,
        &spec,
        &frames,
        &cfg.refine,
        min_pts,
    )?;
    let boxes_in = labels.iter().filter(|l| l.is_box()).count();
    let boxes_out = out[..labels.len()].iter().filter(|l| l.is_box()).count();
    if out.len() < labels.len() || boxes_out < boxes_in {
        return Err(Failure::Invariant("refinement dropped labels".into()));
    }
    write_jsonl(&a.out, &out)?;
    write_json(&report_path(&a.out, &a.report), &report)?;
    log::info!(
        "{} upgrades, {} new boxes, {} new masks",
        report.upgrade.upgrades.len(),
        report.expanded_boxes,
        report.expanded_masks
    );
    Ok(())
}

fn table_row(out: &mut String, name: &str, c: &ClassEval) {
    let _ = write!(
        out,
        "{name:<12} {:>7} {:>7} {:>7} {:>8.4} {:>8.4}",
        c.labels, c.gt, c.matched, c.mean_bev_iou, c.mean_iou_3d
    );
    for t in &c.at {
        let _ = write!(out, " {:>8.4} {:>8.4}", t.recall, t.precision);
    }
    out.push('\n');
}

pub fn format_eval(report: &EvalReport) -> String {
    let mut out = format!(
        "{:<12} {:>7} {:>7} {:>7} {:>8} {:>8}",
        "class", "labels", "gt", "matched", "bev_iou", "iou_3d"
    );
    for t in &report.overall.at {
        let _ = write!(
            out,
            " {:>8} {:>8}",
            format!("R@{:.2}", t.threshold),
            format!("P@{:.2}", t.threshold)
        );
    }
    out.push('\n');
    for (class, c) in &report.per_class {
        table_row(&mut out, class, c);
    }
    table_row(&mut out, "overall", &report.overall);
    if report.overall.at.iter().any(|t| !t.precision_defined) {
        out.push_str("precision undefined without labels; shown as 0\n");
    }
    out
}

pub fn eval(a: &EvalArgs, cfg: &PipelineConfig) -> Result<(), Failure> {
    let labels: Vec<PseudoLabel> = read_jsonl(&a.labels)?;
    let gt: Vec<GroundTruthBox> = match (&a.gt, &a.dataset) {
        (Some(path), _) => read_jsonl(path)?,
        (None, Some(ds)) => Dataset::open(ds)?.load_ground_truth()?,
        (None, None) => return Err(Failure::Input("pass --gt or --dataset".into())),
    };
    let thresholds = a
        .thresholds
        .clone()
        .unwrap_or_else(|| cfg.eval.thresholds.clone());
    if thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Failure::Input("thresholds must lie in [0, 1]".into()));
    }
    let report = evaluate_labels(&labels, &gt, &thresholds)?;
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    print!("{}", format_eval(&report));
    Ok(())
}

pub fn loss(a: &LossArgs, cfg: &PipelineConfig) -> Result<(), Failure> {
    let labels: Vec<PseudoLabel> = read_jsonl(&a.labels)?;
    let preds: Vec<PredictionRecord> = read_jsonl(&a.predictions)?;
    let lambda = a.lambda.unwrap_or(cfg.refine.lambda);
    let matched = match_predictions(&labels, &preds, cfg.refine.match_iou_min);
    let breakdown = mixed_loss(&labels, &matched, lambda)?;
    match &a.out {
        Some(out) => write_json(out, &breakdown)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&breakdown)
                .map_err(|e| Failure::Invariant(e.to_string()))?
        ),
    }
    Ok(())
}
