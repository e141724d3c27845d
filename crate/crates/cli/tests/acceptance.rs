//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.
//!
//! Run with `cargo test -p clicklabel-cli --test acceptance`.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use clicklabel_core::clustering::{dbscan, ClusterParams, Projection};
use clicklabel_core::data::{
    generate_synthetic_scene, simulate_clicks, EgoSpec, ObjectSpec, SimulatedClick, Sparsity,
    SynthScene, SynthSceneSpec,
};
use clicklabel_core::geometry::{
    angle_diff, bev_iou, fit_lshape_box_with, Box3D, EdgePlacement, LShapeParams, Point3,
};
use clicklabel_core::labelgen::{
    generate_pseudo_labels, prepare_frames, BoxLabel, LabelGenConfig, PseudoLabel,
};
use clicklabel_core::refinement::{
    apply_augmentation, dual_thresholds, invert_augmentation, mixed_loss, AugmentationSpec, PredictionRecord, Tier,
};
use clicklabel_core::sequence::MotionState;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------------------------------------------------------------- 1

/// Number of 1 mm raster cells whose centers fall inside both boxes,
/// counted row by row from the half-plane form of each rectangle.
fn raster_overlap(a: &Box3D, b: &Box3D, cell: f64) -> (u64, u64, u64) {
    // Interval of x on the horizontal line y where |(p - c)·u| <= l/2 and
    // |(p - c)·v| <= w/2.
    fn span(bx: &Box3D, y: f64) -> Option<(f64, f64)> {
        let (s, c) = bx.theta.sin_cos();
        let dy = y - bx.y;
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        // Along u = (c, s): c*(x - bx.x) + s*dy in [-l/2, l/2].
        // Along v = (-s, c): -s*(x - bx.x) + c*dy in [-w/2, w/2].
        for (k, off, half) in [(c, s * dy, bx.l / 2.0), (-s, c * dy, bx.w / 2.0)] {
            if k.abs() < 1e-15 {
                if off.abs() > half {
                    return None;
                }
                continue;
            }
            let (t0, t1) = ((-half - off) / k, (half - off) / k);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
        (lo <= hi).then_some((lo + bx.x, hi + bx.x))
    }
    // Cells with centers x = (i + 0.5) * cell inside [lo, hi].
    let count = |(lo, hi): (f64, f64)| -> u64 {
        let first = (lo / cell - 0.5).ceil();
        let last = (hi / cell - 0.5).floor();
        if last >= first {
            (last - first + 1.0) as u64
        } else {
            0
        }
    };
    let ra = a.bev().circumradius();
    let rb = b.bev().circumradius();
    let y0 = (a.y - ra).min(b.y - rb);
    let y1 = (a.y + ra).max(b.y + rb);
    let (mut na, mut nb, mut nab) = (0, 0, 0);
    let mut j = (y0 / cell - 0.5).floor() as i64;
    loop {
        let y = (j as f64 + 0.5) * cell;
        if y > y1 {
            break;
        }
        let (sa, sb) = (span(a, y), span(b, y));
        if let Some(s) = sa {
            na += count(s);
        }
        if let Some(s) = sb {
            nb += count(s);
        }
        if let (Some(p), Some(q)) = (sa, sb) {
            let (lo, hi) = (p.0.max(q.0), p.1.min(q.1));
            if lo <= hi {
                nab += count((lo, hi));
            }
        }
        j += 1;
    }
    (na, nb, nab)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut max_err: f64 = 0.0;
    let mut overlapping = 0;
    for _ in 0..1000 {
        let mut r = || {
            Box3D::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                0.0,
                rng.random_range(0.3..5.0),
                rng.random_range(0.3..3.0),
                1.0,
                rng.random_range(-3.2..3.2),
            )
            .unwrap()
        };
        let (a, b) = (r(), r());
        let (na, nb, nab) = raster_overlap(&a, &b, 1e-3);
        let oracle = nab as f64 / (na + nb - nab) as f64;
        overlapping += usize::from(nab > 0);
        max_err = max_err.max((bev_iou(&a, &b) - oracle).abs());
    }
    outcome(
        max_err <= 1e-2,
        format!(
            "max |bev_iou - raster| = {max_err:.2e} over 1000 pairs ({overlapping} overlapping)"
        ),
    )
}

// ---------------------------------------------------------------- 2

/// Reference DBSCAN: all-pairs neighborhoods, core points joined into
/// components, components ordered by their first core point in
/// lexicographic (x, y, z) order, each border point given to the earliest
/// component with a core point in reach.
fn reference_dbscan(points: &[Point3], eps: f64, min_pts: usize, bev: bool) -> Vec<Vec<usize>> {
    let n = points.len();
    let d2 = |a: &Point3, b: &Point3| {
        let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
        if bev {
            dx * dx + dy * dy
        } else {
            dx * dx + dy * dy + dz * dz
        }
    };
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| d2(&points[i], &points[j]) <= eps * eps)
                .collect()
        })
        .collect();
    let core: Vec<bool> = adj.iter().map(|a| a.len() >= min_pts).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        if core[i] {
            for &j in &adj[i] {
                if core[j] {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    let mut rank: Vec<usize> = (0..n).collect();
    rank.sort_by(|&a, &b| {
        let (p, q) = (&points[a], &points[b]);
        p.x.total_cmp(&q.x)
            .then(p.y.total_cmp(&q.y))
            .then(p.z.total_cmp(&q.z))
            .then(a.cmp(&b))
    });
    let mut component_order: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in &rank {
        if core[i] {
            let root = find(&mut parent, i);
            let next = component_order.len();
            component_order.entry(root).or_insert(next);
        }
    }
    let mut clusters = vec![Vec::new(); component_order.len()];
    for i in 0..n {
        let target = if core[i] {
            Some(component_order[&find(&mut parent, i)])
        } else {
            adj[i]
                .iter()
                .filter(|&&j| core[j])
                .map(|&j| component_order[&find(&mut parent, j)])
                .min()
        };
        if let Some(c) = target {
            clusters[c].push(i);
        }
    }
    clusters
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<Point3>, f64, usize, bool) {
    let n = rng.random_range(1..=500);
    let eps = [0.25, 0.5, 0.3, 0.7][rng.random_range(0..4)];
    let min_pts = rng.random_range(1..=8);
    let bev = rng.random_bool(0.5);
    let blobs = rng.random_range(1..=6);
    let centers: Vec<[f64; 3]> = (0..blobs)
        .map(|_| {
            [
                rng.random_range(-8.0..8.0),
                rng.random_range(-8.0..8.0),
                rng.random_range(0.0..2.0),
            ]
        })
        .collect();
    let lattice = rng.random_bool(0.3);
    let points = (0..n)
        .map(|_| {
            if lattice {
                // Exact multiples of eps put many pairs exactly on the boundary.
                let q = |r: &mut ChaCha8Rng| r.random_range(-6..6) as f64 * eps;
                Point3::new(q(rng), q(rng), q(rng) * 0.5, 0.0)
            } else if rng.random_bool(0.15) {
                Point3::new(
                    rng.random_range(-10.0..10.0),
                    rng.random_range(-10.0..10.0),
                    rng.random_range(0.0..3.0),
                    0.0,
                )
            } else {
                let c = centers[rng.random_range(0..blobs)];
                let s = rng.random_range(0.2..1.5);
                Point3::new(
                    c[0] + s * rng.random_range(-1.0..1.0),
                    c[1] + s * rng.random_range(-1.0..1.0),
                    c[2] + s * rng.random_range(-1.0..1.0),
                    0.0,
                )
            }
        })
        .collect();
    (points, eps, min_pts, bev)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut mismatches = 0;
    let mut clusters = 0;
    for _ in 0..200 {
        let (points, eps, min_pts, bev) = random_instance(&mut rng);
        let params = ClusterParams::new(eps, min_pts).unwrap();
        let projection = if bev {
            Projection::Bev
        } else {
            Projection::Full3D
        };
        let got: Vec<Vec<usize>> = dbscan(&points, &params, projection)
            .into_iter()
            .map(|c| c.member_indices)
            .collect();
        let want = reference_dbscan(&points, eps, min_pts, bev);
        clusters += want.len();
        mismatches += usize::from(got != want);
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} of 200 instances differ from the all-pairs reference ({clusters} clusters)"),
    )
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let per_edge = 50;
    let params = LShapeParams {
        placement: EdgePlacement::LeastSquares,
        ..Default::default()
    };
    let (mut ok, mut ok_enclosing) = (0, 0);
    for _ in 0..100 {
        let (l, w) = (rng.random_range(1.0..6.0), rng.random_range(1.0..6.0));
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let (cx, cy) = (rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
        let (s, c) = theta.sin_cos();
        let mut pts = Vec::new();
        for i in 0..per_edge {
            let t = i as f64 / (per_edge - 1) as f64;
            for (u, v) in [(-l / 2.0 + t * l, -w / 2.0), (-l / 2.0, -w / 2.0 + t * w)] {
                let (u, v) = (u + noise.sample(&mut rng), v + noise.sample(&mut rng));
                let z = rng.random_range(0.2..1.5);
                pts.push(Point3::new(cx + c * u - s * v, cy + s * u + c * v, z, 0.0));
            }
        }
        let check = |b: &Box3D| {
            let d = angle_diff(b.theta, theta).rem_euclid(std::f64::consts::FRAC_PI_2);
            let heading = d.min(std::f64::consts::FRAC_PI_2 - d) <= 2f64.to_radians();
            let err =
                ((b.l - l).abs().max((b.w - w).abs())).min((b.l - w).abs().max((b.w - l).abs()));
            heading && err <= 0.05
        };
        ok += usize::from(check(&fit_lshape_box_with(&pts, &params).unwrap()));
        ok_enclosing += usize::from(check(
            &fit_lshape_box_with(&pts, &LShapeParams::default()).unwrap(),
        ));
    }
    outcome(
        ok >= 95,
        format!("{ok}/100 within 5 cm and 2 deg with least-squares edges (enclosing edges: {ok_enclosing}/100)"),
    )
}

// ---------------------------------------------------------------- 4, 5, 6

const FRAMES: usize = 11;
const CENTER: i64 = 5;
const INTERVAL: f64 = 0.5;

fn base_spec(seed: u64, objects: Vec<ObjectSpec>, ego_speed: f64) -> SynthSceneSpec {
    SynthSceneSpec {
        sequence_id: format!("suite-{seed}"),
        seed,
        frames: FRAMES,
        frame_interval: INTERVAL,
        ego: EgoSpec {
            speed: ego_speed,
            ..Default::default()
        },
        noise_sigma: 0.02,
        max_range: 60.0,
        ground_points: 4000,
        objects,
    }
}

fn size_of(class: &str, rng: &mut ChaCha8Rng) -> ([f64; 3], f64) {
    match class {
        "car" => (
            [
                rng.random_range(3.8..5.0),
                rng.random_range(1.6..2.0),
                rng.random_range(1.4..1.7),
            ],
            40.0,
        ),
        "pedestrian" => ([0.6, 0.6, 1.7], 120.0),
        _ => ([1.8, 0.6, 1.6], 80.0),
    }
}

/// Clicks on every instance in the center frame.
fn center_clicks(scene: &SynthScene, delta: f64, seed: u64) -> Vec<SimulatedClick> {
    let gt: Vec<_> = scene
        .gt
        .iter()
        .filter(|g| g.frame_id == CENTER)
        .cloned()
        .collect();
    simulate_clicks(&gt, delta, Sparsity::AllInstances, seed).unwrap()
}

fn criterion_4() -> Outcome {
    let classes = ["car", "pedestrian", "cyclist"];
    let speed = |class: &str, rng: &mut ChaCha8Rng| match class {
        "pedestrian" => rng.random_range(2.0..3.0),
        "cyclist" => rng.random_range(3.0..7.0),
        _ => rng.random_range(5.0..15.0),
    };
    let cfg = LabelGenConfig::default();
    let mut right: BTreeMap<(bool, &str), (usize, usize)> = BTreeMap::new();
    for scene_i in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + scene_i);
        let mut objects = Vec::new();
        for lane in 0..10 {
            let class = classes[rng.random_range(0..3)];
            let (size, density) = size_of(class, &mut rng);
            let y = -27.0 + 6.0 * lane as f64;
            let x = rng.random_range(-10.0..10.0);
            let dynamic = lane % 2 == 1;
            let (heading, v) = if dynamic {
                (
                    if rng.random_bool(0.5) {
                        0.0
                    } else {
                        std::f64::consts::PI
                    },
                    speed(class, &mut rng),
                )
            } else {
                (rng.random_range(-3.0..3.0), 0.0)
            };
            let t = CENTER as f64 * INTERVAL;
            objects.push(ObjectSpec {
                class_label: class.into(),
                size,
                start: [x - v * t * heading.cos(), y - v * t * heading.sin()],
                heading,
                speed: v,
                density,
            });
        }
        let spec = base_spec(900 + scene_i, objects, 3.0);
        let scene = generate_synthetic_scene(&spec).unwrap();
        let frames = prepare_frames(&scene.frames, &cfg.ground, scene_i);
        let sim = center_clicks(&scene, 0.5, scene_i);
        let clicks: Vec<_> = sim.iter().map(|s| s.click.clone()).collect();
        let (_, report) = generate_pseudo_labels(&frames, &clicks, &cfg);
        for (s, d) in sim.iter().zip(&report.per_click) {
            let o = &spec.objects[s.instance_id as usize];
            let e = right
                .entry((
                    o.is_static(),
                    classes.iter().find(|c| **c == o.class_label).unwrap(),
                ))
                .or_default();
            e.1 += 1;
            let want = if o.is_static() {
                MotionState::Static
            } else {
                MotionState::Dynamic
            };
            e.0 += usize::from(d.motion == Some(want));
        }
    }
    let total = |stat: bool| {
        right
            .iter()
            .filter(|((s, _), _)| *s == stat)
            .fold((0, 0), |acc, (_, v)| (acc.0 + v.0, acc.1 + v.1))
    };
    let (s, d) = (total(true), total(false));
    let (sa, da) = (s.0 as f64 / s.1 as f64, d.0 as f64 / d.1 as f64);
    let breakdown: Vec<String> = right
        .iter()
        .map(|((st, c), (k, n))| format!("{}-{c} {k}/{n}", if *st { "static" } else { "dynamic" }))
        .collect();
    outcome(
        sa >= 0.95 && da >= 0.95 && s.1 == 100 && d.1 == 100,
        format!(
            "static {}/{} ({:.1}%), dynamic {}/{} ({:.1}%); {}",
            s.0,
            s.1,
            100.0 * sa,
            d.0,
            d.1,
            100.0 * da,
            breakdown.join(", ")
        ),
    )
}

/// Parked-vehicle scenes: ten cars per scene on a loose grid, ego driving by.
fn vehicle_scenes() -> Vec<SynthScene> {
    (0..10u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + i);
            let mut objects = Vec::new();
            for gx in 0..5 {
                for gy in [-9.0, 9.0] {
                    let (size, density) = size_of("car", &mut rng);
                    objects.push(ObjectSpec {
                        class_label: "car".into(),
                        size,
                        start: [
                            -20.0 + 10.0 * gx as f64 + rng.random_range(-1.0..1.0),
                            gy + rng.random_range(-1.0..1.0),
                        ],
                        heading: rng.random_range(-3.2..3.2),
                        speed: 0.0,
                        density,
                    });
                }
            }
            generate_synthetic_scene(&base_spec(800 + i, objects, 5.0)).unwrap()
        })
        .collect()
}

/// BEV IoU of each click's label with its instance's ground truth (0 when
/// the click produced no box).
fn click_ious(scenes: &[SynthScene], delta: f64) -> Vec<f64> {
    let cfg = LabelGenConfig::default();
    let mut out = Vec::new();
    for (i, scene) in scenes.iter().enumerate() {
        let frames = prepare_frames(&scene.frames, &cfg.ground, i as u64);
        let sim = center_clicks(scene, delta, 50 + i as u64);
        let clicks: Vec<_> = sim.iter().map(|s| s.click.clone()).collect();
        let (labels, report) = generate_pseudo_labels(&frames, &clicks, &cfg);
        let mut labels = labels.into_iter();
        for (s, d) in sim.iter().zip(&report.per_click) {
            let gt = scene
                .gt
                .iter()
                .find(|g| g.frame_id == CENTER && g.instance_id == s.instance_id)
                .unwrap();
            let iou = if d.error.is_none() {
                match labels.next().unwrap() {
                    PseudoLabel::Box(BoxLabel { bbox, .. }) => bev_iou(&bbox, &gt.bbox),
                    PseudoLabel::Mask(_) => 0.0,
                }
            } else {
                0.0
            };
            out.push(iou);
        }
    }
    out
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn criterion_5(scenes: &[SynthScene]) -> Outcome {
    let ious = click_ious(scenes, 0.5);
    let med = median(&ious);
    let recall = ious.iter().filter(|&&u| u >= 0.5).count() as f64 / ious.len() as f64;
    outcome(
        med >= 0.7 && recall >= 0.9,
        format!(
            "{} clicks at delta 0.5: median BEV IoU {med:.3}, mean {:.3}, recall@0.5 {recall:.3}",
            ious.len(),
            mean(&ious)
        ),
    )
}

fn criterion_6(scenes: &[SynthScene]) -> Outcome {
    let low = mean(&click_ious(scenes, 0.25));
    let high = mean(&click_ious(scenes, 1.0));
    outcome(
        low >= high,
        format!("mean BEV IoU {low:.3} at delta 0.25 vs {high:.3} at delta 1.0"),
    )
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let b = Box3D::new(
            rng.random_range(-80.0..80.0),
            rng.random_range(-80.0..80.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(0.2..20.0),
            rng.random_range(0.2..5.0),
            rng.random_range(0.2..5.0),
            rng.random_range(-3.2..3.2),
        )
        .unwrap();
        let spec = AugmentationSpec {
            rotation: rng.random_range(-3.2..3.2),
            flip_x: rng.random_bool(0.5),
            flip_y: rng.random_bool(0.5),
            scale: rng.random_range(0.5..=2.0),
        };
        let back = invert_augmentation(&spec, &apply_augmentation(&spec, &[b]))[0];
        let errs = [
            back.x - b.x,
            back.y - b.y,
            back.z - b.z,
            back.l - b.l,
            back.w - b.w,
            back.h - b.h,
            angle_diff(back.theta, b.theta),
        ];
        worst = errs.iter().fold(worst, |m, e| m.max(e.abs()));
    }
    outcome(
        worst <= 1e-9,
        format!("max per-parameter round-trip error {worst:.2e} over 10^4 boxes"),
    )
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let scores: Vec<f64> = [0.1, 0.5, 0.9]
        .iter()
        .flat_map(|&m| std::iter::repeat_n(m, 50))
        .map(|m| m + rng.random_range(-0.02..=0.02))
        .collect();
    let t = dual_thresholds(&scores).unwrap();
    let count = |tier| scores.iter().filter(|&&s| t.tier(s) == tier).count();
    let counts = (count(Tier::Box), count(Tier::Mask), count(Tier::Discard));
    let pass = t.mu_low > 0.2
        && t.mu_low < 0.4
        && t.mu_high > 0.6
        && t.mu_high < 0.8
        && counts == (50, 50, 50);
    outcome(
        pass,
        format!(
            "mu_low {:.4}, mu_high {:.4}, tiers box/mask/discard {}/{}/{}",
            t.mu_low, t.mu_high, counts.0, counts.1, counts.2
        ),
    )
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Outcome {
    let car = Box3D::new(5.0, 2.0, 0.8, 4.0, 1.8, 1.6, 0.3).unwrap();
    let box_label = |b: Box3D| {
        PseudoLabel::Box(BoxLabel {
            frame_id: 0,
            class_label: "car".into(),
            bbox: b,
            source_click: None,
        })
    };
    let pred = |b: Box3D, c: f64| PredictionRecord::new(0, "car".into(), c, b).unwrap();

    let perfect = pred(car, 1.0);
    let zero = mixed_loss(&[box_label(car)], &[Some(&perfect)], 0.2)
        .unwrap()
        .total;

    let mut moved = car;
    moved.x += 0.5;
    let offset = pred(moved, 1.0);
    let half = mixed_loss(&[box_label(car)], &[Some(&offset)], 0.2).unwrap();

    let mask_pts: Vec<Point3> = [(-0.4, -0.3), (0.4, -0.3), (0.4, 0.3), (-0.4, 0.3)]
        .iter()
        .map(|&(x, y)| Point3::new(20.0 + x, y, 0.8, 0.0))
        .collect();
    let mask = PseudoLabel::Mask(
        clicklabel_core::labelgen::MaskLabel::new(0, "car".into(), mask_pts, None).unwrap(),
    );
    let near = pred(Box3D::new(20.6, 0.3, 0.8, 1.0, 0.8, 1.6, 0.0).unwrap(), 0.8);
    let labels = vec![box_label(car), mask];
    let sweep: Vec<_> = [0.2, 0.5, 0.7, 1.0]
        .iter()
        .map(|&l| mixed_loss(&labels, &[Some(&offset), Some(&near)], l).unwrap())
        .collect();
    let monotone = sweep.windows(2).all(|w| w[1].total >= w[0].total) && sweep[0].pos > 0.0;
    let totals: Vec<String> = sweep.iter().map(|b| format!("{:.4}", b.total)).collect();
    outcome(
        zero == 0.0 && half.reg == 0.125 && half.total == 0.125 && monotone,
        format!(
            "perfect total {zero}, 0.5 m offset reg {} total {}, lambda sweep totals [{}] (pos {:.4})",
            half.reg,
            half.total,
            totals.join(", "),
            sweep[0].pos
        ),
    )
}

// ---------------------------------------------------------------- 10

fn run_pipeline(dir: &Path, workers: usize) -> Duration {
    let bin = env!("CARGO_BIN_EXE_clicklabel");
    let assets = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    let aug = assets.join("demo_augspec.json");
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let w = workers.to_string();
    let steps: Vec<Vec<String>> = vec![
        vec!["synth".into(), "--out".into(), p("ds")],
        vec![
            "clicks".into(),
            "--dataset".into(),
            p("ds"),
            "--seed".into(),
            "11".into(),
            "--sparsity".into(),
            "all-instances".into(),
            "--out".into(),
            p("clicks.jsonl"),
        ],
        vec![
            "genlabels".into(),
            "--dataset".into(),
            p("ds"),
            "--clicks".into(),
            p("clicks.jsonl"),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            p("labels.jsonl"),
        ],
        vec![
            "simdet".into(),
            "--dataset".into(),
            p("ds"),
            "--augspec".into(),
            aug.to_string_lossy().into_owned(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            p("pred.jsonl"),
            "--out-augmented".into(),
            p("aug.jsonl"),
        ],
        vec![
            "refine".into(),
            "--dataset".into(),
            p("ds"),
            "--labels".into(),
            p("labels.jsonl"),
            "--predictions".into(),
            p("pred.jsonl"),
            "--augmented".into(),
            p("aug.jsonl"),
            "--augspec".into(),
            aug.to_string_lossy().into_owned(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            p("refined.jsonl"),
        ],
        vec![
            "eval".into(),
            "--labels".into(),
            p("refined.jsonl"),
            "--dataset".into(),
            p("ds"),
            "--out".into(),
            p("eval.json"),
        ],
    ];
    let start = Instant::now();
    for args in steps {
        let out = Command::new(bin)
            .args(&args)
            .args(["--workers", &w])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    start.elapsed()
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let runs = [("a", 1), ("b", 8), ("c", 8)];
    let mut times = Vec::new();
    for (name, workers) in runs {
        let dir = root.path().join(name);
        std::fs::create_dir_all(&dir).unwrap();
        times.push(run_pipeline(&dir, workers));
    }
    let trees: Vec<_> = runs
        .iter()
        .map(|(n, _)| tree(&root.path().join(n)))
        .collect();
    let files = trees[0].len();
    let differing: HashSet<&String> = trees[1..]
        .iter()
        .flat_map(|t| {
            trees[0]
                .iter()
                .filter(move |(k, v)| t.get(*k) != Some(v))
                .map(|(k, _)| k)
                .chain(t.keys().filter(|k| !trees[0].contains_key(*k)))
        })
        .collect();
    let slowest = times.iter().max().unwrap();
    outcome(
        differing.is_empty() && *slowest < Duration::from_secs(60),
        format!(
            "{files} files identical across runs (workers 1, 8, 8): {}; run times {:?}",
            differing.is_empty(),
            times
                .iter()
                .map(|t| format!("{:.1}s", t.as_secs_f64()))
                .collect::<Vec<_>>()
        ),
    )
}

// ----------------------------------------------------------------

fn main() {
    // Ignore libtest flags such as --nocapture passed through by cargo.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut scenes: Option<Vec<SynthScene>> = None;
    let mut vehicle = || scenes.get_or_insert_with(vehicle_scenes).clone();

    type Check<'a> = (u32, &'a str, Duration, Box<dyn FnOnce() -> Outcome + 'a>);
    let checks: Vec<Check> = vec![
        (
            1,
            "geometry oracle: bev_iou vs 1 mm raster",
            Duration::from_secs(30),
            Box::new(criterion_1),
        ),
        (
            2,
            "DBSCAN vs all-pairs reference",
            Duration::from_secs(60),
            Box::new(criterion_2),
        ),
        (3, "L-shape recovery", Duration::MAX, Box::new(criterion_3)),
        (
            4,
            "motion classification",
            Duration::from_secs(120),
            Box::new(criterion_4),
        ),
        (
            5,
            "Click2Box quality",
            Duration::MAX,
            Box::new(|| criterion_5(&vehicle())),
        ),
        (
            6,
            "perturbation robustness",
            Duration::MAX,
            Box::new(|| criterion_6(&vehicle_scenes())),
        ),
        (
            7,
            "augmentation round trip",
            Duration::MAX,
            Box::new(criterion_7),
        ),
        (
            8,
            "dual-threshold separation",
            Duration::MAX,
            Box::new(criterion_8),
        ),
        (9, "mixed-loss sanity", Duration::MAX, Box::new(criterion_9)),
        (
            10,
            "end-to-end determinism",
            Duration::MAX,
            Box::new(criterion_10),
        ),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in checks {
        if filter
            .as_ref()
            .is_some_and(|f| !id.to_string().eq(f) && !name.contains(f.as_str()))
        {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took < limit;
        failed += usize::from(!pass);
        let budget = if limit == Duration::MAX {
            String::new()
        } else {
            format!(", limit {}s", limit.as_secs())
        };
        println!(
            "criterion {id:>2} {}  {name}: {} [{:.1}s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
