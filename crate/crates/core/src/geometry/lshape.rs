//! L-shape rectangle fitting for BEV point clusters.
//!
//! Candidate headings come from a fixed sweep over `[0, π/2)` plus the edge
//! directions of the cluster's convex hull. The candidate maximizing the
//! closeness criterion wins (ties go to the smaller rectangle), and the
//! heading is then polished with a fine sweep that minimizes the spread of
//! each near-edge point's distance to its nearest edge.

use std::f64::consts::FRAC_PI_2;

use super::{convex_polygon_area, Box3D, Point3};
use crate::error::{Error, Result};

/// How rectangle edges are placed once the heading is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePlacement {
    /// Tight bounding rectangle; every input point is inside.
    #[default]
    Enclosing,
    /// Edges supported by many points sit at the mean offset of those
    /// points, so sensor noise does not inflate the extents. Sparse edges
    /// fall back to the extreme point.
    LeastSquares,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LShapeParams {
    /// Coarse sweep resolution, radians.
    pub coarse_step: f64,
    /// Half-width of the refinement sweep around the coarse optimum.
    pub fine_window: f64,
    pub fine_step: f64,
    /// Only points this close to an edge at the coarse heading take part in
    /// the refinement sweep, so interior points do not bias it.
    pub edge_band: f64,
    /// Distances below this are clamped in the closeness criterion.
    pub min_edge_distance: f64,
    /// Floor applied to degenerate extents (e.g. a flat cluster's height).
    pub min_extent: f64,
    pub placement: EdgePlacement,
}

impl Default for LShapeParams {
    fn default() -> Self {
        Self {
            coarse_step: 1f64.to_radians(),
            fine_window: 1f64.to_radians(),
            fine_step: 0.01f64.to_radians(),
            edge_band: 0.2,
            min_edge_distance: 0.01,
            min_extent: 1e-3,
            placement: EdgePlacement::Enclosing,
        }
    }
}

/// Fits an oriented box with the default parameters.
///
/// The returned heading lies in `[0, π/2)`; a point cluster cannot tell the
/// front of an object from its side, so callers should compare headings
/// modulo `π/2` with `l`/`w` possibly swapped.
pub fn fit_lshape_box(points: &[Point3]) -> Result<Box3D> {
    fit_lshape_box_with(points, &LShapeParams::default())
}

pub fn fit_lshape_box_with(points: &[Point3], params: &LShapeParams) -> Result<Box3D> {
    if points.len() < 3 {
        return Err(Error::DegenerateCluster(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let bev: Vec<[f64; 2]> = points.iter().map(Point3::bev).collect();
    let hull = convex_hull(&bev);
    if hull.len() < 3 || convex_polygon_area(&hull) < 1e-10 {
        return Err(Error::DegenerateCluster(
            "points are collinear in BEV".into(),
        ));
    }

    let mut candidates: Vec<f64> = (0..)
        .map(|k| k as f64 * params.coarse_step)
        .take_while(|t| *t < FRAC_PI_2)
        .collect();
    candidates.extend(
        hull.iter()
            .zip(hull.iter().cycle().skip(1))
            .map(|(a, b)| wrap_quarter((b[1] - a[1]).atan2(b[0] - a[0]))),
    );

    let mut best = candidates[0];
    let mut best_score = closeness(&bev, best, params.min_edge_distance);
    let mut best_area = Projection::new(&bev, best).area();
    for &theta in &candidates[1..] {
        let score = closeness(&bev, theta, params.min_edge_distance);
        let area = Projection::new(&bev, theta).area();
        let tol = 1e-9 * best_score.abs().max(score.abs());
        let better = score > best_score + tol
            || ((score - best_score).abs() <= tol
                && (area < best_area - 1e-12 || (area <= best_area + 1e-12 && theta < best)));
        if better {
            best = theta;
            best_score = score;
            best_area = area;
        }
    }

    let coarse = Projection::new(&bev, best);
    let edge_pts: Vec<[f64; 2]> = bev
        .iter()
        .zip(&coarse.coords)
        .filter(|(_, q)| coarse.nearest_edge(**q).1 <= params.edge_band)
        .map(|(p, _)| *p)
        .collect();
    let mut best_cost = edge_spread(&edge_pts, best);
    let steps = (params.fine_window / params.fine_step).round() as i64;
    if best_cost > 0.0 {
        for k in -steps..=steps {
            let theta = best + k as f64 * params.fine_step;
            let cost = edge_spread(&edge_pts, theta);
            if cost < best_cost - 1e-15 {
                best_cost = cost;
                best = theta;
            }
        }
    }
    let theta = wrap_quarter(best);

    let proj = Projection::new(&bev, theta);
    let (mut lo, mut hi) = (proj.min, proj.max);
    if params.placement == EdgePlacement::LeastSquares {
        let support = 5usize.max(bev.len() / 10);
        let (sums, counts) = proj.edge_groups();
        let placed = [
            (counts[0] >= support).then(|| sums[0] / counts[0] as f64),
            (counts[1] >= support).then(|| sums[1] / counts[1] as f64),
            (counts[2] >= support).then(|| sums[2] / counts[2] as f64),
            (counts[3] >= support).then(|| sums[3] / counts[3] as f64),
        ];
        for axis in 0..2 {
            let a = placed[2 * axis].unwrap_or(proj.min[axis]);
            let b = placed[2 * axis + 1].unwrap_or(proj.max[axis]);
            if b - a > params.min_extent {
                lo[axis] = a;
                hi[axis] = b;
            }
        }
    }

    let (s, c) = theta.sin_cos();
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let x = mid[0] * c - mid[1] * s;
    let y = mid[0] * s + mid[1] * c;
    let (z_lo, z_hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.z), hi.max(p.z))
        });
    Box3D::new(
        x,
        y,
        (z_lo + z_hi) / 2.0,
        (hi[0] - lo[0]).max(params.min_extent),
        (hi[1] - lo[1]).max(params.min_extent),
        (z_hi - z_lo).max(params.min_extent),
        theta,
    )
}

fn wrap_quarter(theta: f64) -> f64 {
    let t = theta.rem_euclid(FRAC_PI_2);
    if t >= FRAC_PI_2 {
        0.0
    } else {
        t
    }
}

/// Point coordinates along `(cos θ, sin θ)` and `(-sin θ, cos θ)`.
struct Projection {
    coords: Vec<[f64; 2]>,
    min: [f64; 2],
    max: [f64; 2],
}

impl Projection {
    fn new(bev: &[[f64; 2]], theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        let coords = bev
            .iter()
            .map(|p| {
                let q = [p[0] * c + p[1] * s, -p[0] * s + p[1] * c];
                for i in 0..2 {
                    min[i] = min[i].min(q[i]);
                    max[i] = max[i].max(q[i]);
                }
                q
            })
            .collect();
        Self { coords, min, max }
    }

    fn area(&self) -> f64 {
        (self.max[0] - self.min[0]) * (self.max[1] - self.min[1])
    }

    /// Index of the nearest edge (0: min axis 0, 1: max axis 0, 2: min
    /// axis 1, 3: max axis 1) and the distance to it.
    fn nearest_edge(&self, q: [f64; 2]) -> (usize, f64) {
        let d = [
            q[0] - self.min[0],
            self.max[0] - q[0],
            q[1] - self.min[1],
            self.max[1] - q[1],
        ];
        let mut best = (0, d[0]);
        for (i, &v) in d.iter().enumerate().skip(1) {
            if v < best.1 {
                best = (i, v);
            }
        }
        best
    }

    /// Per-edge sum of the assigned points' coordinate and their count.
    fn edge_groups(&self) -> ([f64; 4], [usize; 4]) {
        let mut sums = [0.0; 4];
        let mut counts = [0; 4];
        for q in &self.coords {
            let (e, _) = self.nearest_edge(*q);
            sums[e] += q[e / 2];
            counts[e] += 1;
        }
        (sums, counts)
    }
}

fn closeness(bev: &[[f64; 2]], theta: f64, d0: f64) -> f64 {
    let proj = Projection::new(bev, theta);
    proj.coords
        .iter()
        .map(|q| 1.0 / proj.nearest_edge(*q).1.max(d0))
        .sum()
}

/// Sum of squared deviations of each edge group around its own mean.
fn edge_spread(bev: &[[f64; 2]], theta: f64) -> f64 {
    let proj = Projection::new(bev, theta);
    let mut sum = [0.0; 4];
    let mut sum_sq = [0.0; 4];
    let mut n = [0usize; 4];
    for q in &proj.coords {
        let (e, _) = proj.nearest_edge(*q);
        // Offsets relative to the edge keep the subtraction well conditioned.
        let v = q[e / 2]
            - if e % 2 == 0 {
                proj.min[e / 2]
            } else {
                proj.max[e / 2]
            };
        sum[e] += v;
        sum_sq[e] += v * v;
        n[e] += 1;
    }
    (0..4)
        .filter(|&e| n[e] > 0)
        .map(|e| (sum_sq[e] - sum[e] * sum[e] / n[e] as f64).max(0.0))
        .sum()
}

/// Andrew's monotone chain; returns the hull counter-clockwise without
/// collinear vertices.
fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}
