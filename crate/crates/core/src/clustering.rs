//! DBSCAN over a uniform grid index, and nearest-cluster selection.
//!
//! Input points are visited in canonical `(x, y, z)` order, so cluster
//! membership does not depend on the order the caller supplies. A border
//! point reachable from several clusters joins whichever cluster reaches it
//! first during that scan.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterParams {
    /// Neighborhood radius, meters (inclusive).
    pub eps: f64,
    /// Neighbors within `eps`, counting the point itself, needed for a core point.
    pub min_pts: usize,
}

impl ClusterParams {
    pub fn new(eps: f64, min_pts: usize) -> Result<Self> {
        let p = Self { eps, min_pts };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::invalid(
                "eps",
                format!("must be > 0, got {}", self.eps),
            ));
        }
        if self.min_pts < 1 {
            return Err(Error::invalid("min_pts", "must be >= 1"));
        }
        Ok(())
    }
}

/// Distance used for neighborhoods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    /// Ground-plane distance; `z` is ignored.
    Bev,
    #[serde(rename = "3d")]
    Full3D,
}

impl Projection {
    fn dist2(self, a: &Point3, b: &Point3) -> f64 {
        let (dx, dy) = (a.x - b.x, a.y - b.y);
        match self {
            Projection::Bev => dx * dx + dy * dy,
            Projection::Full3D => {
                let dz = a.z - b.z;
                dx * dx + dy * dy + dz * dz
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCluster {
    /// Indices into the caller's point slice, ascending.
    pub member_indices: Vec<usize>,
    /// Mean member position (all three coordinates, whatever the projection).
    pub centroid: [f64; 3],
}

impl PointCluster {
    pub fn len(&self) -> usize {
        self.member_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_indices.is_empty()
    }

    pub fn points(&self, source: &[Point3]) -> Vec<Point3> {
        self.member_indices.iter().map(|&i| source[i]).collect()
    }
}

type Cell = (i64, i64, i64);

struct GridIndex<'a> {
    points: &'a [Point3],
    eps: f64,
    projection: Projection,
    cells: HashMap<Cell, Vec<usize>>,
}

impl<'a> GridIndex<'a> {
    fn new(points: &'a [Point3], eps: f64, projection: Projection) -> Self {
        let mut cells: HashMap<Cell, Vec<usize>> = HashMap::new();
        let mut index = Self {
            points,
            eps,
            projection,
            cells: HashMap::new(),
        };
        for (i, p) in points.iter().enumerate() {
            cells.entry(index.cell(p)).or_default().push(i);
        }
        index.cells = cells;
        index
    }

    fn cell(&self, p: &Point3) -> Cell {
        let f = |v: f64| (v / self.eps).floor() as i64;
        match self.projection {
            Projection::Bev => (f(p.x), f(p.y), 0),
            Projection::Full3D => (f(p.x), f(p.y), f(p.z)),
        }
    }

    /// Indices within `eps` of point `i`, including `i`, ascending.
    fn neighbors(&self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        let p = &self.points[i];
        let (cx, cy, cz) = self.cell(p);
        let dz_range = match self.projection {
            Projection::Bev => 0..=0,
            Projection::Full3D => -1..=1,
        };
        let eps2 = self.eps * self.eps;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in dz_range.clone() {
                    if let Some(bucket) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) {
                        out.extend(
                            bucket
                                .iter()
                                .copied()
                                .filter(|&j| self.projection.dist2(p, &self.points[j]) <= eps2),
                        );
                    }
                }
            }
        }
        out.sort_unstable();
    }
}

/// Canonical visiting order: lexicographic `(x, y, z)`, ties by index.
pub(crate) fn canonical_order(points: &[Point3]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&points[a], &points[b]);
        p.x.total_cmp(&q.x)
            .then(p.y.total_cmp(&q.y))
            .then(p.z.total_cmp(&q.z))
            .then(a.cmp(&b))
    });
    order
}

pub fn dbscan(
    points: &[Point3],
    params: &ClusterParams,
    projection: Projection,
) -> Vec<PointCluster> {
    if points.is_empty() {
        return Vec::new();
    }
    let order = canonical_order(points);
    let sorted: Vec<Point3> = order.iter().map(|&i| points[i]).collect();
    let index = GridIndex::new(&sorted, params.eps, projection);

    const UNVISITED: usize = usize::MAX;
    const NOISE: usize = usize::MAX - 1;
    let mut label = vec![UNVISITED; sorted.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut nbrs = Vec::new();
    let mut queue = Vec::new();

    for start in 0..sorted.len() {
        if label[start] != UNVISITED {
            continue;
        }
        index.neighbors(start, &mut nbrs);
        if nbrs.len() < params.min_pts {
            label[start] = NOISE;
            continue;
        }
        let id = clusters.len();
        let mut members = vec![start];
        label[start] = id;
        queue.clear();
        queue.extend(nbrs.iter().copied().filter(|&j| j != start));
        let mut head = 0;
        while head < queue.len() {
            let j = queue[head];
            head += 1;
            match label[j] {
                NOISE => {
                    // Former noise reachable from a core point is a border point.
                    label[j] = id;
                    members.push(j);
                }
                UNVISITED => {
                    label[j] = id;
                    members.push(j);
                    index.neighbors(j, &mut nbrs);
                    if nbrs.len() >= params.min_pts {
                        queue.extend(
                            nbrs.iter()
                                .copied()
                                .filter(|&m| label[m] == UNVISITED || label[m] == NOISE),
                        );
                    }
                }
                _ => {}
            }
        }
        clusters.push(members);
    }

    clusters
        .into_iter()
        .map(|members| {
            let mut member_indices: Vec<usize> = members.iter().map(|&s| order[s]).collect();
            member_indices.sort_unstable();
            let n = member_indices.len() as f64;
            let mut c = [0.0; 3];
            for &i in &member_indices {
                c[0] += points[i].x;
                c[1] += points[i].y;
                c[2] += points[i].z;
            }
            PointCluster {
                member_indices,
                centroid: c.map(|v| v / n),
            }
        })
        .collect()
}

/// Picks the cluster whose BEV centroid is closest to `click`; ties go to the
/// larger cluster, then the earlier one.
pub fn nearest_cluster(clusters: &[PointCluster], click: [f64; 2]) -> Result<&PointCluster> {
    nearest_cluster_index(clusters, click).map(|i| &clusters[i])
}

pub fn nearest_cluster_index(clusters: &[PointCluster], click: [f64; 2]) -> Result<usize> {
    let dist = |c: &PointCluster| (c.centroid[0] - click[0]).hypot(c.centroid[1] - click[1]);
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in clusters.iter().enumerate() {
        let d = dist(c);
        let better = match best {
            None => true,
            Some((b, bd)) => {
                let tol = 1e-9 * (1.0 + bd);
                d < bd - tol || ((d - bd).abs() <= tol && c.len() > clusters[b].len())
            }
        };
        if better {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i).ok_or(Error::NoClusterFound)
}
