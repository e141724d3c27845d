use super::{BevBox, Box3D};

/// Shoelace area of a simple polygon given in counter-clockwise order.
pub fn convex_polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let twice: f64 = poly
        .iter()
        .zip(poly.iter().cycle().skip(1))
        .map(|(a, b)| a[0] * b[1] - a[1] * b[0])
        .sum();
    (twice / 2.0).max(0.0)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn line_intersection(p: [f64; 2], q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    // Segment p→q against the infinite line a→b; callers guarantee p and q
    // lie on opposite sides so the denominator is non-zero.
    let dp = cross(a, b, p);
    let dq = cross(a, b, q);
    let t = dp / (dp - dq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Sutherland–Hodgman: clips `subject` against every edge of the convex,
/// counter-clockwise `clip` polygon.
fn clip_convex(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut output = subject.to_vec();
    for (i, &a) in clip.iter().enumerate() {
        let b = clip[(i + 1) % clip.len()];
        let input = std::mem::take(&mut output);
        if input.is_empty() {
            break;
        }
        let mut prev = input[input.len() - 1];
        let mut prev_in = cross(a, b, prev) >= 0.0;
        for &cur in &input {
            let cur_in = cross(a, b, cur) >= 0.0;
            if cur_in {
                if !prev_in {
                    output.push(line_intersection(prev, cur, a, b));
                }
                output.push(cur);
            } else if prev_in {
                output.push(line_intersection(prev, cur, a, b));
            }
            prev = cur;
            prev_in = cur_in;
        }
    }
    output
}

fn bev_intersection_area(a: &BevBox, b: &BevBox) -> f64 {
    let (dx, dy) = (a.x - b.x, a.y - b.y);
    if dx.hypot(dy) > a.circumradius() + b.circumradius() {
        return 0.0;
    }
    let inter = clip_convex(&a.corners(), &b.corners());
    convex_polygon_area(&inter).min(a.area()).min(b.area())
}

/// Rotated-rectangle IoU in the ground plane.
pub fn bev_iou(a: &Box3D, b: &Box3D) -> f64 {
    let (ba, bb) = (a.bev(), b.bev());
    let inter = bev_intersection_area(&ba, &bb);
    if inter <= 0.0 {
        return 0.0;
    }
    let union = ba.area() + bb.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Volumetric IoU of two yaw-only boxes.
pub fn iou_3d(a: &Box3D, b: &Box3D) -> f64 {
    let dz = a.z_max().min(b.z_max()) - a.z_min().max(b.z_min());
    if dz <= 0.0 {
        return 0.0;
    }
    let inter = bev_intersection_area(&a.bev(), &b.bev()) * dz;
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.volume() + b.volume() - inter;
    (inter / union).clamp(0.0, 1.0)
}
