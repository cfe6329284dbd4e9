// Exact planar polygon predicates shared by the net checker and the
// intersection code.

use crate::geom::{area2, Rat, Vec2};
use num_traits::{Signed, Zero};

fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> Rat {
    b.sub(a).cross(&c.sub(a))
}

fn on_segment(p: &Vec2, a: &Vec2, b: &Vec2) -> bool {
    orient(a, b, p).is_zero()
        && p.0[0] >= a.0[0].clone().min(b.0[0].clone())
        && p.0[0] <= a.0[0].clone().max(b.0[0].clone())
        && p.0[1] >= a.0[1].clone().min(b.0[1].clone())
        && p.0[1] <= a.0[1].clone().max(b.0[1].clone())
}

/// Closed segments `ab` and `cd` share at least one point.
pub fn segments_meet(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> bool {
    let d1 = orient(c, d, a).signum();
    let d2 = orient(c, d, b).signum();
    let d3 = orient(a, b, c).signum();
    let d4 = orient(a, b, d).signum();
    if d1 != d2 && d3 != d4 && !d1.is_zero() && !d2.is_zero() && !d3.is_zero() && !d4.is_zero() {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// Simple polygon test: non-adjacent edges are disjoint and adjacent edges
/// meet only at their shared vertex.
pub fn is_simple(pts: &[&Vec2]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            if pts[i] == pts[j] {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // shared vertex; reject folding back along the same line
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                let u = p.sub(shared);
                let v = q.sub(shared);
                if u.cross(&v).is_zero() && (&u.0[0] * &v.0[0] + &u.0[1] * &v.0[1]).is_positive() {
                    return false;
                }
            } else if segments_meet(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn in_closed_triangle(p: &Vec2, a: &Vec2, b: &Vec2, c: &Vec2) -> bool {
    !orient(a, b, p).is_negative() && !orient(b, c, p).is_negative() && !orient(c, a, p).is_negative()
}

/// Ear-clipping triangulation of a simple counterclockwise polygon. Flat
/// (180 degree) vertices are kept and never become the tip of an ear, so
/// no triangle is degenerate.
pub fn triangulate(pts: &[&Vec2]) -> Option<Vec<[usize; 3]>> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::with_capacity(pts.len().saturating_sub(2));
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (ip, i, inx) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (pts[ip], pts[i], pts[inx]);
            if !orient(a, b, c).is_positive() {
                continue;
            }
            let blocked =
                idx.iter().filter(|&&j| j != ip && j != i && j != inx).any(|&j| in_closed_triangle(pts[j], a, b, c));
            if blocked {
                continue;
            }
            out.push([ip, i, inx]);
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return None;
        }
    }
    if idx.len() == 3 {
        if !orient(pts[idx[0]], pts[idx[1]], pts[idx[2]]).is_positive() {
            return None;
        }
        out.push([idx[0], idx[1], idx[2]]);
    }
    Some(out)
}

/// Interiors of two counterclockwise triangles intersect.
pub fn triangles_overlap(t: [&Vec2; 3], u: [&Vec2; 3]) -> bool {
    let separated = |p: [&Vec2; 3], q: [&Vec2; 3]| {
        (0..3).any(|i| {
            let (a, b) = (p[i], p[(i + 1) % 3]);
            q.iter().all(|x| !orient(a, b, x).is_positive())
        })
    };
    !(separated(t, u) || separated(u, t))
}

/// Interiors of two simple counterclockwise polygons intersect.
pub fn polygons_overlap(p: &[&Vec2], q: &[&Vec2]) -> Option<bool> {
    let tp = triangulate(p)?;
    let tq = triangulate(q)?;
    Some(
        tp.iter()
            .any(|a| tq.iter().any(|b| triangles_overlap([p[a[0]], p[a[1]], p[a[2]]], [q[b[0]], q[b[1]], q[b[2]]]))),
    )
}

/// Point strictly inside, on the boundary of, or outside a simple polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Where {
    Inside,
    Boundary,
    Outside,
}

pub fn locate(p: &Vec2, poly: &[&Vec2]) -> Where {
    let n = poly.len();
    for i in 0..n {
        if on_segment(p, poly[i], poly[(i + 1) % n]) {
            return Where::Boundary;
        }
    }
    // crossing number with a rightward ray, half-open rule on y
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.0[1] > p.0[1]) != (b.0[1] > p.0[1]) {
            // x coordinate of the crossing compared with p.x, exactly
            let o = orient(a, b, p);
            let up = b.0[1] > a.0[1];
            if (up && o.is_positive()) || (!up && o.is_negative()) {
                inside = !inside;
            }
        }
    }
    if inside {
        Where::Inside
    } else {
        Where::Outside
    }
}

pub fn polygon_area2(pts: &[&Vec2]) -> Rat {
    area2(pts)
}
