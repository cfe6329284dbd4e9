//! Exact self-intersection analysis of the realization map.
//!
//! Face pairs are intersected along the line where their planes meet. The
//! pieces are cut at every breakpoint into elementary intervals; at each
//! interval and each breakpoint the faces through that point are grouped
//! into local sheets. Intervals are then stitched into arcs by continuing
//! through each point along the same pair of sheets.

use crate::complex::{edge, ImmersedComplex};
use crate::error::{Error, Result};
use crate::fold::newell;
use crate::geom::{rat, Rat, Rotation, Vec2, Vec3};
use crate::poly::{self, Where};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

/// Cached plane and projection data for one face.
#[derive(Clone, Debug)]
pub(crate) struct FaceGeom {
    pub n: Vec3,
    pub d: Rat,
    /// Coordinate dropped when projecting to the plane.
    pub k: usize,
    pub poly: Vec<Vec2>,
    pub lo: Vec3,
    pub hi: Vec3,
}

pub(crate) fn face_geoms(c: &ImmersedComplex) -> Vec<FaceGeom> {
    (0..c.faces.len())
        .map(|f| {
            let pts = c.face_points(f);
            let n = newell(&pts);
            let k = (0..3).max_by(|a, b| n.0[*a].abs().cmp(&n.0[*b].abs()).then(b.cmp(a))).unwrap();
            let d = n.dot(pts[0]);
            let poly = pts.iter().map(|p| p.project(k)).collect();
            let lo = Vec3::new(
                pts.iter().map(|p| p.0[0].clone()).min().unwrap(),
                pts.iter().map(|p| p.0[1].clone()).min().unwrap(),
                pts.iter().map(|p| p.0[2].clone()).min().unwrap(),
            );
            let hi = Vec3::new(
                pts.iter().map(|p| p.0[0].clone()).max().unwrap(),
                pts.iter().map(|p| p.0[1].clone()).max().unwrap(),
                pts.iter().map(|p| p.0[2].clone()).max().unwrap(),
            );
            FaceGeom { n, d, k, poly, lo, hi }
        })
        .collect()
}

impl FaceGeom {
    pub fn locate(&self, p: &Vec3) -> Where {
        if (0..3).any(|i| p.0[i] < self.lo.0[i] || p.0[i] > self.hi.0[i]) || self.n.dot(p) != self.d {
            return Where::Outside;
        }
        let r: Vec<&Vec2> = self.poly.iter().collect();
        poly::locate(&p.project(self.k), &r)
    }

    fn boxes_meet(&self, o: &FaceGeom) -> bool {
        (0..3).all(|i| self.lo.0[i] <= o.hi.0[i] && o.lo.0[i] <= self.hi.0[i])
    }

    pub fn axis(&self) -> Option<usize> {
        self.n.dir().map(|d| d.axis)
    }
}

/// A closed parameter interval; `lo == hi` for a single point.
type Span = (Rat, Rat);

fn normalize(mut v: Vec<Span>) -> Vec<Span> {
    v.sort();
    let mut out: Vec<Span> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

fn intersect(a: &[Span], b: &[Span]) -> Vec<Span> {
    let mut out = Vec::new();
    for (a0, a1) in a {
        for (b0, b1) in b {
            let lo = a0.max(b0).clone();
            let hi = a1.min(b1).clone();
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    normalize(out)
}

fn half(p: &Vec2) -> u8 {
    if p.0[1].is_positive() || (p.0[1].is_zero() && p.0[0].is_positive()) {
        0
    } else {
        1
    }
}

/// Angular order of nonzero planar vectors, counterclockwise from +x.
fn angle_cmp(a: &Vec2, b: &Vec2) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| {
        let c = a.cross(b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Coordinates in the plane normal to `u`, oriented counterclockwise about
/// `u`, with `first` (if given) along the positive x axis.
pub(crate) struct Around {
    e1: Vec3,
    e2: Vec3,
}

impl Around {
    pub fn new(u: &Vec3, first: Option<&Vec3>) -> Self {
        let e1 = match first {
            Some(f) => f.clone(),
            None => {
                let i = (0..3).min_by(|a, b| u.0[*a].abs().cmp(&u.0[*b].abs())).unwrap();
                let mut t = Vec3::zero();
                t.0[i] = rat(1);
                u.cross(&t)
            }
        };
        let e2 = u.cross(&e1);
        Around { e1, e2 }
    }

    pub fn coords(&self, w: &Vec3) -> Vec2 {
        Vec2::new(w.dot(&self.e1), w.dot(&self.e2))
    }

    pub fn cmp(&self, a: &Vec3, b: &Vec3) -> Ordering {
        angle_cmp(&self.coords(a), &self.coords(b))
    }
}

pub(crate) fn same_ray(a: &Vec3, b: &Vec3) -> bool {
    a.cross(b).is_zero() && a.dot(b).is_positive()
}

/// Parameters along `A + tB` where the closed polygon is met: a general
/// cut that handles any line direction.
fn line_cut(poly: &[Vec2], a: &Vec2, b: &Vec2) -> (Vec<Span>, Vec<Rat>) {
    let bb = b.norm2();
    let param = |q: &Vec2| {
        let d = q.sub(a);
        (&d.0[0] * &b.0[0] + &d.0[1] * &b.0[1]) / &bb
    };
    let n = poly.len();
    let side: Vec<Rat> = poly.iter().map(|q| b.cross(&q.sub(a))).collect();
    let mut ts: Vec<Rat> = Vec::new();
    for i in 0..n {
        if side[i].is_zero() {
            ts.push(param(&poly[i]));
        }
        let j = (i + 1) % n;
        if (side[i].is_positive() && side[j].is_negative()) || (side[i].is_negative() && side[j].is_positive()) {
            let lam = &side[i] / (&side[i] - &side[j]);
            let d = poly[j].sub(&poly[i]);
            let x = Vec2::new(&poly[i].0[0] + &lam * &d.0[0], &poly[i].0[1] + &lam * &d.0[1]);
            ts.push(param(&x));
        }
    }
    ts.sort();
    ts.dedup();
    let r: Vec<&Vec2> = poly.iter().collect();
    let at = |t: &Rat| Vec2::new(&a.0[0] + t * &b.0[0], &a.0[1] + t * &b.0[1]);
    let inside = |t: &Rat| poly::locate(&at(t), &r) != Where::Outside;
    let mut spans = Vec::new();
    for (i, t) in ts.iter().enumerate() {
        if inside(t) {
            spans.push((t.clone(), t.clone()));
        }
        if i + 1 < ts.len() {
            let mid = (t + &ts[i + 1]) / rat(2);
            if inside(&mid) {
                spans.push((t.clone(), ts[i + 1].clone()));
            }
        }
    }
    (normalize(spans), ts)
}

/// Scanline cut of a polygon by the line `x_j = c` of its projection plane,
/// parametrized by the other projected coordinate. Interior runs come from
/// the even-odd rule with half-open crossings; edges and vertices on the
/// line are added as closed pieces.
fn scan_cut(poly: &[Vec2], j: usize, c: &Rat) -> (Vec<Span>, Vec<Rat>) {
    let o = 1 - j;
    let n = poly.len();
    let mut crossings: Vec<Rat> = Vec::new();
    let mut spans: Vec<Span> = Vec::new();
    let mut ts: Vec<Rat> = Vec::new();
    for i in 0..n {
        let (p, q) = (&poly[i], &poly[(i + 1) % n]);
        let (pj, qj) = (&p.0[j], &q.0[j]);
        if pj == c {
            ts.push(p.0[o].clone());
            spans.push((p.0[o].clone(), p.0[o].clone()));
        }
        if pj == c && qj == c {
            let (a, b) = (p.0[o].clone().min(q.0[o].clone()), p.0[o].clone().max(q.0[o].clone()));
            spans.push((a, b));
        } else if (pj <= c && c < qj) || (qj <= c && c < pj) {
            let t = &p.0[o] + (&q.0[o] - &p.0[o]) * ((c - pj) / (qj - pj));
            crossings.push(t.clone());
            ts.push(t);
        }
    }
    crossings.sort();
    for w in crossings.chunks(2) {
        if let [a, b] = w {
            spans.push((a.clone(), b.clone()));
        }
    }
    ts.sort();
    ts.dedup();
    (normalize(spans), ts)
}

/// A piece of the intersection of two faces, as a closed segment (or point)
/// on the line `p + t u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPiece {
    pub a: Vec3,
    pub b: Vec3,
}

impl PairPiece {
    fn new(a: Vec3, b: Vec3) -> Self {
        if a <= b {
            PairPiece { a, b }
        } else {
            PairPiece { a: b, b: a }
        }
    }
}

/// Intersection of two transverse faces with axis-parallel planes.
pub(crate) fn pair_axis(g: &[FaceGeom], f: usize, h: usize) -> Option<(Vec<PairPiece>, Vec<Vec3>)> {
    let (a, b) = (g[f].axis()?, g[h].axis()?);
    if a == b {
        return None;
    }
    let k = 3 - a - b;
    let ca = &g[f].d / &g[f].n.0[a];
    let cb = &g[h].d / &g[h].n.0[b];
    // in the projection of f (axis a dropped) the line is x_b = cb
    let slot = |dropped: usize, axis: usize| if (dropped + 1) % 3 == axis { 0 } else { 1 };
    let (sf, tf) = scan_cut(&g[f].poly, slot(a, b), &cb);
    let (sh, th) = scan_cut(&g[h].poly, slot(b, a), &ca);
    let point = |t: &Rat| {
        let mut p = Vec3::zero();
        p.0[a] = ca.clone();
        p.0[b] = cb.clone();
        p.0[k] = t.clone();
        p
    };
    let pieces: Vec<PairPiece> = intersect(&sf, &sh).iter().map(|(x, y)| PairPiece::new(point(x), point(y))).collect();
    let crit = tf.iter().chain(th.iter()).map(point).collect();
    Some((pieces, crit))
}

/// Intersection of two faces in non-parallel planes, for any orientation.
pub(crate) fn pair_general(g: &[FaceGeom], f: usize, h: usize) -> Option<(Vec<PairPiece>, Vec<Vec3>)> {
    let (n1, n2) = (&g[f].n, &g[h].n);
    let u = n1.cross(n2);
    if u.is_zero() {
        return None;
    }
    let uu = u.norm2();
    let p0 = (&n2.cross(&u).scale(&g[f].d) + &u.cross(n1).scale(&g[h].d)).scale(&(Rat::one() / &uu));
    let cut = |fg: &FaceGeom| line_cut(&fg.poly, &p0.project(fg.k), &u.project(fg.k));
    let (s1, t1) = cut(&g[f]);
    let (s2, t2) = cut(&g[h]);
    let point = |t: &Rat| &p0 + &u.scale(t);
    let pieces = intersect(&s1, &s2).iter().map(|(x, y)| PairPiece::new(point(x), point(y))).collect();
    let crit = t1.iter().chain(t2.iter()).map(point).collect();
    Some((pieces, crit))
}

/// Exact intersection of two faces, choosing the axis path when it applies.
pub(crate) fn pair_pieces(g: &[FaceGeom], f: usize, h: usize) -> Option<(Vec<PairPiece>, Vec<Vec3>)> {
    pair_axis(g, f, h).or_else(|| pair_general(g, f, h))
}

fn coplanar_overlap(g: &[FaceGeom], f: usize, h: usize) -> bool {
    let (a, b) = (&g[f], &g[h]);
    if !a.n.cross(&b.n).is_zero() || &a.n * &b.d != &b.n * &a.d {
        return false;
    }
    // project both along the dropped axis of the first and make them ccw
    let proj = |fg: &FaceGeom, k: usize| -> Vec<Vec2> {
        let pts: Vec<Vec3> = lift(fg);
        let mut v: Vec<Vec2> = pts.iter().map(|p| p.project(k)).collect();
        let r: Vec<&Vec2> = v.iter().collect();
        if poly::polygon_area2(&r).is_negative() {
            v.reverse();
        }
        v
    };
    let (pa, pb) = (proj(a, a.k), proj(b, a.k));
    let (ra, rb): (Vec<&Vec2>, Vec<&Vec2>) = (pa.iter().collect(), pb.iter().collect());
    poly::polygons_overlap(&ra, &rb).unwrap_or(true)
}

/// Recovers 3D points of a face from its projection and plane.
fn lift(fg: &FaceGeom) -> Vec<Vec3> {
    let k = fg.k;
    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
    fg.poly
        .iter()
        .map(|q| {
            let mut p = Vec3::zero();
            p.0[i] = q.0[0].clone();
            p.0[j] = q.0[1].clone();
            p.0[k] = (&fg.d - &fg.n.0[i] * &q.0[0] - &fg.n.0[j] * &q.0[1]) / &fg.n.0[k];
            p
        })
        .collect()
}

impl std::ops::Mul<&Rat> for &Vec3 {
    type Output = Vec3;
    fn mul(self, k: &Rat) -> Vec3 {
        self.scale(k)
    }
}

/// One elementary interval of the double locus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocusEdge {
    pub a: Vec3,
    pub b: Vec3,
    /// Face pairs whose intersection covers this interval.
    pub pairs: Vec<(usize, usize)>,
    /// The local sheets along the interval, as face sets.
    pub sheets: Vec<Vec<usize>>,
}

/// Maximal straight run along an arc.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleSegment {
    pub faces: Vec<(usize, usize)>,
    pub a: Vec3,
    pub b: Vec3,
}

impl DoubleSegment {
    pub fn length2(&self) -> Rat {
        (&self.b - &self.a).norm2()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub points: Vec<Vec3>,
    pub closed: bool,
    /// Indices into `DoubleLocus::edges`, in the order of `points`.
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriplePoint {
    pub at: Vec3,
    pub faces: Vec<usize>,
    pub sheets: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DoubleLocus {
    pub edges: Vec<LocusEdge>,
    pub segments: Vec<DoubleSegment>,
    pub arcs: Vec<Arc>,
    pub triple_points: Vec<TriplePoint>,
    /// Arc ends that are neither on the boundary of the complex nor at a
    /// triple point.
    pub dangling: Vec<Vec3>,
    /// Places where the locus is not a transverse double curve.
    pub irregular: Vec<(String, Vec3)>,
    /// Intervals where two sheets touch without crossing. A small push
    /// separates them, so they are kept apart from the crossing arcs.
    pub contacts: Vec<LocusEdge>,
}

impl DoubleLocus {
    /// No crossing of sheets anywhere.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Worker count from `BOYFORGE_THREADS`, or the rayon default.
pub fn thread_count() -> Option<usize> {
    std::env::var("BOYFORGE_THREADS").ok().and_then(|s| s.trim().parse().ok()).filter(|n| *n > 0)
}

pub(crate) fn run_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    match b.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

pub fn self_intersections(c: &ImmersedComplex) -> Result<DoubleLocus> {
    self_intersections_with(c, thread_count())
}

/// Shared abstract vertices and edges of two faces.
fn shared(c: &ImmersedComplex, f: usize, h: usize) -> (Vec<usize>, Vec<(usize, usize)>) {
    let sf: BTreeSet<usize> = c.faces[f].iter().copied().collect();
    let verts: Vec<usize> = c.faces[h].iter().copied().filter(|v| sf.contains(v)).collect();
    let edges_of = |x: usize| -> BTreeSet<(usize, usize)> {
        let q = &c.faces[x];
        (0..q.len()).map(|i| edge(q[i], q[(i + 1) % q.len()])).collect()
    };
    let (ef, eh) = (edges_of(f), edges_of(h));
    (verts, ef.intersection(&eh).copied().collect())
}

fn on_segment3(p: &Vec3, a: &Vec3, b: &Vec3) -> bool {
    let (d, w) = (b - a, p - a);
    d.cross(&w).is_zero() && !w.dot(&d).is_negative() && w.dot(&d) <= d.norm2()
}

/// Removes the parts of a pair's pieces that lie on shared vertices or
/// edges. Remaining pieces that still touch a shared vertex belong to the
/// neighbourhood of that vertex and are left to the local tests.
fn strip_shared(c: &ImmersedComplex, f: usize, h: usize, pieces: Vec<PairPiece>) -> Vec<PairPiece> {
    let (verts, edges) = shared(c, f, h);
    if verts.is_empty() {
        return pieces;
    }
    let vpos: Vec<&Vec3> = verts.iter().map(|v| &c.positions[*v]).collect();
    let mut out = Vec::new();
    for p in pieces {
        if p.a == p.b {
            continue;
        }
        let u = &p.b - &p.a;
        let t = |x: &Vec3| (x - &p.a).dot(&u) / u.norm2();
        let mut keep = vec![(rat(0), rat(1))];
        for (x, y) in &edges {
            let (px, py) = (&c.positions[*x], &c.positions[*y]);
            if (px - &p.a).cross(&u).is_zero() && (py - &p.a).cross(&u).is_zero() {
                let (s0, s1) = (t(px).min(t(py)), t(px).max(t(py)));
                keep = keep
                    .into_iter()
                    .flat_map(|(a, b)| {
                        let mut v = Vec::new();
                        if a < s0 {
                            v.push((a.clone(), b.clone().min(s0.clone())));
                        }
                        if b > s1 {
                            v.push((a.max(s1.clone()), b));
                        }
                        v
                    })
                    .collect();
            }
        }
        for (a, b) in keep {
            if a >= b {
                continue;
            }
            let (qa, qb) = (&p.a + &(&u * &a), &p.a + &(&u * &b));
            if vpos.iter().any(|v| on_segment3(v, &qa, &qb)) {
                continue;
            }
            out.push(PairPiece { a: qa, b: qb });
        }
    }
    out
}

fn canonical_line(a: &Vec3, b: &Vec3) -> (Vec3, Vec3) {
    let mut u = b - a;
    let lead = u.0.iter().find(|x| !x.is_zero()).unwrap().clone();
    u = u.scale(&(Rat::one() / lead));
    let foot = a - &u.scale(&(a.dot(&u) / u.norm2()));
    (u, foot)
}

/// Faces through `p`, grouped into local sheets: faces sharing an abstract
/// vertex at `p` or an abstract edge through `p` are joined.
pub(crate) fn sheets_at(c: &ImmersedComplex, g: &[FaceGeom], p: &Vec3) -> Vec<Vec<usize>> {
    let faces: Vec<usize> = (0..c.faces.len()).filter(|f| g[*f].locate(p) != Where::Outside).collect();
    let mut parent: Vec<usize> = (0..faces.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut key: BTreeMap<(u8, usize, usize), usize> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        let q = &c.faces[*f];
        let n = q.len();
        let mut marks = Vec::new();
        for k in 0..n {
            if c.positions[q[k]] == *p {
                marks.push((0u8, q[k], q[k]));
            }
            let (a, b) = (q[k], q[(k + 1) % n]);
            if on_segment3(p, &c.positions[a], &c.positions[b]) {
                let e = edge(a, b);
                marks.push((1u8, e.0, e.1));
            }
        }
        for m in marks {
            match key.get(&m) {
                Some(&j) => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri.max(rj)] = ri.min(rj);
                }
                None => {
                    key.insert(m, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..faces.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(faces[i]);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Half-plane directions of each sheet around the line through `m` along
/// `u`, for a point `m` that is not a vertex or a crossing of any face edge.
pub(crate) fn sheet_directions(
    c: &ImmersedComplex,
    g: &[FaceGeom],
    sheet: &[usize],
    m: &Vec3,
    u: &Vec3,
) -> Vec<(Vec3, usize)> {
    let mut out: Vec<(Vec3, usize)> = Vec::new();
    for &f in sheet {
        let w = g[f].n.cross(u);
        match g[f].locate(m) {
            Where::Inside => {
                out.push((w.clone(), f));
                out.push((-&w, f));
            }
            Where::Boundary => {
                let q = &c.faces[f];
                let n = q.len();
                for k in 0..n {
                    let (a, b) = (&c.positions[q[k]], &c.positions[q[(k + 1) % n]]);
                    if on_segment3(m, a, b) {
                        out.push((g[f].n.cross(&(b - a)), f));
                    }
                }
            }
            Where::Outside => {}
        }
    }
    let mut dedup: Vec<(Vec3, usize)> = Vec::new();
    for (w, f) in out {
        if !dedup.iter().any(|(x, _)| same_ray(x, &w)) {
            dedup.push((w, f));
        }
    }
    dedup
}

/// Two sheets cross transversally along the line when each contributes two
/// half-planes and their half-planes alternate around the line.
pub(crate) fn transverse(d1: &[(Vec3, usize)], d2: &[(Vec3, usize)], u: &Vec3) -> bool {
    if d1.len() != 2 || d2.len() != 2 {
        return false;
    }
    let ar = Around::new(u, None);
    let mut all: Vec<(&Vec3, u8)> = d1.iter().map(|(w, _)| (w, 0)).chain(d2.iter().map(|(w, _)| (w, 1))).collect();
    all.sort_by(|a, b| ar.cmp(a.0, b.0));
    for i in 0..4 {
        if ar.cmp(all[i].0, all[(i + 1) % 4].0) == Ordering::Equal {
            return false;
        }
    }
    all[0].1 != all[1].1 && all[1].1 != all[2].1 && all[2].1 != all[3].1
}

pub fn self_intersections_with(c: &ImmersedComplex, threads: Option<usize>) -> Result<DoubleLocus> {
    let g = face_geoms(c);
    if let Some(f) = g.iter().position(|x| x.n.is_zero()) {
        return Err(Error::Degenerate(format!("face {f} ({}) has no area", c.provenance(f))));
    }
    let nf = c.faces.len();
    let pairs: Vec<(usize, usize)> =
        (0..nf).flat_map(|f| (f + 1..nf).map(move |h| (f, h))).filter(|(f, h)| g[*f].boxes_meet(&g[*h])).collect();
    type PairOut = Result<Option<(usize, usize, Vec<PairPiece>, Vec<Vec3>)>>;
    let results: Vec<PairOut> = run_pool(threads, || {
        pairs
            .par_iter()
            .map(|&(f, h)| -> PairOut {
                let adjacent = !shared(c, f, h).0.is_empty();
                if coplanar_overlap(&g, f, h) {
                    if adjacent {
                        return Ok(None);
                    }
                    return Err(Error::Degenerate(format!(
                        "faces {f} ({}) and {h} ({}) overlap in a planar region",
                        c.provenance(f),
                        c.provenance(h)
                    )));
                }
                let Some((pieces, crit)) = pair_pieces(&g, f, h) else { return Ok(None) };
                let pieces = strip_shared(c, f, h, pieces);
                let pieces: Vec<PairPiece> = pieces.into_iter().filter(|p| p.a != p.b).collect();
                if pieces.is_empty() {
                    return Ok(None);
                }
                Ok(Some((f, h, pieces, crit)))
            })
            .collect()
    });
    let mut found = Vec::new();
    for r in results {
        if let Some(x) = r? {
            found.push(x);
        }
    }
    Ok(stitch(c, &g, found))
}

fn stitch(c: &ImmersedComplex, g: &[FaceGeom], found: Vec<(usize, usize, Vec<PairPiece>, Vec<Vec3>)>) -> DoubleLocus {
    // pieces grouped by supporting line
    type LineKey = (Vec3, Vec3);
    let mut lines: BTreeMap<LineKey, Vec<(Rat, Rat, (usize, usize))>> = BTreeMap::new();
    let mut crit_all: Vec<Vec3> = Vec::new();
    for (f, h, pieces, crit) in &found {
        for p in pieces {
            let key = canonical_line(&p.a, &p.b);
            let (ta, tb) = (p.a.dot(&key.0) / key.0.norm2(), p.b.dot(&key.0) / key.0.norm2());
            lines.entry(key).or_default().push((ta.clone().min(tb.clone()), ta.max(tb), (*f, *h)));
        }
        crit_all.extend(crit.iter().cloned());
    }
    let keys: Vec<LineKey> = lines.keys().cloned().collect();
    let param = |k: &LineKey, p: &Vec3| p.dot(&k.0) / k.0.norm2();
    let on_line = |k: &LineKey, p: &Vec3| (p - &k.1).cross(&k.0).is_zero();
    let point = |k: &LineKey, t: &Rat| &k.1 + &k.0.scale(t);
    let mut breaks: BTreeMap<LineKey, BTreeSet<Rat>> = BTreeMap::new();
    for k in &keys {
        let spans = &lines[k];
        let covered = |t: &Rat| spans.iter().any(|(a, b, _)| a <= t && t <= b);
        let mut set: BTreeSet<Rat> = spans.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
        for p in crit_all.iter().chain(c.positions.iter()) {
            if on_line(k, p) {
                let t = param(k, p);
                if covered(&t) {
                    set.insert(t);
                }
            }
        }
        // crossings with pieces on other lines
        for k2 in &keys {
            if k2 == k || k.0.cross(&k2.0).is_zero() {
                continue;
            }
            let w = &k2.1 - &k.1;
            let n = k.0.cross(&k2.0);
            if !w.dot(&n).is_zero() {
                continue;
            }
            let t = w.cross(&k2.0).dot(&n) / n.norm2();
            let p = point(k, &t);
            let t2 = param(k2, &p);
            if covered(&t) && lines[k2].iter().any(|(a, b, _)| *a <= t2 && t2 <= *b) {
                set.insert(t);
            }
        }
        breaks.insert(k.clone(), set);
    }
    // elementary intervals
    let mut edges: Vec<LocusEdge> = Vec::new();
    for k in &keys {
        let bs: Vec<&Rat> = breaks[k].iter().collect();
        for w in bs.windows(2) {
            let mid = (w[0] + w[1]) / rat(2);
            let mut pairs: Vec<(usize, usize)> =
                lines[k].iter().filter(|(a, b, _)| *a <= mid && mid <= *b).map(|(_, _, fh)| *fh).collect();
            if pairs.is_empty() {
                continue;
            }
            pairs.sort();
            pairs.dedup();
            let m = point(k, &mid);
            let sheets = sheets_at(c, g, &m);
            let (a, b) = (point(k, w[0]), point(k, w[1]));
            edges.push(LocusEdge { a, b, pairs, sheets });
        }
    }
    edges.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    build_arcs(c, g, edges)
}

fn build_arcs(c: &ImmersedComplex, g: &[FaceGeom], all: Vec<LocusEdge>) -> DoubleLocus {
    let mut irregular: Vec<(String, Vec3)> = Vec::new();
    let mut edges = Vec::new();
    let mut contacts = Vec::new();
    for e in all {
        let m = (&e.a + &e.b).scale(&crate::geom::ratio(1, 2));
        let u = &e.b - &e.a;
        if e.sheets.len() != 2 {
            irregular.push((format!("{} sheets along a double interval", e.sheets.len()), m));
            contacts.push(e);
            continue;
        }
        let d0 = sheet_directions(c, g, &e.sheets[0], &m, &u);
        let d1 = sheet_directions(c, g, &e.sheets[1], &m, &u);
        if transverse(&d0, &d1, &u) {
            edges.push(e);
        } else {
            contacts.push(e);
        }
    }
    let mut nodes: BTreeMap<Vec3, Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        nodes.entry(e.a.clone()).or_default().push(i);
        nodes.entry(e.b.clone()).or_default().push(i);
    }
    let free: Vec<(Vec3, Vec3)> = c
        .edge_faces()
        .into_iter()
        .filter(|(_, f)| f.len() == 1)
        .map(|(e, _)| (c.positions[e.0].clone(), c.positions[e.1].clone()))
        .collect();
    // continuation of each edge through each of its end nodes
    let mut next: BTreeMap<(usize, Vec3), usize> = BTreeMap::new();
    let mut triple_points = Vec::new();
    let mut dangling = Vec::new();
    for (p, inc) in &nodes {
        let sh = sheets_at(c, g, p);
        if sh.len() >= 3 {
            let mut faces: Vec<usize> = sh.iter().flatten().copied().collect();
            faces.sort();
            triple_points.push(TriplePoint { at: p.clone(), faces, sheets: sh.len() });
        }
        let which = |f: usize| sh.iter().position(|s| s.contains(&f));
        let mut by_label: BTreeMap<(Option<usize>, Option<usize>), Vec<usize>> = BTreeMap::new();
        for &i in inc {
            let s = &edges[i].sheets;
            let l = if s.len() == 2 {
                let (x, y) = (which(s[0][0]), which(s[1][0]));
                (x.min(y), x.max(y))
            } else {
                (None, None)
            };
            by_label.entry(l).or_default().push(i);
        }
        for (l, es) in by_label {
            if l.0.is_none() || l.0 == l.1 {
                dangling.push(p.clone());
                continue;
            }
            match es.len() {
                2 => {
                    next.insert((es[0], p.clone()), es[1]);
                    next.insert((es[1], p.clone()), es[0]);
                }
                1 => {
                    if !free.iter().any(|(a, b)| on_segment3(p, a, b)) {
                        dangling.push(p.clone());
                    }
                }
                _ => irregular.push((format!("{} double intervals on one sheet pair meet", es.len()), p.clone())),
            }
        }
    }
    dangling.sort();
    dangling.dedup();
    // walk arcs
    let mut used = vec![false; edges.len()];
    let mut arcs = Vec::new();
    for s in 0..edges.len() {
        if used[s] {
            continue;
        }
        used[s] = true;
        // extend forward from b, then backward from a
        let walk = |start_node: Vec3, used: &mut Vec<bool>| -> (Vec<usize>, Vec<Vec3>, bool) {
            let mut es = Vec::new();
            let mut pts = vec![start_node.clone()];
            let (mut cur, mut at) = (s, start_node);
            loop {
                let Some(&n) = next.get(&(cur, at.clone())) else { return (es, pts, false) };
                if n == s {
                    return (es, pts, true);
                }
                if used[n] {
                    return (es, pts, false);
                }
                used[n] = true;
                let other = if edges[n].a == at { edges[n].b.clone() } else { edges[n].a.clone() };
                es.push(n);
                pts.push(other.clone());
                cur = n;
                at = other;
            }
        };
        let (fe, fp, closed) = walk(edges[s].b.clone(), &mut used);
        let mut points: Vec<Vec3>;
        let mut list: Vec<usize>;
        if closed {
            points = vec![edges[s].a.clone()];
            points.extend(fp);
            points.pop();
            list = vec![s];
            list.extend(fe);
        } else {
            let (be, bp, _) = walk(edges[s].a.clone(), &mut used);
            points = bp.into_iter().rev().collect();
            points.extend(fp);
            list = be.into_iter().rev().collect();
            list.push(s);
            list.extend(fe);
        }
        canonical_arc(&mut points, &mut list, closed);
        arcs.push(Arc { points, closed, edges: list });
    }
    arcs.sort_by(|a, b| a.points.cmp(&b.points));
    let segments = straight_runs(&edges, &arcs);
    DoubleLocus { edges, contacts, segments, arcs, triple_points, dangling, irregular }
}

/// Loops start at their smallest point and go towards the smaller
/// neighbour; open arcs start at their smaller end.
fn canonical_arc(points: &mut [Vec3], edges: &mut [usize], closed: bool) {
    if closed {
        let n = points.len();
        let i = (0..n).min_by(|a, b| points[*a].cmp(&points[*b])).unwrap();
        points.rotate_left(i);
        edges.rotate_left(i);
        if n > 2 && points[n - 1] < points[1] {
            // reverse direction keeping the start
            points[1..].reverse();
            edges.reverse();
            edges.rotate_right(1);
        }
    } else if points.last() < points.first() {
        points.reverse();
        edges.reverse();
    }
}

fn straight_runs(edges: &[LocusEdge], arcs: &[Arc]) -> Vec<DoubleSegment> {
    let mut out = Vec::new();
    for arc in arcs {
        let n = arc.edges.len();
        let pts = &arc.points;
        let at = |i: usize| &pts[i % pts.len()];
        let bend = |i: usize| -> bool {
            // direction change at point i
            let (p, q, r) = (at(i + pts.len() - 1), at(i), at(i + 1));
            !(q - p).cross(&(r - q)).is_zero()
        };
        let mut starts: Vec<usize> = if arc.closed {
            (0..n).filter(|i| bend(*i)).collect()
        } else {
            std::iter::once(0).chain((1..n).filter(|i| bend(*i))).collect()
        };
        if starts.is_empty() {
            // straight closed arc cannot occur; keep each edge
            starts = (0..n).collect();
        }
        for (k, &s) in starts.iter().enumerate() {
            let e = if k + 1 < starts.len() {
                starts[k + 1]
            } else if arc.closed {
                starts[0] + n
            } else {
                n
            };
            let mut faces: Vec<(usize, usize)> = (s..e).flat_map(|i| edges[arc.edges[i % n]].pairs.clone()).collect();
            faces.sort();
            faces.dedup();
            let (a, b) = (at(s).clone(), at(e).clone());
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            out.push(DoubleSegment { faces, a, b });
        }
    }
    out.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    out
}

/// Segments, arc polylines and triple points with face ids forgotten.
type GeoKey = (Vec<(Vec3, Vec3)>, Vec<Vec<Vec3>>, Vec<Vec3>);

/// Arc data for σ comparison: the locus with face ids forgotten.
fn geometric_key(l: &DoubleLocus) -> GeoKey {
    let segs = l.segments.iter().map(|s| (s.a.clone(), s.b.clone())).collect();
    let arcs = l.arcs.iter().map(|a| a.points.clone()).collect();
    let tps = l.triple_points.iter().map(|t| t.at.clone()).collect();
    (segs, arcs, tps)
}

fn rotate_key(k: &GeoKey, closed: &[bool], r: &Rotation) -> GeoKey {
    let mut segs: Vec<(Vec3, Vec3)> =
        k.0.iter()
            .map(|(a, b)| {
                let (a, b) = (r.apply(a), r.apply(b));
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
    segs.sort();
    let mut arcs: Vec<Vec<Vec3>> =
        k.1.iter()
            .zip(closed)
            .map(|(pts, cl)| {
                let mut p: Vec<Vec3> = pts.iter().map(|x| r.apply(x)).collect();
                let mut dummy: Vec<usize> = (0..p.len()).collect();
                canonical_arc(&mut p, &mut dummy, *cl);
                p
            })
            .collect();
    arcs.sort();
    let mut tps: Vec<Vec3> = k.2.iter().map(|x| r.apply(x)).collect();
    tps.sort();
    (segs, arcs, tps)
}

/// True iff the rotation carries segments, arcs and triple points onto
/// themselves.
pub fn locus_invariant_under(l: &DoubleLocus, r: &Rotation) -> bool {
    let k = geometric_key(l);
    let closed: Vec<bool> = l.arcs.iter().map(|a| a.closed).collect();
    rotate_key(&k, &closed, r) == k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcSummary {
    pub closed: bool,
    pub segments: usize,
    /// Squared lengths of the straight runs of the arc.
    pub length2: Vec<String>,
    /// Passes through each triple point, in triple point order.
    pub triple_passes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveProfile {
    pub arcs: usize,
    pub loops: usize,
    pub segments: usize,
    pub triple_points: usize,
    pub per_arc: Vec<ArcSummary>,
    /// Sizes of the orbits of arcs under the cyclic coordinate rotation.
    pub sigma_orbits: Vec<usize>,
    pub dangling: Vec<Vec3>,
    pub irregular: usize,
    pub contacts: usize,
}

impl CurveProfile {
    /// Every arc closes up: no dangling end and no irregular point.
    pub fn closes_up(&self) -> bool {
        self.dangling.is_empty() && self.irregular == 0 && self.contacts == 0
    }
}

pub fn double_curve_profile(l: &DoubleLocus) -> CurveProfile {
    let mut per_arc = Vec::new();
    for a in &l.arcs {
        let segs: Vec<&DoubleSegment> = l
            .segments
            .iter()
            .filter(|s| {
                a.edges.iter().any(|e| {
                    let le = &l.edges[*e];
                    on_segment3(&le.a, &s.a, &s.b) && on_segment3(&le.b, &s.a, &s.b)
                })
            })
            .collect();
        let interior: &[Vec3] = if a.closed { &a.points } else { &a.points[1..a.points.len().saturating_sub(1)] };
        let triple_passes = l.triple_points.iter().map(|t| interior.iter().filter(|p| **p == t.at).count()).collect();
        let mut length2: Vec<String> = segs.iter().map(|s| s.length2().to_string()).collect();
        length2.sort();
        per_arc.push(ArcSummary { closed: a.closed, segments: segs.len(), length2, triple_passes });
    }
    let sigma = Rotation::sigma();
    let mut orbit_of: Vec<Option<usize>> = vec![None; l.arcs.len()];
    let mut sizes = Vec::new();
    let canon = |pts: &[Vec3], cl: bool| {
        let mut p: Vec<Vec3> = pts.iter().map(|x| sigma.apply(x)).collect();
        let mut d: Vec<usize> = (0..p.len()).collect();
        canonical_arc(&mut p, &mut d, cl);
        p
    };
    for i in 0..l.arcs.len() {
        if orbit_of[i].is_some() {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        let mut cur = l.arcs[i].points.clone();
        let cl = l.arcs[i].closed;
        loop {
            match l.arcs.iter().position(|a| a.points == cur && a.closed == cl) {
                Some(j) if orbit_of[j].is_none() => {
                    orbit_of[j] = Some(id);
                    size += 1;
                    cur = canon(&cur, cl);
                }
                _ => break,
            }
        }
        sizes.push(size.max(1));
    }
    sizes.sort();
    CurveProfile {
        arcs: l.arcs.len(),
        loops: l.arcs.iter().filter(|a| a.closed).count(),
        segments: l.segments.len(),
        triple_points: l.triple_points.len(),
        per_arc,
        sigma_orbits: sizes,
        dangling: l.dangling.clone(),
        irregular: l.irregular.len(),
        contacts: l.contacts.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ImmersionDefectKind {
    PinchedVertex,
    OverlappingAdjacentFaces,
    EdgeCreaseDegenerate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImmersionDefect {
    pub kind: ImmersionDefectKind,
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
    pub at: Vec3,
}

/// Corner of a face at a vertex: counterclockwise about `n` from `d1`
/// (towards the next vertex) to `d2` (towards the previous one).
struct Sector {
    n: Vec3,
    d1: Vec3,
    d2: Vec3,
}

impl Sector {
    /// Closed membership of a ray in the plane of the sector.
    fn holds(&self, r: &Vec3) -> bool {
        let ar = Around::new(&self.n, Some(&self.d1));
        let (cr, ce) = (ar.coords(r), ar.coords(&self.d2));
        angle_cmp(&cr, &ce) != Ordering::Greater
    }

    fn strictly_holds(&self, r: &Vec3) -> bool {
        !same_ray(r, &self.d1) && !same_ray(r, &self.d2) && self.holds(r)
    }

    /// The same sector described counterclockwise about `-n`.
    fn flipped(&self) -> Sector {
        Sector { n: -&self.n, d1: self.d2.clone(), d2: self.d1.clone() }
    }
}

pub fn local_injectivity(c: &ImmersedComplex) -> Vec<ImmersionDefect> {
    let mut out = Vec::new();
    for (v, link) in crate::topology::vertex_links(c) {
        if link == crate::topology::Link::Other {
            let faces = (0..c.faces.len()).filter(|f| c.faces[*f].contains(&v)).collect();
            out.push(ImmersionDefect {
                kind: ImmersionDefectKind::PinchedVertex,
                vertices: vec![v],
                faces,
                at: c.positions[v].clone(),
            });
        }
    }
    let normals: Vec<Vec3> = (0..c.faces.len()).map(|f| newell(&c.face_points(f))).collect();
    // sector tests in the star of every vertex
    let mut star: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (fi, f) in c.faces.iter().enumerate() {
        for (i, v) in f.iter().enumerate() {
            star.entry(*v).or_default().push((fi, i));
        }
    }
    for (v, fs) in &star {
        let p = &c.positions[*v];
        let sectors: Vec<(usize, Sector, [usize; 2])> = fs
            .iter()
            .map(|&(f, i)| {
                let q = &c.faces[f];
                let n = q.len();
                let (nx, pv) = (q[(i + 1) % n], q[(i + n - 1) % n]);
                (f, Sector { n: normals[f].clone(), d1: &c.positions[nx] - p, d2: &c.positions[pv] - p }, [nx, pv])
            })
            .collect();
        for a in 0..sectors.len() {
            for b in a + 1..sectors.len() {
                let (fa, sa, na) = &sectors[a];
                let (fb, sb, nb) = &sectors[b];
                let shared_rays: Vec<Vec3> =
                    na.iter().filter(|w| nb.contains(w)).map(|w| &c.positions[*w] - p).collect();
                let is_shared = |r: &Vec3| shared_rays.iter().any(|s| same_ray(s, r));
                let bad = if sa.n.cross(&sb.n).is_zero() {
                    let sb2 = if sa.n.dot(&sb.n).is_positive() {
                        Sector { n: sb.n.clone(), d1: sb.d1.clone(), d2: sb.d2.clone() }
                    } else {
                        sb.flipped()
                    };
                    let open_meet =
                        sa.strictly_holds(&sb2.d1) || sb2.strictly_holds(&sa.d1) || same_ray(&sa.d1, &sb2.d1);
                    let touching = [&sa.d1, &sa.d2]
                        .iter()
                        .any(|r| (same_ray(r, &sb2.d1) || same_ray(r, &sb2.d2)) && !is_shared(r));
                    open_meet || touching
                } else {
                    let l = sa.n.cross(&sb.n);
                    [l.clone(), -&l].iter().any(|r| sa.holds(r) && sb.holds(r) && !is_shared(r))
                };
                if bad {
                    out.push(ImmersionDefect {
                        kind: ImmersionDefectKind::OverlappingAdjacentFaces,
                        vertices: vec![*v],
                        faces: vec![*fa.min(fb), *fa.max(fb)],
                        at: p.clone(),
                    });
                }
            }
        }
    }
    // creases: the two faces on an edge leave it in the same direction
    for (e, fs) in c.edge_faces() {
        if fs.len() != 2 {
            continue;
        }
        let into = |f: usize| {
            let q = &c.faces[f];
            let n = q.len();
            let i = (0..n).find(|i| edge(q[*i], q[(i + 1) % n]) == e).unwrap();
            let (a, b) = (&c.positions[q[i]], &c.positions[q[(i + 1) % n]]);
            normals[f].cross(&(b - a))
        };
        if same_ray(&into(fs[0]), &into(fs[1])) {
            out.push(ImmersionDefect {
                kind: ImmersionDefectKind::EdgeCreaseDegenerate,
                vertices: vec![e.0, e.1],
                faces: fs.clone(),
                at: (&c.positions[e.0] + &c.positions[e.1]).scale(&crate::geom::ratio(1, 2)),
            });
        }
    }
    out.sort_by(|a, b| (&a.at, &a.vertices, &a.faces).cmp(&(&b.at, &b.vertices, &b.faces)));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::piece_iv;
    use crate::topology::corpus;

    fn sq(corners: [(i64, i64, i64); 4]) -> Vec<Vec3> {
        corners.iter().map(|(x, y, z)| Vec3::ints(*x, *y, *z)).collect()
    }

    #[test]
    fn piece_iv_has_three_axis_segments() {
        let c = ImmersedComplex::from_piece(&piece_iv());
        let l = self_intersections(&c).unwrap();
        assert_eq!(l.segments.len(), 3);
        for s in &l.segments {
            assert_eq!(s.length2(), rat(4));
            assert_eq!(s.a.0.iter().filter(|x| x.is_zero()).count(), 2);
        }
        assert_eq!(l.triple_points.len(), 1);
        assert_eq!(l.triple_points[0].at, Vec3::zero());
        let p = double_curve_profile(&l);
        assert_eq!(p.arcs, 3);
        assert!(p.per_arc.iter().all(|a| a.triple_passes == vec![1]));
        assert_eq!(p.sigma_orbits, vec![3]);
        assert!(p.closes_up());
    }

    #[test]
    fn parallel_squares_do_not_meet() {
        let mut p = sq([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]);
        p.extend(sq([(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]));
        let c = ImmersedComplex::from_faces(p, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]], "x");
        assert!(self_intersections(&c).unwrap().is_empty());
    }

    #[test]
    fn coplanar_overlap_is_degenerate() {
        let mut p = sq([(0, 0, 0), (2, 0, 0), (2, 2, 0), (0, 2, 0)]);
        p.extend(sq([(1, 1, 0), (3, 1, 0), (3, 3, 0), (1, 3, 0)]));
        let c = ImmersedComplex::from_faces(p, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]], "x");
        assert!(matches!(self_intersections(&c), Err(Error::Degenerate(_))));
    }

    #[test]
    fn axis_and_general_cuts_agree() {
        let c = ImmersedComplex::from_piece(&piece_iv());
        let g = face_geoms(&c);
        for f in 0..c.faces.len() {
            for h in f + 1..c.faces.len() {
                let a = pair_axis(&g, f, h).map(|x| x.0);
                let b = pair_general(&g, f, h).map(|x| x.0);
                assert_eq!(a, b, "faces {f} {h}");
            }
        }
    }

    #[test]
    fn cube_is_locally_injective() {
        assert!(local_injectivity(&corpus::cube()).is_empty());
    }

    #[test]
    fn folded_flat_square_is_a_crease() {
        let mut p = sq([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]);
        p.extend([Vec3::ints(1, 1, 0), Vec3::ints(1, 0, 0)]);
        // the second square is the first one turned over about the edge 0-3
        let c = ImmersedComplex::from_faces(p, vec![vec![0, 1, 2, 3], vec![0, 3, 4, 5]], "x");
        let d = local_injectivity(&c);
        assert!(d.iter().any(|x| x.kind == ImmersionDefectKind::EdgeCreaseDegenerate));
    }
}
