//! Cutting away pieces and resolving double arcs by re-pairing sheets.

use crate::complex::{edge, Edge, ImmersedComplex};
use crate::error::{Error, Result};
use crate::geom::{Rat, Vec2, Vec3};
use crate::immersion::{self, face_geoms, Around, DoubleLocus, FaceGeom};
use crate::poly::{self, Where};
use crate::topology::{self, HomologyProfile, SurfaceClass};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

/// Sub-complex without the faces of the named pieces.
pub fn remove_pieces(c: &ImmersedComplex, names: &[&str]) -> Result<ImmersedComplex> {
    for n in names {
        if !c.pieces.iter().any(|p| p == n) {
            return Err(Error::UnknownPiece(n.to_string()));
        }
    }
    let gone: BTreeSet<&str> = names.iter().copied().collect();
    let mut out = c.clone();
    let keep: Vec<usize> = (0..c.faces.len()).filter(|f| !gone.contains(c.provenance(*f))).collect();
    out.faces = keep.iter().map(|f| c.faces[*f].clone()).collect();
    out.face_piece = keep.iter().map(|f| c.face_piece[*f]).collect();
    out.tags.retain(|t| !gone.contains(t.copy.as_str()));
    out.compact();
    Ok(out)
}

/// How the four half-sheets along one arc are re-joined. `Crossing` keeps
/// each sheet whole and is not a resolution; the other two join every
/// half-sheet of one sheet to its neighbour of the other sheet,
/// counterclockwise or clockwise about the arc direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pairing {
    Crossing,
    Ccw,
    Cw,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Resolution {
    /// One choice per arc, in the canonical arc order of the locus.
    pub pairings: Vec<Pairing>,
}

impl Resolution {
    /// All 2^n valid resolutions of n arcs, in binary counting order.
    pub fn all(arcs: usize) -> Vec<Resolution> {
        (0..1u64 << arcs)
            .map(|m| Resolution {
                pairings: (0..arcs).map(|i| if m >> i & 1 == 0 { Pairing::Ccw } else { Pairing::Cw }).collect(),
            })
            .collect()
    }

    pub fn label(&self) -> String {
        self.pairings
            .iter()
            .map(|p| match p {
                Pairing::Ccw => '0',
                Pairing::Cw => '1',
                Pairing::Crossing => 'x',
            })
            .collect()
    }
}

fn on_open_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> bool {
    let (d, w) = (b - a, p - a);
    d.cross(&w).is_zero() && w.dot(&d).is_positive() && w.dot(&d) < d.norm2()
}

/// Cuts faces so that every arc of the locus runs along abstract edges in
/// both of its sheets.
pub fn subdivide_along(c: &ImmersedComplex, l: &DoubleLocus) -> Result<ImmersedComplex> {
    let mut out = c.clone();
    // midpoints keep the two copies of an arc edge apart after re-pairing,
    // even when both ends of the arc merge all four half-sheets
    let half = crate::geom::ratio(1, 2);
    let mid = |e: &immersion::LocusEdge| (&e.a + &e.b).scale(&half);
    let cuts: BTreeSet<Vec3> = l.edges.iter().flat_map(|e| [e.a.clone(), e.b.clone(), mid(e)]).collect();
    // new vertices inside existing edges
    let mut inserted: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for e in c.edge_faces().keys() {
        let (pa, pb) = (&c.positions[e.0], &c.positions[e.1]);
        let mut pts: Vec<&Vec3> = cuts.iter().filter(|p| on_open_segment(p, pa, pb)).collect();
        if pts.is_empty() {
            continue;
        }
        pts.sort_by_key(|p| (*p - pa).norm2());
        let ids = pts
            .into_iter()
            .map(|p| {
                out.positions.push(p.clone());
                out.positions.len() - 1
            })
            .collect();
        inserted.insert(*e, ids);
    }
    for f in out.faces.iter_mut() {
        let n = f.len();
        let mut g = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (f[i], f[(i + 1) % n]);
            g.push(a);
            if let Some(ids) = inserted.get(&edge(a, b)) {
                if a < b {
                    g.extend(ids.iter().copied());
                } else {
                    g.extend(ids.iter().rev().copied());
                }
            }
        }
        *f = g;
    }
    // chords through face interiors
    let geo = face_geoms(&out);
    let nf = out.faces.len();
    for f in 0..nf {
        let chords: Vec<(Vec3, Vec3)> = l
            .edges
            .iter()
            .filter(|e| e.sheets.iter().flatten().any(|x| *x == f))
            .filter(|e| geo[f].locate(&mid(e)) == Where::Inside)
            .flat_map(|e| [(e.a.clone(), mid(e)), (mid(e), e.b.clone())])
            .collect();
        if chords.is_empty() {
            continue;
        }
        split_face(&mut out, &geo[f], f, &chords)?;
    }
    Ok(out)
}

fn split_face(c: &mut ImmersedComplex, geo: &FaceGeom, f: usize, chords: &[(Vec3, Vec3)]) -> Result<()> {
    let mut adj: BTreeMap<Vec3, Vec<Vec3>> = BTreeMap::new();
    for (a, b) in chords {
        adj.entry(a.clone()).or_default().push(b.clone());
        adj.entry(b.clone()).or_default().push(a.clone());
    }
    let on_boundary: BTreeMap<Vec3, usize> = c.faces[f].iter().map(|v| (c.positions[*v].clone(), *v)).collect();
    // an arc that stops inside the face is continued by an ordinary edge
    // to a corner it can see, so the pieces stay polygons
    let dangling: Vec<Vec3> =
        adj.iter().filter(|(p, n)| n.len() == 1 && !on_boundary.contains_key(*p)).map(|(p, _)| p.clone()).collect();
    for p in dangling {
        let v = visible_corner(c, geo, f, &adj, &p).ok_or_else(|| {
            Error::Resolution(format!("pairing infeasible: no corner of face {f} is visible from the arc end {p}"))
        })?;
        adj.entry(p.clone()).or_default().push(v.clone());
        adj.entry(v).or_default().push(p);
    }
    let chords_len = adj.values().map(|n| n.len()).sum::<usize>() / 2;
    let mut interior: BTreeMap<Vec3, usize> = BTreeMap::new();
    for (p, n) in &adj {
        if on_boundary.contains_key(p) {
            continue;
        }
        if n.len() != 2 {
            return Err(Error::Resolution(format!(
                "pairing infeasible: a double arc ends inside face {f} ({}) at {p}",
                c.provenance(f)
            )));
        }
        c.positions.push(p.clone());
        interior.insert(p.clone(), c.positions.len() - 1);
    }
    let id = |p: &Vec3| on_boundary.get(p).or_else(|| interior.get(p)).copied().unwrap();
    // polylines from boundary node to boundary node
    let mut used: BTreeSet<(Vec3, Vec3)> = BTreeSet::new();
    let mut lines: Vec<Vec<Vec3>> = Vec::new();
    for start in adj.keys().filter(|p| on_boundary.contains_key(*p)) {
        for first in &adj[start] {
            if used.contains(&(start.clone(), first.clone())) {
                continue;
            }
            let mut line = vec![start.clone()];
            let (mut prev, mut cur) = (start.clone(), first.clone());
            loop {
                used.insert((prev.clone(), cur.clone()));
                used.insert((cur.clone(), prev.clone()));
                line.push(cur.clone());
                if on_boundary.contains_key(&cur) {
                    break;
                }
                let n = &adj[&cur];
                let next = if n[0] == prev { n[1].clone() } else { n[0].clone() };
                prev = cur;
                cur = next;
            }
            lines.push(line);
        }
    }
    let covered = used.len() / 2;
    if covered != chords_len {
        return Err(Error::Resolution(format!("pairing infeasible: a closed double arc lies inside face {f}")));
    }
    let k = geo.k;
    let mut cycles: Vec<Vec<usize>> = vec![c.faces[f].clone()];
    for line in lines {
        let ids: Vec<usize> = line.iter().map(id).collect();
        let probe = (&line[0] + &line[1]).scale(&crate::geom::ratio(1, 2)).project(k);
        let (s, t) = (ids[0], *ids.last().unwrap());
        let which = cycles.iter().position(|cy| {
            cy.contains(&s) && cy.contains(&t) && {
                let pts: Vec<Vec2> = cy.iter().map(|v| c.positions[*v].project(k)).collect();
                let r: Vec<&Vec2> = pts.iter().collect();
                poly::locate(&probe, &r) == Where::Inside
            }
        });
        let Some(w) = which else {
            return Err(Error::Resolution(format!("cannot place a cut inside face {f}")));
        };
        let cy = cycles.remove(w);
        let n = cy.len();
        let i = cy.iter().position(|v| *v == s).unwrap();
        let j = cy.iter().position(|v| *v == t).unwrap();
        let walk = |from: usize, to: usize| -> Vec<usize> {
            let mut v = vec![cy[from]];
            let mut x = from;
            while x != to {
                x = (x + 1) % n;
                v.push(cy[x]);
            }
            v
        };
        let inner = &ids[1..ids.len() - 1];
        let mut one = walk(i, j);
        one.extend(inner.iter().rev());
        let mut two = walk(j, i);
        two.extend(inner.iter());
        cycles.push(one);
        cycles.push(two);
    }
    let piece = c.face_piece[f];
    c.faces[f] = cycles.remove(0);
    for cy in cycles {
        c.faces.push(cy);
        c.face_piece.push(piece);
    }
    Ok(())
}

/// The nearest corner of face `f` joined to `p` by a segment inside the
/// face that meets no other edge or cut.
fn visible_corner(
    c: &ImmersedComplex,
    geo: &FaceGeom,
    f: usize,
    adj: &BTreeMap<Vec3, Vec<Vec3>>,
    p: &Vec3,
) -> Option<Vec3> {
    let k = geo.k;
    let q = &c.faces[f];
    let ring: Vec<Vec2> = q.iter().map(|v| c.positions[*v].project(k)).collect();
    let ring_ref: Vec<&Vec2> = ring.iter().collect();
    let p2 = p.project(k);
    let mut cands: Vec<&Vec3> = q.iter().map(|v| &c.positions[*v]).collect();
    cands.sort_by_key(|x| (*x - p).norm2());
    let segs: Vec<(Vec2, Vec2)> =
        adj.iter().flat_map(|(a, n)| n.iter().map(move |b| (a.project(k), b.project(k)))).collect();
    cands
        .into_iter()
        .find(|v| {
            let v2 = v.project(k);
            let mid = (p + *v).scale(&crate::geom::ratio(1, 2)).project(k);
            if poly::locate(&mid, &ring_ref) != Where::Inside {
                return false;
            }
            let n = ring.len();
            let crosses_rim = (0..n).any(|i| {
                let (a, b) = (&ring[i], &ring[(i + 1) % n]);
                *a != v2 && *b != v2 && poly::segments_meet(&p2, &v2, a, b)
            });
            let crosses_cut = segs.iter().any(|(a, b)| {
                if *a == p2 || *b == p2 {
                    let o = if *a == p2 { b } else { a };
                    let (d, e) = (v2.sub(&p2), o.sub(&p2));
                    d.cross(&e).is_zero() && !d.dot(&e).is_negative()
                } else {
                    *a != v2 && *b != v2 && poly::segments_meet(&p2, &v2, a, b)
                }
            });
            !crosses_rim && !crosses_cut
        })
        .cloned()
}

struct Corners {
    parent: Vec<usize>,
    start: Vec<usize>,
}

impl Corners {
    fn new(c: &ImmersedComplex) -> Self {
        let mut start = Vec::with_capacity(c.faces.len());
        let mut n = 0;
        for f in &c.faces {
            start.push(n);
            n += f.len();
        }
        Corners { parent: (0..n).collect(), start }
    }
    fn id(&self, f: usize, i: usize) -> usize {
        self.start[f] + i
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        self.parent[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

fn corner_of(c: &ImmersedComplex, f: usize, v: usize) -> usize {
    c.faces[f].iter().position(|x| *x == v).unwrap()
}

/// For each arc of the cut complex, the arc of the original locus it runs
/// along and whether it runs the other way.
fn match_arcs(l: &DoubleLocus, l2: &DoubleLocus) -> Result<Vec<(usize, bool)>> {
    let mut out = Vec::new();
    let mut hit = vec![0usize; l.arcs.len()];
    for arc in &l2.arcs {
        let (p, q) = (&arc.points[0], &arc.points[1]);
        let found = l.arcs.iter().enumerate().find_map(|(i, a)| {
            let n = a.points.len();
            let segs = if a.closed { n } else { n - 1 };
            (0..segs).find_map(|k| {
                let (s, t) = (&a.points[k], &a.points[(k + 1) % n]);
                let inside = |x: &Vec3| x == s || x == t || on_open_segment(x, s, t);
                (inside(p) && inside(q)).then(|| (i, (q - p).dot(&(t - s)).is_negative()))
            })
        });
        let Some((i, rev)) = found else {
            return Err(Error::Resolution("cutting along the arcs changed the double locus".into()));
        };
        hit[i] += 1;
        out.push((i, rev));
    }
    if hit.iter().any(|h| *h != 1) {
        return Err(Error::Resolution("cutting along the arcs changed the double locus".into()));
    }
    Ok(out)
}

/// One sheet along one locus interval: the abstract edge and its two faces.
struct SheetEdge {
    e: Edge,
    faces: [usize; 2],
}

fn sheet_edge(
    c: &ImmersedComplex,
    ef: &BTreeMap<Edge, Vec<usize>>,
    sheet: &[usize],
    a: &Vec3,
    b: &Vec3,
) -> Result<SheetEdge> {
    let mut found = Vec::new();
    for &f in sheet {
        let q = &c.faces[f];
        for i in 0..q.len() {
            let (x, y) = (q[i], q[(i + 1) % q.len()]);
            let (px, py) = (&c.positions[x], &c.positions[y]);
            if (px == a && py == b) || (px == b && py == a) {
                found.push(edge(x, y));
            }
        }
    }
    found.sort();
    found.dedup();
    match found.as_slice() {
        [e] if ef[e].len() == 2 => Ok(SheetEdge { e: *e, faces: [ef[e][0], ef[e][1]] }),
        _ => Err(Error::Resolution(format!("pairing infeasible: the sheet along {a} - {b} is not cut cleanly"))),
    }
}

fn into_dir(c: &ImmersedComplex, f: usize, e: Edge) -> Vec3 {
    let q = &c.faces[f];
    let n = q.len();
    let i = (0..n).find(|i| edge(q[*i], q[(i + 1) % n]) == e).unwrap();
    let normal = crate::fold::newell(&c.face_points(f));
    normal.cross(&(&c.positions[q[(i + 1) % n]] - &c.positions[q[i]]))
}

/// Re-pairs the sheets along every arc of `c`'s double locus.
pub fn resolve(c: &ImmersedComplex, r: &Resolution) -> Result<ImmersedComplex> {
    let l = immersion::self_intersections(c)?;
    resolve_locus(c, &l, r)
}

pub fn resolve_locus(c: &ImmersedComplex, l: &DoubleLocus, r: &Resolution) -> Result<ImmersedComplex> {
    if let Some(t) = l.triple_points.first() {
        return Err(Error::Resolution(format!("the locus has a triple point at {}", t.at)));
    }
    if let Some(p) = l.dangling.first() {
        return Err(Error::Resolution(format!("pairing infeasible: a double arc ends at {p}")));
    }
    if let Some((why, p)) = l.irregular.first() {
        return Err(Error::Resolution(format!("pairing infeasible: {why} at {p}")));
    }
    if r.pairings.len() != l.arcs.len() {
        return Err(Error::Resolution(format!("{} pairings given for {} arcs", r.pairings.len(), l.arcs.len())));
    }
    if let Some(i) = r.pairings.iter().position(|p| *p == Pairing::Crossing) {
        return Err(Error::Resolution(format!("arc {i}: the crossing pairing does not resolve anything")));
    }
    if l.arcs.is_empty() {
        return Ok(c.clone());
    }
    let sub = subdivide_along(c, l)?;
    let l2 = immersion::self_intersections(&sub)?;
    let origin = match_arcs(l, &l2)?;
    let g = face_geoms(&sub);
    let ef = sub.edge_faces();
    let mut cut: BTreeSet<Edge> = BTreeSet::new();
    // (corner a, corner b) pairs to join, and the vertices touched by arcs
    let mut joins: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    for (ai, arc) in l2.arcs.iter().enumerate() {
        let n = arc.edges.len();
        let mut alpha: Option<Vec<usize>> = None;
        for k in 0..n {
            let le = &l2.edges[arc.edges[k]];
            let (p, q) = (&arc.points[k], &arc.points[(k + 1) % arc.points.len()]);
            // keep the sheet called alpha continuous along the arc
            let (sa, sb) = match &alpha {
                None => (le.sheets[0].clone(), le.sheets[1].clone()),
                Some(prev) => {
                    let node = immersion::sheets_at(&sub, &g, p);
                    let home = node.iter().find(|s| s.contains(&prev[0])).cloned().unwrap_or_default();
                    if le.sheets[0].iter().any(|f| home.contains(f)) {
                        (le.sheets[0].clone(), le.sheets[1].clone())
                    } else {
                        (le.sheets[1].clone(), le.sheets[0].clone())
                    }
                }
            };
            alpha = Some(sa.clone());
            let ea = sheet_edge(&sub, &ef, &sa, p, q)?;
            let eb = sheet_edge(&sub, &ef, &sb, p, q)?;
            cut.insert(ea.e);
            cut.insert(eb.e);
            let u = q - p;
            let around = Around::new(&u, None);
            let mut ring: Vec<(Vec3, usize, bool)> = ea
                .faces
                .iter()
                .map(|f| (into_dir(&sub, *f, ea.e), *f, true))
                .chain(eb.faces.iter().map(|f| (into_dir(&sub, *f, eb.e), *f, false)))
                .collect();
            ring.sort_by(|x, y| around.cmp(&x.0, &y.0));
            let alternates = (0..4).all(|i| {
                ring[i].2 != ring[(i + 1) % 4].2 && around.cmp(&ring[i].0, &ring[(i + 1) % 4].0) != Ordering::Equal
            });
            if !alternates {
                return Err(Error::Resolution(format!("pairing infeasible: arc {ai} is not a crossing at {p}")));
            }
            for i in 0..4 {
                if !ring[i].2 {
                    continue;
                }
                let (from, reversed) = origin[ai];
                let ccw = (r.pairings[from] == Pairing::Ccw) != reversed;
                let partner = if ccw { ring[(i + 1) % 4].1 } else { ring[(i + 3) % 4].1 };
                let fa = ring[i].1;
                for (x, y) in [(ea.e.0, ea.e.1), (ea.e.1, ea.e.0)] {
                    // vertex of the beta edge at the same point as x
                    let px = &sub.positions[x];
                    let bx = if sub.positions[eb.e.0] == *px { eb.e.0 } else { eb.e.1 };
                    let _ = y;
                    joins.push((fa, x, partner, bx));
                    touched.insert(x);
                    touched.insert(bx);
                }
            }
        }
    }
    let mut cs = Corners::new(&sub);
    // corners of untouched vertices stay together; corners of touched ones
    // stay together only across faces joined by an edge that is not cut
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    for (f, q) in sub.faces.iter().enumerate() {
        for (i, v) in q.iter().enumerate() {
            if touched.contains(v) {
                continue;
            }
            let id = cs.id(f, i);
            match first.get(v) {
                Some(&o) => cs.union(o, id),
                None => {
                    first.insert(*v, id);
                }
            }
        }
    }
    for (e, fs) in &ef {
        if cut.contains(e) || fs.len() != 2 {
            continue;
        }
        for v in [e.0, e.1] {
            if touched.contains(&v) {
                let a = cs.id(fs[0], corner_of(&sub, fs[0], v));
                let b = cs.id(fs[1], corner_of(&sub, fs[1], v));
                cs.union(a, b);
            }
        }
    }
    for (fa, va, fb, vb) in joins {
        let a = cs.id(fa, corner_of(&sub, fa, va));
        let b = cs.id(fb, corner_of(&sub, fb, vb));
        cs.union(a, b);
    }
    let mut out = sub.clone();
    out.positions = Vec::new();
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    for (f, q) in sub.faces.iter().enumerate() {
        for (i, v) in q.iter().enumerate() {
            let root = cs.find(cs.id(f, i));
            let nid = *ids.entry(root).or_insert_with(|| {
                out.positions.push(sub.positions[*v].clone());
                out.positions.len() - 1
            });
            out.faces[f][i] = nid;
        }
    }
    out.tags.clear();
    topology::check_surface(&out).map_err(|e| Error::Resolution(format!("pairing infeasible: {e}")))?;
    Ok(out)
}

/// Twice the vector area of each face, squared: an exact area key.
pub fn area_keys(c: &ImmersedComplex) -> Vec<Rat> {
    let mut v: Vec<Rat> = (0..c.faces.len()).map(|f| crate::fold::newell(&c.face_points(f)).norm2()).collect();
    v.sort();
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MobiusReport {
    pub connected: bool,
    pub boundary_components: usize,
    pub orientable: bool,
    pub euler: i64,
    pub class: Option<SurfaceClass>,
    pub class_name: String,
    pub homology: String,
    pub betti_mod2: [usize; 3],
    /// Non-orientable with exactly three boundary circles.
    pub matches_claim: bool,
}

pub fn verify_mobius_claim(c: &ImmersedComplex) -> Result<MobiusReport> {
    let l = immersion::self_intersections(c)?;
    if !l.is_empty() {
        return Err(Error::Resolution("the surface still has crossing double arcs".into()));
    }
    mobius_report(c)
}

fn mobius_report(c: &ImmersedComplex) -> Result<MobiusReport> {
    topology::check_surface(c)?;
    let b = topology::boundary_components(c)?;
    let orientable = topology::orientable(c);
    let euler = topology::euler_characteristic(c);
    let connected = topology::is_connected(c);
    let class = if connected { topology::classify(c).ok() } else { None };
    let h: HomologyProfile = topology::homology(c);
    Ok(MobiusReport {
        connected,
        boundary_components: b.count,
        orientable,
        euler,
        class_name: class.as_ref().map(|k| k.name()).unwrap_or_else(|| "disconnected".into()),
        class,
        homology: h.integral_text(),
        betti_mod2: h.betti_mod2,
        matches_claim: connected && !orientable && b.count == 3,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionOutcome {
    pub resolution: String,
    pub report: std::result::Result<MobiusReport, String>,
}

/// Resolves every vector and reports each result, in counting order.
pub fn enumerate_resolutions(c: &ImmersedComplex) -> Result<Vec<ResolutionOutcome>> {
    let l = immersion::self_intersections(c)?;
    let all = Resolution::all(l.arcs.len());
    let out = immersion::run_pool(immersion::thread_count(), || {
        all.par_iter()
            .map(|r| ResolutionOutcome {
                resolution: r.label(),
                report: resolve_locus(c, &l, r).and_then(|x| verify_mobius_claim(&x)).map_err(|e| e.to_string()),
            })
            .collect()
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::corpus;

    /// Two unit-wide squares crossing along a segment, as a plus sign in
    /// cross-section.
    pub(crate) fn plus() -> ImmersedComplex {
        let p = vec![
            Vec3::ints(-1, 0, 0),
            Vec3::ints(1, 0, 0),
            Vec3::ints(1, 1, 0),
            Vec3::ints(-1, 1, 0),
            Vec3::ints(0, 0, -1),
            Vec3::ints(0, 1, -1),
            Vec3::ints(0, 1, 1),
            Vec3::ints(0, 0, 1),
        ];
        ImmersedComplex::from_faces(p, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]], "plus")
    }

    /// Groups of face polygons, one group per component.
    fn sheets(r: &ImmersedComplex) -> BTreeSet<BTreeSet<Vec<Vec3>>> {
        topology::components(r).iter().map(|comp| comp.iter().map(|f| r.face_key(*f)).collect()).collect()
    }

    #[test]
    fn plus_sign_resolves_both_ways() {
        let c = plus();
        let l = immersion::self_intersections(&c).unwrap();
        assert_eq!(l.arcs.len(), 1);
        let mut shapes = Vec::new();
        for p in [Pairing::Ccw, Pairing::Cw] {
            let r = resolve(&c, &Resolution { pairings: vec![p] }).unwrap();
            assert!(immersion::self_intersections(&r).unwrap().is_empty());
            let comps = topology::components(&r);
            assert_eq!(comps.len(), 2);
            for comp in &comps {
                let sub = ImmersedComplex::from_faces(
                    r.positions.clone(),
                    comp.iter().map(|f| r.faces[*f].clone()).collect(),
                    "s",
                );
                assert_eq!(topology::classify(&sub).unwrap().name(), "disc");
                // each bent sheet holds one half of each square
                let normals: BTreeSet<_> = comp.iter().map(|f| r.face_normal(*f).unwrap().axis).collect();
                assert_eq!(normals.len(), 2);
            }
            assert_eq!(area_keys(&r), area_keys(&subdivide_along(&c, &l).unwrap()));
            shapes.push(sheets(&r));
        }
        assert_ne!(shapes[0], shapes[1]);
        assert!(resolve(&c, &Resolution { pairings: vec![Pairing::Crossing] }).is_err());
    }

    #[test]
    fn empty_locus_is_unchanged() {
        let c = corpus::cube();
        assert_eq!(resolve(&c, &Resolution { pairings: vec![] }).unwrap(), c);
    }

    #[test]
    fn mobius_reports() {
        let m = corpus::mobius_band(1);
        let r = verify_mobius_claim(&m).unwrap();
        assert!(!r.orientable && !r.matches_claim);
        assert_eq!((r.euler, r.boundary_components), (0, 1));
        // punch two holes in the middle strip of a four-strip band
        let mut wide = corpus::mobius_band(4);
        for f in [27, 3] {
            wide.faces.remove(f);
            wide.face_piece.remove(f);
        }
        let r = verify_mobius_claim(&wide).unwrap();
        assert_eq!((r.euler, r.boundary_components, r.orientable), (-2, 3, false));
        assert!(r.matches_claim);
        assert_eq!(r.homology, "(Z, Z^3, 0)");
    }

    #[test]
    fn removing_nothing_or_everything() {
        let c = corpus::cube();
        assert_eq!(remove_pieces(&c, &[]).unwrap(), c);
        assert!(remove_pieces(&c, &["cube"]).unwrap().faces.is_empty());
        assert!(matches!(remove_pieces(&c, &["nope"]), Err(Error::UnknownPiece(_))));
    }
}
