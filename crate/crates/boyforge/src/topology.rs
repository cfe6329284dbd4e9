//! Combinatorial surface analysis of a complex: closedness, connectivity,
//! Euler characteristic, orientability, boundary circles, homology and the
//! classification of surfaces.

use crate::complex::{edge, Edge, ImmersedComplex};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DefectKind {
    /// Edge with one face.
    BoundaryEdge,
    /// Edge with more than two faces.
    BranchedEdge,
    /// Vertex whose link is not a single cycle (or arc, at the boundary).
    PinchedVertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceDefect {
    pub kind: DefectKind,
    /// Vertex ids: one for a vertex defect, two for an edge defect.
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
    pub at: Vec<Vec3>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedReport {
    pub closed: bool,
    pub defects: Vec<SurfaceDefect>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a.max(b)] = a.min(b);
        true
    }
}

/// Shape of a vertex link.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    Cycle,
    Arc,
    Other,
}

/// Link of every used vertex. Each face through `v` contributes the link
/// edge joining the two neighbours of `v` in that face.
pub fn vertex_links(c: &ImmersedComplex) -> BTreeMap<usize, Link> {
    let mut star: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for f in &c.faces {
        let n = f.len();
        for i in 0..n {
            star.entry(f[i]).or_default().push((f[(i + n - 1) % n], f[(i + 1) % n]));
        }
    }
    star.into_iter()
        .map(|(v, links)| {
            let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
            for (a, b) in &links {
                *deg.entry(*a).or_default() += 1;
                *deg.entry(*b).or_default() += 1;
            }
            let ids: Vec<usize> = deg.keys().copied().collect();
            let pos = |x: usize| ids.binary_search(&x).unwrap();
            let mut d = Dsu::new(ids.len());
            for (a, b) in &links {
                d.union(pos(*a), pos(*b));
            }
            let connected = (0..ids.len()).all(|i| d.find(i) == d.find(0));
            let ones = deg.values().filter(|&&k| k == 1).count();
            let twos = deg.values().filter(|&&k| k == 2).count();
            let shape = if !connected || ones + twos != deg.len() {
                Link::Other
            } else if ones == 0 {
                Link::Cycle
            } else if ones == 2 {
                Link::Arc
            } else {
                Link::Other
            };
            (v, shape)
        })
        .collect()
}

pub fn is_closed_surface(c: &ImmersedComplex) -> ClosedReport {
    let mut defects = Vec::new();
    let ef = c.edge_faces();
    for (e, fs) in &ef {
        let kind = match fs.len() {
            2 => continue,
            1 => DefectKind::BoundaryEdge,
            _ => DefectKind::BranchedEdge,
        };
        defects.push(SurfaceDefect {
            kind,
            vertices: vec![e.0, e.1],
            faces: fs.clone(),
            at: vec![c.positions[e.0].clone(), c.positions[e.1].clone()],
        });
    }
    for (v, link) in vertex_links(c) {
        if link != Link::Cycle {
            let faces = (0..c.faces.len()).filter(|f| c.faces[*f].contains(&v)).collect();
            defects.push(SurfaceDefect {
                kind: DefectKind::PinchedVertex,
                vertices: vec![v],
                faces,
                at: vec![c.positions[v].clone()],
            });
        }
    }
    ClosedReport { closed: defects.is_empty() && !c.faces.is_empty(), defects }
}

/// Surface with possible boundary: edges have one or two faces and each
/// vertex link is a cycle or an arc.
pub fn check_surface(c: &ImmersedComplex) -> Result<()> {
    for (e, fs) in c.edge_faces() {
        if fs.len() > 2 {
            return Err(Error::NotSurface(format!(
                "edge {} - {} bounds {} faces",
                c.positions[e.0],
                c.positions[e.1],
                fs.len()
            )));
        }
    }
    for (v, link) in vertex_links(c) {
        if link == Link::Other {
            return Err(Error::NotSurface(format!("pinched vertex {v} at {}", c.positions[v])));
        }
    }
    for (i, f) in c.faces.iter().enumerate() {
        let s: BTreeSet<&usize> = f.iter().collect();
        if s.len() != f.len() || f.len() < 3 {
            return Err(Error::NotSurface(format!("face {i} repeats a vertex")));
        }
    }
    Ok(())
}

/// Connected components, as sorted face lists.
pub fn components(c: &ImmersedComplex) -> Vec<Vec<usize>> {
    let n = c.positions.len();
    let mut d = Dsu::new(n);
    for f in &c.faces {
        for w in f.windows(2) {
            d.union(w[0], w[1]);
        }
    }
    let mut by: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, f) in c.faces.iter().enumerate() {
        by.entry(d.find(f[0])).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = by.into_values().collect();
    out.sort();
    out
}

pub fn is_connected(c: &ImmersedComplex) -> bool {
    components(c).len() == 1
}

/// V - E + F over the vertices actually used by faces.
pub fn euler_characteristic(c: &ImmersedComplex) -> i64 {
    c.used_vertices().len() as i64 - c.edge_faces().len() as i64 + c.faces.len() as i64
}

/// +1 when the face runs along its edge from the lower id to the higher.
fn direction(f: &[usize], e: Edge) -> i8 {
    let n = f.len();
    for i in 0..n {
        let (a, b) = (f[i], f[(i + 1) % n]);
        if edge(a, b) == e {
            return if a < b { 1 } else { -1 };
        }
    }
    0
}

/// Orientation propagation from `start` over each component in turn.
pub fn orientable_from(c: &ImmersedComplex, start: usize) -> bool {
    let ef = c.edge_faces();
    let mut adj: Vec<Vec<(usize, Edge)>> = vec![vec![]; c.faces.len()];
    for (e, fs) in &ef {
        if fs.len() == 2 {
            adj[fs[0]].push((fs[1], *e));
            adj[fs[1]].push((fs[0], *e));
        }
    }
    let mut o: Vec<i8> = vec![0; c.faces.len()];
    let order = std::iter::once(start).chain(0..c.faces.len());
    for s in order {
        if s >= c.faces.len() || o[s] != 0 {
            continue;
        }
        o[s] = 1;
        let mut stack = vec![s];
        while let Some(f) = stack.pop() {
            for &(g, e) in &adj[f] {
                // neighbours must run along the shared edge in opposite senses
                let want = -o[f] * direction(&c.faces[f], e) * direction(&c.faces[g], e);
                if o[g] == 0 {
                    o[g] = want;
                    stack.push(g);
                } else if o[g] != want {
                    return false;
                }
            }
        }
    }
    true
}

pub fn orientable(c: &ImmersedComplex) -> bool {
    orientable_from(c, 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Boundary {
    pub count: usize,
    /// Each cycle as its vertex sequence, starting at its smallest id.
    pub cycles: Vec<Vec<usize>>,
}

pub fn boundary_components(c: &ImmersedComplex) -> Result<Boundary> {
    let free: Vec<Edge> = c.edge_faces().into_iter().filter(|(_, f)| f.len() == 1).map(|(e, _)| e).collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, b) in &free {
        adj.entry(*a).or_default().push(*b);
        adj.entry(*b).or_default().push(*a);
    }
    if let Some((v, n)) = adj.iter().find(|(_, n)| n.len() != 2) {
        return Err(Error::NotSurface(format!(
            "boundary vertex {v} at {} meets {} boundary edges",
            c.positions[*v],
            n.len()
        )));
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut cycles = Vec::new();
    for &s in adj.keys() {
        if seen.contains(&s) {
            continue;
        }
        let mut cyc = vec![s];
        seen.insert(s);
        let (mut prev, mut cur) = (s, adj[&s][0]);
        while cur != s {
            cyc.push(cur);
            seen.insert(cur);
            let n = &adj[&cur];
            let next = if n[0] == prev { n[1] } else { n[0] };
            prev = cur;
            cur = next;
        }
        cycles.push(cyc);
    }
    Ok(Boundary { count: cycles.len(), cycles })
}

/// Finitely generated abelian group: free rank plus torsion coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl Group {
    pub fn free(rank: usize) -> Self {
        Group { rank, torsion: vec![] }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyProfile {
    /// Betti numbers over the two-element field.
    pub betti_mod2: [usize; 3],
    pub integral: [Group; 3],
}

impl HomologyProfile {
    pub fn euler(&self) -> i64 {
        self.betti_mod2[0] as i64 - self.betti_mod2[1] as i64 + self.betti_mod2[2] as i64
    }

    /// Short form such as `(Z, Z/2, 0)`.
    pub fn integral_text(&self) -> String {
        format!("({}, {}, {})", self.integral[0], self.integral[1], self.integral[2])
    }
}

/// Chain complex of a triangulation that cones each face to its own centre;
/// the spokes become extra 1-cells.
struct Chains {
    nv: usize,
    edges: Vec<Edge>,
    /// Boundary of each 1-cell as (vertex, coefficient).
    d1: Vec<Vec<(usize, i64)>>,
    /// Boundary of each 2-cell as (edge index, coefficient).
    d2: Vec<Vec<(usize, i64)>>,
}

fn chains(c: &ImmersedComplex) -> Chains {
    let used: Vec<usize> = c.used_vertices().into_iter().collect();
    let vid: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut eid: BTreeMap<Edge, usize> = BTreeMap::new();
    // cone every polygon to a new centre vertex; a fan could reuse an edge
    // of the complex as a diagonal and close up a spurious sphere
    let mut tris = Vec::new();
    for (k, f) in c.faces.iter().enumerate() {
        let centre = used.len() + k;
        for i in 0..f.len() {
            tris.push([centre, vid[&f[i]], vid[&f[(i + 1) % f.len()]]]);
        }
    }
    for t in &tris {
        for i in 0..3 {
            let e = edge(t[i], t[(i + 1) % 3]);
            let n = eid.len();
            eid.entry(e).or_insert(n);
        }
    }
    let mut edges = vec![(0, 0); eid.len()];
    for (e, i) in &eid {
        edges[*i] = *e;
    }
    let d1 = edges.iter().map(|(a, b)| vec![(*a, -1), (*b, 1)]).collect();
    let d2 = tris
        .iter()
        .map(|t| {
            (0..3)
                .map(|i| {
                    let (a, b) = (t[i], t[(i + 1) % 3]);
                    (eid[&edge(a, b)], if a < b { 1 } else { -1 })
                })
                .collect()
        })
        .collect();
    Chains { nv: used.len() + c.faces.len(), edges, d1, d2 }
}

/// Rank over GF(2) of a matrix given by columns of row indices.
fn rank_mod2(cols: &[Vec<(usize, i64)>], nrows: usize) -> usize {
    let words = nrows.div_ceil(64);
    let mut pivots: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for col in cols {
        let mut v = vec![0u64; words];
        for (r, k) in col {
            if k.rem_euclid(2) == 1 {
                v[r / 64] ^= 1 << (r % 64);
            }
        }
        while let Some(top) = (0..words).rev().find(|w| v[*w] != 0).map(|w| w * 64 + 63 - v[w].leading_zeros() as usize)
        {
            match pivots.get(&top) {
                Some(p) => {
                    for (x, y) in v.iter_mut().zip(p) {
                        *x ^= y;
                    }
                }
                None => {
                    pivots.insert(top, v);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Nonzero invariant factors of an integer matrix given by sparse columns.
/// Unit pivots are eliminated sparsely first; the rest goes through a dense
/// Smith normal form.
pub fn invariant_factors(cols: &[Vec<(usize, i64)>], nrows: usize) -> Vec<BigInt> {
    let mut col: Vec<BTreeMap<usize, BigInt>> = cols
        .iter()
        .map(|c| {
            let mut m: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (r, k) in c {
                *m.entry(*r).or_insert_with(BigInt::zero) += BigInt::from(*k);
            }
            m.retain(|_, v| !v.is_zero());
            m
        })
        .collect();
    let mut by_row: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nrows];
    for (j, c) in col.iter().enumerate() {
        for r in c.keys() {
            by_row[*r].insert(j);
        }
    }
    let mut alive: BTreeSet<usize> = (0..col.len()).filter(|j| !col[*j].is_empty()).collect();
    let mut units = 0usize;
    loop {
        // sparsest column holding a unit entry
        let pick = alive
            .iter()
            .filter_map(|&j| col[j].iter().find(|(_, v)| v.abs().is_one()).map(|(r, _)| (col[j].len(), j, *r)))
            .min();
        let Some((_, j, r)) = pick else { break };
        let pv = col[j][&r].clone();
        let pivot_col = col[j].clone();
        // clear row r from every other column using column operations
        let others: Vec<usize> = by_row[r].iter().copied().filter(|k| *k != j).collect();
        for k in others {
            let f = &col[k][&r] * &pv; // pv is its own inverse
            for (rr, v) in &pivot_col {
                let e = col[k].entry(*rr).or_insert_with(BigInt::zero);
                *e -= &f * v;
                if e.is_zero() {
                    col[k].remove(rr);
                    by_row[*rr].remove(&k);
                } else {
                    by_row[*rr].insert(k);
                }
            }
            if col[k].is_empty() {
                alive.remove(&k);
            }
        }
        // the pivot row is now zero outside column j; row operations clear
        // column j without touching anything else
        for rr in pivot_col.keys() {
            by_row[*rr].remove(&j);
        }
        col[j].clear();
        alive.remove(&j);
        units += 1;
    }
    let rows: Vec<usize> = {
        let s: BTreeSet<usize> = alive.iter().flat_map(|j| col[*j].keys().copied()).collect();
        s.into_iter().collect()
    };
    let rpos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let mut dense: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); alive.len()]; rows.len()];
    for (jj, j) in alive.iter().enumerate() {
        for (r, v) in &col[*j] {
            dense[rpos[r]][jj] = v.clone();
        }
    }
    let mut out = vec![BigInt::one(); units];
    out.extend(smith_diagonal(dense));
    normalize_chain(&mut out);
    out
}

/// Diagonal of the Smith form of a dense matrix (nonzero entries only).
fn smith_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let p = a[t][t].clone();
            let mut done = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&p);
                for j in t..n {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                if !a[i][t].is_zero() {
                    done = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&p);
                for row in a.iter_mut().skip(t) {
                    let s = &q * &row[t];
                    row[j] -= s;
                }
                if !a[t][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
            // move the smallest leftover of row/column t into the pivot
            let mut best = (t, t);
            for i in t..m {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
            }
            if best.1 != t {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Rewrites a diagonal so that each entry divides the next.
fn normalize_chain(d: &mut [BigInt]) {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
}

pub fn homology(c: &ImmersedComplex) -> HomologyProfile {
    let ch = chains(c);
    let (nv, ne, nf) = (ch.nv, ch.edges.len(), ch.d2.len());
    let r1 = rank_mod2(&ch.d1, nv);
    let r2 = rank_mod2(&ch.d2, ne);
    let betti_mod2 = [nv - r1, ne - r1 - r2, nf - r2];
    let f1 = invariant_factors(&ch.d1, nv);
    let f2 = invariant_factors(&ch.d2, ne);
    let tors = |f: &[BigInt]| f.iter().filter(|x| !x.is_one()).cloned().collect::<Vec<_>>();
    let integral = [
        Group { rank: nv - f1.len(), torsion: tors(&f1) },
        Group { rank: ne - f1.len() - f2.len(), torsion: tors(&f2) },
        Group::free(nf - f2.len()),
    ];
    HomologyProfile { betti_mod2, integral }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceClass {
    pub orientable: bool,
    /// Handles when orientable, cross-caps otherwise.
    pub genus: u32,
    pub boundary_circles: u32,
}

impl SurfaceClass {
    pub fn from_invariants(orientable: bool, chi: i64, boundary: usize) -> Result<Self> {
        let rest = 2 - chi - boundary as i64;
        let bad = || Error::NotSurface(format!("no surface has chi {chi} with {boundary} boundary circles"));
        let genus = if orientable {
            if rest < 0 || rest % 2 != 0 {
                return Err(bad());
            }
            rest / 2
        } else {
            if rest < 1 {
                return Err(bad());
            }
            rest
        };
        Ok(SurfaceClass { orientable, genus: genus as u32, boundary_circles: boundary as u32 })
    }

    pub fn euler(&self) -> i64 {
        let (g, b) = (self.genus as i64, self.boundary_circles as i64);
        if self.orientable {
            2 - 2 * g - b
        } else {
            2 - g - b
        }
    }

    pub fn name(&self) -> String {
        match (self.orientable, self.genus, self.boundary_circles) {
            (true, 0, 0) => "sphere".into(),
            (true, 0, 1) => "disc".into(),
            (true, 0, 2) => "annulus".into(),
            (true, 1, 0) => "torus".into(),
            (false, 1, 0) => "projective plane".into(),
            (false, 1, 1) => "Möbius band".into(),
            (false, 2, 0) => "Klein bottle".into(),
            (true, g, b) => format!("orientable surface of genus {g} with {b} boundary circles"),
            (false, k, b) => format!("non-orientable surface with {k} cross-caps and {b} boundary circles"),
        }
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Poincaré classification of a connected surface.
pub fn classify(c: &ImmersedComplex) -> Result<SurfaceClass> {
    if c.faces.is_empty() {
        return Err(Error::NotSurface("empty complex".into()));
    }
    check_surface(c)?;
    let k = components(c).len();
    if k != 1 {
        return Err(Error::NotSurface(format!("{k} components")));
    }
    let b = boundary_components(c)?;
    SurfaceClass::from_invariants(orientable(c), euler_characteristic(c), b.count)
}

/// Splits edge `a`-`b` at its midpoint in every face using it.
pub fn subdivide_edge(c: &ImmersedComplex, a: usize, b: usize) -> ImmersedComplex {
    let mut out = c.clone();
    let mid = (&c.positions[a] + &c.positions[b]).scale(&crate::geom::ratio(1, 2));
    let m = out.positions.len();
    out.positions.push(mid);
    for f in &mut out.faces {
        let n = f.len();
        if let Some(i) = (0..n).find(|i| edge(f[*i], f[(i + 1) % n]) == edge(a, b)) {
            f.insert(i + 1, m);
        }
    }
    out
}

/// Splits face `f` along the chord between its corners `i` and `j`.
pub fn split_face(c: &ImmersedComplex, f: usize, i: usize, j: usize) -> Option<ImmersedComplex> {
    let face = &c.faces[f];
    let n = face.len();
    let (i, j) = (i.min(j), i.max(j));
    if j - i < 2 || (i == 0 && j == n - 1) || j >= n {
        return None;
    }
    // a chord that duplicates an existing edge would create a double edge
    if c.edge_faces().contains_key(&edge(face[i], face[j])) {
        return None;
    }
    let first: Vec<usize> = face[i..=j].to_vec();
    let second: Vec<usize> = face[j..].iter().chain(face[..=i].iter()).copied().collect();
    let mut out = c.clone();
    out.faces[f] = first;
    out.faces.push(second);
    out.face_piece.push(c.face_piece[f]);
    Some(out)
}

/// Reference complexes with known classification.
pub mod corpus {
    use super::*;

    pub fn square() -> ImmersedComplex {
        let p = vec![Vec3::ints(0, 0, 0), Vec3::ints(1, 0, 0), Vec3::ints(1, 1, 0), Vec3::ints(0, 1, 0)];
        ImmersedComplex::from_faces(p, vec![vec![0, 1, 2, 3]], "square")
    }

    /// Boundary of the cube [0,1]^3 with outward faces.
    pub fn cube() -> ImmersedComplex {
        let p: Vec<Vec3> = (0..8).map(|i| Vec3::ints(i & 1, (i >> 1) & 1, (i >> 2) & 1)).collect();
        let f = vec![
            vec![0, 2, 3, 1],
            vec![4, 5, 7, 6],
            vec![0, 1, 5, 4],
            vec![2, 6, 7, 3],
            vec![0, 4, 6, 2],
            vec![1, 3, 7, 5],
        ];
        ImmersedComplex::from_faces(p, f, "cube")
    }

    /// An n by n grid of squares with opposite sides identified.
    pub fn torus(n: usize) -> ImmersedComplex {
        let id = |i: usize, j: usize| (i % n) * n + (j % n);
        let p = (0..n * n).map(|k| Vec3::ints((k / n) as i64, (k % n) as i64, 0)).collect();
        let mut f = Vec::new();
        for i in 0..n {
            for j in 0..n {
                f.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        ImmersedComplex::from_faces(p, f, "torus")
    }

    /// A strip `len` squares long and `width` squares wide whose ends are
    /// joined with a half twist.
    pub fn mobius(len: usize, width: usize) -> ImmersedComplex {
        let rows = width + 1;
        let id = |i: usize, r: usize| if i == len { width - r } else { i * rows + r };
        let p = (0..len * rows).map(|k| Vec3::ints((k / rows) as i64, (k % rows) as i64, 0)).collect();
        let mut f = Vec::new();
        for i in 0..len {
            for r in 0..width {
                f.push(vec![id(i, r), id(i + 1, r), id(i + 1, r + 1), id(i, r + 1)]);
            }
        }
        ImmersedComplex::from_faces(p, f, "mobius")
    }

    /// A Moebius band embedded in space: triangles along a square
    /// centreline whose cross-section turns half a revolution. `rows`
    /// strips run across the band.
    pub fn mobius_band(rows: usize) -> ImmersedComplex {
        let centre = [(2, 0), (2, 2), (0, 2), (-2, 2), (-2, 0), (-2, -2), (0, -2), (2, -2)];
        let turn = [(1, 0), (2, 1), (1, 1), (1, 2), (0, 1), (-1, 2), (-1, 1), (-2, 1)];
        let n = centre.len();
        let cols = rows + 1;
        let scale = crate::geom::ratio(1, 8 * rows as i64);
        let mut p = Vec::new();
        for i in 0..n {
            let (cx, cy) = centre[i];
            let (rx, ry) = (cx.signum(), cy.signum());
            let (a, b) = turn[i];
            for t in 0..cols {
                let s = &scale * crate::geom::rat(2 * t as i64 - rows as i64);
                let w = Vec3::ints(a * rx, a * ry, b).scale(&s);
                p.push(&Vec3::ints(cx, cy, 0) + &w);
            }
        }
        let id = |i: usize, t: usize| if i == n { rows - t } else { i * cols + t };
        let mut f = Vec::new();
        for i in 0..n {
            for t in 0..rows {
                f.push(vec![id(i, t), id(i + 1, t), id(i + 1, t + 1)]);
                f.push(vec![id(i, t), id(i + 1, t + 1), id(i, t + 1)]);
            }
        }
        ImmersedComplex::from_faces(p, f, "band")
    }

    /// A 2 by 2 grid of squares.
    pub fn disc() -> ImmersedComplex {
        let p = (0..9).map(|k| Vec3::ints(k % 3, k / 3, 0)).collect();
        let f = (0..4).map(|q| {
            let (x, y) = (q % 2, q / 2);
            let v = y * 3 + x;
            vec![v, v + 1, v + 4, v + 3]
        });
        ImmersedComplex::from_faces(p, f.collect(), "disc")
    }
}

#[cfg(test)]
mod tests {
    use super::corpus::*;
    use super::*;

    #[test]
    fn square_is_a_disc_with_four_boundary_edges() {
        let s = square();
        let r = is_closed_surface(&s);
        assert!(!r.closed);
        assert_eq!(r.defects.iter().filter(|d| d.kind == DefectKind::BoundaryEdge).count(), 4);
        assert_eq!(euler_characteristic(&s), 1);
        let b = boundary_components(&s).unwrap();
        assert_eq!(b.count, 1);
        assert_eq!(b.cycles[0].len(), 4);
        assert_eq!(homology(&s).integral_text(), "(Z, 0, 0)");
    }

    #[test]
    fn cube_is_a_sphere() {
        let c = cube();
        assert!(is_closed_surface(&c).closed);
        assert_eq!(euler_characteristic(&c), 2);
        assert!(orientable(&c));
        let h = homology(&c);
        assert_eq!(h.integral_text(), "(Z, 0, Z)");
        assert_eq!(h.betti_mod2, [1, 0, 1]);
        assert_eq!(classify(&c).unwrap().name(), "sphere");
    }

    #[test]
    fn torus_and_mobius() {
        let t = torus(4);
        assert_eq!(classify(&t).unwrap(), SurfaceClass { orientable: true, genus: 1, boundary_circles: 0 });
        assert_eq!(homology(&t).integral_text(), "(Z, Z^2, Z)");
        let m = mobius(5, 1);
        assert!(!orientable(&m));
        assert_eq!(classify(&m).unwrap().name(), "Möbius band");
        assert_eq!(homology(&m).integral_text(), "(Z, Z, 0)");
    }

    #[test]
    fn pinched_vertex_is_reported() {
        // two squares meeting in a single corner
        let p = vec![
            Vec3::ints(0, 0, 0),
            Vec3::ints(1, 0, 0),
            Vec3::ints(1, 1, 0),
            Vec3::ints(0, 1, 0),
            Vec3::ints(2, 1, 0),
            Vec3::ints(2, 2, 0),
            Vec3::ints(1, 2, 0),
        ];
        let c = ImmersedComplex::from_faces(p, vec![vec![0, 1, 2, 3], vec![2, 4, 5, 6]], "x");
        assert!(is_closed_surface(&c).defects.iter().any(|d| d.kind == DefectKind::PinchedVertex && d.vertices == [2]));
        assert!(classify(&c).is_err());
    }

    #[test]
    fn torsion_from_a_dense_block() {
        // [[2,0],[0,3]] has invariant factors 1 and 6
        let cols = vec![vec![(0, 2)], vec![(1, 3)]];
        assert_eq!(invariant_factors(&cols, 2), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn orientability_does_not_depend_on_start() {
        for c in [cube(), torus(3), mobius(5, 1), mobius(4, 2)] {
            let first = orientable_from(&c, 0);
            assert!((0..c.faces.len()).all(|s| orientable_from(&c, s) == first));
        }
    }

    #[test]
    fn classification_names() {
        assert_eq!(SurfaceClass::from_invariants(false, 1, 0).unwrap().name(), "projective plane");
        assert_eq!(SurfaceClass::from_invariants(false, -2, 3).unwrap().genus, 1);
        assert!(SurfaceClass::from_invariants(false, -1, 3).is_err());
        assert!(SurfaceClass::from_invariants(true, 1, 0).is_err());
    }
}
