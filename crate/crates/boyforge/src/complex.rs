// The glued surface: polygons over abstract vertices plus their positions.

use crate::fold::{newell, Piece};
use crate::geom::{Dir, Rotation, Vec3};
use crate::net::TagKind;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MergeKind {
    Anchor,
    Seam,
    Tag,
}

/// One entry of the identification log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identification {
    pub step: String,
    pub kind: MergeKind,
    pub what: String,
    pub at: Vec<Vec3>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexTag {
    pub copy: String,
    pub kind: TagKind,
    pub name: String,
    pub a: usize,
    pub b: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImmersedComplex {
    pub positions: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
    /// Index into `pieces` for each face.
    pub face_piece: Vec<usize>,
    /// Provenance names (copy names such as `IV`, `I1`, `II`).
    pub pieces: Vec<String>,
    pub tags: Vec<ComplexTag>,
    pub log: Vec<Identification>,
}

pub type Edge = (usize, usize);

pub fn edge(a: usize, b: usize) -> Edge {
    (a.min(b), a.max(b))
}

impl ImmersedComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// A complex from bare polygons, all with one provenance.
    pub fn from_faces(positions: Vec<Vec3>, faces: Vec<Vec<usize>>, piece: &str) -> Self {
        let n = faces.len();
        ImmersedComplex {
            positions,
            faces,
            face_piece: vec![0; n],
            pieces: vec![piece.to_string()],
            tags: vec![],
            log: vec![],
        }
    }

    pub fn from_piece(p: &Piece) -> Self {
        let mut c = ImmersedComplex::new();
        c.append(p);
        c
    }

    /// Adds a piece as a disjoint part. Returns the vertex offset.
    pub fn append(&mut self, p: &Piece) -> usize {
        let off = self.positions.len();
        let pi = match self.pieces.iter().position(|n| *n == p.copy) {
            Some(i) => i,
            None => {
                self.pieces.push(p.copy.clone());
                self.pieces.len() - 1
            }
        };
        self.positions.extend(p.positions.iter().cloned());
        for f in &p.faces {
            self.faces.push(f.iter().map(|v| v + off).collect());
            self.face_piece.push(pi);
        }
        for t in &p.tags {
            self.tags.push(ComplexTag {
                copy: p.copy.clone(),
                kind: t.kind,
                name: t.name.clone(),
                a: t.a + off,
                b: t.b + off,
            });
        }
        off
    }

    pub fn provenance(&self, f: usize) -> &str {
        &self.pieces[self.face_piece[f]]
    }

    pub fn face_points(&self, f: usize) -> Vec<&Vec3> {
        self.faces[f].iter().map(|&v| &self.positions[v]).collect()
    }

    pub fn face_normal(&self, f: usize) -> Option<Dir> {
        newell(&self.face_points(f)).dir()
    }

    /// Undirected edge -> incident faces (a face appears once per use).
    pub fn edge_faces(&self) -> BTreeMap<Edge, Vec<usize>> {
        let mut m: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for i in 0..f.len() {
                m.entry(edge(f[i], f[(i + 1) % f.len()])).or_default().push(fi);
            }
        }
        m
    }

    /// Vertices used by at least one face.
    pub fn used_vertices(&self) -> BTreeSet<usize> {
        self.faces.iter().flatten().copied().collect()
    }

    /// Replaces vertex `b` by `a` everywhere.
    pub fn merge_vertex(&mut self, keep: usize, gone: usize) {
        if keep == gone {
            return;
        }
        for f in &mut self.faces {
            for v in f.iter_mut() {
                if *v == gone {
                    *v = keep;
                }
            }
        }
        for t in &mut self.tags {
            if t.a == gone {
                t.a = keep;
            }
            if t.b == gone {
                t.b = keep;
            }
        }
    }

    /// Drops vertices no face or tag uses and renumbers the rest in order.
    pub fn compact(&mut self) {
        let mut used: BTreeSet<usize> = self.used_vertices();
        for t in &self.tags {
            used.insert(t.a);
            used.insert(t.b);
        }
        let map: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        self.positions = used.iter().map(|v| self.positions[*v].clone()).collect();
        for f in &mut self.faces {
            for v in f.iter_mut() {
                *v = map[v];
            }
        }
        for t in &mut self.tags {
            t.a = map[&t.a];
            t.b = map[&t.b];
        }
        let used_pieces: BTreeSet<usize> = self.face_piece.iter().copied().collect();
        let tagged: BTreeSet<&str> = self.tags.iter().map(|t| t.copy.as_str()).collect();
        let keep: Vec<usize> = (0..self.pieces.len())
            .filter(|i| used_pieces.contains(i) || tagged.contains(self.pieces[*i].as_str()))
            .collect();
        let pmap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        self.pieces = keep.iter().map(|i| self.pieces[*i].clone()).collect();
        for p in &mut self.face_piece {
            *p = pmap[p];
        }
    }

    /// Image under a lattice rotation (faces and ids unchanged).
    pub fn rotated(&self, r: &Rotation) -> Self {
        ImmersedComplex { positions: self.positions.iter().map(|p| r.apply(p)).collect(), ..self.clone() }
    }

    /// Face provenance names, sorted, with multiplicity.
    pub fn provenance_multiset(&self) -> Vec<String> {
        let mut v: Vec<String> = (0..self.faces.len()).map(|f| self.provenance(f).to_string()).collect();
        v.sort();
        v
    }

    /// Geometric key of a face: its position cycle up to rotation and reversal.
    pub fn face_key(&self, f: usize) -> Vec<Vec3> {
        cycle_key(self.face_points(f).into_iter().cloned().collect())
    }
}

/// Smallest rotation of the cycle or its reverse, as a canonical key.
pub fn cycle_key(pts: Vec<Vec3>) -> Vec<Vec3> {
    let n = pts.len();
    let mut best: Option<Vec<Vec3>> = None;
    let mut rev = pts.clone();
    rev.reverse();
    for seq in [pts, rev] {
        for s in 0..n {
            let cand: Vec<Vec3> = (0..n).map(|i| seq[(s + i) % n].clone()).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}
