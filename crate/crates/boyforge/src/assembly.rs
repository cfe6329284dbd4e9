//! Gluing placed pieces into one immersed complex.
//!
//! A placement glues a piece to the assembly starting from its anchors:
//! each anchor is joined to the free boundary point at its target, and from
//! there the boundary of the piece is walked in both directions, joining
//! each boundary edge to the free boundary edge of the assembly that has
//! the same endpoints. A walk stops at the first edge with no partner.
//! Tag steps then join, or confirm, the named edge pairs.

use crate::complex::{edge, ComplexTag, Identification, ImmersedComplex, MergeKind};
use crate::error::{Error, Result};
use crate::fold::{apply_motion, fold, solve_placement, Piece};
use crate::geom::{Rotation, Vec3};
use crate::net::{AnchorTable, AssemblyPlan, Net, Step, PIECE_IV};
use std::collections::{BTreeMap, BTreeSet};

/// The three crossed squares, each cut into four unit faces. The sheets stay
/// separate abstract discs: they cross along the axes rather than sharing
/// edges there.
pub fn piece_iv() -> Piece {
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    let mut index = BTreeMap::new();
    for n in 0..3 {
        let (i, j) = ((n + 1) % 3, (n + 2) % 3);
        for a in -1..=1 {
            for b in -1..=1 {
                let mut p = [0i64; 3];
                p[i] = a;
                p[j] = b;
                index.insert((n, a, b), positions.len());
                positions.push(Vec3::ints(p[0], p[1], p[2]));
            }
        }
        for a in -1..1 {
            for b in -1..1 {
                faces.push(vec![
                    index[&(n, a, b)],
                    index[&(n, a + 1, b)],
                    index[&(n, a + 1, b + 1)],
                    index[&(n, a, b + 1)],
                ]);
            }
        }
    }
    let on = |n: usize, p: Vec3| -> usize {
        let (i, j) = ((n + 1) % 3, (n + 2) % 3);
        let c = |k: usize| -> i64 {
            if p.0[k] == crate::geom::rat(0) {
                0
            } else if p.0[k] > crate::geom::rat(0) {
                1
            } else {
                -1
            }
        };
        index[&(n, c(i), c(j))]
    };
    let table = AnchorTable::boy();
    let mut anchors = BTreeMap::new();
    for (label, sheet) in
        [("A", 1), ("B", 1), ("C", 1), ("A'", 2), ("B'", 2), ("C'", 2), ("A''", 0), ("B''", 0), ("C''", 0)]
    {
        anchors.insert(label.to_string(), on(sheet, table.0[label].clone()));
    }
    let origin = (0..positions.len()).map(|_| vec![]).collect();
    Piece { net: "piece_iv".into(), copy: PIECE_IV.into(), positions, faces, origin, anchors, tags: vec![] }
}

/// An element pair to identify: assembly element first, piece element second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ident {
    Vertex(usize, usize),
    Edge((usize, usize), (usize, usize)),
}

/// Adds `piece` to `acc` and merges the listed pairs. Every pair must
/// coincide exactly and no edge may end up with more than two faces.
pub fn glue(acc: &ImmersedComplex, piece: &Piece, idents: &[Ident], step: &str) -> Result<ImmersedComplex> {
    let mut c = acc.clone();
    let off = c.append(piece);
    let mut pairs = Vec::new();
    for id in idents {
        match id {
            Ident::Vertex(a, p) => pairs.push((*a, p + off, MergeKind::Anchor)),
            Ident::Edge((a, b), (p, q)) => {
                let (p, q) = (p + off, q + off);
                let pos = &c.positions;
                if pos[*a] == pos[p] && pos[*b] == pos[q] {
                    pairs.push((*a, p, MergeKind::Seam));
                    pairs.push((*b, q, MergeKind::Seam));
                } else if pos[*a] == pos[q] && pos[*b] == pos[p] {
                    pairs.push((*a, q, MergeKind::Seam));
                    pairs.push((*b, p, MergeKind::Seam));
                } else {
                    return Err(Error::NonCoincident { a: Box::new(pos[*a].clone()), b: Box::new(pos[p].clone()) });
                }
            }
        }
    }
    merge_pairs(&mut c, &pairs, step)?;
    c.compact();
    Ok(c)
}

fn merge_pairs(c: &mut ImmersedComplex, pairs: &[(usize, usize, MergeKind)], step: &str) -> Result<()> {
    // union-find so that chains of merges resolve to one survivor
    let n = c.positions.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, b, kind) in pairs {
        if c.positions[*a] != c.positions[*b] {
            return Err(Error::NonCoincident {
                a: Box::new(c.positions[*a].clone()),
                b: Box::new(c.positions[*b].clone()),
            });
        }
        let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
        if ra != rb {
            let (keep, gone) = (ra.min(rb), ra.max(rb));
            parent[gone] = keep;
            c.log.push(Identification {
                step: step.to_string(),
                kind: kind.clone(),
                what: "vertex".into(),
                at: vec![c.positions[*a].clone()],
            });
        }
    }
    for v in 0..n {
        let r = find(&mut parent, v);
        if r != v {
            c.merge_vertex(r, v);
        }
    }
    for (e, fs) in c.edge_faces() {
        if fs.len() > 2 {
            return Err(Error::NonSurface {
                a: Box::new(c.positions[e.0].clone()),
                b: Box::new(c.positions[e.1].clone()),
                faces: fs.len(),
            });
        }
    }
    for (fi, f) in c.faces.iter().enumerate() {
        let s: BTreeSet<usize> = f.iter().copied().collect();
        if s.len() != f.len() {
            return Err(Error::NotSurface(format!("gluing collapses face {fi} of {}", c.provenance(fi))));
        }
    }
    Ok(())
}

fn boundary_adjacency(edges: impl Iterator<Item = (usize, usize)>) -> BTreeMap<usize, Vec<usize>> {
    let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, b) in edges {
        m.entry(a).or_default().push(b);
        m.entry(b).or_default().push(a);
    }
    m
}

/// Identifications for a placed piece: anchors plus the maximal runs of
/// coincident boundary edges that start at them.
pub fn anchor_runs(acc: &ImmersedComplex, piece: &Piece, anchors: &[String]) -> Result<Vec<Ident>> {
    let free: BTreeSet<(usize, usize)> =
        acc.edge_faces().into_iter().filter(|(_, f)| f.len() == 1).map(|(e, _)| e).collect();
    let acc_nb = boundary_adjacency(free.iter().copied());
    let pb: BTreeSet<(usize, usize)> =
        piece.edge_faces().into_iter().filter(|(_, f)| f.len() == 1).map(|(e, _)| e).collect();
    let piece_nb = boundary_adjacency(pb.iter().copied());
    let ap = &acc.positions;
    let pp = &piece.positions;
    let mut out = Vec::new();
    let mut used_acc: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut used_piece: BTreeSet<(usize, usize)> = BTreeSet::new();
    for label in anchors {
        let u = piece.anchors[label];
        let target = &pp[u];
        let mut cands: Vec<usize> = acc_nb.keys().copied().filter(|w| ap[*w] == *target).collect();
        if cands.len() > 1 {
            cands.retain(|w| {
                piece_nb.get(&u).into_iter().flatten().any(|u1| acc_nb[w].iter().any(|w1| ap[*w1] == pp[*u1]))
            });
        }
        let w = match cands.len() {
            1 => cands[0],
            0 => {
                return Err(Error::NoSolution {
                    piece: piece.copy.clone(),
                    anchor: Some(label.clone()),
                    msg: format!("anchor {label} has no free boundary point of the assembly at {target}"),
                })
            }
            k => {
                return Err(Error::Ambiguous {
                    piece: piece.copy.clone(),
                    msg: format!("anchor {label} matches {k} boundary points at {target}"),
                })
            }
        };
        out.push(Ident::Vertex(w, u));
        for &first in piece_nb.get(&u).into_iter().flatten() {
            let (mut pu, mut u0, mut u1, mut w0) = (usize::MAX, u, first, w);
            loop {
                if used_piece.contains(&edge(u0, u1)) {
                    break;
                }
                let next: Vec<usize> = acc_nb[&w0]
                    .iter()
                    .copied()
                    .filter(|w1| ap[*w1] == pp[u1] && !used_acc.contains(&edge(w0, *w1)))
                    .collect();
                let w1 = match next.len() {
                    0 => break,
                    1 => next[0],
                    k => {
                        return Err(Error::Ambiguous {
                            piece: piece.copy.clone(),
                            msg: format!("{k} boundary edges continue the seam at {}", ap[w0]),
                        })
                    }
                };
                used_acc.insert(edge(w0, w1));
                used_piece.insert(edge(u0, u1));
                out.push(Ident::Edge((w0, w1), (u0, u1)));
                let nb = &piece_nb[&u1];
                if nb.len() != 2 {
                    break;
                }
                let u2 = if nb[0] == u0 { nb[1] } else { nb[0] };
                if u2 == pu && pu != usize::MAX && nb[0] == nb[1] {
                    break;
                }
                pu = u0;
                u0 = u1;
                u1 = u2;
                w0 = w1;
                if !acc_nb.contains_key(&w0) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Joins the edges carrying two tags, or confirms they are already joined.
pub fn glue_tags(c: &mut ImmersedComplex, a: (&str, &str), b: (&str, &str), step: &str) -> Result<()> {
    let find = |copy: &str, name: &str| -> Result<ComplexTag> {
        c.tags
            .iter()
            .find(|t| t.copy == copy && t.name == name)
            .cloned()
            .ok_or_else(|| Error::semantic("assembly", format!("copy {copy} has no tag {name}")))
    };
    let (s, t) = (find(a.0, a.1)?, find(b.0, b.1)?);
    if edge(s.a, s.b) == edge(t.a, t.b) {
        c.log.push(Identification {
            step: step.to_string(),
            kind: MergeKind::Tag,
            what: format!("{} of {} already meets {} of {}", s.name, s.copy, t.name, t.copy),
            at: vec![c.positions[s.a].clone(), c.positions[s.b].clone()],
        });
        return Ok(());
    }
    let pos = &c.positions;
    let pairs = if pos[s.a] == pos[t.a] && pos[s.b] == pos[t.b] {
        vec![(s.a, t.a, MergeKind::Tag), (s.b, t.b, MergeKind::Tag)]
    } else if pos[s.a] == pos[t.b] && pos[s.b] == pos[t.a] {
        vec![(s.a, t.b, MergeKind::Tag), (s.b, t.a, MergeKind::Tag)]
    } else {
        return Err(Error::NonCoincident { a: Box::new(pos[s.a].clone()), b: Box::new(pos[t.a].clone()) });
    };
    // each tagged edge must still be free, otherwise the tag would make a third sheet
    let ef = c.edge_faces();
    for e in [edge(s.a, s.b), edge(t.a, t.b)] {
        if ef.get(&e).map_or(0, |f| f.len()) != 1 {
            return Err(Error::NonSurface { a: Box::new(pos[e.0].clone()), b: Box::new(pos[e.1].clone()), faces: 3 });
        }
    }
    merge_pairs(c, &pairs, step)?;
    c.log.push(Identification {
        step: step.to_string(),
        kind: MergeKind::Tag,
        what: format!("{} of {} joined to {} of {}", s.name, s.copy, t.name, t.copy),
        at: vec![c.positions[s.a].clone(), c.positions[s.b].clone()],
    });
    c.compact();
    Ok(())
}

/// Folds, places and glues a net copy onto the assembly.
pub fn place(
    acc: &ImmersedComplex,
    net: &Net,
    copy: &str,
    anchors: &[(String, String)],
    table: &AnchorTable,
) -> Result<ImmersedComplex> {
    let mut piece = fold(net)?;
    piece.copy = copy.to_string();
    let mut cons = Vec::new();
    for (l, t) in anchors {
        let p = table
            .get(t)
            .ok_or_else(|| Error::semantic("assembly", format!("anchor target {t} is not in the table")))?;
        cons.push((l.clone(), p.clone()));
    }
    let m = solve_placement(&piece, &cons)?;
    let placed = apply_motion(&piece, &m);
    let labels: Vec<String> = anchors.iter().map(|(l, _)| l.clone()).collect();
    let idents = if acc.faces.is_empty() { vec![] } else { anchor_runs(acc, &placed, &labels)? };
    glue(acc, &placed, &idents, copy)
}

/// Runs a plan: builtin piece, placements and tag gluings in order.
pub fn assemble(plan: &AssemblyPlan, nets: &[Net]) -> Result<ImmersedComplex> {
    assemble_with(plan, nets, &AnchorTable::boy())
}

pub fn assemble_with(plan: &AssemblyPlan, nets: &[Net], table: &AnchorTable) -> Result<ImmersedComplex> {
    plan.check_nets(nets)?;
    let mut c = ImmersedComplex::new();
    for st in &plan.steps {
        match st {
            Step::PieceIv => {
                let p = piece_iv();
                c = glue(&c, &p, &[], PIECE_IV).map_err(|e| e.at_step(PIECE_IV))?;
            }
            Step::Place { net, copy, anchors } => {
                let n = nets.iter().find(|n| &n.name == net).expect("checked above");
                c = place(&c, n, copy, anchors, table).map_err(|e| e.at_step(copy))?;
            }
            Step::Glue { tag_a, copy_a, tag_b, copy_b } => {
                let label = format!("glue {tag_a} of {copy_a} to {tag_b} of {copy_b}");
                glue_tags(&mut c, (copy_a, tag_a), (copy_b, tag_b), &label).map_err(|e| e.at_step(&label))?;
            }
        }
    }
    Ok(c)
}

/// True iff the cyclic coordinate map carries the set of face polygons onto itself.
pub fn symmetry_check(c: &ImmersedComplex) -> bool {
    let s = c.rotated(&Rotation::sigma());
    let mut a: Vec<Vec<Vec3>> = (0..c.faces.len()).map(|f| c.face_key(f)).collect();
    let mut b: Vec<Vec<Vec3>> = (0..s.faces.len()).map(|f| s.face_key(f)).collect();
    a.sort();
    b.sort();
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piece_iv_shape() {
        let p = piece_iv();
        assert_eq!(p.faces.len(), 12);
        assert_eq!(p.positions.len(), 27);
        let origin = p.positions.iter().filter(|q| **q == Vec3::zero()).count();
        assert_eq!(origin, 3);
        assert!(p.positions.contains(&Vec3::ints(-1, -1, 0)));
        assert!(!p.positions.contains(&Vec3::ints(-1, -1, 1)));
        assert_eq!(p.positions[p.anchors["C''"]], Vec3::ints(0, 1, 0));
        let distinct: BTreeSet<&Vec3> = p.positions.iter().collect();
        assert_eq!(distinct.len(), 19);
    }

    #[test]
    fn piece_iv_is_symmetric() {
        assert!(symmetry_check(&ImmersedComplex::from_piece(&piece_iv())));
    }

    fn square(x0: i64, y0: i64) -> Piece {
        Piece {
            net: "sq".into(),
            copy: format!("sq{x0}{y0}"),
            positions: vec![
                Vec3::ints(x0, y0, 0),
                Vec3::ints(x0 + 1, y0, 0),
                Vec3::ints(x0 + 1, y0 + 1, 0),
                Vec3::ints(x0, y0 + 1, 0),
            ],
            faces: vec![vec![0, 1, 2, 3]],
            origin: vec![vec![]; 4],
            anchors: BTreeMap::new(),
            tags: vec![],
        }
    }

    #[test]
    fn coincident_edge_becomes_interior() {
        let a = ImmersedComplex::from_piece(&square(0, 0));
        let c = glue(&a, &square(1, 0), &[Ident::Edge((1, 2), (0, 3))], "s").unwrap();
        assert_eq!(c.positions.len(), 6);
        let interior = c.edge_faces().values().filter(|f| f.len() == 2).count();
        assert_eq!(interior, 1);
    }

    #[test]
    fn third_face_on_an_edge_is_refused() {
        let a = ImmersedComplex::from_piece(&square(0, 0));
        let b = glue(&a, &square(1, 0), &[Ident::Edge((1, 2), (0, 3))], "s").unwrap();
        let mut flap = square(1, 0);
        flap.positions = vec![Vec3::ints(1, 0, 0), Vec3::ints(1, 0, 1), Vec3::ints(1, 1, 1), Vec3::ints(1, 1, 0)];
        let e = glue(&b, &flap, &[Ident::Edge((1, 2), (0, 3))], "f").unwrap_err();
        assert!(matches!(e, Error::NonSurface { faces: 3, .. }), "{e}");
    }

    #[test]
    fn non_coincident_pair_reports_points() {
        let a = ImmersedComplex::from_piece(&square(0, 0));
        let e = glue(&a, &square(5, 0), &[Ident::Vertex(0, 0)], "s").unwrap_err();
        assert!(matches!(e, Error::NonCoincident { .. }));
    }
}
