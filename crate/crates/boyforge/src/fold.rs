// Folding flat nets into 3D pieces and placing pieces by anchors.

use crate::error::{Error, Result};
use crate::geom::{rat, Dir, RigidMotion, Rotation, Vec2, Vec3};
use crate::net::{Net, TagKind};
use crate::poly;
use num_traits::Signed;
use std::collections::{BTreeMap, HashMap, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceTag {
    pub kind: TagKind,
    pub name: String,
    pub a: usize,
    pub b: usize,
}

/// A folded net: polygons over shared vertices with exact 3D positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub net: String,
    pub copy: String,
    pub positions: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
    /// Net vertex ids that became each piece vertex.
    pub origin: Vec<Vec<u32>>,
    pub anchors: BTreeMap<String, usize>,
    pub tags: Vec<PieceTag>,
}

impl Piece {
    pub fn face_normal(&self, f: usize) -> Option<Dir> {
        newell(&self.faces[f].iter().map(|&v| &self.positions[v]).collect::<Vec<_>>()).dir()
    }

    /// Undirected edge -> incident faces.
    pub fn edge_faces(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut m: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                m.entry((a.min(b), a.max(b))).or_default().push(fi);
            }
        }
        m
    }

    pub fn tag(&self, name: &str) -> Option<&PieceTag> {
        self.tags.iter().find(|t| t.name == name)
    }
}

/// Newell normal: twice the vector area of a planar polygon.
pub fn newell(pts: &[&Vec3]) -> Vec3 {
    let n = pts.len();
    let mut s = Vec3::zero();
    for i in 0..n {
        s = &s + &pts[i].cross(pts[(i + 1) % n]);
    }
    s
}

/// Affine frame of a face: `q -> o + q.x * u + q.y * v`.
#[derive(Clone, Debug)]
struct Frame {
    o: Vec3,
    u: Dir,
    v: Dir,
}

impl Frame {
    fn root() -> Self {
        Frame { o: Vec3::zero(), u: Dir::new(0, 1), v: Dir::new(1, 1) }
    }
    fn map(&self, q: &Vec2) -> Vec3 {
        let a = Vec3::unit(self.u).scale(q.x());
        let b = Vec3::unit(self.v).scale(q.y());
        &(&self.o + &a) + &b
    }
    fn map_dir(&self, d: Dir) -> Dir {
        match (d.axis, d.sign) {
            (0, 1) => self.u,
            (0, _) => -self.u,
            (_, 1) => self.v,
            _ => -self.v,
        }
    }
    fn normal(&self) -> Dir {
        self.u.cross(self.v).expect("frame axes are perpendicular")
    }
}

fn dir2(d: &Vec2) -> Option<Dir> {
    Vec3::new(d.0[0].clone(), d.0[1].clone(), rat(0)).dir()
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
        let mut x = x;
        while self.0[x] != r {
            let n = self.0[x];
            self.0[x] = r;
            x = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }
}

/// Folds a net. The first face stays in the plane z = 0 at its net
/// coordinates; every other face is carried across the fold tree.
pub fn fold(net: &Net) -> Result<Piece> {
    net.validate()?;
    let err = |msg: String| Error::Fold { net: net.name.clone(), msg };
    let pos = net.positions();
    let nf = net.faces.len();
    let edges = net.edge_faces();

    // faces joined by flat shared edges form rigid panels
    let mut panels = Dsu::new(nf);
    for (e, fs) in &edges {
        if fs.len() == 2 && net.fold_at(e.0, e.1).is_none() {
            panels.union(fs[0].0, fs[1].0);
        }
    }
    let mut tree = Dsu::new(nf);
    let mut adj: Vec<Vec<((u32, u32), usize)>> = vec![vec![]; nf];
    for fd in &net.folds {
        let fs = &edges[&(fd.a.min(fd.b), fd.a.max(fd.b))];
        let (p, q) = (panels.find(fs[0].0), panels.find(fs[1].0));
        if !tree.union(p, q) {
            return Err(err(format!("fold-tree cycle detected at fold {}-{}", fd.a, fd.b)));
        }
        adj[fs[0].0].push(((fd.a, fd.b), fs[1].0));
        adj[fs[1].0].push(((fd.a, fd.b), fs[0].0));
    }
    for (e, fs) in &edges {
        if fs.len() == 2 && net.fold_at(e.0, e.1).is_none() {
            adj[fs[0].0].push((*e, fs[1].0));
            adj[fs[1].0].push((*e, fs[0].0));
        }
    }

    let mut frames: Vec<Option<Frame>> = vec![None; nf];
    frames[0] = Some(Frame::root());
    let mut queue = VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        let pf = frames[f].clone().unwrap();
        for &((a, b), g) in &adj[f] {
            if frames[g].is_some() {
                continue;
            }
            let frame = match net.fold_at(a, b) {
                None => pf.clone(),
                Some(fd) => {
                    let d = dir2(&pos[&b].sub(pos[&a]))
                        .ok_or_else(|| err(format!("fold edge {a}-{b} is not axis-parallel")))?;
                    // direction from the edge into face g, inside the net plane
                    let cyc = &net.faces[g];
                    let k = cyc.iter().position(|&x| x == a).unwrap();
                    let forward = cyc[(k + 1) % cyc.len()] == b;
                    let along = if forward { d } else { -d };
                    let into = Dir::new(1 - along.axis, if along.axis == 0 { along.sign } else { -along.sign });
                    let w = pf.map_dir(into);
                    let n = pf.normal();
                    let axis = pf.map_dir(d);
                    let s = if fd.angle > 0 { 1 } else { -1 };
                    let rot = Rotation::mapping(
                        [axis, w, n],
                        [axis, Dir::new(n.axis, n.sign * s), Dir::new(w.axis, -w.sign * s)],
                    )
                    .expect("quarter turn about an axis");
                    let pivot = pf.map(pos[&a]);
                    let m = RigidMotion { rotation: rot, translation: &pivot - &rot.apply(&pivot) };
                    Frame { o: m.apply(&pf.o), u: rot.apply_dir(pf.u), v: rot.apply_dir(pf.v) }
                }
            };
            frames[g] = Some(frame);
            queue.push_back(g);
        }
    }
    if frames.iter().any(|f| f.is_none()) {
        return Err(err("faces are not connected through shared edges".into()));
    }

    // every net vertex must land in one place
    let mut place: HashMap<u32, Vec3> = HashMap::new();
    for (fi, f) in net.faces.iter().enumerate() {
        let fr = frames[fi].as_ref().unwrap();
        for id in f {
            let p = fr.map(pos[id]);
            match place.get(id) {
                Some(q) if *q != p => {
                    return Err(err(format!("vertex {id} lands at both {q} and {p}")));
                }
                _ => {
                    place.insert(*id, p);
                }
            }
        }
    }

    // letter tags: the two edges of a letter must meet and are joined
    let order: Vec<u32> = net.vertices.iter().map(|v| v.id).collect();
    let slot: HashMap<u32, usize> = order.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut merge = Dsu::new(order.len());
    let mut letters: BTreeMap<&str, Vec<(u32, u32)>> = BTreeMap::new();
    for t in net.tags.iter().filter(|t| t.kind == TagKind::Letter) {
        letters.entry(&t.name).or_default().push((t.a, t.b));
    }
    for (name, es) in &letters {
        let ((a1, b1), (a2, b2)) = (es[0], es[1]);
        let p = |i: u32| &place[&i];
        let pairs = if p(a1) == p(b2) && p(b1) == p(a2) {
            [(a1, b2), (b1, a2)]
        } else if p(a1) == p(a2) && p(b1) == p(b2) {
            [(a1, a2), (b1, b2)]
        } else {
            return Err(err(format!("the two {name} edges do not meet after folding")));
        };
        for (x, y) in pairs {
            merge.union(slot[&x], slot[&y]);
        }
    }

    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut positions = Vec::new();
    let mut origin: Vec<Vec<u32>> = Vec::new();
    for (i, id) in order.iter().enumerate() {
        let r = merge.find(i);
        let k = *index.entry(r).or_insert_with(|| {
            positions.push(place[id].clone());
            origin.push(vec![]);
            positions.len() - 1
        });
        origin[k].push(*id);
    }
    let vid: HashMap<u32, usize> = slot.iter().map(|(id, s)| (*id, index[&merge.find(*s)])).collect();
    let vmap = |id: &u32| vid[id];
    let faces: Vec<Vec<usize>> = net.faces.iter().map(|f| f.iter().map(vmap).collect()).collect();
    let piece = Piece {
        net: net.name.clone(),
        copy: net.name.clone(),
        positions,
        faces,
        origin,
        anchors: net.anchors.iter().map(|(l, id)| (l.clone(), vmap(id))).collect(),
        tags: net
            .tags
            .iter()
            .filter(|t| t.kind != TagKind::Letter)
            .map(|t| PieceTag { kind: t.kind, name: t.name.clone(), a: vmap(&t.a), b: vmap(&t.b) })
            .collect(),
    };
    for (fi, f) in piece.faces.iter().enumerate() {
        let mut s = f.clone();
        s.sort();
        s.dedup();
        if s.len() != f.len() {
            return Err(err(format!("face {fi} collapses after joining letter edges")));
        }
    }
    for (e, fs) in piece.edge_faces() {
        if fs.len() > 2 {
            return Err(err(format!(
                "edge at {} - {} bounds {} faces",
                piece.positions[e.0],
                piece.positions[e.1],
                fs.len()
            )));
        }
    }
    check_no_overlap(&piece).map_err(err)?;
    Ok(piece)
}

/// Projects a face lying in a plane normal to `axis` onto the other two
/// coordinates, counterclockwise.
pub fn project(pts: &[&Vec3], axis: usize) -> Vec<Vec2> {
    let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut out: Vec<Vec2> = pts.iter().map(|p| Vec2::new(p.0[i].clone(), p.0[j].clone())).collect();
    let refs: Vec<&Vec2> = out.iter().collect();
    if poly::polygon_area2(&refs).is_negative() {
        out.reverse();
    }
    out
}

fn check_no_overlap(p: &Piece) -> std::result::Result<(), String> {
    let normals: Vec<Option<Dir>> = (0..p.faces.len()).map(|f| p.face_normal(f)).collect();
    for (f, n) in normals.iter().enumerate() {
        if n.is_none() {
            return Err(format!("face {f} is not axis-parallel after folding"));
        }
    }
    for f in 0..p.faces.len() {
        for g in f + 1..p.faces.len() {
            let (nf, ng) = (normals[f].unwrap(), normals[g].unwrap());
            if nf.axis != ng.axis {
                continue;
            }
            let a = nf.axis;
            if p.positions[p.faces[f][0]].0[a] != p.positions[p.faces[g][0]].0[a] {
                continue;
            }
            let pf = project(&p.faces[f].iter().map(|&v| &p.positions[v]).collect::<Vec<_>>(), a);
            let pg = project(&p.faces[g].iter().map(|&v| &p.positions[v]).collect::<Vec<_>>(), a);
            let rf: Vec<&Vec2> = pf.iter().collect();
            let rg: Vec<&Vec2> = pg.iter().collect();
            if poly::polygons_overlap(&rf, &rg).unwrap_or(true) {
                return Err(format!("faces {f} and {g} overlap after folding"));
            }
        }
    }
    Ok(())
}

pub fn apply_motion(piece: &Piece, m: &RigidMotion) -> Piece {
    Piece { positions: piece.positions.iter().map(|p| m.apply(p)).collect(), ..piece.clone() }
}

fn collinear(a: &Vec3, b: &Vec3, c: &Vec3) -> bool {
    (b - a).cross(&(c - a)).is_zero()
}

/// The unique rotation-plus-translation taking each named anchor onto its
/// target, searched exactly over the 24 lattice rotations.
pub fn solve_placement(piece: &Piece, constraints: &[(String, Vec3)]) -> Result<RigidMotion> {
    let name = || piece.copy.clone();
    let mut src = Vec::new();
    for (l, t) in constraints {
        let v = piece.anchors.get(l).ok_or_else(|| Error::NoSolution {
            piece: name(),
            anchor: Some(l.clone()),
            msg: format!("piece {} has no anchor {l}", piece.net),
        })?;
        src.push((l, &piece.positions[*v], t));
    }
    if src.len() < 3 {
        return Err(Error::Ambiguous { piece: name(), msg: format!("{} anchors; at least 3 are needed", src.len()) });
    }
    let spread =
        src.iter().any(|(_, a, _)| src.iter().any(|(_, b, _)| src.iter().any(|(_, c, _)| !collinear(a, b, c))));
    if !spread {
        return Err(Error::Ambiguous { piece: name(), msg: "anchors are collinear".into() });
    }
    let fits = |r: &Rotation, set: &[&(&String, &Vec3, &Vec3)]| -> Option<RigidMotion> {
        let t = set[0].2 - &r.apply(set[0].1);
        let m = RigidMotion { rotation: *r, translation: t };
        set.iter().all(|(_, p, q)| m.apply(p) == **q).then_some(m)
    };
    let all: Vec<&(&String, &Vec3, &Vec3)> = src.iter().collect();
    let found: Vec<RigidMotion> = Rotation::all().iter().filter_map(|r| fits(r, &all)).collect();
    match found.len() {
        1 => Ok(found.into_iter().next().unwrap()),
        0 => {
            let anchor = blame(&src, |subset| Rotation::all().iter().any(|r| fits(r, subset).is_some()));
            let msg = match &anchor {
                Some(l) => {
                    let (_, _, t) = src.iter().find(|(x, _, _)| *x == l).unwrap();
                    format!("anchor {l} cannot reach {t} together with the others")
                }
                None => "anchor distances or handedness do not match the targets".into(),
            };
            Err(Error::NoSolution { piece: name(), anchor, msg })
        }
        _ => Err(Error::Ambiguous { piece: name(), msg: format!("{} motions fit", found.len()) }),
    }
}

/// Finds the anchor whose pairwise distances disagree most, or failing that
/// the unique anchor whose removal makes the rest solvable.
fn blame(src: &[(&String, &Vec3, &Vec3)], solvable: impl Fn(&[&(&String, &Vec3, &Vec3)]) -> bool) -> Option<String> {
    let n = src.len();
    let mut bad = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if (src[i].1 - src[j].1).norm2() != (src[i].2 - src[j].2).norm2() {
                bad[i] += 1;
                bad[j] += 1;
            }
        }
    }
    let top = *bad.iter().max().unwrap();
    if top > 0 && bad.iter().filter(|&&b| b == top).count() == 1 {
        return Some(src[bad.iter().position(|&b| b == top).unwrap()].0.clone());
    }
    if n > 3 {
        let culprits: Vec<usize> = (0..n)
            .filter(|&i| {
                let rest: Vec<_> = src.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, s)| s).collect();
                solvable(&rest)
            })
            .collect();
        if culprits.len() == 1 {
            return Some(src[culprits[0]].0.clone());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_net;

    const TWO: &str = "net two\nvertex 1 0 0\nvertex 2 1 0\nvertex 3 1 1\nvertex 4 0 1\nvertex 5 2 0\nvertex 6 2 1\nface 1 2 3 4\nface 2 5 6 3\nfold 2 3 angle +90\n";

    #[test]
    fn single_square_stays_flat() {
        let n = parse_net("net sq\nvertex 1 0 0\nvertex 2 1 0\nvertex 3 1 1\nvertex 4 0 1\nface 1 2 3 4\n").unwrap();
        let p = fold(&n).unwrap();
        assert_eq!(
            p.positions,
            vec![Vec3::ints(0, 0, 0), Vec3::ints(1, 0, 0), Vec3::ints(1, 1, 0), Vec3::ints(0, 1, 0)]
        );
    }

    #[test]
    fn positive_fold_lifts_toward_front() {
        let p = fold(&parse_net(TWO).unwrap()).unwrap();
        assert_eq!(p.positions.len(), 6);
        assert_eq!(p.positions[4], Vec3::ints(1, 0, 1));
        assert_eq!(p.positions[5], Vec3::ints(1, 1, 1));
        assert_eq!(p.face_normal(0), Some(Dir::new(2, 1)));
        assert_eq!(p.face_normal(1), Some(Dir::new(0, -1)));
    }

    #[test]
    fn negative_fold_drops_behind() {
        let p = fold(&parse_net(&TWO.replace("+90", "-90")).unwrap()).unwrap();
        assert_eq!(p.positions[4], Vec3::ints(1, 0, -1));
    }

    #[test]
    fn fold_cycle_is_rejected() {
        // four squares around a point, all joined by folds
        let t = "net c\nvertex 1 0 0\nvertex 2 1 0\nvertex 3 2 0\nvertex 4 0 1\nvertex 5 1 1\nvertex 6 2 1\nvertex 7 0 2\nvertex 8 1 2\nvertex 9 2 2\n\
                 face 1 2 5 4\nface 2 3 6 5\nface 4 5 8 7\nface 5 6 9 8\n\
                 fold 2 5 angle +90\nfold 5 6 angle +90\nfold 4 5 angle +90\nfold 5 8 angle +90\n";
        let e = fold(&parse_net(t).unwrap()).unwrap_err();
        assert!(e.to_string().contains("cycle"), "{e}");
    }

    #[test]
    fn forced_quarter_turn_placement() {
        let n = parse_net("net t\nvertex 1 0 0\nvertex 2 1 0\nvertex 3 1 1\nface 1 2 3\nanchor P at 1\nanchor Q at 2\nanchor R at 3\n").unwrap();
        let p = fold(&n).unwrap();
        let c = vec![
            ("P".to_string(), Vec3::ints(0, 0, 0)),
            ("Q".to_string(), Vec3::ints(0, 1, 0)),
            ("R".to_string(), Vec3::ints(-1, 1, 0)),
        ];
        let m = solve_placement(&p, &c).unwrap();
        assert_eq!(m.translation, Vec3::zero());
        assert_eq!(m.rotation.apply(&Vec3::ints(1, 2, 3)), Vec3::ints(-2, 1, 3));
    }

    #[test]
    fn mismatched_anchor_is_named() {
        let n = parse_net("net t\nvertex 1 0 0\nvertex 2 1 0\nvertex 3 1 1\nface 1 2 3\nanchor P at 1\nanchor Q at 2\nanchor R at 3\n").unwrap();
        let p = fold(&n).unwrap();
        let c = vec![
            ("P".to_string(), Vec3::ints(0, 0, 0)),
            ("Q".to_string(), Vec3::ints(1, 0, 0)),
            ("R".to_string(), Vec3::ints(5, 5, 0)),
        ];
        match solve_placement(&p, &c).unwrap_err() {
            Error::NoSolution { anchor, .. } => assert_eq!(anchor.as_deref(), Some("R")),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn two_anchors_are_ambiguous() {
        let p = fold(&parse_net(TWO.to_string().as_str()).unwrap()).unwrap();
        let e = solve_placement(&p, &[]).unwrap_err();
        assert!(matches!(e, Error::Ambiguous { .. }));
    }
}
