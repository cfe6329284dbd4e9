// Generators and property bodies shared by the property tests and the
// acceptance run.
#![allow(dead_code)]

use boyforge::geom::{rat, ratio};
use boyforge::immersion;
use boyforge::surgery::{self, Pairing, Resolution};
use boyforge::topology::{self, corpus};
use boyforge::{fold::newell, ImmersedComplex, Net, Rat, Vec3};
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use std::collections::{BTreeMap, BTreeSet};

pub fn data(name: &str) -> std::path::PathBuf {
    // also compiled into the command-line crate's tests
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let here = root.join("tests/data").join(name);
    if here.exists() {
        here
    } else {
        root.join("../boyforge/tests/data").join(name)
    }
}

/// A net of unit squares joined in a tree by quarter folds. Each step picks
/// an existing cell, a side and a fold sign; occupied cells are skipped.
pub fn fold_tree() -> impl Strategy<Value = String> {
    prop::collection::vec((any::<u32>(), 0u8..4, any::<bool>()), 0..10).prop_map(|steps| {
        let mut cells: Vec<(i64, i64)> = vec![(0, 0)];
        let mut parent: Vec<Option<(usize, u8, bool)>> = vec![None];
        for (pick, side, up) in steps {
            let i = pick as usize % cells.len();
            let (x, y) = cells[i];
            let next = match side {
                0 => (x + 1, y),
                1 => (x, y + 1),
                2 => (x - 1, y),
                _ => (x, y - 1),
            };
            if !cells.contains(&next) {
                cells.push(next);
                parent.push(Some((i, side, up)));
            }
        }
        tree_net(&cells, &parent)
    })
}

fn tree_net(cells: &[(i64, i64)], parent: &[Option<(usize, u8, bool)>]) -> String {
    // corner ids per cell, counterclockwise from the lower left
    let mut ids: Vec<[u32; 4]> = Vec::new();
    let mut next = 1u32;
    let mut folds = Vec::new();
    for (k, p) in parent.iter().enumerate() {
        let mut c = [0u32; 4];
        for slot in c.iter_mut() {
            *slot = next;
            next += 1;
        }
        if let Some((i, side, up)) = *p {
            let q = ids[i];
            // the shared side, as (parent corners, child corners)
            let (pc, cc) = match side {
                0 => ([1, 2], [0, 3]),
                1 => ([3, 2], [0, 1]),
                2 => ([0, 3], [1, 2]),
                _ => ([0, 1], [3, 2]),
            };
            c[cc[0]] = q[pc[0]];
            c[cc[1]] = q[pc[1]];
            folds.push((q[pc[0]], q[pc[1]], if up { 90 } else { -90 }));
        }
        ids.push(c);
        let _ = k;
    }
    let mut s = String::from("net tree\n");
    let mut seen = BTreeSet::new();
    for (k, &(x, y)) in cells.iter().enumerate() {
        let corner = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)];
        for (j, id) in ids[k].iter().enumerate() {
            if seen.insert(*id) {
                s += &format!("vertex {id} {} {}\n", corner[j].0, corner[j].1);
            }
        }
    }
    for c in &ids {
        s += &format!("face {} {} {} {}\n", c[0], c[1], c[2], c[3]);
    }
    for (a, b, t) in folds {
        s += &format!("fold {a} {b} angle {t:+}\n");
    }
    s
}

/// Folding keeps every distance inside a face and turns every fold by a
/// right angle.
pub fn check_fold_isometry(text: &str) -> Result<(), TestCaseError> {
    let net: Net = boyforge::parse_net(text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    // trees whose squares collide after folding are refused by design
    let piece = match boyforge::fold(&net) {
        Ok(p) => p,
        Err(e) if e.to_string().contains("overlap") => return Err(TestCaseError::reject("squares collide")),
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    };
    let flat: BTreeMap<u32, &boyforge::Vec2> = net.positions().into_iter().collect();
    let net_id: Vec<u32> = piece.origin.iter().map(|o| o[0]).collect();
    for f in &piece.faces {
        for &a in f {
            for &b in f {
                let d3 = (&piece.positions[a] - &piece.positions[b]).norm2();
                let d2 = flat[&net_id[a]].sub(flat[&net_id[b]]).norm2();
                prop_assert_eq!(d3, d2);
            }
        }
    }
    for fd in &net.folds {
        let faces: Vec<usize> = (0..piece.faces.len())
            .filter(|f| {
                let ids: BTreeSet<u32> = piece.faces[*f].iter().map(|v| net_id[*v]).collect();
                ids.contains(&fd.a) && ids.contains(&fd.b)
            })
            .collect();
        prop_assert_eq!(faces.len(), 2);
        let n = |f: usize| newell(&piece.faces[f].iter().map(|v| &piece.positions[*v]).collect::<Vec<_>>());
        prop_assert_eq!(n(faces[0]).dot(&n(faces[1])), rat(0));
    }
    Ok(())
}

/// V - E + F counted straight from the polygons.
pub fn euler_by_hand(c: &ImmersedComplex) -> i64 {
    let v: BTreeSet<usize> = c.faces.iter().flatten().copied().collect();
    let e: BTreeSet<(usize, usize)> = c
        .faces
        .iter()
        .flat_map(|f| (0..f.len()).map(move |i| (f[i].min(f[(i + 1) % f.len()]), f[i].max(f[(i + 1) % f.len()]))))
        .collect();
    v.len() as i64 - e.len() as i64 + c.faces.len() as i64
}

/// Orientability by parity union-find over faces: two faces on an edge
/// agree when they use it in opposite directions.
pub fn orientable_by_hand(c: &ImmersedComplex) -> bool {
    let n = c.faces.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut parity = vec![0u8; n];
    fn find(p: &mut [usize], q: &mut [u8], x: usize) -> (usize, u8) {
        if p[x] == x {
            return (x, 0);
        }
        let (r, k) = find(p, q, p[x]);
        q[x] ^= k;
        p[x] = r;
        (r, q[x])
    }
    let mut uses: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
    for (fi, f) in c.faces.iter().enumerate() {
        for i in 0..f.len() {
            let (a, b) = (f[i], f[(i + 1) % f.len()]);
            uses.entry((a.min(b), a.max(b))).or_default().push((fi, a < b));
        }
    }
    for u in uses.values() {
        if let [(f, x), (g, y)] = u[..] {
            // same direction means the faces need opposite orientations
            let want = u8::from(x == y);
            let (rf, pf) = find(&mut parent, &mut parity, f);
            let (rg, pg) = find(&mut parent, &mut parity, g);
            if rf == rg {
                if pf ^ pg != want {
                    return false;
                }
            } else {
                parent[rf] = rg;
                parity[rf] = pf ^ pg ^ want;
            }
        }
    }
    true
}

/// Boundary circles counted as connected clusters of edges used by only
/// one polygon. Good enough for surfaces without pinched boundary points.
pub fn boundary_by_hand(c: &ImmersedComplex) -> usize {
    let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for f in &c.faces {
        for i in 0..f.len() {
            let (a, b) = (f[i], f[(i + 1) % f.len()]);
            *uses.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let up = *p.entry(x).or_insert(x);
        if up == x {
            return x;
        }
        let r = find(p, up);
        p.insert(x, r);
        r
    }
    for (&(a, b), _) in uses.iter().filter(|(_, n)| **n == 1) {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent.insert(ra, rb);
    }
    let keys: Vec<usize> = parent.keys().copied().collect();
    keys.into_iter().map(|k| find(&mut parent, k)).collect::<BTreeSet<_>>().len()
}

pub fn invariants(c: &ImmersedComplex) -> (i64, bool, String, usize) {
    (
        topology::euler_characteristic(c),
        topology::orientable(c),
        topology::homology(c).integral_text(),
        topology::boundary_components(c).map(|b| b.count).unwrap_or(usize::MAX),
    )
}

pub fn corpus_complexes() -> Vec<(&'static str, ImmersedComplex)> {
    vec![
        ("cube", corpus::cube()),
        ("torus", corpus::torus(4)),
        ("mobius", corpus::mobius(5, 1)),
        ("disc", corpus::disc()),
        ("band", corpus::mobius_band(2)),
    ]
}

/// Random edge midpoints and face diagonals.
pub fn subdivisions() -> impl Strategy<Value = Vec<(bool, u32, u32, u32)>> {
    prop::collection::vec((any::<bool>(), any::<u32>(), any::<u32>(), any::<u32>()), 1..8)
}

pub fn subdivide(c: &ImmersedComplex, ops: &[(bool, u32, u32, u32)]) -> ImmersedComplex {
    let mut c = c.clone();
    for &(edge, a, b, k) in ops {
        let f = a as usize % c.faces.len();
        let n = c.faces[f].len();
        if edge {
            let i = b as usize % n;
            c = topology::subdivide_edge(&c, c.faces[f][i], c.faces[f][(i + 1) % n]);
        } else {
            let i = b as usize % n;
            let j = (i + 2 + k as usize % (n - 2).max(1)) % n;
            if let Some(d) = topology::split_face(&c, f, i, j) {
                c = d;
            }
        }
    }
    c
}

pub fn check_subdivision(c: &ImmersedComplex, ops: &[(bool, u32, u32, u32)]) -> Result<(), TestCaseError> {
    let d = subdivide(c, ops);
    prop_assert!(topology::check_surface(&d).is_ok());
    prop_assert_eq!(invariants(&d), invariants(c));
    Ok(())
}

/// A horizontal grid sheet crossed by up to three vertical rectangles in
/// distinct planes x = const. Some rectangles are cut in two along z = 0.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub w: i64,
    pub h: i64,
    /// (x in halves, y0, y1, z below, z above, split at z = 0)
    pub walls: Vec<(i64, i64, i64, i64, i64, bool)>,
    pub choice: Vec<bool>,
}

pub fn crossings() -> impl Strategy<Value = Crossing> {
    (2i64..5, 2i64..4)
        .prop_flat_map(|(w, h)| {
            let wall = (1..2 * w, -1..h, 1i64..4, 1i64..3, 1i64..3, any::<bool>());
            (Just(w), Just(h), prop::collection::vec(wall, 1..4), prop::collection::vec(any::<bool>(), 8))
        })
        .prop_map(|(w, h, raw, choice)| {
            let mut walls = Vec::new();
            let mut xs = BTreeSet::new();
            for (x2, y0, len, lo, hi, split) in raw {
                if xs.insert(x2) {
                    walls.push((x2, y0, (y0 + len).max(y0 + 1), lo, hi, split));
                }
            }
            Crossing { w, h, walls, choice }
        })
        .prop_filter("walls must meet the sheet", |c| c.walls.iter().all(|&(_, y0, y1, ..)| y0 < c.h && y1 > 0))
}

pub fn crossing_complex(k: &Crossing) -> ImmersedComplex {
    let mut p = Vec::new();
    let mut faces = Vec::new();
    let id = |i: i64, j: i64| (j * (k.w + 1) + i) as usize;
    for j in 0..=k.h {
        for i in 0..=k.w {
            p.push(Vec3::ints(i, j, 0));
        }
    }
    for j in 0..k.h {
        for i in 0..k.w {
            faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    for &(x2, y0, y1, lo, hi, split) in &k.walls {
        let x = ratio(x2, 2);
        let v = |y: i64, z: i64| Vec3::new(x.clone(), rat(y), rat(z));
        let base = p.len();
        if split {
            p.extend([v(y0, -lo), v(y1, -lo), v(y1, 0), v(y0, 0), v(y1, hi), v(y0, hi)]);
            faces.push(vec![base, base + 1, base + 2, base + 3]);
            faces.push(vec![base + 3, base + 2, base + 4, base + 5]);
        } else {
            p.extend([v(y0, -lo), v(y1, -lo), v(y1, hi), v(y0, hi)]);
            faces.push(vec![base, base + 1, base + 2, base + 3]);
        }
    }
    ImmersedComplex::from_faces(p, faces, "grid")
}

/// Sum of face areas, doubled; exact because every face is axis-parallel.
pub fn axis_area2(c: &ImmersedComplex) -> Rat {
    (0..c.faces.len())
        .map(|f| {
            let n = newell(&c.face_points(f));
            n.0.iter().map(|x| x.abs()).fold(rat(0), |a, b| a + b)
        })
        .fold(rat(0), |a, b| a + b)
}

pub fn check_resolution(k: &Crossing) -> Result<(), TestCaseError> {
    let c = crossing_complex(k);
    let l = immersion::self_intersections(&c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(l.triple_points.is_empty());
    prop_assert!(!l.arcs.is_empty());
    let r = Resolution {
        pairings: (0..l.arcs.len())
            .map(|i| if k.choice[i % k.choice.len()] { Pairing::Cw } else { Pairing::Ccw })
            .collect(),
    };
    let out = surgery::resolve_locus(&c, &l, &r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let after = immersion::self_intersections(&out).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(after.is_empty(), "crossings left: {:?}", after.edges.len());
    let sub = surgery::subdivide_along(&c, &l).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(surgery::area_keys(&out), surgery::area_keys(&sub));
    prop_assert_eq!(axis_area2(&out), axis_area2(&c));
    let mut crossing = r.clone();
    crossing.pairings[0] = Pairing::Crossing;
    prop_assert!(surgery::resolve_locus(&c, &l, &crossing).is_err());
    Ok(())
}

/// The shipped plan with the three flap placements in the given order and
/// all flap-to-flap tags glued afterwards.
pub fn reordered_plan(order: [usize; 3]) -> String {
    let lines: Vec<&str> = boyforge::BOY_PLAN.lines().collect();
    let place: Vec<&str> = lines.iter().copied().filter(|l| l.starts_with("place piece_I ")).collect();
    let flap_glue: Vec<&str> =
        lines.iter().copied().filter(|l| l.starts_with("glue") && !l.contains(" of II ")).collect();
    let head: Vec<&str> = lines.iter().copied().take_while(|l| !l.starts_with("place")).collect();
    let tail: Vec<&str> = lines.iter().copied().skip_while(|l| !l.starts_with("place piece_II")).collect();
    let mut out: Vec<&str> = head;
    out.extend(order.iter().map(|i| place[*i]));
    out.extend(flap_glue);
    out.extend(tail);
    out.join("\n") + "\n"
}

pub const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Everything that should not depend on the order of gluing.
pub fn assembly_signature(c: &ImmersedComplex) -> String {
    let mut keys: Vec<Vec<Vec3>> = (0..c.faces.len()).map(|f| c.face_key(f)).collect();
    keys.sort();
    let l = immersion::self_intersections(c).expect("locus");
    format!(
        "V={} F={} E={} closed={} {:?} triple={} keys={}",
        c.used_vertices().len(),
        c.faces.len(),
        c.edge_faces().len(),
        topology::is_closed_surface(c).closed,
        invariants(c),
        l.triple_points.len(),
        keys.iter().map(|k| k.iter().map(|p| p.to_string()).collect::<String>()).collect::<Vec<_>>().join(";")
    )
}
