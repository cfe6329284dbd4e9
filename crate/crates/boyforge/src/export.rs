//! Mesh files and printable nets.

use crate::complex::ImmersedComplex;
use crate::error::{Error, Result};
use crate::geom::{decimal, parse_rat, Rat, Vec2, Vec3};
use crate::net::{AssemblyPlan, Net, Step};
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

/// Corner triples covering face `f` with its orientation. Faces need not
/// be convex, so a plain fan is not enough; ear clipping in the plane of
/// the face is exact. A face that is not simple falls back to a fan.
pub fn triangles(c: &ImmersedComplex, f: usize) -> Vec<[usize; 3]> {
    let n = c.faces[f].len();
    let fan = || (1..n.saturating_sub(1)).map(|k| [0, k, k + 1]).collect();
    let normal = crate::fold::newell(&c.face_points(f));
    let Some(k) = (0..3).max_by(|a, b| normal.0[*a].abs().cmp(&normal.0[*b].abs()).then(b.cmp(a))) else {
        return fan();
    };
    if normal.0[k].is_zero() {
        return fan();
    }
    let flip = normal.0[k].is_negative();
    let order: Vec<usize> = if flip { (0..n).rev().collect() } else { (0..n).collect() };
    let pts: Vec<Vec2> = order.iter().map(|i| c.positions[c.faces[f][*i]].project(k)).collect();
    let refs: Vec<&Vec2> = pts.iter().collect();
    match crate::poly::triangulate(&refs) {
        Some(t) => t
            .into_iter()
            .map(|[a, b, d]| if flip { [order[d], order[b], order[a]] } else { [order[a], order[b], order[d]] })
            .collect(),
        None => fan(),
    }
}

/// ASCII mesh text: one `v` record per abstract vertex, triangles, and a
/// comment naming the source piece before each polygon.
pub fn obj_string(c: &ImmersedComplex) -> String {
    let tris: usize = c.faces.iter().map(|f| f.len().saturating_sub(2)).sum();
    let mut s = String::new();
    writeln!(s, "# boyforge mesh").unwrap();
    writeln!(s, "# {} vertices, {} polygons, {} triangles", c.positions.len(), c.faces.len(), tris).unwrap();
    for p in &c.positions {
        writeln!(s, "v {} {} {}", decimal(&p.0[0]), decimal(&p.0[1]), decimal(&p.0[2])).unwrap();
    }
    for (i, f) in c.faces.iter().enumerate() {
        writeln!(s, "# polygon {i} from {}", c.provenance(i)).unwrap();
        for [a, b, c] in triangles(c, i) {
            writeln!(s, "f {} {} {}", f[a] + 1, f[b] + 1, f[c] + 1).unwrap();
        }
    }
    s
}

pub fn write_obj(c: &ImmersedComplex, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, obj_string(c)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// The double curve as polylines: one `l` record per arc, and the triple
/// points as comments.
pub fn double_curve_obj(l: &crate::immersion::DoubleLocus) -> String {
    let mut s = String::new();
    writeln!(s, "# double curve: {} arcs, {} triple points", l.arcs.len(), l.triple_points.len()).unwrap();
    for t in &l.triple_points {
        writeln!(s, "# triple point {} with {} sheets", t.at, t.sheets).unwrap();
    }
    let mut n = 0;
    for (i, a) in l.arcs.iter().enumerate() {
        writeln!(s, "# arc {i} {}", if a.closed { "closed" } else { "open" }).unwrap();
        for p in &a.points {
            writeln!(s, "v {} {} {}", decimal(&p.0[0]), decimal(&p.0[1]), decimal(&p.0[2])).unwrap();
        }
        let mut ids: Vec<usize> = (n + 1..=n + a.points.len()).collect();
        if a.closed {
            ids.push(n + 1);
        }
        n += a.points.len();
        let ids: Vec<String> = ids.iter().map(|k| k.to_string()).collect();
        writeln!(s, "l {}", ids.join(" ")).unwrap();
    }
    s
}

/// How `v` records become abstract vertices on import.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Welding {
    /// Records at exactly the same point are one vertex.
    Exact,
    /// Records within this distance per coordinate of an earlier record
    /// join it.
    Tolerance(Rat),
    /// Every record is its own vertex.
    Keep,
}

/// Reads `v` and `f` records. Face indices may be negative or carry
/// `/vt/vn` suffixes; everything else is ignored.
pub fn parse_obj(text: &str, weld: &Welding) -> Result<ImmersedComplex> {
    let bad = |ln: usize, msg: String| Error::Syntax { line: ln, col: 1, msg };
    let mut raw: Vec<Vec3> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.split('#').next().unwrap_or("");
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => {
                let xs: Vec<&str> = toks.collect();
                if xs.len() < 3 {
                    return Err(bad(ln, "a vertex needs three coordinates".into()));
                }
                let mut p = Vec::new();
                for x in &xs[..3] {
                    p.push(parse_rat(x).ok_or_else(|| bad(ln, format!("bad number {x}")))?);
                }
                let [x, y, z]: [Rat; 3] = p.try_into().unwrap();
                raw.push(Vec3::new(x, y, z));
            }
            Some("f") => {
                let mut f = Vec::new();
                for t in toks {
                    let idx = t.split('/').next().unwrap_or("");
                    let k: i64 = idx.parse().map_err(|_| bad(ln, format!("bad index {t}")))?;
                    let n = raw.len() as i64;
                    let v = if k < 0 { n + k } else { k - 1 };
                    if v < 0 || v >= n {
                        return Err(bad(ln, format!("index {k} is out of range")));
                    }
                    f.push(v as usize);
                }
                if f.len() < 3 {
                    return Err(bad(ln, "a face needs three vertices".into()));
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    let map = weld_map(&raw, weld);
    let mut c = ImmersedComplex::from_faces(
        raw,
        faces.into_iter().map(|f| f.into_iter().map(|v| map[v]).collect()).collect(),
        "mesh",
    );
    for (i, f) in c.faces.iter().enumerate() {
        let distinct: BTreeSet<&usize> = f.iter().collect();
        if distinct.len() != f.len() {
            return Err(Error::Degenerate(format!("face {i} repeats a vertex after welding")));
        }
    }
    c.compact();
    Ok(c)
}

fn weld_map(raw: &[Vec3], weld: &Welding) -> Vec<usize> {
    match weld {
        Welding::Keep => (0..raw.len()).collect(),
        Welding::Exact => {
            let mut first: BTreeMap<&Vec3, usize> = BTreeMap::new();
            raw.iter().enumerate().map(|(i, p)| *first.entry(p).or_insert(i)).collect()
        }
        Welding::Tolerance(tol) => {
            let mut reps: Vec<usize> = Vec::new();
            let mut map = Vec::with_capacity(raw.len());
            for (i, p) in raw.iter().enumerate() {
                let near = reps.iter().find(|r| (0..3).all(|k| (&raw[**r].0[k] - &p.0[k]).abs() <= *tol));
                match near {
                    Some(r) => map.push(*r),
                    None => {
                        reps.push(i);
                        map.push(i);
                    }
                }
            }
            map
        }
    }
}

/// One printed copy of a net.
#[derive(Clone, Debug)]
pub struct SheetItem<'a> {
    pub net: &'a Net,
    pub label: String,
    /// Spacing of the printed background grid, in model units.
    pub grid: Rat,
}

/// The copies a plan needs: one per placement, plus three square sheets
/// for the builtin triple-point piece when the nets include them.
pub fn print_list<'a>(plan: &AssemblyPlan, nets: &'a [Net]) -> Vec<SheetItem<'a>> {
    let mut out = Vec::new();
    let grid_for = |n: &Net| {
        // the flap's printed squares are half the size of the others'
        if n.name == "piece_I" {
            crate::geom::ratio(1, 2)
        } else {
            crate::geom::rat(1)
        }
    };
    for st in &plan.steps {
        match st {
            Step::Place { net, copy, .. } => {
                if let Some(n) = nets.iter().find(|n| &n.name == net) {
                    out.push(SheetItem { net: n, label: copy.clone(), grid: grid_for(n) });
                }
            }
            Step::PieceIv => {
                if let Some(n) = nets.iter().find(|n| n.name == "piece_III") {
                    for k in 1..=3 {
                        out.push(SheetItem { net: n, label: format!("III{k}"), grid: grid_for(n) });
                    }
                }
            }
            Step::Glue { .. } => {}
        }
    }
    out
}

const PX: f64 = 36.0;
const GAP: f64 = 24.0;
const ROW: f64 = 900.0;

fn f(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plain SVG with one group per copy: solid cut lines, dashed folds,
/// faint flat creases and grid, and anchor and tag labels.
pub fn svg_nets(items: &[SheetItem]) -> String {
    let mut body = String::new();
    let (mut x0, mut y0, mut row_h, mut width) = (GAP, GAP, 0.0f64, GAP);
    for (idx, it) in items.iter().enumerate() {
        let n = it.net;
        let pos = n.positions();
        let xs: Vec<f64> = n.vertices.iter().map(|v| f(v.pos.x())).collect();
        let ys: Vec<f64> = n.vertices.iter().map(|v| f(v.pos.y())).collect();
        let (minx, maxx) = xs.iter().fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(*x), b.max(*x)));
        let (miny, maxy) = ys.iter().fold((f64::MAX, f64::MIN), |(a, b), y| (a.min(*y), b.max(*y)));
        let (w, h) = if n.vertices.is_empty() { (0.0, 0.0) } else { ((maxx - minx) * PX, (maxy - miny) * PX) };
        if x0 + w > ROW && x0 > GAP {
            x0 = GAP;
            y0 += row_h + 2.0 * GAP;
            row_h = 0.0;
        }
        let at = |p: &Vec2| (x0 + (f(p.x()) - minx) * PX, y0 + GAP + (maxy - f(p.y())) * PX);
        writeln!(
            body,
            r#"  <g id="copy-{idx}" class="net" data-net="{}" data-copy="{}">"#,
            esc(&n.name),
            esc(&it.label)
        )
        .unwrap();
        writeln!(
            body,
            r#"    <text x="{:.2}" y="{:.2}" font-size="12">{} ({})</text>"#,
            x0,
            y0 + 12.0,
            esc(&it.label),
            esc(&n.name)
        )
        .unwrap();
        // grid
        let g = f(&it.grid);
        if g > 0.0 && !n.vertices.is_empty() {
            let mut gx = (minx / g).ceil() * g;
            while gx <= maxx + 1e-9 {
                let sx = x0 + (gx - minx) * PX;
                writeln!(body, r##"    <line class="grid" x1="{sx:.2}" y1="{:.2}" x2="{sx:.2}" y2="{:.2}" stroke="#ccc" stroke-width="0.3"/>"##, y0 + GAP, y0 + GAP + h).unwrap();
                gx += g;
            }
            let mut gy = (miny / g).ceil() * g;
            while gy <= maxy + 1e-9 {
                let sy = y0 + GAP + (maxy - gy) * PX;
                writeln!(body, r##"    <line class="grid" x1="{x0:.2}" y1="{sy:.2}" x2="{:.2}" y2="{sy:.2}" stroke="#ccc" stroke-width="0.3"/>"##, x0 + w).unwrap();
                gy += g;
            }
        }
        let folds: BTreeSet<(u32, u32)> = n.folds.iter().map(|d| (d.a.min(d.b), d.a.max(d.b))).collect();
        let mut uses: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for q in &n.faces {
            for i in 0..q.len() {
                let (a, b) = (q[i], q[(i + 1) % q.len()]);
                *uses.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        for (&(a, b), &k) in &uses {
            let (p, q) = (at(pos[&a]), at(pos[&b]));
            let style = if folds.contains(&(a, b)) {
                r#"class="fold" stroke="black" stroke-width="1" stroke-dasharray="6 4""#
            } else if k == 1 {
                r#"class="cut" stroke="black" stroke-width="1.5""#
            } else {
                r##"class="crease" stroke="#999" stroke-width="0.5""##
            };
            writeln!(body, r#"    <line {style} x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, p.0, p.1, q.0, q.1)
                .unwrap();
        }
        for (label, v) in &n.anchors {
            let p = at(pos[v]);
            writeln!(
                body,
                r#"    <text class="anchor" x="{:.2}" y="{:.2}" font-size="11" fill="red">{}</text>"#,
                p.0 + 2.0,
                p.1 - 2.0,
                esc(label)
            )
            .unwrap();
        }
        for t in &n.tags {
            let (p, q) = (at(pos[&t.a]), at(pos[&t.b]));
            writeln!(
                body,
                r##"    <text class="tag" x="{:.2}" y="{:.2}" font-size="8" fill="#036">{}</text>"##,
                (p.0 + q.0) / 2.0,
                (p.1 + q.1) / 2.0,
                esc(&t.name)
            )
            .unwrap();
        }
        writeln!(body, "  </g>").unwrap();
        x0 += w + 2.0 * GAP;
        width = width.max(x0);
        row_h = row_h.max(h + GAP);
    }
    let height = if items.is_empty() { 2.0 * GAP } else { y0 + row_h + 2.0 * GAP };
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .unwrap();
    s.push_str(&body);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{self, corpus};

    #[test]
    fn unit_square_obj() {
        let s = obj_string(&corpus::square());
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(s.lines().filter(|l| l.starts_with("f ")).count(), 2);
    }

    #[test]
    fn obj_round_trip_is_exact() {
        let mut c = corpus::cube();
        c.positions[0] = Vec3::new(crate::geom::ratio(-1, 8), crate::geom::rat(0), crate::geom::rat(0));
        let back = parse_obj(&obj_string(&c), &Welding::Exact).unwrap();
        assert_eq!(back.positions, c.positions);
        assert_eq!(topology::euler_characteristic(&back), 2);
    }

    #[test]
    fn welding_modes() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1.0001 0 0\nv 1 1 0\nf 1 2 3\nf 4 5 3\n";
        let keep = parse_obj(text, &Welding::Keep).unwrap();
        assert_eq!(keep.positions.len(), 5);
        let exact = parse_obj(text, &Welding::Exact).unwrap();
        assert_eq!(exact.positions.len(), 5);
        let tol = parse_obj(text, &Welding::Tolerance(parse_rat("0.001").unwrap())).unwrap();
        assert_eq!(tol.positions.len(), 4);
        assert_eq!(topology::boundary_components(&tol).unwrap().count, 1);
    }

    #[test]
    fn bad_obj_lines() {
        assert!(parse_obj("v 0 0\n", &Welding::Exact).unwrap_err().is_syntax());
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n", &Welding::Exact).unwrap_err().is_syntax());
    }

    #[test]
    fn empty_svg_is_well_formed() {
        let s = svg_nets(&[]);
        assert!(s.starts_with("<?xml"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert!(!s.contains("<g"));
    }
}
