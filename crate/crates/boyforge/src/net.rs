//! Flat nets, the anchor table and the assembly plan, with their text formats.
//!
//! Net files are line oriented (`#` starts a comment):
//!
//! ```text
//! net <name>
//! vertex <id> <x> <y>
//! face <id> <id> <id> ...
//! fold <a> <b> angle <+90|-90>
//! anchor <label> at <id>
//! tag <arrow|double-arrow|star|letter> <name> edge <a> <b>
//! ```
//!
//! Assembly files name the steps:
//!
//! ```text
//! assembly <name>
//! nets <path>
//! use builtin piece_iv
//! place <net> as <copy> anchors A->A',B->B',C->C'
//! glue tag <name> of <copy> to <name> of <copy>
//! ```

use crate::error::{Error, Result};
use crate::geom::{parse_rat, ratio, Vec2, Vec3};
use crate::poly;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TagKind {
    Arrow,
    DoubleArrow,
    Star,
    Letter,
}

impl TagKind {
    pub fn keyword(self) -> &'static str {
        match self {
            TagKind::Arrow => "arrow",
            TagKind::DoubleArrow => "double-arrow",
            TagKind::Star => "star",
            TagKind::Letter => "letter",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "arrow" => TagKind::Arrow,
            "double-arrow" => TagKind::DoubleArrow,
            "star" => TagKind::Star,
            "letter" => TagKind::Letter,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetVertex {
    pub id: u32,
    pub pos: Vec2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub a: u32,
    pub b: u32,
    /// +90 or -90 degrees. Positive folds lift the far face toward the
    /// viewer of the counterclockwise side.
    pub angle: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeTag {
    pub kind: TagKind,
    pub name: String,
    pub a: u32,
    pub b: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    pub name: String,
    pub vertices: Vec<NetVertex>,
    pub faces: Vec<Vec<u32>>,
    pub folds: Vec<Fold>,
    pub anchors: BTreeMap<String, u32>,
    pub tags: Vec<EdgeTag>,
}

/// Accepts typographic primes and stores ASCII ones.
pub fn normalize_label(s: &str) -> String {
    s.replace('″', "''").replace('′', "'")
}

fn key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

impl Net {
    pub fn vertex(&self, id: u32) -> Option<&Vec2> {
        self.vertices.iter().find(|v| v.id == id).map(|v| &v.pos)
    }

    pub fn positions(&self) -> HashMap<u32, &Vec2> {
        self.vertices.iter().map(|v| (v.id, &v.pos)).collect()
    }

    /// Undirected edge -> faces using it, each with the edge direction.
    pub fn edge_faces(&self) -> BTreeMap<(u32, u32), Vec<(usize, bool)>> {
        let mut m: BTreeMap<(u32, u32), Vec<(usize, bool)>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                m.entry(key(a, b)).or_default().push((fi, a < b));
            }
        }
        m
    }

    pub fn boundary_edges(&self) -> BTreeSet<(u32, u32)> {
        self.edge_faces().into_iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| k).collect()
    }

    pub fn fold_at(&self, a: u32, b: u32) -> Option<&Fold> {
        self.folds.iter().find(|f| key(f.a, f.b) == key(a, b))
    }

    /// Checks every net invariant.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::semantic(&format!("net {}", self.name), m));
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id) {
                return bad(format!("vertex {} defined twice", v.id));
            }
        }
        if self.faces.is_empty() {
            return bad("no faces".into());
        }
        let pos = self.positions();
        let mut used = BTreeSet::new();
        for (fi, f) in self.faces.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for id in f {
                if !pos.contains_key(id) {
                    return bad(format!("face {fi} uses unknown vertex {id}"));
                }
                if !seen.insert(*id) {
                    return bad(format!("face {fi} repeats vertex {id}"));
                }
                used.insert(*id);
            }
            let pts: Vec<&Vec2> = f.iter().map(|i| pos[i]).collect();
            if !poly::is_simple(&pts) {
                return bad(format!("face {fi} is not a simple polygon"));
            }
            if poly::polygon_area2(&pts) <= ratio(0, 1) {
                return bad(format!("face {fi} is not counterclockwise"));
            }
        }
        if let Some(v) = ids.difference(&used).next() {
            return bad(format!("vertex {v} is not used by any face"));
        }
        let edges = self.edge_faces();
        for (e, fs) in &edges {
            if fs.len() > 2 {
                return bad(format!("edge {}-{} is shared by {} faces", e.0, e.1, fs.len()));
            }
            if fs.len() == 2 && fs[0].1 == fs[1].1 {
                return bad(format!("faces {} and {} disagree in orientation", fs[0].0, fs[1].0));
            }
        }
        let mut fold_keys = BTreeSet::new();
        for fd in &self.folds {
            if fd.angle != 90 && fd.angle != -90 {
                return bad(format!("fold {}-{} has angle {}; only +90 and -90 are allowed", fd.a, fd.b, fd.angle));
            }
            match edges.get(&key(fd.a, fd.b)) {
                Some(fs) if fs.len() == 2 => {}
                _ => return bad(format!("fold edge {}-{} is not shared by exactly two faces", fd.a, fd.b)),
            }
            if !fold_keys.insert(key(fd.a, fd.b)) {
                return bad(format!("fold edge {}-{} listed twice", fd.a, fd.b));
            }
        }
        let boundary: BTreeSet<u32> =
            edges.iter().filter(|(_, f)| f.len() == 1).flat_map(|(k, _)| [k.0, k.1]).collect();
        for (label, id) in &self.anchors {
            if !pos.contains_key(id) {
                return bad(format!("anchor {label} at unknown vertex {id}"));
            }
            if !boundary.contains(id) {
                return bad(format!("anchor {label} at vertex {id} is not on the boundary"));
            }
        }
        let mut names: BTreeMap<&str, (TagKind, usize)> = BTreeMap::new();
        let mut tagged = BTreeSet::new();
        for t in &self.tags {
            match edges.get(&key(t.a, t.b)) {
                Some(fs) if fs.len() == 1 => {}
                _ => return bad(format!("tag {} on {}-{} is not a boundary edge", t.name, t.a, t.b)),
            }
            if !tagged.insert(key(t.a, t.b)) {
                return bad(format!("edge {}-{} carries two tags", t.a, t.b));
            }
            let e = names.entry(&t.name).or_insert((t.kind, 0));
            if e.0 != t.kind {
                return bad(format!("tag {} used with two kinds", t.name));
            }
            e.1 += 1;
        }
        for (name, (kind, n)) in names {
            let want = if kind == TagKind::Letter { 2 } else { 1 };
            if n != want {
                return bad(format!("{} tag {name} appears {n} times, expected {want}", kind.keyword()));
            }
        }
        for i in 0..self.faces.len() {
            for j in i + 1..self.faces.len() {
                let p: Vec<&Vec2> = self.faces[i].iter().map(|k| pos[k]).collect();
                let q: Vec<&Vec2> = self.faces[j].iter().map(|k| pos[k]).collect();
                match poly::polygons_overlap(&p, &q) {
                    Some(false) => {}
                    Some(true) => return bad(format!("faces {i} and {j} overlap")),
                    None => return bad(format!("faces {i} and {j} could not be triangulated")),
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "net {}", self.name).unwrap();
        for v in &self.vertices {
            writeln!(s, "vertex {} {} {}", v.id, v.pos.0[0], v.pos.0[1]).unwrap();
        }
        for f in &self.faces {
            let ids: Vec<String> = f.iter().map(|i| i.to_string()).collect();
            writeln!(s, "face {}", ids.join(" ")).unwrap();
        }
        for f in &self.folds {
            writeln!(s, "fold {} {} angle {:+}", f.a, f.b, f.angle).unwrap();
        }
        for (l, id) in &self.anchors {
            writeln!(s, "anchor {l} at {id}").unwrap();
        }
        for t in &self.tags {
            writeln!(s, "tag {} {} edge {} {}", t.kind.keyword(), t.name, t.a, t.b).unwrap();
        }
        s
    }
}

pub fn serialize_nets(nets: &[Net]) -> String {
    nets.iter().map(|n| n.to_text()).collect::<Vec<_>>().join("\n")
}

struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { text: &body[s..i], col: body[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &body[s..], col: body[..s].chars().count() + 1 });
    }
    out
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

fn expect_len(toks: &[Tok], n: usize, ln: usize, form: &str) -> Result<()> {
    if toks.len() != n {
        let col = toks.get(n.min(toks.len()).saturating_sub(if toks.len() < n { 1 } else { 0 })).map_or(1, |t| t.col);
        return Err(syntax(ln, col, format!("expected `{form}`")));
    }
    Ok(())
}

fn keyword(t: &Tok, want: &str, ln: usize) -> Result<()> {
    if t.text != want {
        return Err(syntax(ln, t.col, format!("expected `{want}`, found `{}`", t.text)));
    }
    Ok(())
}

fn id(t: &Tok, ln: usize) -> Result<u32> {
    t.text.parse().map_err(|_| syntax(ln, t.col, format!("bad vertex id `{}`", t.text)))
}

fn name(t: &Tok, ln: usize) -> Result<String> {
    let ok = t.text.chars().all(|c| c.is_alphanumeric() || "_-'′″.".contains(c));
    if !ok {
        return Err(syntax(ln, t.col, format!("bad name `{}`", t.text)));
    }
    Ok(t.text.to_string())
}

/// Parses one or more `net` blocks.
pub fn parse_nets(text: &str) -> Result<Vec<Net>> {
    let mut nets: Vec<Net> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        if head.text == "net" {
            expect_len(&toks, 2, ln, "net <name>")?;
            nets.push(Net {
                name: name(&toks[1], ln)?,
                vertices: vec![],
                faces: vec![],
                folds: vec![],
                anchors: BTreeMap::new(),
                tags: vec![],
            });
            continue;
        }
        let Some(net) = nets.last_mut() else {
            return Err(syntax(ln, head.col, "expected `net <name>` before other statements"));
        };
        match head.text {
            "vertex" => {
                expect_len(&toks, 4, ln, "vertex <id> <x> <y>")?;
                let coord =
                    |t: &Tok| parse_rat(t.text).ok_or_else(|| syntax(ln, t.col, format!("bad rational `{}`", t.text)));
                net.vertices
                    .push(NetVertex { id: id(&toks[1], ln)?, pos: Vec2::new(coord(&toks[2])?, coord(&toks[3])?) });
            }
            "face" => {
                if toks.len() < 4 {
                    return Err(syntax(ln, head.col, "a face needs at least three vertices"));
                }
                net.faces.push(toks[1..].iter().map(|t| id(t, ln)).collect::<Result<_>>()?);
            }
            "fold" => {
                expect_len(&toks, 5, ln, "fold <a> <b> angle <+90|-90>")?;
                keyword(&toks[3], "angle", ln)?;
                let angle: i32 = toks[4]
                    .text
                    .trim_start_matches('+')
                    .parse()
                    .map_err(|_| syntax(ln, toks[4].col, format!("bad angle `{}`", toks[4].text)))?;
                net.folds.push(Fold { a: id(&toks[1], ln)?, b: id(&toks[2], ln)?, angle });
            }
            "anchor" => {
                expect_len(&toks, 4, ln, "anchor <label> at <id>")?;
                keyword(&toks[2], "at", ln)?;
                let label = normalize_label(&name(&toks[1], ln)?);
                if net.anchors.insert(label.clone(), id(&toks[3], ln)?).is_some() {
                    return Err(syntax(ln, toks[1].col, format!("anchor {label} defined twice")));
                }
            }
            "tag" => {
                expect_len(&toks, 6, ln, "tag <kind> <name> edge <a> <b>")?;
                let kind = TagKind::parse(toks[1].text)
                    .ok_or_else(|| syntax(ln, toks[1].col, format!("unknown tag kind `{}`", toks[1].text)))?;
                keyword(&toks[3], "edge", ln)?;
                net.tags.push(EdgeTag { kind, name: name(&toks[2], ln)?, a: id(&toks[4], ln)?, b: id(&toks[5], ln)? });
            }
            other => return Err(syntax(ln, head.col, format!("unknown statement `{other}`"))),
        }
    }
    if nets.is_empty() {
        return Err(syntax(1, 1, "no `net` block found"));
    }
    let mut names = BTreeSet::new();
    for n in &nets {
        if !names.insert(n.name.clone()) {
            return Err(Error::semantic("net file", format!("net {} defined twice", n.name)));
        }
        n.validate()?;
    }
    Ok(nets)
}

/// Parses exactly one net.
pub fn parse_net(text: &str) -> Result<Net> {
    let mut nets = parse_nets(text)?;
    if nets.len() != 1 {
        return Err(Error::semantic("net file", format!("expected one net, found {}", nets.len())));
    }
    Ok(nets.remove(0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorTable(pub BTreeMap<String, Vec3>);

impl AnchorTable {
    /// The nine anchor points on the central piece.
    pub fn boy() -> Self {
        let pts = [
            ("A", (-1, 0, 0)),
            ("B", (-1, 0, 1)),
            ("C", (0, 0, 1)),
            ("A'", (0, -1, 0)),
            ("B'", (1, -1, 0)),
            ("C'", (1, 0, 0)),
            ("A''", (0, 0, -1)),
            ("B''", (0, 1, -1)),
            ("C''", (0, 1, 0)),
        ];
        AnchorTable(pts.iter().map(|(l, (x, y, z))| (l.to_string(), Vec3::ints(*x, *y, *z))).collect())
    }

    pub fn get(&self, label: &str) -> Option<&Vec3> {
        self.0.get(&normalize_label(label))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// The three crossed squares, copy name `IV`.
    PieceIv,
    Place {
        net: String,
        copy: String,
        anchors: Vec<(String, String)>,
    },
    Glue {
        tag_a: String,
        copy_a: String,
        tag_b: String,
        copy_b: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblyPlan {
    pub name: String,
    /// Net file named by a `nets` line, relative to the plan.
    pub nets_file: Option<String>,
    pub steps: Vec<Step>,
}

pub const PIECE_IV: &str = "IV";

impl AssemblyPlan {
    pub fn copies(&self) -> Vec<String> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::PieceIv => Some(PIECE_IV.to_string()),
                Step::Place { copy, .. } => Some(copy.clone()),
                Step::Glue { .. } => None,
            })
            .collect()
    }

    /// Resolves net names and anchor labels against a net list.
    pub fn check_nets(&self, nets: &[Net]) -> Result<()> {
        for s in &self.steps {
            if let Step::Place { net, copy, anchors } = s {
                let Some(n) = nets.iter().find(|n| &n.name == net) else {
                    return Err(Error::semantic("assembly", format!("unknown net {net} in placement {copy}")));
                };
                for (l, _) in anchors {
                    if !n.anchors.contains_key(l) {
                        return Err(Error::semantic(
                            "assembly",
                            format!("net {net} has no anchor {l} (placement {copy})"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("assembly {}\n", self.name);
        if let Some(f) = &self.nets_file {
            writeln!(s, "nets {f}").unwrap();
        }
        for st in &self.steps {
            match st {
                Step::PieceIv => s.push_str("use builtin piece_iv\n"),
                Step::Place { net, copy, anchors } => {
                    let a: Vec<String> = anchors.iter().map(|(l, t)| format!("{l}->{t}")).collect();
                    writeln!(s, "place {net} as {copy} anchors {}", a.join(",")).unwrap();
                }
                Step::Glue { tag_a, copy_a, tag_b, copy_b } => {
                    writeln!(s, "glue tag {tag_a} of {copy_a} to {tag_b} of {copy_b}").unwrap();
                }
            }
        }
        s
    }
}

/// Parses an assembly plan. Anchor targets are checked against `table`.
pub fn parse_assembly(text: &str, table: &AnchorTable) -> Result<AssemblyPlan> {
    let mut plan = AssemblyPlan { name: String::new(), nets_file: None, steps: vec![] };
    let mut copies = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "assembly" => {
                expect_len(&toks, 2, ln, "assembly <name>")?;
                plan.name = name(&toks[1], ln)?;
            }
            "nets" => {
                expect_len(&toks, 2, ln, "nets <path>")?;
                plan.nets_file = Some(toks[1].text.to_string());
            }
            "use" => {
                expect_len(&toks, 3, ln, "use builtin piece_iv")?;
                keyword(&toks[1], "builtin", ln)?;
                keyword(&toks[2], "piece_iv", ln)?;
                if !copies.insert(PIECE_IV.to_string()) {
                    return Err(Error::semantic("assembly", format!("line {ln}: duplicate placement {PIECE_IV}")));
                }
                plan.steps.push(Step::PieceIv);
            }
            "place" => {
                if toks.len() < 6 {
                    return Err(syntax(ln, head.col, "expected `place <net> as <copy> anchors <L>-><T>,...`"));
                }
                keyword(&toks[2], "as", ln)?;
                keyword(&toks[4], "anchors", ln)?;
                let net = name(&toks[1], ln)?;
                let copy = name(&toks[3], ln)?;
                let list: String = toks[5..].iter().map(|t| t.text).collect();
                let mut anchors = Vec::new();
                for item in list.split(',').filter(|s| !s.is_empty()) {
                    let Some((l, t)) = item.split_once("->") else {
                        return Err(syntax(ln, toks[5].col, format!("bad anchor pair `{item}`")));
                    };
                    let (l, t) = (normalize_label(l), normalize_label(t));
                    if l.is_empty() || t.is_empty() {
                        return Err(syntax(ln, toks[5].col, format!("bad anchor pair `{item}`")));
                    }
                    if table.get(&t).is_none() {
                        return Err(Error::semantic(
                            "assembly",
                            format!("line {ln}: anchor target {t} is not in the table"),
                        ));
                    }
                    anchors.push((l, t));
                }
                if !copies.insert(copy.clone()) {
                    return Err(Error::semantic("assembly", format!("line {ln}: duplicate placement {copy}")));
                }
                plan.steps.push(Step::Place { net, copy, anchors });
            }
            "glue" => {
                expect_len(&toks, 9, ln, "glue tag <name> of <copy> to <name> of <copy>")?;
                keyword(&toks[1], "tag", ln)?;
                keyword(&toks[3], "of", ln)?;
                keyword(&toks[5], "to", ln)?;
                keyword(&toks[7], "of", ln)?;
                let (copy_a, copy_b) = (name(&toks[4], ln)?, name(&toks[8], ln)?);
                for c in [&copy_a, &copy_b] {
                    if !copies.contains(c) {
                        return Err(Error::semantic(
                            "assembly",
                            format!("line {ln}: glue names {c} before it is placed"),
                        ));
                    }
                }
                plan.steps.push(Step::Glue { tag_a: name(&toks[2], ln)?, copy_a, tag_b: name(&toks[6], ln)?, copy_b });
            }
            other => return Err(syntax(ln, head.col, format!("unknown statement `{other}`"))),
        }
    }
    if plan.steps.is_empty() {
        return Err(Error::semantic("assembly", "an assembly must place at least one piece"));
    }
    Ok(plan)
}
