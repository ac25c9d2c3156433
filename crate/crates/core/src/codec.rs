//! Text formats: Gauss codes, PD documents, JSON, and SVG/DOT renderings.
//!
//! # Gauss codes
//!
//! One line per component, each a cyclic word of `<label><sign>` tokens.
//! A line `O` is a crossing-free circle. The sign of a visit describes the
//! counterclockwise rotation at the crossing as seen by the visiting strand:
//!
//! ```text
//!   +  (in, other in, out, other out)      the other strand passes right to left
//!   -  (in, other out, out, other in)      the other strand passes left to right
//! ```
//!
//! so the two visits of a crossing always carry opposite signs.
//!
//! # PD documents
//!
//! `X(a,b,c,d)` is a real crossing and `V(a,b,c,d)` a virtual one, with edge
//! labels listed counterclockwise starting at slot 0; strands continue from
//! slot 0 to 2 and from 1 to 3. `O(a)` is a closed loop. Every edge label
//! occurs exactly twice. `#` starts a comment in both text formats.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::Mode;
use crate::map::{crossing, dart, opposite, rot, slot, Component, DoodleMap, MapError, MapParts};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("line {line}: empty or malformed token `{token}`")]
    EmptyToken { line: usize, token: String },
    #[error("crossing label `{label}` occurs {count} times (expected 2)")]
    GaussLabelCount { label: String, count: usize },
    #[error("orientation inconsistency: both visits of crossing `{label}` carry the same sign")]
    OrientationInconsistency { label: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("edge label `{label}` occurs {count} times (expected 2)")]
    EdgeLabelCount { label: String, count: usize },
    #[error("line {line}: node {kind} has {found} labels (expected {expected})")]
    MixedArity { line: usize, kind: char, found: usize, expected: usize },
    #[error("dangling strand at edge label `{0}`")]
    Dangling(String),
    #[error("json: {0}")]
    Json(String),
    #[error("json schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("unknown format `{0}` (expected gauss, pd or json)")]
    UnknownFormat(String),
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Visit sign in a Gauss code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// One line of a Gauss code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaussLine {
    Circle,
    Word(Vec<(String, Sign)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GaussDocument {
    pub lines: Vec<GaussLine>,
}

impl GaussDocument {
    pub fn parse(text: &str) -> Result<Self, CodecError> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if line == "O" {
                lines.push(GaussLine::Circle);
                continue;
            }
            let mut word = Vec::new();
            for token in line.split_whitespace() {
                let bad = || CodecError::EmptyToken { line: i + 1, token: token.to_string() };
                let (body, sign) = if let Some(b) = token.strip_suffix('+') {
                    (b, Sign::Plus)
                } else if let Some(b) = token.strip_suffix('-').or_else(|| token.strip_suffix('\u{2212}')) {
                    (b, Sign::Minus)
                } else {
                    return Err(bad());
                };
                if body.is_empty() {
                    return Err(bad());
                }
                word.push((body.to_string(), sign));
            }
            lines.push(GaussLine::Word(word));
        }
        Ok(Self { lines })
    }
}

impl FromStr for GaussDocument {
    type Err = CodecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for GaussDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            match line {
                GaussLine::Circle => writeln!(f, "O")?,
                GaussLine::Word(w) => {
                    let tokens: Vec<String> = w
                        .iter()
                        .map(|(l, s)| format!("{l}{}", if *s == Sign::Plus { '+' } else { '-' }))
                        .collect();
                    writeln!(f, "{}", tokens.join(" "))?;
                }
            }
        }
        Ok(())
    }
}

/// Builds the map of a Gauss code. Strands are directed in reading order and
/// labelled by line number; `mode` only matters when the map is compared.
pub fn parse_gauss(doc: &GaussDocument, _mode: Mode) -> Result<DoodleMap, CodecError> {
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    for line in &doc.lines {
        if let GaussLine::Word(w) = line {
            for (l, _) in w {
                *count.entry(l).or_default() += 1;
            }
        }
    }
    if let Some((l, &c)) = count.iter().find(|(_, &c)| c != 2) {
        return Err(CodecError::GaussLabelCount { label: l.to_string(), count: c });
    }
    // Crossing ids in order of first appearance; remember the first sign.
    let mut ids: HashMap<&str, (usize, Sign)> = HashMap::new();
    let mut visits: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut circles = Vec::new();
    let mut strands = Vec::new();
    for (li, line) in doc.lines.iter().enumerate() {
        match line {
            GaussLine::Circle => circles.push(li as u32),
            GaussLine::Word(w) => {
                let mut vs = Vec::with_capacity(w.len());
                for (l, s) in w {
                    let next = ids.len();
                    let (c, in_slot, out_slot) = match ids.get(l.as_str()) {
                        None => {
                            ids.insert(l, (next, *s));
                            (next, 0, 2)
                        }
                        Some(&(c, first)) => {
                            if first == *s {
                                return Err(CodecError::OrientationInconsistency { label: l.clone() });
                            }
                            if first == Sign::Plus {
                                (c, 1, 3)
                            } else {
                                (c, 3, 1)
                            }
                        }
                    };
                    vs.push((dart(c, in_slot), dart(c, out_slot)));
                }
                strands.push((vs[0].1, li as u32));
                visits.push(vs);
            }
        }
    }
    let mut pair = vec![0; 4 * ids.len()];
    for vs in &visits {
        for i in 0..vs.len() {
            let out = vs[i].1;
            let inn = vs[(i + 1) % vs.len()].0;
            pair[out] = inn;
            pair[inn] = out;
        }
    }
    let parts = MapParts {
        rotation: (0..ids.len()).map(|c| [0, 1, 2, 3].map(|s| dart(c, s) as u32)).collect(),
        pairing: (0..pair.len()).filter(|&d| d < pair[d]).map(|d| (d as u32, pair[d] as u32)).collect(),
        strands: strands.into_iter().map(|(d, label)| crate::map::StrandSpec { start: d as u32, label }).collect(),
        circles,
    };
    Ok(DoodleMap::from_parts(&parts)?)
}

/// Gauss code of a map: strands in component order, then circles.
pub fn emit_gauss(map: &DoodleMap) -> GaussDocument {
    let mut name = vec![0usize; map.crossing_count()];
    let mut next = 1;
    let mut lines = Vec::new();
    for comp in map.components() {
        match comp {
            Component::Circle { .. } => lines.push(GaussLine::Circle),
            Component::Strand { exits, .. } => {
                let mut word = Vec::with_capacity(exits.len());
                for e in exits {
                    let c = crossing(e);
                    if name[c] == 0 {
                        name[c] = next;
                        next += 1;
                    }
                    let inn = opposite(e);
                    let sign = if map.is_forward(rot(inn)) { Sign::Minus } else { Sign::Plus };
                    word.push((name[c].to_string(), sign));
                }
                lines.push(GaussLine::Word(word));
            }
        }
    }
    GaussDocument { lines }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Real,
    Virtual,
    Loop,
}

impl NodeKind {
    fn letter(self) -> char {
        match self {
            NodeKind::Real => 'X',
            NodeKind::Virtual => 'V',
            NodeKind::Loop => 'O',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdNode {
    pub kind: NodeKind,
    pub labels: Vec<String>,
}

/// A planar drawing with real and virtual crossings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PdDocument {
    pub nodes: Vec<PdNode>,
}

impl PdDocument {
    pub fn parse(text: &str) -> Result<Self, CodecError> {
        let mut nodes = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let mut rest = strip_comment(raw).trim();
            let line = i + 1;
            while !rest.is_empty() {
                let syntax = |message: String| CodecError::Syntax { line, message };
                let kind = match rest.chars().next() {
                    Some('X') => NodeKind::Real,
                    Some('V') => NodeKind::Virtual,
                    Some('O') => NodeKind::Loop,
                    _ => return Err(syntax(format!("expected X(, V( or O( at `{rest}`"))),
                };
                let body = rest[1..].trim_start();
                let body = body.strip_prefix('(').ok_or_else(|| syntax("expected `(`".into()))?;
                let close = body.find(')').ok_or_else(|| syntax("missing `)`".into()))?;
                let labels: Vec<String> = body[..close].split(',').map(|s| s.trim().to_string()).collect();
                if labels.iter().any(String::is_empty) {
                    return Err(syntax("empty edge label".into()));
                }
                let expected = if kind == NodeKind::Loop { 1 } else { 4 };
                if labels.len() != expected {
                    return Err(CodecError::MixedArity { line, kind: kind.letter(), found: labels.len(), expected });
                }
                nodes.push(PdNode { kind, labels });
                rest = body[close + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',' || c == ';');
            }
        }
        let doc = Self { nodes };
        doc.check_labels()?;
        Ok(doc)
    }

    fn check_labels(&self) -> Result<(), CodecError> {
        let mut count: BTreeMap<&str, usize> = BTreeMap::new();
        for n in &self.nodes {
            let weight = if n.kind == NodeKind::Loop { 2 } else { 1 };
            for l in &n.labels {
                *count.entry(l).or_default() += weight;
            }
        }
        match count.into_iter().find(|&(_, c)| c != 2) {
            Some((l, 1)) => Err(CodecError::Dangling(l.to_string())),
            Some((l, c)) => Err(CodecError::EdgeLabelCount { label: l.to_string(), count: c }),
            None => Ok(()),
        }
    }

    pub fn virtual_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Virtual).count()
    }

    pub fn real_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Real).count()
    }

    /// Half-edge partner table over `(node, slot)` for the 4-valent nodes,
    /// plus the number of loops.
    fn half_edges(&self) -> (Vec<usize>, Vec<usize>, usize) {
        let quads: Vec<usize> = (0..self.nodes.len()).filter(|&i| self.nodes[i].kind != NodeKind::Loop).collect();
        let mut first: HashMap<&str, usize> = HashMap::new();
        let mut partner = vec![0; 4 * quads.len()];
        for (k, &i) in quads.iter().enumerate() {
            for (s, l) in self.nodes[i].labels.iter().enumerate() {
                let h = 4 * k + s;
                if let Some(o) = first.remove(l.as_str()) {
                    partner[h] = o;
                    partner[o] = h;
                } else {
                    first.insert(l, h);
                }
            }
        }
        let loops = self.nodes.len() - quads.len();
        (quads, partner, loops)
    }
}

impl FromStr for PdDocument {
    type Err = CodecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for PdDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            writeln!(f, "{}({})", n.kind.letter(), n.labels.join(","))?;
        }
        Ok(())
    }
}

/// Map of the Gauss data of a drawing: strands pass straight through
/// virtual crossings, which leave no trace.
pub fn parse_pd(doc: &PdDocument, _mode: Mode) -> Result<DoodleMap, CodecError> {
    doc.check_labels()?;
    let (quads, partner, loops) = doc.half_edges();
    let real: Vec<bool> = quads.iter().map(|&i| doc.nodes[i].kind == NodeKind::Real).collect();
    let mut real_id = vec![usize::MAX; quads.len()];
    let mut v = 0;
    for (k, &r) in real.iter().enumerate() {
        if r {
            real_id[k] = v;
            v += 1;
        }
    }
    let mut pair = vec![0; 4 * v];
    let mut visited = vec![false; partner.len()];
    for k in 0..quads.len() {
        if !real[k] {
            continue;
        }
        for s in 0..4 {
            let h = 4 * k + s;
            let mut p = partner[h];
            while !real[p / 4] {
                visited[p] = true;
                visited[opposite(p)] = true;
                p = partner[opposite(p)];
            }
            visited[h] = true;
            pair[dart(real_id[k], s)] = dart(real_id[p / 4], p % 4);
        }
    }
    // Loops through virtual crossings only.
    let mut circles = loops;
    for h0 in 0..partner.len() {
        if visited[h0] {
            continue;
        }
        let mut h = h0;
        loop {
            visited[h] = true;
            let p = partner[h];
            visited[p] = true;
            h = opposite(p);
            if h == h0 {
                break;
            }
        }
        circles += 1;
    }
    let map = DoodleMap::from_pairing(pair)?;
    Ok(map.disjoint_union(&DoodleMap::trivial(circles)))
}

/// Every node of the drawing as a crossing of a 4-valent map, with a flag
/// marking the virtual ones. Loops become crossing-free circles.
pub fn pd_graph(doc: &PdDocument) -> Result<(DoodleMap, Vec<bool>), CodecError> {
    doc.check_labels()?;
    let (quads, partner, loops) = doc.half_edges();
    let virt = quads.iter().map(|&i| doc.nodes[i].kind == NodeKind::Virtual).collect();
    let map = DoodleMap::from_pairing(partner)?;
    Ok((map.disjoint_union(&DoodleMap::trivial(loops)), virt))
}

/// Inverse of [`pd_graph`]: edges are numbered from 1 by least dart.
pub fn pd_from_graph(map: &DoodleMap, virtual_flags: &[bool]) -> PdDocument {
    let mut edge = vec![0usize; map.dart_count()];
    let mut next = 1;
    for d in 0..map.dart_count() {
        if d < map.pair(d) {
            edge[d] = next;
            edge[map.pair(d)] = next;
            next += 1;
        }
    }
    let mut nodes: Vec<PdNode> = (0..map.crossing_count())
        .map(|c| PdNode {
            kind: if virtual_flags.get(c).copied().unwrap_or(false) { NodeKind::Virtual } else { NodeKind::Real },
            labels: (0..4).map(|s| edge[dart(c, s)].to_string()).collect(),
        })
        .collect();
    for _ in 0..map.circle_count() {
        nodes.push(PdNode { kind: NodeKind::Loop, labels: vec![next.to_string()] });
        next += 1;
    }
    PdDocument { nodes }
}

/// PD drawing of a map (see [`crate::virtualization::planarize`]).
pub fn emit_pd(map: &DoodleMap) -> PdDocument {
    crate::virtualization::planarize(map).document
}

pub const JSON_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct JsonMap {
    version: u32,
    mode: Mode,
    #[serde(flatten)]
    parts: MapParts,
}

pub fn to_json(map: &DoodleMap, mode: Mode) -> String {
    let doc = JsonMap { version: JSON_SCHEMA_VERSION, mode, parts: map.to_parts() };
    serde_json::to_string_pretty(&doc).expect("maps serialize")
}

pub fn from_json(text: &str) -> Result<(DoodleMap, Mode), CodecError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CodecError::Json(e.to_string()))?;
    let version = value
        .get("version")
        .ok_or_else(|| CodecError::Json("missing field `version`".into()))?
        .as_u64()
        .ok_or_else(|| CodecError::Json("`version` is not an integer".into()))? as u32;
    if version != JSON_SCHEMA_VERSION {
        return Err(CodecError::SchemaVersion { found: version, expected: JSON_SCHEMA_VERSION });
    }
    let doc: JsonMap = serde_json::from_value(value).map_err(|e| CodecError::Json(e.to_string()))?;
    Ok((DoodleMap::from_parts(&doc.parts)?, doc.mode))
}

/// Input formats understood by [`read_map`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Gauss,
    Pd,
    Json,
}

impl Format {
    pub fn from_extension(path: &str) -> Option<Self> {
        let ext = path.rsplit('.').next()?.to_ascii_lowercase();
        match ext.as_str() {
            "gauss" | "gc" => Some(Format::Gauss),
            "pd" => Some(Format::Pd),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = CodecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gauss" => Ok(Format::Gauss),
            "pd" => Ok(Format::Pd),
            "json" => Ok(Format::Json),
            other => Err(CodecError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn read_map(text: &str, format: Format, mode: Mode) -> Result<DoodleMap, CodecError> {
    match format {
        Format::Gauss => parse_gauss(&GaussDocument::parse(text)?, mode),
        Format::Pd => parse_pd(&PdDocument::parse(text)?, mode),
        Format::Json => from_json(text).map(|(m, _)| m),
    }
}

/// Best-effort drawing: nodes on a circle, edges as curves leaving each node
/// in the direction of their slot. Virtual crossings get a small circle;
/// loops are drawn as paths.
pub fn render_svg(doc: &PdDocument) -> String {
    let (quads, partner, loops) = doc.half_edges();
    let n = quads.len().max(1) as f64;
    let (cx, cy, radius) = (300.0, 300.0, 220.0);
    let pos: Vec<(f64, f64)> = (0..quads.len())
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n;
            (cx + radius * t.cos(), cy + radius * t.sin())
        })
        .collect();
    let handle = |h: usize| {
        let (x, y) = pos[h / 4];
        let t = std::f64::consts::FRAC_PI_2 * (h % 4) as f64;
        (x, y, x + 60.0 * t.cos(), y - 60.0 * t.sin())
    };
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n");
    out.push_str("<g fill=\"none\" stroke=\"black\" stroke-width=\"2\">\n");
    for h in 0..partner.len() {
        let p = partner[h];
        if h > p {
            continue;
        }
        let (x1, y1, c1x, c1y) = handle(h);
        let (x2, y2, c2x, c2y) = handle(p);
        out.push_str(&format!(
            "<path d=\"M {x1:.1} {y1:.1} C {c1x:.1} {c1y:.1} {c2x:.1} {c2y:.1} {x2:.1} {y2:.1}\"/>\n"
        ));
    }
    for i in 0..loops {
        let x = 40.0 + 50.0 * i as f64;
        out.push_str(&format!("<path d=\"M {x:.1} 560 a 20 20 0 1 0 40 0 a 20 20 0 1 0 -40 0\"/>\n"));
    }
    out.push_str("</g>\n");
    for (k, &i) in quads.iter().enumerate() {
        if doc.nodes[i].kind == NodeKind::Virtual {
            let (x, y) = pos[k];
            out.push_str(&format!("<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"8\" fill=\"none\" stroke=\"black\"/>\n"));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Undirected multigraph of the map: one node per crossing, one edge per
/// map edge, and one looped node per crossing-free circle.
pub fn render_dot(map: &DoodleMap) -> String {
    let mut out = String::from("graph doodle {\n");
    for c in 0..map.crossing_count() {
        out.push_str(&format!("  x{c};\n"));
    }
    for (i, _) in map.circles().iter().enumerate() {
        out.push_str(&format!("  o{i} [shape=circle];\n"));
    }
    for d in 0..map.dart_count() {
        let p = map.pair(d);
        if d < p {
            out.push_str(&format!("  x{} -- x{} [taillabel=\"{}\", headlabel=\"{}\"];\n", crossing(d), crossing(p), slot(d), slot(p)));
        }
    }
    for (i, _) in map.circles().iter().enumerate() {
        out.push_str(&format!("  o{i} -- o{i};\n"));
    }
    out.push_str("}\n");
    out
}
