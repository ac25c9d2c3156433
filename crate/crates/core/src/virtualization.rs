//! Between virtual doodles in the plane and doodles on surfaces.
//!
//! Reading a PD document forgets its virtual crossings ([`parse_pd`]), which
//! yields the map on the surface. [`planarize`] goes the other way: it
//! thickens a spanning tree of each component in the plane and routes the
//! remaining edges as straight chords above it, turning every chord
//! intersection into a virtual crossing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canonical::{canonical_code, doodle_equal, genus_of_doodle, Mode};
use crate::codec::{parse_pd, pd_from_graph, pd_graph, CodecError, NodeKind, PdDocument, PdNode};
use crate::map::{crossing, dart, rot_inv, Dart, DoodleMap};
use crate::moves::{apply_h1_plus, apply_h2_plus, ArcRef, Chirality, MoveError};

#[derive(Debug, Error)]
pub enum VirtualError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// Same Gauss data: the drawings differ by detour moves only.
pub fn gauss_data_equal(k1: &PdDocument, k2: &PdDocument, mode: Mode) -> Result<bool, CodecError> {
    Ok(canonical_code(&parse_pd(k1, mode)?, mode) == canonical_code(&parse_pd(k2, mode)?, mode))
}

/// Equivalence of virtual doodles, decided on the associated surface maps.
pub fn virtual_doodle_equal(k1: &PdDocument, k2: &PdDocument, mode: Mode) -> Result<bool, CodecError> {
    Ok(doodle_equal(&parse_pd(k1, mode)?, &parse_pd(k2, mode)?, mode))
}

/// Least number of virtual areas over all equivalent drawings, computed as
/// the genus of the associated doodle.
pub fn virtual_area_number(k: &PdDocument) -> Result<u32, CodecError> {
    Ok(genus_of_doodle(&parse_pd(k, Mode::UNORIENTED)?))
}

/// A plane drawing of a map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planarization {
    pub document: PdDocument,
    pub virtual_crossings: usize,
}

/// Planarizes with the default seed.
pub fn planarize(map: &DoodleMap) -> Planarization {
    planarize_seeded(map, 0)
}

/// Planarizes with a seeded choice of spanning trees and chord positions.
pub fn planarize_seeded(map: &DoodleMap, seed: u64) -> Planarization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = LabelSource(0);
    let mut dart_label = vec![0usize; map.dart_count()];
    let mut virtual_nodes = Vec::new();
    for comp in map.connected_components() {
        draw_component(map, &comp, &mut rng, &mut labels, &mut dart_label, &mut virtual_nodes);
    }
    let mut nodes: Vec<PdNode> = (0..map.crossing_count())
        .map(|c| PdNode { kind: NodeKind::Real, labels: (0..4).map(|s| dart_label[dart(c, s)].to_string()).collect() })
        .collect();
    let virtual_crossings = virtual_nodes.len();
    nodes.extend(virtual_nodes);
    for _ in 0..map.circle_count() {
        nodes.push(PdNode { kind: NodeKind::Loop, labels: vec![labels.next().to_string()] });
    }
    Planarization { document: PdDocument { nodes }, virtual_crossings }
}

struct LabelSource(usize);

impl LabelSource {
    fn next(&mut self) -> usize {
        self.0 += 1;
        self.0
    }
}

/// A chord between stub positions `a < b`.
struct Chord {
    a: usize,
    b: usize,
    start_dart: Dart,
    end_dart: Dart,
}

/// Intersection of chords `i` and `j` at parameter `t_i`, `t_j` along them.
struct Hit {
    i: usize,
    j: usize,
    ti: (i128, i128),
    tj: (i128, i128),
}

fn cross(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

fn frac_cmp(a: (i128, i128), b: (i128, i128)) -> std::cmp::Ordering {
    (a.0 * b.1).cmp(&(b.0 * a.1))
}

fn draw_component(
    map: &DoodleMap,
    comp: &[usize],
    rng: &mut ChaCha8Rng,
    labels: &mut LabelSource,
    dart_label: &mut [usize],
    virtual_nodes: &mut Vec<PdNode>,
) {
    // Random spanning tree by breadth-first search.
    let root = *comp.choose(rng).expect("non-empty");
    let mut tree = vec![false; map.dart_count()];
    let mut reached = std::collections::HashSet::from([root]);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        let mut slots = [0, 1, 2, 3];
        slots.shuffle(rng);
        for s in slots {
            let d = dart(c, s);
            let o = crossing(map.pair(d));
            if reached.insert(o) {
                tree[d] = true;
                tree[map.pair(d)] = true;
                queue.push_back(o);
            }
        }
    }
    for &c in comp {
        for s in 0..4 {
            let d = dart(c, s);
            if tree[d] && d < map.pair(d) {
                let l = labels.next();
                dart_label[d] = l;
                dart_label[map.pair(d)] = l;
            }
        }
    }
    // Walk the boundary of the thickened tree; stubs come out clockwise.
    let start = dart(root, 0);
    let mut order = Vec::new();
    let mut d = start;
    loop {
        if tree[d] {
            d = rot_inv(map.pair(d));
        } else {
            order.push(d);
            d = rot_inv(d);
        }
        if d == start {
            break;
        }
    }
    let mut pos = std::collections::HashMap::new();
    for (i, &d) in order.iter().enumerate() {
        pos.insert(d, i);
    }
    let mut chords = Vec::new();
    for &d in &order {
        let p = map.pair(d);
        if pos[&d] < pos[&p] {
            chords.push(Chord { a: pos[&d], b: pos[&p], start_dart: d, end_dart: p });
        }
    }
    // Stub points on the parabola y = x^2, x strictly increasing with jitter.
    let (hits, xs) = loop {
        let xs: Vec<i128> = (0..order.len()).map(|i| 1000 * i as i128 + rng.gen_range(0..900)).collect();
        if let Some(h) = intersections(&chords, &xs) {
            break (h, xs);
        }
    };
    let mut along: Vec<Vec<(usize, (i128, i128))>> = vec![Vec::new(); chords.len()];
    for (k, h) in hits.iter().enumerate() {
        along[h.i].push((k, h.ti));
        along[h.j].push((k, h.tj));
    }
    // Segment labels: seg[c][s] is the piece of chord c after its s-th hit.
    let mut before = vec![(0usize, 0usize); hits.len() * 2];
    for (c, list) in along.iter_mut().enumerate() {
        list.sort_by(|x, y| frac_cmp(x.1, y.1));
        let segs: Vec<usize> = (0..=list.len()).map(|_| labels.next()).collect();
        dart_label[chords[c].start_dart] = segs[0];
        dart_label[chords[c].end_dart] = segs[list.len()];
        for (s, &(k, _)) in list.iter().enumerate() {
            let slot = if hits[k].i == c { 0 } else { 1 };
            before[2 * k + slot] = (segs[s], segs[s + 1]);
        }
    }
    for (k, h) in hits.iter().enumerate() {
        let (a_start, a_end) = before[2 * k];
        let (b_start, b_end) = before[2 * k + 1];
        let ccw = cross(direction(&chords[h.i], &xs), direction(&chords[h.j], &xs)) > 0;
        let labels = if ccw { [a_start, b_start, a_end, b_end] } else { [a_start, b_end, a_end, b_start] };
        virtual_nodes.push(PdNode { kind: NodeKind::Virtual, labels: labels.iter().map(usize::to_string).collect() });
    }
}

fn direction(c: &Chord, xs: &[i128]) -> (i128, i128) {
    let (x1, x2) = (xs[c.a], xs[c.b]);
    (x2 - x1, x2 * x2 - x1 * x1)
}

/// All chord intersections, or `None` if three chords meet in a point.
fn intersections(chords: &[Chord], xs: &[i128]) -> Option<Vec<Hit>> {
    let pt = |i: usize| (xs[i], xs[i] * xs[i]);
    let mut hits = Vec::new();
    for i in 0..chords.len() {
        for j in i + 1..chords.len() {
            let (ci, cj) = (&chords[i], &chords[j]);
            let interleaved = (ci.a < cj.a && cj.a < ci.b && ci.b < cj.b) || (cj.a < ci.a && ci.a < cj.b && cj.b < ci.b);
            if !interleaved {
                continue;
            }
            let (p1, p2, q1, q2) = (pt(ci.a), pt(ci.b), pt(cj.a), pt(cj.b));
            let r = (p2.0 - p1.0, p2.1 - p1.1);
            let s = (q2.0 - q1.0, q2.1 - q1.1);
            let qp = (q1.0 - p1.0, q1.1 - p1.1);
            let mut den = cross(r, s);
            let mut ti = cross(qp, s);
            let mut tj = cross(qp, r);
            if den < 0 {
                den = -den;
                ti = -ti;
                tj = -tj;
            }
            hits.push(Hit { i, j, ti: (ti, den), tj: (tj, den) });
        }
    }
    // Two hits at the same parameter of one chord are a triple point.
    let mut per: Vec<Vec<(i128, i128)>> = vec![Vec::new(); chords.len()];
    for h in &hits {
        per[h.i].push(h.ti);
        per[h.j].push(h.tj);
    }
    for list in &mut per {
        list.sort_by(|x, y| frac_cmp(*x, *y));
        if list.windows(2).any(|w| frac_cmp(w[0], w[1]).is_eq()) {
            return None;
        }
    }
    Some(hits)
}

/// Moves on drawings, applied on the full 4-valent plane graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawingMove {
    /// A real curl.
    R1,
    /// A real bigon.
    R2,
    /// A virtual curl.
    VR1,
    /// A virtual bigon.
    VR2,
}

/// Applies `kind` at a random place of the drawing.
pub fn random_drawing_move(doc: &PdDocument, kind: DrawingMove, rng: &mut impl Rng) -> Result<PdDocument, VirtualError> {
    let (graph, mut flags) = pd_graph(doc)?;
    let darts = graph.dart_count();
    let circles = graph.circle_count();
    let pick = |rng: &mut dyn rand::RngCore| {
        let i = rng.gen_range(0..darts + circles);
        if i < darts {
            ArcRef::Edge(i)
        } else {
            ArcRef::Circle(i - darts)
        }
    };
    let is_virtual = matches!(kind, DrawingMove::VR1 | DrawingMove::VR2);
    let out = match kind {
        DrawingMove::R1 | DrawingMove::VR1 => {
            let ch = if rng.gen_bool(0.5) { Chirality::Left } else { Chirality::Right };
            let m = apply_h1_plus(&graph, pick(rng), ch)?;
            flags.push(is_virtual);
            m
        }
        DrawingMove::R2 | DrawingMove::VR2 => {
            let a = pick(rng);
            let b = match a {
                ArcRef::Edge(d) => {
                    let mut face = vec![d];
                    let mut e = graph.face_next(d);
                    while e != d {
                        face.push(e);
                        e = graph.face_next(e);
                    }
                    let others: Vec<Dart> = face.into_iter().filter(|&e| e != d && graph.pair(d) != e).collect();
                    match others.choose(rng) {
                        Some(&e) => ArcRef::Edge(e),
                        None => return random_drawing_move(doc, DrawingMove::R1.with_virtual(is_virtual), rng),
                    }
                }
                ArcRef::Circle(i) => {
                    // Loops are drawn disjoint; the bigon is pushed onto another loop or edge.
                    let others: Vec<ArcRef> =
                        (0..darts).map(ArcRef::Edge).chain((0..circles).filter(|&j| j != i).map(ArcRef::Circle)).collect();
                    match others.choose(rng) {
                        Some(&x) => x,
                        None => return random_drawing_move(doc, DrawingMove::R1.with_virtual(is_virtual), rng),
                    }
                }
            };
            let m = apply_h2_plus(&graph, a, b)?;
            flags.push(is_virtual);
            flags.push(is_virtual);
            m
        }
    };
    Ok(pd_from_graph(&out, &flags))
}

impl DrawingMove {
    fn with_virtual(self, v: bool) -> Self {
        match (self, v) {
            (DrawingMove::R1 | DrawingMove::VR1, true) => DrawingMove::VR1,
            (DrawingMove::R1 | DrawingMove::VR1, false) => DrawingMove::R1,
            (DrawingMove::R2 | DrawingMove::VR2, true) => DrawingMove::VR2,
            (DrawingMove::R2 | DrawingMove::VR2, false) => DrawingMove::R2,
        }
    }
}

/// Genus of the full plane graph of a drawing (every node as a vertex);
/// zero for every drawing that is really planar.
pub fn drawing_genus(doc: &PdDocument) -> Result<u32, CodecError> {
    Ok(pd_graph(doc)?.0.genus().total)
}
