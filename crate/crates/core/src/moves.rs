//! Diagram moves and reduction to the minimal diagram.
//!
//! Minus moves delete a monogon (one crossing) or a bigon with two distinct
//! corners (two crossings). Plus moves are their inverses. The ±1
//! construction adds or removes a single crossing inside a face of degree at
//! least four by crossing two diagonal arcs.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canonical::{canonical_code, Mode};
use crate::map::{crossing, dart, opposite, orient_strand, rot, Dart, DoodleMap, Face};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("stale site: {0}")]
    StaleSite(String),
    #[error("dart {dart} out of range ({darts} darts)")]
    DartOutOfRange { dart: Dart, darts: usize },
    #[error("circle {index} out of range ({count} circles)")]
    CircleOutOfRange { index: usize, count: usize },
    #[error("darts {0} and {1} do not border a common face")]
    NoCommonFace(Dart, Dart),
    #[error("both arcs lie on the same edge")]
    SameEdge,
    #[error("invalid +1 site: {0}")]
    InvalidPlusOneSite(String),
    #[error("invalid -1 site: {0}")]
    InvalidMinusOneSite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteKind {
    Monogon,
    Bigon,
}

/// A face on which a minus move applies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReductionSite {
    pub kind: SiteKind,
    pub face: Face,
    pub crossings: Vec<usize>,
}

/// All monogons and distinct-corner bigons, ordered by least dart of the face.
pub fn find_sites(map: &DoodleMap) -> Vec<ReductionSite> {
    map.faces().into_iter().filter_map(site_of_face).collect()
}

fn site_of_face(face: Face) -> Option<ReductionSite> {
    match face.darts.as_slice() {
        &[d] => Some(ReductionSite { kind: SiteKind::Monogon, crossings: vec![crossing(d)], face }),
        &[d1, d2] if crossing(d1) != crossing(d2) => {
            Some(ReductionSite { kind: SiteKind::Bigon, crossings: vec![crossing(d1), crossing(d2)], face })
        }
        _ => None,
    }
}

fn check_site(map: &DoodleMap, site: &ReductionSite, kind: SiteKind) -> Result<(), MoveError> {
    let stale = || MoveError::StaleSite(format!("{:?} at darts {:?}", site.kind, site.face.darts));
    if site.kind != kind || site.face.darts.iter().any(|&d| d >= map.dart_count()) {
        return Err(stale());
    }
    let ok = match (kind, site.face.darts.as_slice()) {
        (SiteKind::Monogon, &[d]) => map.pair(d) == rot(d),
        (SiteKind::Bigon, &[d1, d2]) => {
            crossing(d1) != crossing(d2) && map.pair(d1) == rot(d2) && map.pair(d2) == rot(d1)
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(stale())
    }
}

/// Deletes a curl. The through-strand is spliced into one edge.
pub fn apply_h1_minus(map: &DoodleMap, site: &ReductionSite) -> Result<DoodleMap, MoveError> {
    check_site(map, site, SiteKind::Monogon)?;
    Ok(delete(map, &site.crossings))
}

/// Deletes a bigon and both its corners.
pub fn apply_h2_minus(map: &DoodleMap, site: &ReductionSite) -> Result<DoodleMap, MoveError> {
    check_site(map, site, SiteKind::Bigon)?;
    Ok(delete(map, &site.crossings))
}

pub fn apply_site(map: &DoodleMap, site: &ReductionSite) -> Result<DoodleMap, MoveError> {
    match site.kind {
        SiteKind::Monogon => apply_h1_minus(map, site),
        SiteKind::Bigon => apply_h2_minus(map, site),
    }
}

fn delete(map: &DoodleMap, crossings: &[usize]) -> DoodleMap {
    let mut doomed = vec![false; map.crossing_count()];
    for &c in crossings {
        doomed[c] = true;
    }
    map.delete_crossings(&doomed, &vec![false; map.dart_count()])
}

/// A place on the diagram where a plus move can act.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcRef {
    /// The edge between `d` and `pair(d)`, seen from the face to the left of `d`.
    Edge(Dart),
    /// A crossing-free circle, by index into [`DoodleMap::circles`].
    Circle(usize),
}

/// Side on which the curl of an H1+ move is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    Left,
    Right,
}

/// Working copy of a map with room for new crossings. New darts carry the
/// label `u32::MAX` until [`Rewire::finish`] assigns strands.
struct Rewire {
    pair: Vec<Dart>,
    forward: Vec<bool>,
    label: Vec<u32>,
    circles: Vec<u32>,
}

const UNKNOWN: u32 = u32::MAX;

impl Rewire {
    fn new(map: &DoodleMap, extra: usize) -> Self {
        let (pair, forward, label) = map.raw_parts();
        let mut r = Self { pair: pair.to_vec(), forward: forward.to_vec(), label: label.to_vec(), circles: map.circles().to_vec() };
        let n = r.pair.len() + 4 * extra;
        r.pair.resize(n, usize::MAX);
        r.forward.resize(n, false);
        r.label.resize(n, UNKNOWN);
        r
    }

    fn link(&mut self, a: Dart, b: Dart) {
        self.pair[a] = b;
        self.pair[b] = a;
    }

    fn take_circle(&mut self, index: usize) -> u32 {
        self.circles.remove(index)
    }

    /// Re-derives strands: each keeps the least label among its known darts
    /// (a later strand reusing a taken label gets a fresh one) and the
    /// direction of its least known exit.
    fn finish(mut self) -> DoodleMap {
        let n = self.pair.len();
        let mut fresh = self.label.iter().chain(&self.circles).filter(|&&l| l != UNKNOWN).max().map_or(0, |m| m + 1);
        let mut taken: BTreeSet<u32> = self.circles.iter().copied().collect();
        let mut seen = vec![false; n];
        let mut forward = vec![false; n];
        let mut label = vec![0; n];
        for d0 in 0..n {
            if seen[d0] {
                continue;
            }
            let mut best_label = UNKNOWN;
            let mut exit: Option<Dart> = None;
            let mut e = d0;
            loop {
                for x in [e, self.pair[e]] {
                    seen[x] = true;
                    seen[opposite(x)] = true;
                    for y in [x, opposite(x)] {
                        if self.label[y] != UNKNOWN {
                            best_label = best_label.min(self.label[y]);
                            if self.forward[y] && exit.map_or(true, |m| y < m) {
                                exit = Some(y);
                            }
                        }
                    }
                }
                e = opposite(self.pair[e]);
                if e == d0 {
                    break;
                }
            }
            let l = if best_label == UNKNOWN || taken.contains(&best_label) {
                fresh += 1;
                fresh - 1
            } else {
                best_label
            };
            taken.insert(l);
            orient_strand(&self.pair, &mut forward, &mut label, exit.unwrap_or(d0), l);
        }
        self.forward = forward;
        self.label = label;
        DoodleMap::from_raw(self.pair, self.forward, self.label, self.circles)
    }
}

fn check_dart(map: &DoodleMap, d: Dart) -> Result<(), MoveError> {
    if d < map.dart_count() {
        Ok(())
    } else {
        Err(MoveError::DartOutOfRange { dart: d, darts: map.dart_count() })
    }
}

fn check_circle(map: &DoodleMap, i: usize) -> Result<(), MoveError> {
    if i < map.circle_count() {
        Ok(())
    } else {
        Err(MoveError::CircleOutOfRange { index: i, count: map.circle_count() })
    }
}

/// Adds a curl on the given arc.
pub fn apply_h1_plus(map: &DoodleMap, at: ArcRef, chirality: Chirality) -> Result<DoodleMap, MoveError> {
    let c = map.dart_count();
    let mut r = Rewire::new(map, 1);
    match at {
        ArcRef::Edge(d) => {
            check_dart(map, d)?;
            let q = map.pair(d);
            r.link(d, c);
            match chirality {
                Chirality::Left => {
                    r.link(c + 2, c + 3);
                    r.link(c + 1, q);
                }
                Chirality::Right => {
                    r.link(c + 2, c + 1);
                    r.link(c + 3, q);
                }
            }
        }
        ArcRef::Circle(i) => {
            check_circle(map, i)?;
            let l = r.take_circle(i);
            match chirality {
                Chirality::Left => {
                    r.link(c, c + 1);
                    r.link(c + 2, c + 3);
                }
                Chirality::Right => {
                    r.link(c, c + 3);
                    r.link(c + 1, c + 2);
                }
            }
            for k in 0..4 {
                r.label[c + k] = l;
            }
            r.forward[c] = true;
        }
    }
    Ok(r.finish())
}

/// Whether `b` lies on the face orbit of `a`.
pub fn share_face(map: &DoodleMap, a: Dart, b: Dart) -> bool {
    let mut d = a;
    loop {
        if d == b {
            return true;
        }
        d = map.face_next(d);
        if d == a {
            return false;
        }
    }
}

/// Pushes one arc across another, creating a bigon. Edge arcs must border
/// a common face; circles may be pushed onto any arc.
pub fn apply_h2_plus(map: &DoodleMap, arc1: ArcRef, arc2: ArcRef) -> Result<DoodleMap, MoveError> {
    let base = map.dart_count();
    let (p, q) = (base, base + 4);
    let mut r = Rewire::new(map, 2);
    let (arc1, arc2) = match (arc1, arc2) {
        (ArcRef::Circle(i), ArcRef::Edge(d)) => (ArcRef::Edge(d), ArcRef::Circle(i)),
        other => other,
    };
    match (arc1, arc2) {
        (ArcRef::Edge(a), ArcRef::Edge(b)) => {
            check_dart(map, a)?;
            check_dart(map, b)?;
            if a == b || map.pair(a) == b {
                return Err(MoveError::SameEdge);
            }
            if !share_face(map, a, b) {
                return Err(MoveError::NoCommonFace(a, b));
            }
            let (a2, b2) = (map.pair(a), map.pair(b));
            r.link(a, p);
            r.link(p + 2, q);
            r.link(q + 2, a2);
            r.link(b, q + 3);
            r.link(q + 1, p + 1);
            r.link(p + 3, b2);
        }
        (ArcRef::Edge(a), ArcRef::Circle(i)) => {
            check_dart(map, a)?;
            check_circle(map, i)?;
            let a2 = map.pair(a);
            let l = r.take_circle(i);
            r.link(a, p);
            r.link(p + 2, q);
            r.link(q + 2, a2);
            r.link(q + 1, p + 1);
            r.link(p + 3, q + 3);
            for d in [q + 3, q + 1, p + 1, p + 3] {
                r.label[d] = l;
            }
            r.forward[q + 3] = true;
        }
        (ArcRef::Circle(i), ArcRef::Circle(j)) => {
            check_circle(map, i)?;
            check_circle(map, j)?;
            if i == j {
                return Err(MoveError::SameEdge);
            }
            let (li, lj) = (map.circles()[i], map.circles()[j]);
            let (hi, lo) = (i.max(j), i.min(j));
            r.take_circle(hi);
            r.take_circle(lo);
            r.link(p + 2, q);
            r.link(q + 2, p);
            r.link(q + 1, p + 1);
            r.link(p + 3, q + 3);
            for d in [p, p + 2, q, q + 2] {
                r.label[d] = li;
            }
            for d in [q + 3, q + 1, p + 1, p + 3] {
                r.label[d] = lj;
            }
            r.forward[p + 2] = true;
            r.forward[q + 3] = true;
        }
        (ArcRef::Circle(_), ArcRef::Edge(_)) => unreachable!("normalized above"),
    }
    Ok(r.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Always the first site in [`find_sites`] order.
    First,
    /// A uniformly random site from a seeded generator.
    Random(u64),
    /// The first bigon if any, otherwise the first monogon.
    GreedyBigonFirst,
}

/// One step of a reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub kind: SiteKind,
    /// Crossing ids in the map the move was applied to.
    pub crossings: Vec<usize>,
    pub crossings_after: usize,
}

/// Applies minus moves until none is left.
pub fn reduce(map: &DoodleMap, strategy: Strategy) -> DoodleMap {
    reduce_with_trace(map, strategy).0
}

pub fn reduce_with_trace(map: &DoodleMap, strategy: Strategy) -> (DoodleMap, Vec<TraceStep>) {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut cur = map.clone();
    let mut trace = Vec::new();
    loop {
        let sites = find_sites(&cur);
        if sites.is_empty() {
            return (cur, trace);
        }
        let site = match strategy {
            Strategy::First => &sites[0],
            Strategy::Random(_) => sites.choose(rng.as_mut().expect("seeded")).expect("non-empty"),
            Strategy::GreedyBigonFirst => sites.iter().find(|s| s.kind == SiteKind::Bigon).unwrap_or(&sites[0]),
        };
        let next = apply_site(&cur, site).expect("fresh sites apply");
        trace.push(TraceStep { kind: site.kind, crossings: site.crossings.clone(), crossings_after: next.crossing_count() });
        cur = next;
    }
}

/// Two disjoint edges of one face, given by the face darts that leave
/// along them. With face order `a1, b1, ..., a2, b2` the new crossing joins
/// `a1` to `a2` and `b1` to `b2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlusOneSite {
    pub a1: Dart,
    pub a2: Dart,
}

fn plus_one_error(map: &DoodleMap, site: PlusOneSite) -> Option<String> {
    let PlusOneSite { a1, a2 } = site;
    if a1 >= map.dart_count() || a2 >= map.dart_count() {
        return Some("dart out of range".into());
    }
    if a1 == a2 || !share_face(map, a1, a2) {
        return Some(format!("darts {a1} and {a2} are not two darts of one face"));
    }
    let mut degree = 1;
    let mut d = map.face_next(a1);
    while d != a1 {
        degree += 1;
        d = map.face_next(d);
    }
    if degree < 4 {
        return Some(format!("face has degree {degree} < 4"));
    }
    let ends = [crossing(a1), crossing(map.pair(a1)), crossing(a2), crossing(map.pair(a2))];
    let distinct: BTreeSet<_> = ends.iter().collect();
    if distinct.len() != 4 {
        return Some(format!("edge endpoints {ends:?} are not four distinct crossings"));
    }
    None
}

/// Every +1 site, one per unordered pair of face darts.
pub fn plus_one_sites(map: &DoodleMap) -> Vec<PlusOneSite> {
    let mut out = Vec::new();
    for f in map.faces() {
        if f.degree() < 4 {
            continue;
        }
        for i in 0..f.darts.len() {
            for j in i + 1..f.darts.len() {
                let site = PlusOneSite { a1: f.darts[i], a2: f.darts[j] };
                if plus_one_error(map, site).is_none() {
                    out.push(site);
                }
            }
        }
    }
    out
}

pub fn plus_one(map: &DoodleMap, site: PlusOneSite) -> Result<DoodleMap, MoveError> {
    if let Some(e) = plus_one_error(map, site) {
        return Err(MoveError::InvalidPlusOneSite(e));
    }
    let PlusOneSite { a1, a2 } = site;
    let (b1, b2) = (map.pair(a1), map.pair(a2));
    let x = map.dart_count();
    let mut r = Rewire::new(map, 1);
    r.link(a1, x);
    r.link(b1, x + 1);
    r.link(a2, x + 2);
    r.link(b2, x + 3);
    Ok(r.finish())
}

/// Un-crossing `crossing` by joining its slot `k` stub to slot `k + 1` and
/// slot `k + 2` to slot `k + 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MinusOneSite {
    pub crossing: usize,
    /// 0 or 1.
    pub smoothing: usize,
}

fn smooth(map: &DoodleMap, site: MinusOneSite) -> DoodleMap {
    let x = site.crossing;
    let k = site.smoothing;
    let p = |j: usize| map.pair(dart(x, k + j));
    let mut r = Rewire::new(map, 0);
    let (p0, p1, p2, p3) = (p(0), p(1), p(2), p(3));
    r.link(p0, p1);
    r.link(p2, p3);
    r.link(dart(x, 0), dart(x, 1));
    r.link(dart(x, 2), dart(x, 3));
    let mut doomed = vec![false; map.crossing_count()];
    doomed[x] = true;
    let mut drop = vec![false; map.dart_count()];
    for s in 0..4 {
        drop[dart(x, s)] = true;
        r.label[dart(x, s)] = UNKNOWN;
    }
    // Strand bookkeeping first, on the full dart set, then drop the crossing.
    let rewired = r.finish();
    rewired.delete_crossings(&doomed, &drop)
}

fn minus_one_error(map: &DoodleMap, site: MinusOneSite, faces: &[usize], degree: &[usize]) -> Option<String> {
    let x = site.crossing;
    let k = site.smoothing;
    if x >= map.crossing_count() || k > 1 {
        return Some("site out of range".into());
    }
    let ps: Vec<Dart> = (0..4).map(|s| map.pair(dart(x, s))).collect();
    if ps.iter().any(|&p| crossing(p) == x) {
        return Some(format!("crossing {x} carries a loop"));
    }
    let ends: BTreeSet<usize> = ps.iter().map(|&p| crossing(p)).collect();
    if ends.len() != 4 {
        return Some(format!("neighbours of crossing {x} are not distinct"));
    }
    // Corner face between slots j and j + 1 contains dart j.
    let corner = |j: usize| faces[dart(x, k + j)];
    if corner(1) == corner(3) {
        return Some("merged corner faces coincide".into());
    }
    let (f0, f2) = (corner(0), corner(2));
    let ok = if f0 != f2 { degree[f0] > 3 && degree[f2] > 3 } else { degree[f0] > 5 };
    if !ok {
        return Some("shrinking corner faces are too small".into());
    }
    None
}

fn face_index(map: &DoodleMap) -> (Vec<usize>, Vec<usize>) {
    let mut idx = vec![0; map.dart_count()];
    let mut degree = Vec::new();
    for (i, f) in map.faces().iter().enumerate() {
        for &d in &f.darts {
            idx[d] = i;
        }
        degree.push(f.degree());
    }
    (idx, degree)
}

/// The +1 site that undoes `site` in the smoothed map.
fn inverse_site(map: &DoodleMap, site: MinusOneSite, smoothed: &DoodleMap) -> Option<PlusOneSite> {
    // Dart ids shift down by four past the deleted crossing.
    let shift = |d: Dart| if crossing(d) > site.crossing { d - 4 } else { d };
    let a1 = shift(map.pair(dart(site.crossing, site.smoothing)));
    let a2 = shift(map.pair(dart(site.crossing, site.smoothing + 2)));
    let candidate = PlusOneSite { a1, a2 };
    plus_one_error(smoothed, candidate).is_none().then_some(candidate)
}

fn minus_one_checked(map: &DoodleMap, site: MinusOneSite, faces: &[usize], degree: &[usize]) -> Result<DoodleMap, String> {
    if let Some(e) = minus_one_error(map, site, faces, degree) {
        return Err(e);
    }
    let smoothed = smooth(map, site);
    let back = inverse_site(map, site, &smoothed)
        .and_then(|s| plus_one(&smoothed, s).ok())
        .ok_or_else(|| "the smoothed stubs do not form a +1 site".to_string())?;
    if canonical_code(&back, Mode::UNORIENTED) != canonical_code(map, Mode::UNORIENTED) {
        return Err("+1 at the smoothed stubs does not reproduce the diagram".into());
    }
    Ok(smoothed)
}

/// Crossings whose removal by the -1 construction is valid.
pub fn minus_one_sites(map: &DoodleMap) -> Vec<MinusOneSite> {
    let (faces, degree) = face_index(map);
    (0..map.crossing_count())
        .flat_map(|c| (0..2).map(move |k| MinusOneSite { crossing: c, smoothing: k }))
        .filter(|&s| minus_one_checked(map, s, &faces, &degree).is_ok())
        .collect()
}

pub fn apply_minus_one(map: &DoodleMap, site: MinusOneSite) -> Result<DoodleMap, MoveError> {
    let (faces, degree) = face_index(map);
    minus_one_checked(map, site, &faces, &degree).map_err(MoveError::InvalidMinusOneSite)
}

/// Minimal and without an ancestor under the -1 construction.
pub fn is_fundamental(map: &DoodleMap) -> bool {
    find_sites(map).is_empty() && minus_one_sites(map).is_empty()
}

/// A uniformly chosen plus move applicable to `map`, if any.
pub fn random_plus_move(map: &DoodleMap, rng: &mut impl Rng) -> Option<DoodleMap> {
    let darts = map.dart_count();
    let circles = map.circle_count();
    if darts == 0 && circles == 0 {
        return None;
    }
    let arc = |rng: &mut dyn rand::RngCore| {
        let i = rng.gen_range(0..darts + circles);
        if i < darts {
            ArcRef::Edge(i)
        } else {
            ArcRef::Circle(i - darts)
        }
    };
    for _ in 0..32 {
        if rng.gen_bool(0.4) {
            let chirality = if rng.gen_bool(0.5) { Chirality::Left } else { Chirality::Right };
            return apply_h1_plus(map, arc(rng), chirality).ok();
        }
        let a = arc(rng);
        let b = match a {
            // Pick the second arc from the face of the first so the move applies.
            ArcRef::Edge(d) if rng.gen_bool(0.8) => {
                let mut face = vec![d];
                let mut e = map.face_next(d);
                while e != d {
                    face.push(e);
                    e = map.face_next(e);
                }
                ArcRef::Edge(*face.choose(rng).expect("non-empty"))
            }
            _ => arc(rng),
        };
        if let Ok(m) = apply_h2_plus(map, a, b) {
            return Some(m);
        }
    }
    None
}

/// Applies `steps` random plus moves.
pub fn random_expansion(map: &DoodleMap, steps: usize, rng: &mut impl Rng) -> DoodleMap {
    let mut cur = map.clone();
    for _ in 0..steps {
        if let Some(next) = random_plus_move(&cur, rng) {
            cur = next;
        }
    }
    cur
}
