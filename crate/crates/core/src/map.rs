//! Combinatorial maps of doodle diagrams.
//!
//! A diagram with `V` crossings is stored as `4V` darts. Dart `d` lives at
//! crossing `d / 4` in slot `d % 4`; slots are numbered counterclockwise, so
//! the rotation at every crossing is implicit. The only explicit structure is
//! the edge pairing (a fixed-point free involution on darts), the strand
//! direction of every dart and the label of the component it belongs to.
//!
//! A strand enters a crossing at slot `s` and leaves through slot `s + 2`.
//! Faces are traced with `next(d) = rot⁻¹(pair(d))`: follow the edge, then
//! turn one slot clockwise at the arriving crossing. The face therefore lies
//! to the left of the directed edge `d -> pair(d)`.
//!
//! The ambient surface is never stored: it is the closure of the map by
//! disks glued into the face orbits. Crossing-free circles carry no darts and
//! are kept as a list of labels, each circle living on its own sphere.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dart identifier: `4 * crossing + slot`.
pub type Dart = usize;

#[inline]
pub fn crossing(d: Dart) -> usize {
    d >> 2
}

#[inline]
pub fn slot(d: Dart) -> usize {
    d & 3
}

#[inline]
pub fn dart(crossing: usize, slot: usize) -> Dart {
    (crossing << 2) | (slot & 3)
}

/// Next dart counterclockwise at the same crossing.
#[inline]
pub fn rot(d: Dart) -> Dart {
    (d & !3) | ((d + 1) & 3)
}

/// Next dart clockwise at the same crossing.
#[inline]
pub fn rot_inv(d: Dart) -> Dart {
    (d & !3) | ((d + 3) & 3)
}

/// The dart a strand leaves through after entering at `d`.
#[inline]
pub fn opposite(d: Dart) -> Dart {
    d ^ 2
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("invalid map: {0}")]
    Invalid(Violation),
    #[error("component index {index} out of range ({count} components)")]
    ComponentOutOfRange { index: usize, count: usize },
}

/// One violated structural invariant of a [`MapParts`] description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateDart { dart: u32, first: (usize, usize), second: (usize, usize) },
    PairingFixedPoint { dart: u32 },
    PairingUnknownDart { dart: u32 },
    DartPairedTwice { dart: u32 },
    UnpairedDart { dart: u32 },
    StrandStartUnknown { dart: u32 },
    StrandListedTwice { first: u32, second: u32 },
    StrandMissing { dart: u32 },
    DuplicateLabel { label: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateDart { dart, first, second } => write!(
                f,
                "dart {dart} occupies two slots: crossing {} slot {} and crossing {} slot {}",
                first.0, first.1, second.0, second.1
            ),
            Violation::PairingFixedPoint { dart } => write!(f, "edge_pairing has fixed point {dart}"),
            Violation::PairingUnknownDart { dart } => {
                write!(f, "edge_pairing mentions dart {dart} which belongs to no crossing")
            }
            Violation::DartPairedTwice { dart } => write!(f, "dart {dart} appears in two edges"),
            Violation::UnpairedDart { dart } => write!(f, "dart {dart} is not paired"),
            Violation::StrandStartUnknown { dart } => {
                write!(f, "strand start {dart} belongs to no crossing")
            }
            Violation::StrandListedTwice { first, second } => {
                write!(f, "strand starts {first} and {second} lie on the same strand")
            }
            Violation::StrandMissing { dart } => {
                write!(f, "strand through dart {dart} has no entry in the component table")
            }
            Violation::DuplicateLabel { label } => {
                write!(f, "component label {label} is used by more than one component")
            }
        }
    }
}

/// Entry of the component table: a strand given by one dart it leaves through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandSpec {
    pub start: u32,
    pub label: u32,
}

/// Unvalidated, explicit description of a map with arbitrary dart ids.
///
/// This is the exchange shape used by serialization; [`DoodleMap`] is only
/// ever built from it through [`DoodleMap::from_parts`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapParts {
    /// Per crossing, its four darts in counterclockwise order.
    pub rotation: Vec<[u32; 4]>,
    /// Edges as unordered dart pairs.
    pub pairing: Vec<(u32, u32)>,
    /// One entry per strand; `start` is a dart the strand leaves through.
    /// Empty means "assign directions and labels automatically".
    #[serde(default)]
    pub strands: Vec<StrandSpec>,
    /// Labels of crossing-free circles.
    #[serde(default)]
    pub circles: Vec<u32>,
}

/// Every violated invariant of `parts`, in a deterministic order.
pub fn validate(parts: &MapParts) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut owner = std::collections::HashMap::new();
    for (c, rot) in parts.rotation.iter().enumerate() {
        for (s, &d) in rot.iter().enumerate() {
            if let Some(&first) = owner.get(&d) {
                out.push(Violation::DuplicateDart { dart: d, first, second: (c, s) });
            } else {
                owner.insert(d, (c, s));
            }
        }
    }
    let mut partner = std::collections::HashMap::new();
    for &(a, b) in &parts.pairing {
        if a == b {
            out.push(Violation::PairingFixedPoint { dart: a });
            continue;
        }
        for d in [a, b] {
            if !owner.contains_key(&d) {
                out.push(Violation::PairingUnknownDart { dart: d });
            }
        }
        for (d, e) in [(a, b), (b, a)] {
            if partner.insert(d, e).is_some() {
                out.push(Violation::DartPairedTwice { dart: d });
            }
        }
    }
    let mut all: Vec<u32> = owner.keys().copied().collect();
    all.sort_unstable();
    for &d in &all {
        if !partner.contains_key(&d) {
            out.push(Violation::UnpairedDart { dart: d });
        }
    }
    if !out.is_empty() || parts.strands.is_empty() {
        if out.is_empty() {
            check_labels(parts.strands.iter().map(|s| s.label).chain(parts.circles.iter().copied()), &mut out);
        }
        return out;
    }
    // Strand coverage, walked in the compact numbering.
    let compact = compact_pairing(parts);
    let strand_of = strand_ids(&compact);
    let index: std::collections::HashMap<u32, usize> = parts
        .rotation
        .iter()
        .enumerate()
        .flat_map(|(c, r)| r.iter().enumerate().map(move |(s, &d)| (d, dart(c, s))))
        .collect();
    let mut seen: std::collections::HashMap<usize, u32> = std::collections::HashMap::new();
    for spec in &parts.strands {
        let Some(&d) = index.get(&spec.start) else {
            out.push(Violation::StrandStartUnknown { dart: spec.start });
            continue;
        };
        if let Some(&first) = seen.get(&strand_of[d]) {
            out.push(Violation::StrandListedTwice { first, second: spec.start });
        } else {
            seen.insert(strand_of[d], spec.start);
        }
    }
    let mut reported = BTreeSet::new();
    for (c, r) in parts.rotation.iter().enumerate() {
        for (s, &d) in r.iter().enumerate() {
            let sid = strand_of[dart(c, s)];
            if !seen.contains_key(&sid) && reported.insert(sid) {
                out.push(Violation::StrandMissing { dart: d });
            }
        }
    }
    check_labels(parts.strands.iter().map(|s| s.label).chain(parts.circles.iter().copied()), &mut out);
    out
}

fn check_labels(labels: impl Iterator<Item = u32>, out: &mut Vec<Violation>) {
    let mut seen = BTreeSet::new();
    let mut dup = BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            dup.insert(l);
        }
    }
    out.extend(dup.into_iter().map(|label| Violation::DuplicateLabel { label }));
}

fn compact_pairing(parts: &MapParts) -> Vec<Dart> {
    let index: std::collections::HashMap<u32, usize> = parts
        .rotation
        .iter()
        .enumerate()
        .flat_map(|(c, r)| r.iter().enumerate().map(move |(s, &d)| (d, dart(c, s))))
        .collect();
    let mut pair = vec![usize::MAX; parts.rotation.len() * 4];
    for &(a, b) in &parts.pairing {
        let (a, b) = (index[&a], index[&b]);
        pair[a] = b;
        pair[b] = a;
    }
    pair
}

/// Strand id of every dart; both darts of a crossing visit get the same id.
fn strand_ids(pair: &[Dart]) -> Vec<usize> {
    let mut id = vec![usize::MAX; pair.len()];
    let mut next = 0;
    for d0 in 0..pair.len() {
        if id[d0] != usize::MAX {
            continue;
        }
        let mut e = d0;
        loop {
            id[e] = next;
            let p = pair[e];
            id[p] = next;
            e = opposite(p);
            if e == d0 {
                break;
            }
        }
        next += 1;
    }
    id
}

/// A component of the diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Component {
    /// A strand through crossings: the darts it leaves through, in order.
    Strand { exits: Vec<Dart>, label: u32 },
    /// A crossing-free circle.
    Circle { label: u32 },
}

impl Component {
    pub fn label(&self) -> u32 {
        match self {
            Component::Strand { label, .. } | Component::Circle { label } => *label,
        }
    }
}

/// A face orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Face {
    pub darts: Vec<Dart>,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.darts.len()
    }

    /// Crossings at the corners, one per dart, in orbit order.
    pub fn corners(&self) -> Vec<usize> {
        self.darts.iter().map(|&d| crossing(d)).collect()
    }

    pub fn least_dart(&self) -> Dart {
        *self.darts.iter().min().expect("faces are non-empty")
    }
}

/// Cell counts of one connected surface component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub genus: u32,
}

impl SurfaceSummary {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }
}

/// Face-degree census plus per-surface-component cell counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceVector {
    /// Crossing-bearing surface components, ordered by least crossing.
    pub components: Vec<SurfaceSummary>,
    /// Number of crossing-free circles (each a sphere component).
    pub circles: usize,
    /// `counts[i]` is the number of faces of degree `i`; `counts[0] == 0`.
    pub counts: Vec<usize>,
}

impl FaceVector {
    pub fn count(&self, degree: usize) -> usize {
        self.counts.get(degree).copied().unwrap_or(0)
    }

    pub fn total_faces(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Per-component genus and total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusReport {
    /// Crossing-bearing components first (by least crossing), then one zero
    /// per crossing-free circle.
    pub per_component: Vec<u32>,
    pub total: u32,
}

/// Both sides of one identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityCheck {
    pub lhs: i64,
    pub rhs: i64,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluation of the cell-count identities of a minimal connected diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityReport {
    NotApplicable { reason: String },
    Evaluated {
        /// `E = 2V`
        i1: IdentityCheck,
        /// `F = V + 2 - 2g`
        i2: IdentityCheck,
        /// `V - 6 + 6g = sum_{i >= 4} (i - 3) F_i`
        i3: IdentityCheck,
    },
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        match self {
            IdentityReport::NotApplicable { .. } => false,
            IdentityReport::Evaluated { i1, i2, i3 } => i1.holds() && i2.holds() && i3.holds(),
        }
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentityReport::NotApplicable { reason } => write!(f, "identities not applicable: {reason}"),
            IdentityReport::Evaluated { i1, i2, i3 } => {
                let mark = |c: &IdentityCheck| if c.holds() { "pass" } else { "FAIL" };
                writeln!(f, "I1 E = 2V: {} = {} {}", i1.lhs, i1.rhs, mark(i1))?;
                writeln!(f, "I2 F = V + 2 - 2g: {} = {} {}", i2.lhs, i2.rhs, mark(i2))?;
                write!(f, "I3 V - 6 + 6g = F4 + 2F5 + ...: {} = {} {}", i3.lhs, i3.rhs, mark(i3))
            }
        }
    }
}

/// Combinatorial map of a doodle diagram on a closed oriented surface.
///
/// Values are immutable; every operation returns a new map.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DoodleMap {
    pair: Vec<Dart>,
    forward: Vec<bool>,
    label: Vec<u32>,
    circles: Vec<u32>,
}

impl DoodleMap {
    /// The empty diagram.
    pub fn empty() -> Self {
        Self { pair: Vec::new(), forward: Vec::new(), label: Vec::new(), circles: Vec::new() }
    }

    /// `k` crossing-free circles labelled `0..k`.
    pub fn trivial(k: usize) -> Self {
        Self { circles: (0..k as u32).collect(), ..Self::empty() }
    }

    /// Builds a map from a compact pairing, choosing strand directions and
    /// labels automatically (strands in order of least dart, each leaving
    /// through its least dart).
    pub fn from_pairing(pair: Vec<Dart>) -> Result<Self, MapError> {
        let n = pair.len();
        if n % 4 != 0 {
            return Err(MapError::Invalid(Violation::UnpairedDart { dart: n as u32 }));
        }
        for (d, &p) in pair.iter().enumerate() {
            if p >= n {
                return Err(MapError::Invalid(Violation::PairingUnknownDart { dart: p as u32 }));
            }
            if p == d {
                return Err(MapError::Invalid(Violation::PairingFixedPoint { dart: d as u32 }));
            }
            if pair[p] != d {
                return Err(MapError::Invalid(Violation::DartPairedTwice { dart: p as u32 }));
            }
        }
        let mut map = Self { forward: vec![false; n], label: vec![u32::MAX; n], pair, circles: Vec::new() };
        let mut next_label = 0;
        for d in 0..n {
            if map.label[d] == u32::MAX {
                map.orient_strand(d, next_label);
                next_label += 1;
            }
        }
        Ok(map)
    }

    /// Validates `parts` and converts to the compact form.
    pub fn from_parts(parts: &MapParts) -> Result<Self, MapError> {
        if let Some(v) = validate(parts).into_iter().next() {
            return Err(MapError::Invalid(v));
        }
        let pair = compact_pairing(parts);
        if parts.strands.is_empty() {
            let mut map = Self::from_pairing(pair)?;
            map.circles = if parts.circles.is_empty() { Vec::new() } else { parts.circles.clone() };
            // Automatic labels must not collide with circle labels.
            let max_circle = map.circles.iter().copied().max().map_or(0, |m| m + 1);
            for l in &mut map.label {
                *l += max_circle;
            }
            return Ok(map);
        }
        let index: std::collections::HashMap<u32, usize> = parts
            .rotation
            .iter()
            .enumerate()
            .flat_map(|(c, r)| r.iter().enumerate().map(move |(s, &d)| (d, dart(c, s))))
            .collect();
        let n = pair.len();
        let mut map = Self { forward: vec![false; n], label: vec![u32::MAX; n], pair, circles: parts.circles.clone() };
        for spec in &parts.strands {
            map.orient_strand(index[&spec.start], spec.label);
        }
        Ok(map)
    }

    /// Explicit description with darts `0..4V` in compact order.
    pub fn to_parts(&self) -> MapParts {
        let rotation = (0..self.crossing_count())
            .map(|c| [0, 1, 2, 3].map(|s| dart(c, s) as u32))
            .collect();
        let pairing = (0..self.pair.len())
            .filter(|&d| d < self.pair[d])
            .map(|d| (d as u32, self.pair[d] as u32))
            .collect();
        let strands = self
            .components()
            .into_iter()
            .filter_map(|c| match c {
                Component::Strand { exits, label } => {
                    Some(StrandSpec { start: *exits.iter().min().unwrap() as u32, label })
                }
                Component::Circle { .. } => None,
            })
            .collect();
        MapParts { rotation, pairing, strands, circles: self.circles.clone() }
    }

    pub(crate) fn from_raw(pair: Vec<Dart>, forward: Vec<bool>, label: Vec<u32>, circles: Vec<u32>) -> Self {
        debug_assert_eq!(pair.len(), forward.len());
        debug_assert_eq!(pair.len(), label.len());
        Self { pair, forward, label, circles }
    }

    pub(crate) fn raw_parts(&self) -> (&[Dart], &[bool], &[u32]) {
        (&self.pair, &self.forward, &self.label)
    }

    /// Walks the strand leaving through `exit`, marking it as the strand's
    /// direction and stamping `label` on every dart.
    pub(crate) fn orient_strand(&mut self, exit: Dart, label: u32) {
        orient_strand(&self.pair, &mut self.forward, &mut self.label, exit, label);
    }

    pub fn crossing_count(&self) -> usize {
        self.pair.len() / 4
    }

    pub fn dart_count(&self) -> usize {
        self.pair.len()
    }

    pub fn edge_count(&self) -> usize {
        self.pair.len() / 2
    }

    pub fn pair(&self, d: Dart) -> Dart {
        self.pair[d]
    }

    pub fn pairing(&self) -> &[Dart] {
        &self.pair
    }

    /// Whether the component's direction leaves its crossing through `d`.
    pub fn is_forward(&self, d: Dart) -> bool {
        self.forward[d]
    }

    pub fn label_of(&self, d: Dart) -> u32 {
        self.label[d]
    }

    pub fn circles(&self) -> &[u32] {
        &self.circles
    }

    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pair.is_empty() && self.circles.is_empty()
    }

    /// Face successor: `rot⁻¹(pair(d))`.
    #[inline]
    pub fn face_next(&self, d: Dart) -> Dart {
        rot_inv(self.pair[d])
    }

    /// Strands (ordered by least dart) followed by crossing-free circles.
    pub fn components(&self) -> Vec<Component> {
        let n = self.pair.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for d0 in 0..n {
            if seen[d0] {
                continue;
            }
            let start = if self.forward[d0] { d0 } else { opposite(d0) };
            let mut exits = Vec::new();
            let mut e = start;
            loop {
                exits.push(e);
                seen[e] = true;
                let p = self.pair[e];
                seen[p] = true;
                e = opposite(p);
                if e == start {
                    break;
                }
            }
            out.push(Component::Strand { exits, label: self.label[start] });
        }
        out.extend(self.circles.iter().map(|&label| Component::Circle { label }));
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Index into [`components`](Self::components) of the component labelled `label`.
    pub fn component_index_by_label(&self, label: u32) -> Option<usize> {
        self.components().iter().position(|c| c.label() == label)
    }

    /// Crossing sets of the connected components of the underlying graph,
    /// ordered by least crossing.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let v = self.crossing_count();
        let mut comp = vec![usize::MAX; v];
        let mut out = Vec::new();
        for c0 in 0..v {
            if comp[c0] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![c0];
            comp[c0] = id;
            let mut i = 0;
            while i < members.len() {
                let c = members[i];
                i += 1;
                for s in 0..4 {
                    let o = crossing(self.pair[dart(c, s)]);
                    if comp[o] == usize::MAX {
                        comp[o] = id;
                        members.push(o);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let comps = self.connected_components().len() + self.circles.len();
        comps == 1
    }

    /// All face orbits, sorted by least dart.
    pub fn faces(&self) -> Vec<Face> {
        let n = self.pair.len();
        let mut seen = vec![false; n];
        let mut faces = Vec::new();
        for d0 in 0..n {
            if seen[d0] {
                continue;
            }
            let mut darts = Vec::new();
            let mut d = d0;
            while !seen[d] {
                seen[d] = true;
                darts.push(d);
                d = self.face_next(d);
            }
            faces.push(Face { darts });
        }
        faces
    }

    /// Face orbits and the aggregated face vector.
    pub fn face_trace(&self) -> (Vec<Face>, FaceVector) {
        let faces = self.faces();
        let comps = self.connected_components();
        let mut comp_of = vec![0; self.crossing_count()];
        for (i, members) in comps.iter().enumerate() {
            for &c in members {
                comp_of[c] = i;
            }
        }
        let mut face_count = vec![0usize; comps.len()];
        let max_degree = faces.iter().map(Face::degree).max().unwrap_or(0);
        let mut counts = vec![0usize; max_degree + 1];
        for f in &faces {
            face_count[comp_of[crossing(f.darts[0])]] += 1;
            counts[f.degree()] += 1;
        }
        let components = comps
            .iter()
            .zip(&face_count)
            .map(|(members, &faces)| {
                let vertices = members.len();
                let edges = 2 * vertices;
                let chi = vertices as i64 - edges as i64 + faces as i64;
                SurfaceSummary { vertices, edges, faces, genus: ((2 - chi) / 2) as u32 }
            })
            .collect();
        (faces, FaceVector { components, circles: self.circles.len(), counts })
    }

    pub fn genus(&self) -> GenusReport {
        let (_, fv) = self.face_trace();
        let mut per_component: Vec<u32> = fv.components.iter().map(|c| c.genus).collect();
        per_component.extend(std::iter::repeat(0).take(self.circles.len()));
        let total = per_component.iter().sum();
        GenusReport { per_component, total }
    }

    /// Euler characteristic of the closed surface, counting one sphere per
    /// crossing-free circle.
    pub fn euler_characteristic(&self) -> i64 {
        let (_, fv) = self.face_trace();
        fv.components.iter().map(SurfaceSummary::euler_characteristic).sum::<i64>() + 2 * self.circles.len() as i64
    }

    /// Crossings minus Euler characteristic.
    pub fn level(&self) -> i64 {
        self.crossing_count() as i64 - self.euler_characteristic()
    }

    /// No monogon and no bigon with two distinct corners.
    pub fn is_minimal(&self) -> bool {
        self.faces().iter().all(|f| match f.degree() {
            1 => false,
            2 => crossing(f.darts[0]) == crossing(f.darts[1]),
            _ => true,
        })
    }

    /// Whether some degree-2 face has both corners at the same crossing.
    pub fn has_repeated_corner_bigon(&self) -> bool {
        self.faces()
            .iter()
            .any(|f| f.degree() == 2 && crossing(f.darts[0]) == crossing(f.darts[1]))
    }

    pub fn check_identities(&self) -> IdentityReport {
        if self.crossing_count() == 0 {
            return IdentityReport::NotApplicable { reason: "diagram has no crossings".into() };
        }
        if !self.is_connected() {
            return IdentityReport::NotApplicable { reason: "diagram is not connected".into() };
        }
        if !self.is_minimal() {
            return IdentityReport::NotApplicable { reason: "diagram is not minimal".into() };
        }
        let (_, fv) = self.face_trace();
        let s = fv.components[0];
        let (v, e, f, g) = (s.vertices as i64, s.edges as i64, s.faces as i64, s.genus as i64);
        let excess: i64 = fv.counts.iter().enumerate().skip(4).map(|(i, &c)| (i as i64 - 3) * c as i64).sum();
        IdentityReport::Evaluated {
            i1: IdentityCheck { lhs: e, rhs: 2 * v },
            i2: IdentityCheck { lhs: f, rhs: v + 2 - 2 * g },
            i3: IdentityCheck { lhs: v - 6 + 6 * g, rhs: excess },
        }
    }

    /// Reverses every rotation cycle (slot `s` becomes `-s mod 4`).
    pub fn mirror(&self) -> Self {
        let map = |d: Dart| dart(crossing(d), (4 - slot(d)) & 3);
        let n = self.pair.len();
        let mut pair = vec![0; n];
        let mut forward = vec![false; n];
        let mut label = vec![0; n];
        for d in 0..n {
            pair[map(d)] = map(self.pair[d]);
            forward[map(d)] = self.forward[d];
            label[map(d)] = self.label[d];
        }
        Self { pair, forward, label, circles: self.circles.clone() }
    }

    /// Deletes the component at `index` (see [`components`](Self::components)).
    /// Every crossing it touches disappears and the other strand through such
    /// a crossing is spliced straight through.
    pub fn remove_component(&self, index: usize) -> Result<Self, MapError> {
        let comps = self.components();
        let Some(target) = comps.get(index) else {
            return Err(MapError::ComponentOutOfRange { index, count: comps.len() });
        };
        match target {
            Component::Circle { .. } => {
                let strands = comps.len() - self.circles.len();
                let mut out = self.clone();
                out.circles.remove(index - strands);
                Ok(out)
            }
            Component::Strand { exits, .. } => {
                let mut doomed = vec![false; self.crossing_count()];
                let mut drop = vec![false; self.pair.len()];
                for &e in exits {
                    doomed[crossing(e)] = true;
                    drop[e] = true;
                    drop[opposite(e)] = true;
                }
                Ok(self.delete_crossings(&doomed, &drop))
            }
        }
    }

    /// Removes the marked crossings, joining each surviving dart to the next
    /// surviving dart along its strand. Strands that lie entirely inside the
    /// removed set become crossing-free circles, except those containing a
    /// dart flagged in `drop`, which vanish.
    pub(crate) fn delete_crossings(&self, doomed: &[bool], drop: &[bool]) -> Self {
        let v = self.crossing_count();
        let mut new_index = vec![usize::MAX; v];
        let mut kept = 0;
        for c in 0..v {
            if !doomed[c] {
                new_index[c] = kept;
                kept += 1;
            }
        }
        let remap = |d: Dart| dart(new_index[crossing(d)], slot(d));
        let n = kept * 4;
        let mut pair = vec![0; n];
        let mut forward = vec![false; n];
        let mut label = vec![0; n];
        let mut visited = vec![false; self.pair.len()];
        for d in 0..self.pair.len() {
            if doomed[crossing(d)] {
                continue;
            }
            let mut p = self.pair[d];
            while doomed[crossing(p)] {
                visited[p] = true;
                visited[opposite(p)] = true;
                p = self.pair[opposite(p)];
            }
            pair[remap(d)] = remap(p);
            forward[remap(d)] = self.forward[d];
            label[remap(d)] = self.label[d];
        }
        let mut circles = self.circles.clone();
        for d0 in 0..self.pair.len() {
            if !doomed[crossing(d0)] || visited[d0] {
                continue;
            }
            let mut dropped = false;
            let mut e = d0;
            loop {
                visited[e] = true;
                dropped |= drop[e];
                let p = self.pair[e];
                visited[p] = true;
                dropped |= drop[p];
                e = opposite(p);
                if e == d0 {
                    break;
                }
            }
            if !dropped {
                circles.push(self.label[d0]);
            }
        }
        Self { pair, forward, label, circles }
    }

    /// Disjoint union; labels of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self
            .label
            .iter()
            .chain(&self.circles)
            .copied()
            .max()
            .map_or(0, |m| m + 1);
        let offset = self.pair.len();
        let mut out = self.clone();
        out.pair.extend(other.pair.iter().map(|&p| p + offset));
        out.forward.extend_from_slice(&other.forward);
        out.label.extend(other.label.iter().map(|&l| l + shift));
        out.circles.extend(other.circles.iter().map(|&l| l + shift));
        out
    }

    /// Renumbers crossings by `perm` (old crossing `c` becomes `perm[c]`) and
    /// rotates slot numbering at crossing `c` by `shift[c]`. The result is the
    /// same map under different names.
    pub fn relabel(&self, perm: &[usize], shift: &[usize]) -> Self {
        let map = |d: Dart| dart(perm[crossing(d)], (slot(d) + shift[crossing(d)]) & 3);
        let n = self.pair.len();
        let mut pair = vec![0; n];
        let mut forward = vec![false; n];
        let mut label = vec![0; n];
        for d in 0..n {
            pair[map(d)] = map(self.pair[d]);
            forward[map(d)] = self.forward[d];
            label[map(d)] = self.label[d];
        }
        Self { pair, forward, label, circles: self.circles.clone() }
    }

    /// Replaces component labels by `f(label)`.
    pub fn map_labels(&self, f: impl Fn(u32) -> u32) -> Self {
        let mut out = self.clone();
        for l in out.label.iter_mut().chain(out.circles.iter_mut()) {
            *l = f(*l);
        }
        out
    }

    /// Reverses the direction of the strand containing dart `d`.
    pub fn reverse_strand(&self, d: Dart) -> Self {
        let mut out = self.clone();
        let start = if self.forward[d] { opposite(d) } else { d };
        out.orient_strand(start, self.label[d]);
        out
    }

    /// Structural self-check; empty for every map built through the public API.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = validate(&self.to_parts());
        for d in 0..self.pair.len() {
            if self.forward[d] == self.forward[opposite(d)] || self.forward[d] == self.forward[self.pair[d]] {
                out.push(Violation::StrandMissing { dart: d as u32 });
                break;
            }
        }
        out
    }
}

pub(crate) fn orient_strand(pair: &[Dart], forward: &mut [bool], label: &mut [u32], exit: Dart, l: u32) {
    let mut e = exit;
    loop {
        forward[e] = true;
        label[e] = l;
        let p = pair[e];
        forward[p] = false;
        label[p] = l;
        e = opposite(p);
        if e == exit {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn hopf() -> DoodleMap {
        DoodleMap::from_pairing(vec![2, 3, 0, 1]).unwrap()
    }

    fn figure_eight() -> DoodleMap {
        DoodleMap::from_pairing(vec![3, 2, 1, 0]).unwrap()
    }

    #[test]
    fn dart_arithmetic() {
        assert_eq!(rot(dart(2, 3)), dart(2, 0));
        assert_eq!(rot_inv(dart(2, 0)), dart(2, 3));
        assert_eq!(opposite(dart(1, 1)), dart(1, 3));
        for d in 0..16 {
            assert_eq!(rot(rot_inv(d)), d);
            assert_eq!(crossing(d), d / 4);
        }
    }

    #[test]
    fn hopf_has_one_square_on_a_torus() {
        let m = hopf();
        assert!(m.validate().is_empty());
        let (faces, fv) = m.face_trace();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].degree(), 4);
        assert_eq!(fv.components, vec![SurfaceSummary { vertices: 1, edges: 2, faces: 1, genus: 1 }]);
        assert_eq!(m.genus().per_component, vec![1]);
        assert_eq!(m.component_count(), 2);
    }

    #[test]
    fn figure_eight_is_a_sphere_with_two_monogons() {
        let m = figure_eight();
        let (faces, fv) = m.face_trace();
        let mut degrees: Vec<_> = faces.iter().map(Face::degree).collect();
        degrees.sort();
        assert_eq!(degrees, vec![1, 1, 2]);
        assert_eq!(fv.components[0].genus, 0);
        assert!(!m.is_minimal());
        assert!(m.has_repeated_corner_bigon());
        assert_eq!(m.component_count(), 1);
    }

    #[test]
    fn trivial_circle_is_a_sphere() {
        let m = DoodleMap::trivial(1);
        assert_eq!(m.genus().per_component, vec![0]);
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.is_minimal());
    }

    #[test]
    fn validate_reports_fixed_point() {
        let parts = MapParts {
            rotation: vec![[0, 1, 2, 3]],
            pairing: vec![(0, 0), (1, 3), (2, 2)],
            strands: vec![],
            circles: vec![],
        };
        let v = validate(&parts);
        assert!(v.iter().any(|x| x.to_string() == "edge_pairing has fixed point 0"), "{v:?}");
    }

    #[test]
    fn validate_reports_duplicated_slot() {
        let parts = MapParts {
            rotation: vec![[0, 1, 1, 3]],
            pairing: vec![(0, 1), (3, 1)],
            strands: vec![],
            circles: vec![],
        };
        let v = validate(&parts);
        assert!(matches!(v[0], Violation::DuplicateDart { dart: 1, first: (0, 1), second: (0, 2) }), "{v:?}");
        assert!(DoodleMap::from_parts(&parts).is_err());
    }

    #[test]
    fn validate_checks_component_table() {
        let mut parts = hopf().to_parts();
        assert!(validate(&parts).is_empty());
        parts.strands.pop();
        assert!(matches!(validate(&parts)[0], Violation::StrandMissing { .. }));
        let mut parts = hopf().to_parts();
        parts.strands[1].start = 2;
        assert!(matches!(validate(&parts)[0], Violation::StrandListedTwice { .. }));
    }

    #[test]
    fn parts_round_trip() {
        let m = hopf().map_labels(|l| l + 7);
        let back = DoodleMap::from_parts(&m.to_parts()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn identities_on_hopf() {
        match hopf().check_identities() {
            IdentityReport::Evaluated { i1, i2, i3 } => {
                assert_eq!((i1.lhs, i1.rhs), (2, 2));
                assert_eq!((i2.lhs, i2.rhs), (1, 1));
                assert_eq!((i3.lhs, i3.rhs), (1, 1));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(figure_eight().check_identities(), IdentityReport::NotApplicable { .. }));
        let two = hopf().disjoint_union(&hopf());
        assert!(matches!(two.check_identities(), IdentityReport::NotApplicable { .. }));
    }

    #[test]
    fn removing_a_hopf_component_leaves_a_circle() {
        let m = hopf();
        for i in 0..2 {
            let r = m.remove_component(i).unwrap();
            assert_eq!(r.crossing_count(), 0);
            assert_eq!(r.circle_count(), 1);
            assert_eq!(r.circles()[0], m.components()[1 - i].label());
        }
        assert!(matches!(m.remove_component(2), Err(MapError::ComponentOutOfRange { .. })));
    }

    #[test]
    fn mirror_is_an_involution() {
        let m = figure_eight();
        assert_eq!(m.mirror().mirror(), m);
        assert_eq!(DoodleMap::trivial(1).mirror(), DoodleMap::trivial(1));
        assert_eq!(hopf().mirror().genus(), hopf().genus());
    }

    #[test]
    fn disjoint_union_genus_is_additive() {
        let m = hopf().disjoint_union(&figure_eight()).disjoint_union(&DoodleMap::trivial(2));
        assert_eq!(m.genus().per_component, vec![1, 0, 0, 0]);
        assert_eq!(m.genus().total, 1);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn empty_map_is_valid() {
        let m = DoodleMap::empty();
        assert!(m.validate().is_empty());
        assert_eq!(m.genus().total, 0);
        assert!(m.is_empty());
    }
}
