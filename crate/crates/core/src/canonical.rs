//! Canonical codes and the doodle-level equality API.
//!
//! Each connected component is relabelled breadth-first from a seed dart and
//! serialized; the code of the component is the least serialization over all
//! seeds. Rotations are never reflected, so a map and its mirror image only
//! share a code when they are isomorphic by an orientation-preserving map.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map::{crossing, dart, slot, Dart, DoodleMap};
use crate::moves::{reduce, Strategy};

/// Which decorations an isomorphism must respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    /// Strand directions are part of the diagram.
    pub oriented: bool,
    /// Component labels are part of the diagram.
    pub ordered: bool,
}

impl Mode {
    pub const UNORIENTED: Mode = Mode { oriented: false, ordered: false };
    pub const ORIENTED: Mode = Mode { oriented: true, ordered: false };
    pub const UNORIENTED_ORDERED: Mode = Mode { oriented: false, ordered: true };
    pub const ORIENTED_ORDERED: Mode = Mode { oriented: true, ordered: true };

    pub const ALL: [Mode; 4] = [Self::UNORIENTED, Self::ORIENTED, Self::UNORIENTED_ORDERED, Self::ORIENTED_ORDERED];

    fn byte(self) -> u8 {
        self.oriented as u8 | (self.ordered as u8) << 1
    }

    fn from_byte(b: u8) -> Option<Self> {
        (b < 4).then_some(Mode { oriented: b & 1 == 1, ordered: b & 2 == 2 })
    }
}

impl Default for Mode {
    fn default() -> Self {
        Mode::UNORIENTED
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = if self.oriented { "oriented" } else { "unoriented" };
        let r = if self.ordered { "ordered" } else { "unordered" };
        write!(f, "{o},{r}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("unknown mode word `{0}` (expected oriented, unoriented, ordered or unordered)")]
    UnknownModeWord(String),
    #[error("malformed hex: {0}")]
    Hex(String),
    #[error("unsupported code version {0}")]
    Version(u8),
    #[error("truncated or malformed code")]
    Malformed,
}

impl FromStr for Mode {
    type Err = CodeError;

    /// Accepts comma-separated words; omitted axes default to unoriented and unordered.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut mode = Mode::UNORIENTED;
        for word in s.split(',').map(str::trim).filter(|w| !w.is_empty()) {
            match word {
                "oriented" => mode.oriented = true,
                "unoriented" => mode.oriented = false,
                "ordered" => mode.ordered = true,
                "unordered" => mode.ordered = false,
                other => return Err(CodeError::UnknownModeWord(other.to_string())),
            }
        }
        Ok(mode)
    }
}

const VERSION: u8 = 1;

/// Isomorphism invariant of a [`DoodleMap`] under a [`Mode`].
///
/// Ordered by mode, then component codes, then circle labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode {
    mode: Mode,
    components: Vec<Vec<u8>>,
    circles: Vec<u32>,
}

impl CanonicalCode {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Byte codes of the crossing-bearing components, sorted.
    pub fn components(&self) -> &[Vec<u8>] {
        &self.components
    }

    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    pub fn crossing_count(&self) -> usize {
        self.components.iter().map(|c| u16::from_be_bytes([c[0], c[1]]) as usize).sum()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![VERSION, self.mode.byte()];
        out.extend_from_slice(&(self.components.len() as u16).to_be_bytes());
        for c in &self.components {
            out.extend_from_slice(&(c.len() as u32).to_be_bytes());
            out.extend_from_slice(c);
        }
        out.extend_from_slice(&(self.circles.len() as u16).to_be_bytes());
        if self.mode.ordered {
            for l in &self.circles {
                out.extend_from_slice(&l.to_be_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodeError> {
        let mut r = Reader { bytes, at: 0 };
        let version = r.u8()?;
        if version != VERSION {
            return Err(CodeError::Version(version));
        }
        let mode = Mode::from_byte(r.u8()?).ok_or(CodeError::Malformed)?;
        let n = r.u16()? as usize;
        let mut components = Vec::with_capacity(n);
        for _ in 0..n {
            let len = r.u32()? as usize;
            components.push(r.take(len)?.to_vec());
        }
        let k = r.u16()? as usize;
        let circles = if mode.ordered { (0..k).map(|_| r.u32()).collect::<Result<_, _>>()? } else { vec![0; k] };
        if r.at != bytes.len() {
            return Err(CodeError::Malformed);
        }
        let code = CanonicalCode { mode, components, circles };
        // Reject byte strings that do not describe a valid map.
        code.to_map()?;
        Ok(code)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self, CodeError> {
        let bytes = hex::decode(s.trim()).map_err(|e| CodeError::Hex(e.to_string()))?;
        Self::from_bytes(&bytes)
    }

    /// The map in canonical numbering. Without orientation or ordering the
    /// directions and labels are chosen automatically.
    pub fn to_map(&self) -> Result<DoodleMap, CodeError> {
        let mut out = DoodleMap::empty();
        let mut next_label = 0u32;
        for c in &self.components {
            let (m, used) = decode_component(c, self.mode, next_label)?;
            next_label = used;
            out = concat(&out, &m);
        }
        let circles: Vec<u32> = if self.mode.ordered {
            self.circles.clone()
        } else {
            (next_label..next_label + self.circles.len() as u32).collect()
        };
        let (pair, forward, label) = out.raw_parts();
        Ok(DoodleMap::from_raw(pair.to_vec(), forward.to_vec(), label.to_vec(), circles))
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodeError> {
        let s = self.bytes.get(self.at..self.at + n).ok_or(CodeError::Malformed)?;
        self.at += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, CodeError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, CodeError> {
        let s = self.take(2)?;
        Ok(u16::from_be_bytes([s[0], s[1]]))
    }
    fn u32(&mut self) -> Result<u32, CodeError> {
        let s = self.take(4)?;
        Ok(u32::from_be_bytes([s[0], s[1], s[2], s[3]]))
    }
}

/// Concatenation without relabelling.
fn concat(a: &DoodleMap, b: &DoodleMap) -> DoodleMap {
    let (pa, fa, la) = a.raw_parts();
    let (pb, fb, lb) = b.raw_parts();
    let off = pa.len();
    let pair = pa.iter().copied().chain(pb.iter().map(|&p| p + off)).collect();
    let forward = fa.iter().chain(fb).copied().collect();
    let label = la.iter().chain(lb).copied().collect();
    DoodleMap::from_raw(pair, forward, label, Vec::new())
}

fn decode_component(bytes: &[u8], mode: Mode, first_label: u32) -> Result<(DoodleMap, u32), CodeError> {
    let mut r = Reader { bytes, at: 0 };
    let v = r.u16()? as usize;
    if v == 0 {
        return Err(CodeError::Malformed);
    }
    let n = 4 * v;
    let mut pair = vec![0; n];
    let mut forward = vec![false; n];
    let mut label = vec![0; n];
    for d in 0..n {
        let w = r.u16()? as usize;
        let (p, f) = if mode.oriented { (w >> 1, w & 1 == 1) } else { (w, false) };
        if p >= n {
            return Err(CodeError::Malformed);
        }
        pair[d] = p;
        forward[d] = f;
        if mode.ordered {
            label[d] = r.u32()?;
        }
    }
    if r.at != bytes.len() {
        return Err(CodeError::Malformed);
    }
    let auto = DoodleMap::from_pairing(pair.clone()).map_err(|_| CodeError::Malformed)?;
    let (_, auto_fwd, auto_label) = auto.raw_parts();
    if !mode.oriented {
        forward = auto_fwd.to_vec();
    }
    let mut used = first_label;
    if !mode.ordered {
        label = auto_label.iter().map(|&l| l + first_label).collect();
        used = label.iter().copied().max().map_or(first_label, |m| m + 1);
    }
    for d in 0..n {
        let o = crate::map::opposite(d);
        if forward[d] == forward[o] || forward[d] == forward[pair[d]] || label[d] != label[pair[d]] || label[d] != label[o] {
            return Err(CodeError::Malformed);
        }
    }
    Ok((DoodleMap::from_raw(pair, forward, label, Vec::new()), used))
}

const NONE: usize = usize::MAX;

/// Scratch state for breadth-first relabelling of one map.
pub(crate) struct Labeler {
    id: Vec<usize>,
    base: Vec<usize>,
    order: Vec<usize>,
    words: Vec<u32>,
}

impl Labeler {
    pub(crate) fn new(crossings: usize) -> Self {
        Self { id: vec![NONE; crossings], base: vec![0; crossings], order: Vec::new(), words: Vec::new() }
    }

    /// Relabels the component of `seed`, comparing against `best` as it goes.
    /// Returns `Greater` as soon as the serialization exceeds `best`; the
    /// words are then incomplete.
    pub(crate) fn run(
        &mut self,
        pair: &[Dart],
        forward: &[bool],
        label: &[u32],
        seed: Dart,
        mode: Mode,
        best: Option<&[u32]>,
    ) -> Ordering {
        self.words.clear();
        self.order.clear();
        let c0 = crossing(seed);
        self.id[c0] = 0;
        self.base[c0] = slot(seed);
        self.order.push(c0);
        let mut tied = best.is_some();
        let mut k = 0;
        let mut verdict = Ordering::Less;
        'outer: while k < self.order.len() {
            let c = self.order[k];
            k += 1;
            for j in 0..4 {
                let d = dart(c, self.base[c] + j);
                let p = pair[d];
                let pc = crossing(p);
                if self.id[pc] == NONE {
                    self.id[pc] = self.order.len();
                    self.base[pc] = slot(p);
                    self.order.push(pc);
                }
                let mut w = (4 * self.id[pc] + ((slot(p) + 4 - self.base[pc]) & 3)) as u32;
                if mode.oriented {
                    w = w << 1 | forward[d] as u32;
                }
                if !self.push(w, &mut tied, best) {
                    verdict = Ordering::Greater;
                    break 'outer;
                }
                if mode.ordered && !self.push(label[d], &mut tied, best) {
                    verdict = Ordering::Greater;
                    break 'outer;
                }
            }
        }
        if verdict == Ordering::Less && tied {
            verdict = Ordering::Equal;
        }
        for &c in &self.order {
            self.id[c] = NONE;
        }
        verdict
    }

    #[inline]
    fn push(&mut self, w: u32, tied: &mut bool, best: Option<&[u32]>) -> bool {
        if *tied {
            let b = best.expect("tied implies a reference")[self.words.len()];
            if w > b {
                return false;
            }
            if w < b {
                *tied = false;
            }
        }
        self.words.push(w);
        true
    }

    pub(crate) fn words(&self) -> &[u32] {
        &self.words
    }
}

/// Least serialization of the connected component containing `crossings`.
fn component_words(map: &DoodleMap, crossings: &[usize], mode: Mode, lab: &mut Labeler) -> Vec<u32> {
    let (pair, forward, label) = map.raw_parts();
    let mut best: Option<Vec<u32>> = None;
    for &c in crossings {
        for s in 0..4 {
            let seed = dart(c, s);
            // An orientation-respecting isomorphism sends exits to exits.
            if mode.oriented && !forward[seed] {
                continue;
            }
            if lab.run(pair, forward, label, seed, mode, best.as_deref()) == Ordering::Less {
                best = Some(lab.words().to_vec());
            }
        }
    }
    best.expect("components are non-empty")
}

fn serialize_component(v: usize, words: &[u32], mode: Mode) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 + words.len() * 4);
    out.extend_from_slice(&(v as u16).to_be_bytes());
    let step = if mode.ordered { 2 } else { 1 };
    for chunk in words.chunks(step) {
        out.extend_from_slice(&(chunk[0] as u16).to_be_bytes());
        if mode.ordered {
            out.extend_from_slice(&chunk[1].to_be_bytes());
        }
    }
    out
}

pub fn canonical_code(map: &DoodleMap, mode: Mode) -> CanonicalCode {
    let mut lab = Labeler::new(map.crossing_count());
    let mut components: Vec<Vec<u8>> = map
        .connected_components()
        .iter()
        .map(|cs| serialize_component(cs.len(), &component_words(map, cs, mode, &mut lab), mode))
        .collect();
    components.sort();
    let mut circles: Vec<u32> = if mode.ordered { map.circles().to_vec() } else { vec![0; map.circle_count()] };
    circles.sort_unstable();
    CanonicalCode { mode, components, circles }
}

/// The representative of `map`'s isomorphism class in canonical numbering.
pub fn canonical_form(map: &DoodleMap, mode: Mode) -> DoodleMap {
    canonical_code(map, mode).to_map().expect("canonical codes decode")
}

/// Decides doodle equivalence: equal canonical codes after reduction.
pub fn doodle_equal(m1: &DoodleMap, m2: &DoodleMap, mode: Mode) -> bool {
    let r1 = reduce(m1, Strategy::First);
    let r2 = reduce(m2, Strategy::First);
    canonical_code(&r1, mode) == canonical_code(&r2, mode)
}

/// Genus of the surface of the minimal diagram.
pub fn genus_of_doodle(map: &DoodleMap) -> u32 {
    reduce(map, Strategy::First).genus().total
}

pub fn is_trivial_doodle(map: &DoodleMap) -> bool {
    reduce(map, Strategy::First).crossing_count() == 0
}

/// Whether breadth-first relabelling from dart 0 gives the least
/// unoriented, unordered serialization of a connected pairing.
pub(crate) fn seed_zero_is_minimal(pair: &[Dart], lab: &mut Labeler, reference: &mut Vec<u32>) -> bool {
    let forward = vec![false; pair.len()];
    let label = vec![0; pair.len()];
    lab.run(pair, &forward, &label, 0, Mode::UNORIENTED, None);
    reference.clear();
    reference.extend_from_slice(lab.words());
    for seed in 1..pair.len() {
        if lab.run(pair, &forward, &label, seed, Mode::UNORIENTED, Some(reference)) == Ordering::Less {
            return false;
        }
    }
    true
}
