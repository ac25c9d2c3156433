//! Named doodles and infinite families.
//!
//! The planar families are built from straight-line drawings on concentric
//! circles: the rotation at each crossing is read off by sorting its
//! neighbours by angle.

use std::f64::consts::PI;

use thiserror::Error;

use crate::codec::{parse_pd, CodecError, PdDocument};
use crate::canonical::Mode;
use crate::map::{dart, DoodleMap};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("{family} needs n >= {min}, got {n}")]
    TooSmall { family: &'static str, n: usize, min: usize },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("fixture {name}: {source}")]
    Fixture { name: String, source: CodecError },
}

/// A straight-line drawing of a 4-regular plane graph.
struct Drawing {
    points: Vec<(f64, f64)>,
    edges: Vec<(usize, usize)>,
}

impl Drawing {
    fn polar(r: f64, theta: f64) -> (f64, f64) {
        (r * theta.cos(), r * theta.sin())
    }

    /// Darts at each vertex in counterclockwise angular order.
    fn to_map(&self) -> DoodleMap {
        let v = self.points.len();
        let mut around: Vec<Vec<(f64, usize)>> = vec![Vec::new(); v];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            for (x, y) in [(a, b), (b, a)] {
                let (px, py) = self.points[x];
                let (qx, qy) = self.points[y];
                around[x].push(((qy - py).atan2(qx - px), 2 * e + usize::from(x != a)));
            }
        }
        let mut half_to_dart = vec![0; 2 * self.edges.len()];
        for (x, list) in around.iter_mut().enumerate() {
            assert_eq!(list.len(), 4, "vertex {x} is not 4-valent");
            list.sort_by(|p, q| p.0.total_cmp(&q.0));
            for (s, &(_, h)) in list.iter().enumerate() {
                half_to_dart[h] = dart(x, s);
            }
        }
        let mut pair = vec![0; 4 * v];
        for e in 0..self.edges.len() {
            let (a, b) = (half_to_dart[2 * e], half_to_dart[2 * e + 1]);
            pair[a] = b;
            pair[b] = a;
        }
        DoodleMap::from_pairing(pair).expect("drawings give valid pairings")
    }
}

/// Relabels so that the strand along the edge between crossings `a` and `b`
/// carries label 0.
fn label_strand_zero(map: DoodleMap, a: usize, b: usize) -> DoodleMap {
    let d = (0..4).map(|s| dart(a, s)).find(|&d| crate::map::crossing(map.pair(d)) == b).expect("adjacent");
    let l = map.label_of(d);
    map.map_labels(|x| if x == l { 0 } else if x == 0 { l } else { x })
}

/// The generalised Borromean doodle `B_n`: `B_3` is the Borromean doodle and
/// `B_4` the poppy. Crossings `0..n` form the outer ring, `n..2n` the inner.
pub fn borromean(n: usize) -> Result<DoodleMap, FamilyError> {
    if n < 3 {
        return Err(FamilyError::TooSmall { family: "borromean", n, min: 3 });
    }
    let step = 2.0 * PI / n as f64;
    let mut points = Vec::with_capacity(2 * n);
    points.extend((0..n).map(|i| Drawing::polar(2.5, step * i as f64)));
    points.extend((0..n).map(|i| Drawing::polar(1.0, step * i as f64 + step / 2.0)));
    let mut edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        edges.push((i, j));
        edges.push((n + i, n + j));
        edges.push((i, n + i));
        edges.push((j, n + i));
    }
    Ok(Drawing { points, edges }.to_map())
}

fn three_rings(n: usize, family: &'static str, outer_offset: f64) -> Result<DoodleMap, FamilyError> {
    if n < 3 {
        return Err(FamilyError::TooSmall { family, n, min: 3 });
    }
    let unit = PI / n as f64;
    // Middle ring 0..2n, inner ring 2n..3n, outer ring 3n..4n.
    let mut points = Vec::with_capacity(4 * n);
    points.extend((0..2 * n).map(|j| Drawing::polar(2.0, unit * j as f64)));
    points.extend((0..n).map(|i| Drawing::polar(1.0, unit * (2 * i) as f64 + unit / 2.0)));
    points.extend((0..n).map(|i| Drawing::polar(5.0, unit * (2 * i) as f64 + outer_offset * unit)));
    let m = |j: usize| j % (2 * n);
    let shift = if outer_offset > 1.0 { 1 } else { 0 };
    let mut edges = Vec::with_capacity(8 * n);
    for j in 0..2 * n {
        edges.push((j, m(j + 1)));
    }
    for i in 0..n {
        let (p, q) = (2 * n + i, 3 * n + i);
        edges.push((p, 2 * n + (i + 1) % n));
        edges.push((q, 3 * n + (i + 1) % n));
        edges.push((p, m(2 * i)));
        edges.push((p, m(2 * i + 1)));
        edges.push((q, m(2 * i + shift)));
        edges.push((q, m(2 * i + 1 + shift)));
    }
    Ok(label_strand_zero(Drawing { points, edges }.to_map(), 0, 1))
}

/// `C'_n`: each square shares an edge with a triangle. The central 2n-gon
/// strand has label 0.
pub fn gyro(n: usize) -> Result<DoodleMap, FamilyError> {
    three_rings(n, "gyro", 1.5)
}

/// `C''_n`: squares abut squares and triangles abut triangles. The central
/// 2n-gon strand has label 0.
pub fn ortho(n: usize) -> Result<DoodleMap, FamilyError> {
    three_rings(n, "ortho", 0.5)
}

/// One crossing on a torus: a meridian and a longitude.
pub fn hopf() -> DoodleMap {
    DoodleMap::from_pairing(vec![2, 3, 0, 1]).expect("valid")
}

/// `k` crossing-free circles.
pub fn trivial(k: usize) -> DoodleMap {
    DoodleMap::trivial(k)
}

/// Builds a family member from a name such as `borromean`, `poppy`, `gyro`,
/// `ortho`, `hopf` or `trivial`.
pub fn family(name: &str, n: Option<usize>) -> Result<DoodleMap, FamilyError> {
    match name {
        "borromean" | "b" => borromean(n.unwrap_or(3)),
        "poppy" => borromean(4),
        "gyro" => gyro(n.unwrap_or(3)),
        "ortho" => ortho(n.unwrap_or(3)),
        "hopf" => Ok(hopf()),
        "trivial" => Ok(trivial(n.unwrap_or(1))),
        other => Err(FamilyError::UnknownFamily(other.to_string())),
    }
}

macro_rules! fixtures {
    ($($name:literal => $file:literal),* $(,)?) => {
        /// Names of the shipped fixture diagrams.
        pub const FIXTURE_NAMES: &[&str] = &[$($name),*];

        /// Source text of a shipped fixture.
        pub fn fixture_text(name: &str) -> Result<&'static str, FamilyError> {
            match name {
                $($name => Ok(include_str!(concat!("../fixtures/", $file))),)*
                other => Err(FamilyError::UnknownFixture(other.to_string())),
            }
        }
    };
}

fixtures! {
    "d3.1" => "d3.1.pd",
    "d4.1" => "d4.1.pd",
    "d4.2" => "d4.2.pd",
    "d4.3" => "d4.3.pd",
    "d4.4" => "d4.4.pd",
    "d4.5" => "d4.5.pd",
    "d4.6" => "d4.6.pd",
    "d4.7" => "d4.7.pd",
    "d4.8" => "d4.8.pd",
    "d4.9" => "d4.9.pd",
    "d4.10" => "d4.10.pd",
    "d4.11" => "d4.11.pd",
    "d4.12" => "d4.12.pd",
    "d4.13" => "d4.13.pd",
    "d4.14" => "d4.14.pd",
    "d4.15" => "d4.15.pd",
    "d4.16" => "d4.16.pd",
    "d4.17" => "d4.17.pd",
    "d4.18" => "d4.18.pd",
    "d4.19" => "d4.19.pd",
    "kishino" => "kishino.pd",
    "fig19" => "fig19.pd",
    "fig20" => "fig20.pd",
}

/// A shipped fixture as a PD document.
pub fn fixture(name: &str) -> Result<PdDocument, FamilyError> {
    let text = fixture_text(name)?;
    PdDocument::parse(text).map_err(|source| FamilyError::Fixture { name: name.to_string(), source })
}

/// A shipped fixture as a map.
pub fn fixture_map(name: &str) -> Result<DoodleMap, FamilyError> {
    let doc = fixture(name)?;
    parse_pd(&doc, Mode::UNORIENTED).map_err(|source| FamilyError::Fixture { name: name.to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::find_sites;

    #[test]
    fn borromean_face_vectors() {
        for n in 3..=8 {
            let m = borromean(n).unwrap();
            let (faces, fv) = m.face_trace();
            assert_eq!(m.crossing_count(), 2 * n);
            assert_eq!(m.genus().total, 0);
            if n == 3 {
                assert_eq!(faces.len(), 8);
                assert_eq!(fv.count(3), 8);
            } else {
                assert_eq!(fv.count(3), 2 * n);
                assert_eq!(fv.count(n), 2);
            }
            assert!(find_sites(&m).is_empty());
        }
    }

    #[test]
    fn poppy_face_vector() {
        let (_, fv) = borromean(4).unwrap().face_trace();
        assert_eq!((fv.count(3), fv.count(4)), (8, 2));
        assert_eq!(fv.components[0].vertices, 8);
    }

    #[test]
    fn ring_families_face_vectors() {
        for n in 3..=7 {
            for m in [gyro(n).unwrap(), ortho(n).unwrap()] {
                let (_, fv) = m.face_trace();
                assert_eq!(m.crossing_count(), 4 * n);
                assert_eq!(m.genus().total, 0);
                if n == 3 {
                    assert_eq!(fv.count(3), 2 * n + 2);
                } else if n == 4 {
                    assert_eq!(fv.count(4), 2 * n + 2);
                    assert_eq!(fv.count(3), 2 * n);
                } else {
                    assert_eq!(fv.count(3), 2 * n);
                    assert_eq!(fv.count(4), 2 * n);
                    assert_eq!(fv.count(n), 2);
                }
            }
        }
    }

    #[test]
    fn component_counts() {
        assert_eq!(borromean(3).unwrap().component_count(), 3);
        assert_eq!(borromean(4).unwrap().component_count(), 1);
        assert_eq!(borromean(6).unwrap().component_count(), 3);
        assert_eq!(gyro(3).unwrap().component_count(), 4);
        assert_eq!(gyro(4).unwrap().component_count(), 2);
        assert_eq!(ortho(5).unwrap().component_count(), 6);
    }

    #[test]
    fn central_strand_is_labelled_zero() {
        for m in [gyro(5).unwrap(), ortho(5).unwrap()] {
            let i = m.component_index_by_label(0).unwrap();
            match &m.components()[i] {
                crate::map::Component::Strand { exits, .. } => assert_eq!(exits.len(), 10),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn rejects_small_n() {
        assert!(borromean(2).is_err());
        assert!(gyro(2).is_err());
        assert!(ortho(1).is_err());
        assert!(family("nonsense", None).is_err());
    }

    #[test]
    fn all_fixtures_parse() {
        for name in FIXTURE_NAMES {
            fixture_map(name).unwrap();
        }
        assert!(matches!(fixture("d9.9"), Err(FamilyError::UnknownFixture(_))));
    }
}
