//! Finite graphs with levels and empirical checks of the confluence lemmas.
//!
//! An edge always joins two different levels and is read downwards: the
//! higher end collapses to the lower one.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::canonical::{canonical_code, CanonicalCode, Mode};
use crate::map::DoodleMap;
use crate::moves::{apply_site, find_sites};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabError {
    #[error("edge {0} -- {1} joins equal levels")]
    FlatEdge(String, String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("search budget of {0} states exceeded")]
    Budget(usize),
}

pub type NodeId = usize;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LeveledGraph {
    names: Vec<String>,
    levels: Vec<i64>,
    index: HashMap<String, NodeId>,
    adjacent: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl LeveledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, level: i64) -> Result<NodeId, LabError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(LabError::DuplicateNode(name));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.levels.push(level);
        self.adjacent.push(Vec::new());
        Ok(id)
    }

    /// Adds an undirected edge; repeated edges are ignored.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<(), LabError> {
        if self.levels[a] == self.levels[b] {
            return Err(LabError::FlatEdge(self.names[a].clone(), self.names[b].clone()));
        }
        if !self.adjacent[a].contains(&b) {
            self.adjacent[a].push(b);
            self.adjacent[b].push(a);
            self.edges.push((a.min(b), a.max(b)));
        }
        Ok(())
    }

    pub fn add_edge_by_name(&mut self, a: &str, b: &str) -> Result<(), LabError> {
        let a = self.id(a)?;
        let b = self.id(b)?;
        self.add_edge(a, b)
    }

    pub fn id(&self, name: &str) -> Result<NodeId, LabError> {
        self.index.get(name).copied().ok_or_else(|| LabError::UnknownNode(name.to_string()))
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n]
    }

    pub fn level(&self, n: NodeId) -> i64 {
        self.levels[n]
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbours(&self, n: NodeId) -> &[NodeId] {
        &self.adjacent[n]
    }

    /// Nodes one collapse below `n`.
    pub fn below(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacent[n].iter().copied().filter(move |&m| self.levels[m] < self.levels[n])
    }

    /// Path components as lists of nodes.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.node_count()];
        let mut out = Vec::new();
        for s in 0..self.node_count() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &m in &self.adjacent[comp[i]] {
                    if !seen[m] {
                        seen[m] = true;
                        comp.push(m);
                    }
                }
                i += 1;
            }
            out.push(comp);
        }
        out
    }
}

impl fmt::Display for LeveledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, level) in self.names.iter().zip(&self.levels) {
            writeln!(f, "node {name} {level}")?;
        }
        for &(a, b) in &self.edges {
            writeln!(f, "edge {} {}", self.names[a], self.names[b])?;
        }
        Ok(())
    }
}

impl FromStr for LeveledGraph {
    type Err = LabError;

    /// Lines `node <name> <level>` and `edge <name> <name>`; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, LabError> {
        let mut g = LeveledGraph::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: &str| LabError::Syntax { line: i + 1, message: message.to_string() };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["node", name, level] => {
                    let level = level.parse().map_err(|_| syntax("level is not an integer"))?;
                    g.add_node(*name, level)?;
                }
                ["edge", a, b] => g.add_edge_by_name(a, b)?,
                _ => return Err(syntax("expected `node <name> <level>` or `edge <a> <b>`")),
            }
        }
        Ok(g)
    }
}

/// No infinite descending path: the descent relation is acyclic.
pub fn check_fdpp(g: &LeveledGraph) -> bool {
    let n = g.node_count();
    let mut indegree = vec![0usize; n];
    for u in 0..n {
        for v in g.below(u) {
            indegree[v] += 1;
        }
    }
    let mut queue: VecDeque<NodeId> = (0..n).filter(|&u| indegree[u] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop_front() {
        removed += 1;
        for v in g.below(u) {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    removed == n
}

/// Sinks of the descent relation.
pub fn roots(g: &LeveledGraph) -> Vec<NodeId> {
    (0..g.node_count()).filter(|&u| g.below(u).next().is_none()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Descent {
    /// Always take the lowest neighbour, ties by insertion order.
    Steepest,
    /// Always take the first neighbour below.
    First,
}

pub fn descend(g: &LeveledGraph, from: NodeId, how: Descent) -> NodeId {
    let mut u = from;
    loop {
        let next = match how {
            Descent::First => g.below(u).next(),
            Descent::Steepest => g.below(u).min_by_key(|&v| g.level(v)),
        };
        match next {
            Some(v) => u = v,
            None => return u,
        }
    }
}

/// Every path component holds exactly one root.
pub fn check_urp(g: &LeveledGraph) -> bool {
    let is_root: Vec<bool> = (0..g.node_count()).map(|u| g.below(u).next().is_none()).collect();
    g.components().iter().all(|c| c.iter().filter(|&&u| is_root[u]).count() == 1)
}

/// Local diamond condition: for every simple peak `X <- U -> Y` there is a
/// path from `X` to `Y` whose own simple peaks all lie one collapse below `U`.
/// The search runs over states (node, arrived from below) and fails with
/// [`LabError::Budget`] after `budget` state visits in total.
pub fn check_ldc(g: &LeveledGraph, budget: usize) -> Result<bool, LabError> {
    let mut spent = 0;
    for u in 0..g.node_count() {
        let lower: Vec<NodeId> = g.below(u).collect();
        let allowed: HashSet<NodeId> = lower.iter().copied().collect();
        for (i, &x) in lower.iter().enumerate() {
            for &y in &lower[i + 1..] {
                if !peak_resolves(g, x, y, &allowed, budget, &mut spent)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn peak_resolves(
    g: &LeveledGraph,
    x: NodeId,
    y: NodeId,
    allowed: &HashSet<NodeId>,
    budget: usize,
    spent: &mut usize,
) -> Result<bool, LabError> {
    let mut seen = HashSet::from([(x, false)]);
    let mut queue = VecDeque::from([(x, false)]);
    while let Some((k, from_below)) = queue.pop_front() {
        *spent += 1;
        if *spent > budget {
            return Err(LabError::Budget(budget));
        }
        for &m in g.neighbours(k) {
            let peak = from_below && g.level(m) < g.level(k);
            if peak && !allowed.contains(&k) {
                continue;
            }
            if m == y {
                return Ok(true);
            }
            let state = (m, g.level(k) < g.level(m));
            if seen.insert(state) {
                queue.push_back(state);
            }
        }
    }
    Ok(false)
}

/// Two roots under one peak: fails both the unique-root property and the
/// local diamond condition.
pub fn two_root_peak() -> LeveledGraph {
    "node A 2\nnode X 1\nnode Y 1\nedge A X\nedge A Y\n".parse().expect("well-formed")
}

/// Random graph on `nodes` vertices with levels in `0..levels` and each
/// pair of different levels joined with probability `p`.
pub fn random_graph(nodes: usize, levels: i64, p: f64, rng: &mut impl Rng) -> LeveledGraph {
    let mut g = LeveledGraph::new();
    for i in 0..nodes {
        g.add_node(format!("n{i}"), rng.gen_range(0..levels.max(1))).expect("fresh names");
    }
    for a in 0..nodes {
        for b in a + 1..nodes {
            if g.level(a) != g.level(b) && rng.gen_bool(p) {
                g.add_edge(a, b).expect("levels differ");
            }
        }
    }
    g
}

/// Descent closure of `seed` under monogon and bigon removals. Nodes are
/// unoriented canonical codes in hex, levels are crossings minus Euler
/// characteristic.
pub fn doodle_subgraph(seed: &DoodleMap, max_nodes: usize) -> Result<LeveledGraph, LabError> {
    let mut g = LeveledGraph::new();
    let mut ids: BTreeMap<CanonicalCode, NodeId> = BTreeMap::new();
    let code = canonical_code(seed, Mode::UNORIENTED);
    let root = g.add_node(code.to_hex(), seed.level())?;
    ids.insert(code, root);
    let mut queue = VecDeque::from([(seed.clone(), root)]);
    while let Some((map, id)) = queue.pop_front() {
        for site in find_sites(&map) {
            let next = apply_site(&map, &site).expect("fresh sites apply");
            let code = canonical_code(&next, Mode::UNORIENTED);
            let nid = match ids.get(&code) {
                Some(&n) => n,
                None => {
                    if g.node_count() >= max_nodes {
                        return Err(LabError::Budget(max_nodes));
                    }
                    let n = g.add_node(code.to_hex(), next.level())?;
                    ids.insert(code, n);
                    queue.push_back((next, n));
                    n
                }
            };
            g.add_edge(id, nid)?;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{borromean, trivial};
    use crate::moves::{apply_h1_plus, apply_h2_plus, random_expansion, ArcRef, Chirality};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph(text: &str) -> LeveledGraph {
        text.parse().unwrap()
    }

    #[test]
    fn chain() {
        let g = graph("node A 3\nnode B 2\nnode C 1\nedge A B\nedge B C");
        assert!(check_fdpp(&g));
        assert_eq!(roots(&g), vec![2]);
        assert_eq!(descend(&g, 0, Descent::First), 2);
        assert!(check_urp(&g));
        assert!(check_ldc(&g, 1000).unwrap());
    }

    #[test]
    fn empty_graph() {
        let g = LeveledGraph::new();
        assert!(check_fdpp(&g) && check_urp(&g) && check_ldc(&g, 1).unwrap());
        assert!(roots(&g).is_empty());
    }

    #[test]
    fn diamond() {
        let g = graph("node A 3\nnode X 2\nnode Y 2\nnode V 1\nedge A X\nedge A Y\nedge X V\nedge Y V");
        assert_eq!(roots(&g), vec![g.id("V").unwrap()]);
        assert!(check_urp(&g));
        assert!(check_ldc(&g, 1000).unwrap());
    }

    #[test]
    fn two_roots() {
        let g = two_root_peak();
        assert!(!check_urp(&g));
        assert!(!check_ldc(&g, 1000).unwrap());
    }

    #[test]
    fn flat_edges_and_syntax_errors() {
        assert!(matches!("node A 1\nnode B 1\nedge A B".parse::<LeveledGraph>(), Err(LabError::FlatEdge(..))));
        assert!(matches!("node A x".parse::<LeveledGraph>(), Err(LabError::Syntax { line: 1, .. })));
        assert!(matches!("edge A B".parse::<LeveledGraph>(), Err(LabError::UnknownNode(_))));
    }

    #[test]
    fn text_round_trip() {
        let g = random_graph(12, 4, 0.3, &mut ChaCha8Rng::seed_from_u64(3));
        let back: LeveledGraph = g.to_string().parse().unwrap();
        assert_eq!(back.to_string(), g.to_string());
    }

    #[test]
    fn budget_is_reported() {
        let g = random_graph(30, 5, 0.4, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(check_ldc(&g, 3), Err(LabError::Budget(3)));
    }

    #[test]
    fn ldc_implies_urp_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut with_ldc = 0;
        for _ in 0..200 {
            let n = rng.gen_range(2..10);
            let g = random_graph(n, 4, 0.35, &mut rng);
            assert!(check_fdpp(&g));
            if check_ldc(&g, 1_000_000).unwrap() {
                with_ldc += 1;
                assert!(check_urp(&g), "{g}");
            }
        }
        assert!(with_ldc > 0);
    }

    #[test]
    fn curl_descends_to_a_circle() {
        let curl = apply_h1_plus(&trivial(1), ArcRef::Circle(0), Chirality::Left).unwrap();
        let g = doodle_subgraph(&curl, 100).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        let r = roots(&g);
        assert_eq!(g.name(r[0]), canonical_code(&trivial(1), Mode::UNORIENTED).to_hex());
    }

    #[test]
    fn double_bigon_descends_to_two_circles() {
        let m = apply_h2_plus(&trivial(2), ArcRef::Circle(0), ArcRef::Circle(1)).unwrap();
        let g = doodle_subgraph(&m, 100).unwrap();
        let r = roots(&g);
        assert_eq!(r.len(), 1);
        assert_eq!(g.name(r[0]), canonical_code(&trivial(2), Mode::UNORIENTED).to_hex());
    }

    #[test]
    fn expanded_borromean_has_one_root() {
        let b3 = borromean(3).unwrap();
        let target = canonical_code(&b3, Mode::UNORIENTED).to_hex();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let m = random_expansion(&b3, 3, &mut rng);
            let g = doodle_subgraph(&m, 100_000).unwrap();
            assert!(check_fdpp(&g));
            let r = roots(&g);
            assert_eq!(r.len(), 1);
            assert_eq!(g.name(r[0]), target);
            assert!(check_ldc(&g, 10_000_000).unwrap());
        }
    }
}
