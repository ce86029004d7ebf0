//! Deterministic generators for the extremal families, with role labels, plus
//! seeded random subcubic graphs and Prüfer-based tree enumeration.
//!
//! Vertex numbering is part of the contract (tests and label files rely on it):
//!
//! * `T_k`: block `i` (1-based) is `u_i = 3(i-1)`, `m_i = u_i + 1`, `l_i = u_i + 2`;
//!   then `p1 = 3k`, `p2 = 3k+1`, `q1 = 3k+2`, `q2 = 3k+3`.
//! * `T'_k`: block `i` starts at `13(i-1)` and holds, in order,
//!   `a m1 m2 m3 b r1 r2 c s1 s2 x y1 y2`.
//! * `T(Δ,d)` and perfect binary trees: breadth-first numbering from the root,
//!   children of a vertex are consecutive.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::weights::weight;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generator self-check failed: {0}")]
    SelfCheck(String),
    #[error("cannot add {requested} extra edges: only {added} non-adjacent pairs of degree < 3 were available")]
    Infeasible { requested: usize, added: usize },
    #[error("label file line {line}: {msg}")]
    LabelParse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    Vertex(Vertex),
    Set(VertexSet),
}

/// A graph with named roles (`a_3`, `L_2`, `root`, ...).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub name: String,
    pub graph: Graph,
    order: Vec<String>,
    labels: BTreeMap<String, Label>,
}

impl LabeledGraph {
    pub fn new(name: impl Into<String>, graph: Graph) -> Self {
        LabeledGraph { name: name.into(), graph, order: Vec::new(), labels: BTreeMap::new() }
    }

    fn put(&mut self, name: String, label: Label) {
        debug_assert!(!self.labels.contains_key(&name), "duplicate label {name}");
        self.order.push(name.clone());
        self.labels.insert(name, label);
    }

    pub fn label_vertex(&mut self, name: impl Into<String>, v: Vertex) {
        self.put(name.into(), Label::Vertex(v));
    }

    pub fn label_set(&mut self, name: impl Into<String>, s: VertexSet) {
        self.put(name.into(), Label::Set(s));
    }

    pub fn get(&self, name: &str) -> Option<&Label> {
        self.labels.get(name)
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        match self.labels.get(name) {
            Some(Label::Vertex(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn set(&self, name: &str) -> Option<&VertexSet> {
        match self.labels.get(name) {
            Some(Label::Set(s)) => Some(s),
            _ => None,
        }
    }

    /// Vertex label lookup for labels the generator is known to define.
    pub fn v(&self, name: &str) -> Vertex {
        self.vertex(name).unwrap_or_else(|| panic!("{} has no vertex label {name}", self.name))
    }

    /// Set label lookup for labels the generator is known to define.
    pub fn s(&self, name: &str) -> &VertexSet {
        self.set(name).unwrap_or_else(|| panic!("{} has no set label {name}", self.name))
    }

    pub fn label_names(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    /// Sidecar format: one `role id [id ...]` line per label, in generation order.
    pub fn labels_text(&self) -> String {
        let mut out = format!("# {} labels for {}\n", crate::VERSION, self.name);
        for name in &self.order {
            match &self.labels[name] {
                Label::Vertex(v) => {
                    let _ = writeln!(out, "{name} {v}");
                }
                Label::Set(s) => {
                    out.push_str(name);
                    for v in s.iter() {
                        let _ = write!(out, " {v}");
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Parses a label sidecar. Lines with a single id become vertex labels,
/// lines with zero or several ids become set labels.
pub fn parse_labels(text: &str, n: usize) -> Result<Vec<(String, Label)>, FamilyError> {
    let mut out: Vec<(String, Label)> = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let name = it.next().expect("non-empty line").to_string();
        if !seen.insert(name.clone()) {
            return Err(FamilyError::LabelParse { line: line_no, msg: format!("duplicate label {name:?}") });
        }
        let mut ids = Vec::new();
        for tok in it {
            let id: usize = tok
                .parse()
                .map_err(|_| FamilyError::LabelParse { line: line_no, msg: format!("{tok:?} is not a vertex id") })?;
            if id >= n {
                return Err(FamilyError::LabelParse { line: line_no, msg: format!("vertex {id} out of range 0..{n}") });
            }
            ids.push(id);
        }
        let label = if ids.len() == 1 { Label::Vertex(ids[0]) } else { Label::Set(ids.into()) };
        out.push((name, label));
    }
    Ok(out)
}

fn invalid(msg: impl Into<String>) -> FamilyError {
    FamilyError::InvalidParameter(msg.into())
}

fn build(n: usize, edges: Vec<(Vertex, Vertex)>) -> Graph {
    Graph::from_edges(n, edges).expect("generator produced a simple graph")
}

pub fn gen_path(n: usize) -> Result<LabeledGraph, FamilyError> {
    if n < 1 {
        return Err(invalid("path needs n >= 1"));
    }
    let g = build(n, (1..n).map(|i| (i - 1, i)).collect());
    let mut lg = LabeledGraph::new(format!("P_{n}"), g);
    let ends: VertexSet = if n == 1 { VertexSet::from([0]) } else { VertexSet::from([0, n - 1]) };
    lg.label_set("ends", ends);
    Ok(lg)
}

pub fn gen_cycle(n: usize) -> Result<LabeledGraph, FamilyError> {
    if n < 3 {
        return Err(invalid("cycle needs n >= 3"));
    }
    let g = build(n, (0..n).map(|i| (i, (i + 1) % n)).collect());
    Ok(LabeledGraph::new(format!("C_{n}"), g))
}

/// The 2 x `len` grid (ladder): subcubic, every vertex has at most 4 vertices
/// at distance 2.
pub fn gen_ladder(len: usize) -> Result<LabeledGraph, FamilyError> {
    if len < 2 {
        return Err(invalid("ladder needs length >= 2"));
    }
    let mut edges = Vec::new();
    for i in 0..len {
        edges.push((2 * i, 2 * i + 1));
        if i + 1 < len {
            edges.push((2 * i, 2 * i + 2));
            edges.push((2 * i + 1, 2 * i + 3));
        }
    }
    Ok(LabeledGraph::new(format!("ladder_{len}"), build(2 * len, edges)))
}

/// `T_k`: spine `u_1 .. u_k`, a pendant path `u_i m_i l_i` per block, and
/// pendant paths `p1 p2` at `u_1` and `q1 q2` at `u_k`. Order `3k + 4`.
pub fn gen_tk(k: usize) -> Result<LabeledGraph, FamilyError> {
    if k < 1 {
        return Err(invalid("T_k needs k >= 1"));
    }
    let n = 3 * k + 4;
    let u = |i: usize| 3 * (i - 1);
    let (p1, p2, q1, q2) = (3 * k, 3 * k + 1, 3 * k + 2, 3 * k + 3);
    let mut edges = Vec::new();
    for i in 1..=k {
        edges.push((u(i), u(i) + 1));
        edges.push((u(i) + 1, u(i) + 2));
        if i < k {
            edges.push((u(i), u(i + 1)));
        }
    }
    edges.extend([(u(1), p1), (p1, p2), (u(k), q1), (q1, q2)]);
    let mut lg = LabeledGraph::new(format!("T_{k}"), build(n, edges));
    for i in 1..=k {
        lg.label_vertex(format!("u_{i}"), u(i));
        lg.label_vertex(format!("m_{i}"), u(i) + 1);
        lg.label_vertex(format!("l_{i}"), u(i) + 2);
        lg.label_set(format!("V_{i}"), VertexSet::from([u(i), u(i) + 1, u(i) + 2]));
    }
    for (name, v) in [("p1", p1), ("p2", p2), ("q1", q1), ("q2", q2)] {
        lg.label_vertex(name, v);
    }
    Ok(lg)
}

/// All `k + 2` endvertices of `T_k`.
pub fn canonical_set_tk(k: usize) -> Result<VertexSet, FamilyError> {
    Ok(gen_tk(k)?.graph.endvertices())
}

const TPRIME_ROLES: [&str; 13] = ["a", "m1", "m2", "m3", "b", "r1", "r2", "c", "s1", "s2", "x", "y1", "y2"];

/// Id of role `role` in block `i` (1-based) of `T'_k`.
pub fn tprime_vertex(i: usize, role: &str) -> Vertex {
    let off = TPRIME_ROLES.iter().position(|&r| r == role).unwrap_or_else(|| panic!("unknown role {role}"));
    13 * (i - 1) + off
}

/// `T'_k`: 13-vertex blocks (spine `a m1 m2 m3`, pendant paths `b r1 r2` at
/// `a`, `c s1 s2` at `m1`, `x y1 y2` at `m2`) chained by edges `b_i a_(i+1)`.
///
/// For `k >= 2` the generator checks `w(b_1)` against `L_2` equals 11/32 and
/// refuses to return a graph that fails it.
pub fn gen_tprime(k: usize) -> Result<LabeledGraph, FamilyError> {
    if k < 1 {
        return Err(invalid("T'_k needs k >= 1"));
    }
    let v = tprime_vertex;
    let mut edges = Vec::new();
    for i in 1..=k {
        edges.extend([
            (v(i, "a"), v(i, "m1")),
            (v(i, "m1"), v(i, "m2")),
            (v(i, "m2"), v(i, "m3")),
            (v(i, "a"), v(i, "b")),
            (v(i, "b"), v(i, "r1")),
            (v(i, "r1"), v(i, "r2")),
            (v(i, "m1"), v(i, "c")),
            (v(i, "c"), v(i, "s1")),
            (v(i, "s1"), v(i, "s2")),
            (v(i, "m2"), v(i, "x")),
            (v(i, "x"), v(i, "y1")),
            (v(i, "y1"), v(i, "y2")),
        ]);
        if i < k {
            edges.push((v(i, "b"), v(i + 1, "a")));
        }
    }
    let mut lg = LabeledGraph::new(format!("T'_{k}"), build(13 * k, edges));
    for i in 1..=k {
        for role in TPRIME_ROLES {
            lg.label_vertex(format!("{role}_{i}"), v(i, role));
        }
        lg.label_set(format!("L_{i}"), VertexSet::from([v(i, "m3"), v(i, "r2"), v(i, "s2"), v(i, "y2")]));
        lg.label_set(format!("V_{i}"), (13 * (i - 1)..13 * i).collect());
    }
    if k >= 2 {
        let w = weight(&lg.graph, lg.s("L_2"), lg.v("b_1"));
        if w != Dyadic::from_parts(11, 5) {
            return Err(FamilyError::SelfCheck(format!("w(b_1) against L_2 is {w}, expected 11/2^5")));
        }
    }
    Ok(lg)
}

/// Per block the three leaves `y2 s2 r2` plus `x`, and `c_i` for every block
/// with `i ≡ phase (mod 3)`.
pub fn circles_square_set(k: usize, phase: usize) -> Result<VertexSet, FamilyError> {
    if k < 1 {
        return Err(invalid("T'_k needs k >= 1"));
    }
    if phase > 2 {
        return Err(invalid(format!("phase must be 0, 1 or 2, got {phase}")));
    }
    let mut s = VertexSet::new();
    for i in 1..=k {
        for role in ["y2", "s2", "r2", "x"] {
            s.insert(tprime_vertex(i, role));
        }
        if i % 3 == phase {
            s.insert(tprime_vertex(i, "c"));
        }
    }
    Ok(s)
}

pub fn endvertex_set(lg: &LabeledGraph) -> VertexSet {
    lg.graph.endvertices()
}

/// Rooted `T(Δ, d)`: the root has `Δ` children, every other internal vertex
/// `Δ − 1`, all leaves at depth `d`. Labels `root` and `depth_i`.
pub fn gen_tdelta(delta: usize, depth: usize) -> Result<LabeledGraph, FamilyError> {
    if delta < 3 {
        return Err(invalid("T(Δ,d) needs Δ >= 3"));
    }
    let mut levels: Vec<Vec<Vertex>> = vec![vec![0]];
    let mut edges = Vec::new();
    let mut next = 1;
    for level in 0..depth {
        let mut new_level = Vec::new();
        let fanout = if level == 0 { delta } else { delta - 1 };
        for &p in &levels[level] {
            for _ in 0..fanout {
                edges.push((p, next));
                new_level.push(next);
                next += 1;
            }
        }
        levels.push(new_level);
    }
    let mut lg = LabeledGraph::new(format!("T({delta},{depth})"), build(next, edges));
    lg.label_vertex("root", 0);
    for (i, level) in levels.into_iter().enumerate() {
        lg.label_set(format!("depth_{i}"), level.into());
    }
    Ok(lg)
}

/// Children of `v` in a breadth-first numbered rooted tree (neighbors with
/// larger ids).
pub fn children(g: &Graph, v: Vertex) -> Vec<Vertex> {
    g.neighbors(v).iter().copied().filter(|&w| w > v).collect()
}

/// One grandchild of every depth-`d` vertex of `T(4, d+2)`, always the first
/// child's first child.
pub fn grandchild_set(d: usize) -> Result<VertexSet, FamilyError> {
    grandchild_set_by(d, |_, grandchildren| grandchildren[0])
}

/// Like [`grandchild_set`] with a caller-supplied choice among the
/// grandchildren of each depth-`d` vertex.
pub fn grandchild_set_by<F>(d: usize, mut pick: F) -> Result<VertexSet, FamilyError>
where
    F: FnMut(Vertex, &[Vertex]) -> Vertex,
{
    if d < 1 {
        return Err(invalid("grandchild set needs d >= 1"));
    }
    let lg = gen_tdelta(4, d + 2)?;
    let g = &lg.graph;
    Ok(lg
        .s(&format!("depth_{d}"))
        .iter()
        .map(|v| {
            let gc: Vec<Vertex> = children(g, v).into_iter().flat_map(|c| children(g, c)).collect();
            pick(v, &gc)
        })
        .collect())
}

/// Perfect binary tree of depth `k` in heap order (children of `i` are
/// `2i+1`, `2i+2`); `n = 2^(k+1) − 1`.
pub fn gen_perfect_binary(k: usize) -> Result<LabeledGraph, FamilyError> {
    if k > 24 {
        return Err(invalid("perfect binary tree depth above 24 is not supported"));
    }
    let n = (1usize << (k + 1)) - 1;
    let g = build(n, (1..n).map(|v| ((v - 1) / 2, v)).collect());
    let mut lg = LabeledGraph::new(format!("PBT_{k}"), g);
    lg.label_vertex("root", 0);
    lg.label_set("leaves", leaf_set(k));
    Ok(lg)
}

/// The `2^k` leaves of the perfect binary tree of depth `k`.
pub fn leaf_set(k: usize) -> VertexSet {
    ((1usize << k) - 1..(1usize << (k + 1)) - 1).collect()
}

/// Random subcubic tree: starting from one vertex, each new vertex attaches
/// to a uniformly chosen existing vertex of degree below 3.
pub fn random_subcubic_tree(n: usize, seed: u64) -> Result<Graph, FamilyError> {
    if n < 1 {
        return Err(invalid("random tree needs n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (edges, _) = grow_tree(n, &mut rng);
    Ok(build(n, edges))
}

fn grow_tree(n: usize, rng: &mut ChaCha8Rng) -> (Vec<(Vertex, Vertex)>, Vec<usize>) {
    let mut deg = vec![0usize; n];
    let mut open = vec![0];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let i = rng.random_range(0..open.len());
        let p = open[i];
        edges.push((p, v));
        deg[p] += 1;
        deg[v] = 1;
        if deg[p] == 3 {
            open.swap_remove(i);
        }
        open.push(v);
    }
    (edges, deg)
}

/// A random subcubic tree plus `extra_edges` additional edges between
/// non-adjacent vertices of degree below 3.
pub fn random_subcubic_graph(n: usize, extra_edges: usize, seed: u64) -> Result<Graph, FamilyError> {
    if n < 1 {
        return Err(invalid("random graph needs n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut edges, mut deg) = grow_tree(n, &mut rng);
    let mut present: HashSet<(Vertex, Vertex)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    for added in 0..extra_edges {
        let open: Vec<Vertex> = (0..n).filter(|&v| deg[v] < 3).collect();
        let mut chosen = None;
        if open.len() >= 2 {
            for _ in 0..64 {
                let a = open[rng.random_range(0..open.len())];
                let b = open[rng.random_range(0..open.len())];
                if a != b && !present.contains(&(a.min(b), a.max(b))) {
                    chosen = Some((a.min(b), a.max(b)));
                    break;
                }
            }
        }
        if chosen.is_none() {
            let pairs: Vec<(Vertex, Vertex)> = open
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| open[i + 1..].iter().map(move |&b| (a, b)))
                .filter(|p| !present.contains(p))
                .collect();
            if pairs.is_empty() {
                return Err(FamilyError::Infeasible { requested: extra_edges, added });
            }
            chosen = Some(pairs[rng.random_range(0..pairs.len())]);
        }
        let (a, b) = chosen.expect("pair chosen above");
        present.insert((a, b));
        edges.push((a, b));
        deg[a] += 1;
        deg[b] += 1;
    }
    Ok(build(n, edges))
}

/// Decodes a Prüfer sequence over labels `0..seq.len()+2`.
pub fn prufer_decode(seq: &[usize]) -> Graph {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &a in seq {
        degree[a] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &a in seq {
        let leaf = (0..n).find(|&j| degree[j] == 1).expect("a leaf always exists");
        edges.push((leaf, a));
        degree[leaf] = 0;
        degree[a] -= 1;
    }
    let rest: Vec<Vertex> = (0..n).filter(|&j| degree[j] == 1).collect();
    edges.push((rest[0], rest[1]));
    build(n, edges)
}

/// Isomorphism-invariant code of a tree: the parenthesis encoding rooted at
/// its center (the smaller of the two encodings for a bicentral tree).
pub fn tree_code(t: &Graph) -> Vec<u8> {
    let n = t.order();
    if n <= 1 {
        return vec![b'(', b')'];
    }
    // peel leaves to find the center(s)
    let mut deg: Vec<usize> = t.vertices().map(|v| t.degree(v)).collect();
    let mut layer: Vec<Vertex> = t.vertices().filter(|&v| deg[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in t.neighbors(v) {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.iter().map(|&c| rooted_code(t, c, usize::MAX)).min().expect("a tree has at least one center")
}

fn rooted_code(t: &Graph, v: Vertex, parent: Vertex) -> Vec<u8> {
    let mut kids: Vec<Vec<u8>> =
        t.neighbors(v).iter().filter(|&&w| w != parent).map(|&w| rooted_code(t, w, v)).collect();
    kids.sort_unstable();
    let mut out = Vec::with_capacity(2 + kids.iter().map(Vec::len).sum::<usize>());
    out.push(b'(');
    for k in kids {
        out.extend(k);
    }
    out.push(b')');
    out
}

/// Stream of all labeled trees on `1..=n_max` vertices (Prüfer order) with
/// maximum degree at most `max_degree`; with `dedupe` only the first member of
/// each isomorphism class is yielded.
pub fn enumerate_trees(n_max: usize, max_degree: usize, dedupe: bool) -> TreeEnumerator {
    TreeEnumerator { n_max, max_degree, dedupe, n: 0, seq: Vec::new(), exhausted: true, seen: HashSet::new() }
}

/// All trees of order exactly `n` from [`enumerate_trees`].
pub fn enumerate_trees_of_order(n: usize, max_degree: usize, dedupe: bool) -> impl Iterator<Item = Graph> {
    let mut it = enumerate_trees(n, max_degree, dedupe);
    it.n = n.saturating_sub(1);
    it
}

pub struct TreeEnumerator {
    n_max: usize,
    max_degree: usize,
    dedupe: bool,
    n: usize,
    seq: Vec<usize>,
    exhausted: bool,
    seen: HashSet<Vec<u8>>,
}

impl TreeEnumerator {
    fn start_order(&mut self) -> bool {
        self.n += 1;
        if self.n > self.n_max {
            return false;
        }
        self.seq = vec![0; self.n.saturating_sub(2)];
        self.exhausted = false;
        self.seen.clear();
        true
    }

    fn advance(&mut self) {
        let n = self.n;
        for i in (0..self.seq.len()).rev() {
            self.seq[i] += 1;
            if self.seq[i] < n {
                return;
            }
            self.seq[i] = 0;
        }
        self.exhausted = true;
    }

    fn degrees_ok(&self) -> bool {
        let mut count = vec![1usize; self.n];
        for &a in &self.seq {
            count[a] += 1;
            if count[a] > self.max_degree {
                return false;
            }
        }
        true
    }
}

impl Iterator for TreeEnumerator {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        loop {
            if self.exhausted && !self.start_order() {
                return None;
            }
            let n = self.n;
            if n <= 2 {
                self.exhausted = true;
                if n == 2 && self.max_degree < 1 {
                    continue;
                }
                return Some(if n == 1 { Graph::empty(1) } else { build(2, vec![(0, 1)]) });
            }
            let ok = self.degrees_ok();
            let tree = ok.then(|| prufer_decode(&self.seq));
            self.advance();
            if let Some(t) = tree {
                if !self.dedupe || self.seen.insert(tree_code(&t)) {
                    return Some(t);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::is_exponentially_independent;

    fn dy(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn tk_shape() {
        assert_eq!(gen_tk(1).unwrap().graph.order(), 7);
        let t2 = gen_tk(2).unwrap();
        assert_eq!(t2.graph.order(), 10);
        let ends: VertexSet = ["l_1", "l_2", "p2", "q2"].iter().map(|r| t2.v(r)).collect();
        assert_eq!(t2.graph.endvertices(), ends);
        for k in 1..=20 {
            let t = gen_tk(k).unwrap();
            assert_eq!(t.graph.order(), 3 * k + 4);
            assert!(t.graph.is_tree() && t.graph.is_subcubic());
            assert_eq!(t.graph.endvertices().len(), k + 2);
            for i in 1..=k {
                assert_eq!(t.graph.degree(t.v(&format!("u_{i}"))), 3);
            }
        }
        assert!(gen_tk(0).is_err());
    }

    #[test]
    fn tk_canonical_sets() {
        assert_eq!(canonical_set_tk(1).unwrap().len(), 3);
        assert_eq!(canonical_set_tk(2).unwrap().len(), 4);
        let t5 = gen_tk(5).unwrap();
        let s = canonical_set_tk(5).unwrap();
        assert_eq!(s.len(), 7);
        assert!(is_exponentially_independent(&t5.graph, &s).verdict);
    }

    #[test]
    fn tprime_shape() {
        let t3 = gen_tprime(3).unwrap();
        assert_eq!(t3.graph.order(), 39);
        assert_eq!(t3.graph.endvertices().len(), 12);
        assert_eq!(endvertex_set(&t3), t3.graph.endvertices());
        for k in 1..=20 {
            let t = gen_tprime(k).unwrap();
            assert_eq!(t.graph.order(), 13 * k);
            assert!(t.graph.is_tree() && t.graph.is_subcubic());
            assert_eq!(t.graph.degree(t.v("a_1")), 2);
            for i in 2..=k {
                assert_eq!(t.graph.degree(t.v(&format!("a_{i}"))), 3);
            }
            let leaves: VertexSet = (1..=k).flat_map(|i| t.s(&format!("L_{i}")).iter().collect::<Vec<_>>()).collect();
            assert_eq!(leaves, t.graph.endvertices());
        }
    }

    #[test]
    fn tprime_weight_fingerprint() {
        for k in 3..=8 {
            let t = gen_tprime(k).unwrap();
            let g = &t.graph;
            for i in 2..k {
                let li = t.s(&format!("L_{i}"));
                let at = |r: &str, j: usize| t.v(&format!("{r}_{j}"));
                assert_eq!(weight(g, li, at("b", i - 1)), dy("11/32"));
                assert_eq!(weight(g, li, at("a", i + 1)), dy("23/64"));
                assert_eq!(weight(g, li, at("a", i)), dy("11/16"));
                assert_eq!(weight(g, li, at("b", i)), dy("23/32"));
                assert_eq!(weight(g, li, at("c", i)), dy("7/8"));
            }
        }
    }

    #[test]
    fn circles_square_basics() {
        let s = circles_square_set(1, 0).unwrap();
        assert_eq!(s.len(), 4);
        let t1 = gen_tprime(1).unwrap();
        assert!(is_exponentially_independent(&t1.graph, &s).verdict);
        assert!(circles_square_set(3, 3).is_err());
        // c_i for i = 3, 6
        let s = circles_square_set(6, 0).unwrap();
        assert_eq!(s.len(), 26);
        assert!(s.contains(tprime_vertex(3, "c")) && s.contains(tprime_vertex(6, "c")));
    }

    #[test]
    fn tdelta_orders() {
        assert_eq!(gen_tdelta(6, 2).unwrap().graph.order(), 37);
        assert_eq!(gen_tdelta(4, 3).unwrap().graph.order(), 53);
        assert_eq!(gen_tdelta(5, 0).unwrap().graph.order(), 1);
        assert!(gen_tdelta(2, 3).is_err());
        for d in 0..=6 {
            let n6 = gen_tdelta(6, d).unwrap().graph.order();
            assert_eq!(2 * n6, 3 * 5usize.pow(d as u32) - 1);
            let t4 = gen_tdelta(4, d).unwrap();
            assert_eq!(t4.graph.order(), 2 * 3usize.pow(d as u32) - 1);
            assert!(t4.graph.is_tree());
            if d >= 1 {
                assert!(!t4.graph.is_subcubic());
                assert_eq!(t4.graph.max_degree(), 4);
            }
        }
        assert!(!gen_tdelta(6, 1).unwrap().graph.is_subcubic());
    }

    #[test]
    fn grandchild_sizes() {
        for d in 1..=4 {
            let s = grandchild_set(d).unwrap();
            assert_eq!(s.len(), 4 * 3usize.pow(d as u32 - 1));
            let t = gen_tdelta(4, d + 2).unwrap();
            assert!(s.is_subset(t.s(&format!("depth_{}", d + 2))));
        }
        assert!(grandchild_set(0).is_err());
    }

    #[test]
    fn perfect_binary() {
        for k in 0..=10 {
            let t = gen_perfect_binary(k).unwrap();
            let n = t.graph.order();
            assert_eq!(n, (1 << (k + 1)) - 1);
            assert_eq!(leaf_set(k).len(), n.div_ceil(2));
            assert!(t.graph.is_subcubic());
            if k >= 1 {
                assert_eq!(leaf_set(k), t.graph.endvertices());
            }
        }
        let p3 = gen_perfect_binary(1).unwrap();
        let r = is_exponentially_independent(&p3.graph, &leaf_set(1));
        assert!(r.verdict);
        assert!(r.entries.iter().all(|e| e.weight == dy("1/2")));
    }

    #[test]
    fn random_generators_are_reproducible() {
        let a = random_subcubic_tree(100, 1).unwrap();
        let b = random_subcubic_tree(100, 1).unwrap();
        assert_eq!(crate::graph::write_edge_list(&a), crate::graph::write_edge_list(&b));
        assert!(a.is_tree() && a.is_subcubic());
        assert_ne!(a, random_subcubic_tree(100, 2).unwrap());
        let g = random_subcubic_graph(60, 10, 3).unwrap();
        assert_eq!(g.size(), 69);
        assert!(g.is_subcubic() && g.is_connected());
        assert_eq!(g, random_subcubic_graph(60, 10, 3).unwrap());
    }

    #[test]
    fn infeasible_extra_edges() {
        assert!(matches!(random_subcubic_graph(3, 5, 0), Err(FamilyError::Infeasible { .. })));
        assert!(random_subcubic_graph(0, 0, 0).is_err());
    }

    #[test]
    fn prufer_counts() {
        for n in 3..=6 {
            let count = enumerate_trees(n, usize::MAX, false).filter(|t| t.order() == n).count();
            assert_eq!(count, n.pow(n as u32 - 2));
        }
        let by_order = |n_max, max_deg| {
            let mut c = vec![0; n_max + 1];
            for t in enumerate_trees(n_max, max_deg, true) {
                assert!(t.is_tree());
                c[t.order()] += 1;
            }
            c
        };
        // free trees on 1..=9 vertices
        assert_eq!(by_order(9, usize::MAX), vec![0, 1, 1, 1, 2, 3, 6, 11, 23, 47]);
        let sub = by_order(5, 3);
        assert_eq!(sub[4], 2);
        assert_eq!(sub[5], 2);
        assert_eq!(by_order(6, 3)[6], 4);
        assert_eq!(enumerate_trees_of_order(4, 3, true).count(), 2);
        assert_eq!(enumerate_trees_of_order(5, usize::MAX, true).count(), 3);
        assert_eq!(enumerate_trees_of_order(5, 3, true).count(), 2);
        assert_eq!(enumerate_trees_of_order(1, 3, true).count(), 1);
        assert_eq!(enumerate_trees(5, 3, true).count(), 7);
    }

    #[test]
    fn tree_code_is_isomorphism_invariant() {
        let a = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let b = Graph::from_edges(5, [(3, 0), (0, 4), (4, 1), (1, 2)]).unwrap();
        assert_eq!(tree_code(&a), tree_code(&b));
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_ne!(tree_code(&a), tree_code(&star));
    }

    #[test]
    fn label_sidecar_roundtrip() {
        let t = gen_tprime(2).unwrap();
        let parsed = parse_labels(&t.labels_text(), t.graph.order()).unwrap();
        assert_eq!(parsed.len(), t.label_names().count());
        for (name, label) in parsed {
            assert_eq!(t.get(&name), Some(&label));
        }
        assert!(parse_labels("a 1\na 2", 3).is_err());
        assert!(parse_labels("a 7", 3).is_err());
    }
}
