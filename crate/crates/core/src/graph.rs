//! Undirected simple graphs on dense vertex ids, BFS primitives (including the
//! absorbing BFS behind blocked distances) and the edge-list / DOT formats.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub type Vertex = usize;

/// Upper bound on the vertex count accepted from text input.
pub const MAX_PARSED_ORDER: usize = 1 << 24;

/// Hop count between two vertices, or `Infinite` when no admissible path exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => a.cmp(b),
            (Distance::Finite(_), Distance::Infinite) => Ordering::Less,
            (Distance::Infinite, Distance::Finite(_)) => Ordering::Greater,
            (Distance::Infinite, Distance::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {u}-{v} references a vertex outside 0..{n}")]
    OutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    Loop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    Duplicate(Vertex, Vertex),
    #[error("vertex {v} is outside 0..{n}")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("graph is not a tree")]
    NotATree,
}

/// Errors from [`parse_edge_list`]. Line numbers are 1-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input: expected header line \"n m\"")]
    Empty,
    #[error("line {line}: malformed: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: vertex id {id} out of range 0..{n}")]
    OutOfRange { line: usize, id: usize, n: usize },
    #[error("line {line}: duplicate edge {u}-{v}")]
    Duplicate { line: usize, u: Vertex, v: Vertex },
    #[error("line {line}: self-loop at vertex {v}")]
    Loop { line: usize, v: Vertex },
    #[error("line {line}: header declares {expected} edges but {found} were listed")]
    EdgeCount { line: usize, expected: usize, found: usize },
}

/// Immutable undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
            m += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::Duplicate(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph { adj, m })
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, u: Vertex) -> &[Vertex] {
        &self.adj[u]
    }

    pub fn degree(&self, u: Vertex) -> usize {
        self.adj[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.order()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        if self.order() == 0 {
            return true;
        }
        bfs_distances(self, 0).iter().all(|d| d.is_finite())
    }

    pub fn is_tree(&self) -> bool {
        self.order() >= 1 && self.m + 1 == self.order() && self.is_connected()
    }

    pub fn is_subcubic(&self) -> bool {
        self.max_degree() <= 3
    }

    /// Connected tree with maximum degree at most two.
    pub fn is_path(&self) -> bool {
        self.is_tree() && self.max_degree() <= 2
    }

    pub fn endvertices(&self) -> VertexSet {
        self.vertices().filter(|&u| self.degree(u) == 1).collect()
    }

    pub fn degree2_vertices(&self) -> VertexSet {
        self.vertices().filter(|&u| self.degree(u) == 2).collect()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `keep` (any order, duplicates ignored). Returns the
    /// new graph and the map from new ids to old ids; new ids follow old-id order.
    pub fn induced_subgraph(&self, keep: &[Vertex]) -> (Graph, Vec<Vertex>) {
        let mut old_ids: Vec<Vertex> = keep.to_vec();
        old_ids.sort_unstable();
        old_ids.dedup();
        let mut new_id = vec![usize::MAX; self.order()];
        for (i, &v) in old_ids.iter().enumerate() {
            new_id[v] = i;
        }
        let mut adj = vec![Vec::new(); old_ids.len()];
        let mut m = 0;
        for (i, &v) in old_ids.iter().enumerate() {
            for &w in &self.adj[v] {
                if new_id[w] != usize::MAX {
                    adj[i].push(new_id[w]);
                    if i < new_id[w] {
                        m += 1;
                    }
                }
            }
        }
        (Graph { adj, m }, old_ids)
    }

    /// Graph with the listed vertices deleted, plus the new-to-old id map.
    pub fn without_vertices(&self, removed: &[Vertex]) -> (Graph, Vec<Vertex>) {
        let mut gone = vec![false; self.order()];
        for &v in removed {
            gone[v] = true;
        }
        let keep: Vec<Vertex> = self.vertices().filter(|&v| !gone[v]).collect();
        self.induced_subgraph(&keep)
    }
}

/// Strictly increasing list of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Checks every id against the order `n` of the graph the set lives in.
    pub fn within(ids: impl IntoIterator<Item = Vertex>, n: usize) -> Result<Self, GraphError> {
        let set: VertexSet = ids.into_iter().collect();
        match set.0.last() {
            Some(&v) if v >= n => Err(GraphError::VertexOutOfRange { v, n }),
            _ => Ok(set),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, v);
                true
            }
        }
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(i) => {
                self.0.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn with(&self, v: Vertex) -> Self {
        let mut s = self.clone();
        s.insert(v);
        s
    }

    pub fn without(&self, v: Vertex) -> Self {
        let mut s = self.clone();
        s.remove(v);
        s
    }

    pub fn union(&self, other: &VertexSet) -> Self {
        self.iter().chain(other.iter()).collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for v in self.iter() {
            mask[v] = true;
        }
        mask
    }

    /// Maps ids through `map` (e.g. a subgraph's new-to-old table).
    pub fn mapped(&self, map: &[Vertex]) -> Self {
        self.iter().map(|v| map[v]).collect()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<Vertex>> for VertexSet {
    fn from(v: Vec<Vertex>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[Vertex; N]> for VertexSet {
    fn from(v: [Vertex; N]) -> Self {
        v.into_iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Reusable BFS buffers; one per thread in hot loops.
#[derive(Default)]
pub struct BfsScratch {
    dist: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: VecDeque<Vertex>,
}

impl BfsScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, n: usize) {
        if self.stamp.len() != n {
            self.dist = vec![0; n];
            self.stamp = vec![0; n];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.queue.clear();
    }
}

/// Core absorbing traversal: BFS from `source` where vertices with
/// `is_sink(v)` (other than the source) are reached but never expanded.
/// `visit(v, d)` is called once for every reached vertex in nondecreasing
/// order of `d`, source included; returning `false` stops the traversal.
/// Returns `false` iff the traversal was stopped early.
pub fn absorbing_bfs_visit<S, V>(g: &Graph, source: Vertex, is_sink: S, scratch: &mut BfsScratch, mut visit: V) -> bool
where
    S: Fn(Vertex) -> bool,
    V: FnMut(Vertex, usize) -> bool,
{
    scratch.reset(g.order());
    let epoch = scratch.epoch;
    scratch.stamp[source] = epoch;
    scratch.dist[source] = 0;
    scratch.queue.push_back(source);
    if !visit(source, 0) {
        return false;
    }
    while let Some(x) = scratch.queue.pop_front() {
        if x != source && is_sink(x) {
            continue;
        }
        let dx = scratch.dist[x];
        for &y in g.neighbors(x) {
            if scratch.stamp[y] != epoch {
                scratch.stamp[y] = epoch;
                scratch.dist[y] = dx + 1;
                if !visit(y, dx as usize + 1) {
                    return false;
                }
                scratch.queue.push_back(y);
            }
        }
    }
    true
}

pub fn bfs_distances(g: &Graph, u: Vertex) -> Vec<Distance> {
    let mut out = vec![Distance::Infinite; g.order()];
    absorbing_bfs_visit(
        g,
        u,
        |_| false,
        &mut BfsScratch::new(),
        |v, d| {
            out[v] = Distance::Finite(d);
            true
        },
    );
    out
}

/// Shortest walks from `u` whose internal vertices avoid `sinks ∖ {u}`.
/// For a sink `v` the entry equals the distance from `u` to `v` in
/// `G − (sinks ∖ {u, v})`.
pub fn absorbing_bfs(g: &Graph, u: Vertex, sinks: &VertexSet) -> Vec<Distance> {
    let mask = sinks.to_mask(g.order());
    let mut out = vec![Distance::Infinite; g.order()];
    absorbing_bfs_visit(
        g,
        u,
        |v| mask[v],
        &mut BfsScratch::new(),
        |v, d| {
            out[v] = Distance::Finite(d);
            true
        },
    );
    out
}

/// Vertices at distance exactly `d` from `u`.
pub fn d_neighborhood(g: &Graph, u: Vertex, d: usize) -> VertexSet {
    bfs_distances(g, u).iter().enumerate().filter(|(_, &x)| x == Distance::Finite(d)).map(|(v, _)| v).collect()
}

/// Farthest vertex from `u` (smallest id among ties) and the BFS parent array.
fn farthest(g: &Graph, u: Vertex) -> (Vertex, Vec<Vertex>) {
    let n = g.order();
    let mut parent = vec![usize::MAX; n];
    let mut best = (0usize, u);
    // neighbor lists are sorted, so each vertex is discovered through its
    // smallest-id predecessor on the previous level
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([(u, 0usize)]);
    seen[u] = true;
    while let Some((x, d)) = queue.pop_front() {
        if d > best.0 || (d == best.0 && x < best.1) {
            best = (d, x);
        }
        for &y in g.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back((y, d + 1));
            }
        }
    }
    (best.1, parent)
}

/// A diametral path of a tree via double BFS, oriented so that the end with
/// the smaller id comes first.
pub fn longest_path(t: &Graph) -> Result<Vec<Vertex>, GraphError> {
    if !t.is_tree() {
        return Err(GraphError::NotATree);
    }
    let (a, _) = farthest(t, 0);
    let (b, parent) = farthest(t, a);
    let mut path = vec![b];
    let mut x = b;
    while x != a {
        x = parent[x];
        path.push(x);
    }
    if path[0] > path[path.len() - 1] {
        path.reverse();
    }
    Ok(path)
}

/// Path between two vertices of a tree (inclusive), following BFS parents.
pub fn tree_path(t: &Graph, from: Vertex, to: Vertex) -> Vec<Vertex> {
    let n = t.order();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &y in t.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![to];
    let mut x = to;
    while x != from {
        x = parent[x];
        path.push(x);
    }
    path.reverse();
    path
}

/// Parses the edge-list format: a header line `n m` followed by `m` lines
/// `u v`. Blank lines and lines starting with `#` are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(ParseError::Empty)?;
    let (n, m) = parse_pair(hline, header)?;
    if n > MAX_PARSED_ORDER {
        return Err(ParseError::Malformed {
            line: hline,
            msg: format!("vertex count {n} exceeds the supported maximum {MAX_PARSED_ORDER}"),
        });
    }
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_edges {
        return Err(ParseError::Malformed {
            line: hline,
            msg: format!("{m} edges cannot fit in a simple graph on {n} vertices"),
        });
    }

    // every edge line takes at least four bytes
    let cap = m.min(text.len() / 4);
    let mut seen = HashSet::with_capacity(cap);
    let mut edges = Vec::with_capacity(cap);
    let mut last_line = hline;
    for (line, text) in lines {
        last_line = line;
        if edges.len() == m {
            return Err(ParseError::EdgeCount { line, expected: m, found: m + 1 });
        }
        let (u, v) = parse_pair(line, text)?;
        for id in [u, v] {
            if id >= n {
                return Err(ParseError::OutOfRange { line, id, n });
            }
        }
        if u == v {
            return Err(ParseError::Loop { line, v: u });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(ParseError::Duplicate { line, u, v });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(ParseError::EdgeCount { line: last_line, expected: m, found: edges.len() });
    }
    Ok(Graph::from_edges(n, edges).expect("edges validated line by line"))
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize), ParseError> {
    let mut it = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize, ParseError> {
        let tok = it.next().ok_or_else(|| ParseError::Malformed { line, msg: format!("missing {what}") })?;
        tok.parse::<usize>()
            .map_err(|_| ParseError::Malformed { line, msg: format!("{what} {tok:?} is not a nonnegative integer") })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if let Some(extra) = it.next() {
        return Err(ParseError::Malformed { line, msg: format!("unexpected trailing field {extra:?}") });
    }
    Ok((a, b))
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.order(), g.size());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Graphviz export; highlighted vertices are drawn filled.
pub fn to_dot(g: &Graph, highlight: &VertexSet) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for u in g.vertices() {
        if highlight.contains(u) {
            out.push_str(&format!("  {u} [style=filled, fillcolor=gold, penwidth=2];\n"));
        } else {
            out.push_str(&format!("  {u};\n"));
        }
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}
