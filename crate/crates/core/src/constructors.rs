//! Constructive procedures: distance packings that are automatically
//! exponentially independent, and the reduction algorithm that builds a good
//! set in a subcubic tree.
//!
//! A set `S` is *good* in a subcubic tree `T` of order `n` when it is
//! exponentially independent, contains every endvertex, and `4|S| ≥ n + 3`.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{d_neighborhood, Graph, Vertex, VertexSet};
use crate::solvers::alpha_e_exact;
use crate::weights::{is_exponentially_independent, Verifier};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("order {0} is below 4, so log log n is not positive")]
    OrderTooSmall(usize),
    #[error("input is not a tree")]
    NotATree,
    #[error("input is not subcubic (maximum degree {0})")]
    NotSubcubic(usize),
    #[error("tree must have at least 2 vertices")]
    TooFewVertices,
    #[error("invariant violation: {msg}")]
    InvariantViolation { msg: String, trace: GoodSetTrace },
}

/// Smallest `t ≥ 0` with `n ≤ 2^(2^t)`, i.e. `⌈log₂ log₂ n⌉`, plus 2.
pub fn theorem1_dstar(n: usize) -> Result<usize, ConstructError> {
    if n < 4 {
        return Err(ConstructError::OrderTooSmall(n));
    }
    // n ≤ 2^m  ⇔  bit length of n − 1 is at most m
    let bits = (usize::BITS - (n - 1).leading_zeros()) as u64;
    let mut t = 0;
    while (1u64 << t) < bits {
        t += 1;
    }
    Ok(t + 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PackingParams {
    pub dstar: usize,
}

impl PackingParams {
    pub fn new(dstar: usize) -> Option<Self> {
        (dstar >= 1).then_some(PackingParams { dstar })
    }

    pub fn min_pairwise_distance(&self) -> usize {
        2 * self.dstar + 1
    }
}

/// Marks every vertex within distance `radius` of `v`.
fn ball(g: &Graph, v: Vertex, radius: usize, seen: &mut [bool]) {
    let mut dist = vec![usize::MAX; g.order()];
    let mut queue = VecDeque::from([v]);
    dist[v] = 0;
    seen[v] = true;
    while let Some(x) = queue.pop_front() {
        if dist[x] == radius {
            continue;
        }
        for &y in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
}

/// Greedy maximal set with pairwise distance above `2·dstar`, scanning
/// vertices in ascending id order.
pub fn greedy_packing(g: &Graph, dstar: usize) -> VertexSet {
    let n = g.order();
    let mut covered = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if !covered[v] {
            out.push(v);
            ball(g, v, 2 * dstar, &mut covered);
        }
    }
    out.into()
}

/// `⌈n / (3·2^(2d*) − 2)⌉`, the size every maximal packing in a subcubic
/// graph of order `n` reaches (balls of radius `2d*` hold at most
/// `3·2^(2d*) − 2` vertices).
pub fn packing_size_bound(n: usize, dstar: usize) -> usize {
    let shift = 2 * dstar as u32;
    if shift >= 62 {
        return usize::from(n > 0);
    }
    let ball = 3u64 * (1u64 << shift) - 2;
    (n as u64).div_ceil(ball) as usize
}

/// Whether all pairs of `s` are more than `bound` apart in `g`.
pub fn pairwise_distance_exceeds(g: &Graph, s: &VertexSet, bound: usize) -> bool {
    let mask = s.to_mask(g.order());
    s.iter().all(|v| {
        let mut seen = vec![false; g.order()];
        ball(g, v, bound, &mut seen);
        (0..g.order()).all(|w| w == v || !(seen[w] && mask[w]))
    })
}

/// `|N^d(u)| ≤ 3·2^(d−1) − 1` for every vertex `u`.
pub fn expansion_condition_holds(g: &Graph, d: usize) -> bool {
    assert!(d >= 1, "d must be positive");
    let limit = if d > 60 { usize::MAX } else { 3 * (1usize << (d - 1)) - 1 };
    g.vertices().all(|u| d_neighborhood(g, u, d).len() <= limit)
}

/// Least `t` with `(2 − r)·r^t > 3·2^(2d+1)` where `r = (2^(2d) − 1)^(1/(2d))`.
///
/// `r` is irrational, so it is bracketed by `a/2^p ≤ r < (a+1)/2^p` with an
/// integer root, and both ends of the resulting interval for the left side
/// are compared with the threshold. The precision doubles until every
/// comparison is decided.
pub fn theorem1b_dstar(d: usize) -> usize {
    assert!(d >= 1, "d must be positive");
    let mut t = 1;
    loop {
        if theorem1b_condition(d, t) {
            return t;
        }
        t += 1;
    }
}

/// The strict inequality behind [`theorem1b_dstar`] at a given `t`.
pub fn theorem1b_condition(d: usize, t: usize) -> bool {
    let root = 2 * d as u32;
    let m = (BigUint::from(1u8) << (2 * d)) - 1u8;
    let threshold = BigUint::from(3u8) << (2 * d + 1);
    let mut p = 64usize;
    loop {
        // a = ⌊r · 2^p⌋
        let a: BigUint = (&m << (p * 2 * d)).nth_root(root);
        let b = &a + 1u8;
        let two = BigUint::from(1u8) << (p + 1);
        let scale = &threshold << (p * (t + 1));
        // (2 − r)·r^t lies in [(2^(p+1) − b)·a^t, (2^(p+1) − a)·b^t] / 2^(p(t+1))
        if two > b {
            let lower = (&two - &b) * a.pow(t as u32);
            if lower > scale {
                return true;
            }
        }
        let upper = (&two - &a) * b.pow(t as u32);
        if upper <= scale {
            return false;
        }
        p *= 2;
    }
}

/// Lower bound `⌈n / (3·2^(2d*) − 2)⌉` on the size of any maximal
/// `2d*`-packing, reported as the constant in the linear lower bound.
pub fn theorem1b_size_bound(n: usize, d: usize) -> usize {
    packing_size_bound(n, theorem1b_dstar(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// A vertex with two endvertex neighbours loses both.
    R1,
    /// First degree-3 vertex on a longest path sits at index ≥ 5.
    R2,
    /// Index 3, third neighbour of `w3` is an endvertex.
    R3Leaf,
    /// Index 3, third neighbour of `w3` has degree 2.
    R3Path,
    /// Index 4, hanging path of order 1, 2 or 3.
    R4One,
    R4Two,
    R4Three,
}

impl Rule {
    const ALL: [Rule; 7] = [Rule::R1, Rule::R2, Rule::R3Leaf, Rule::R3Path, Rule::R4One, Rule::R4Two, Rule::R4Three];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3Leaf => "R3a",
            Rule::R3Path => "R3b",
            Rule::R4One => "R4a",
            Rule::R4Two => "R4b",
            Rule::R4Three => "R4c",
        }
    }
}

/// One reduction step in original vertex ids: `removed` leave the tree, and
/// when lifting, `swapped` is dropped from the smaller tree's set and `added`
/// joins it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub rule: Rule,
    pub removed: Vec<Vertex>,
    pub swapped: Vertex,
    pub added: Vec<Vertex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseKind {
    /// No degree-2 vertex: all endvertices but the smallest.
    AllButOneEnd,
    /// A path of order ≥ 8: explicit gap schedule.
    Path,
    /// Order ≤ 8: exact search for a largest independent set containing
    /// every endvertex.
    Exact,
}

impl BaseKind {
    pub fn tag(self) -> &'static str {
        match self {
            BaseKind::AllButOneEnd => "all-but-one-end",
            BaseKind::Path => "path",
            BaseKind::Exact => "exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCase {
    pub kind: BaseKind,
    /// Original ids of the tree the base case was solved on.
    pub vertices: Vec<Vertex>,
    pub set: VertexSet,
}

/// Reductions in the order they were applied, followed by the base case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodSetTrace {
    pub reductions: Vec<Reduction>,
    pub base: Option<BaseCase>,
}

impl GoodSetTrace {
    /// Rebuilds the set by lifting the base set through the reductions,
    /// last reduction first.
    pub fn replay(&self) -> Option<VertexSet> {
        let mut s = self.base.as_ref()?.set.clone();
        for r in self.reductions.iter().rev() {
            s.remove(r.swapped);
            for &v in &r.added {
                s.insert(v);
            }
        }
        Some(s)
    }
}

fn write_ids(out: &mut String, ids: impl IntoIterator<Item = Vertex>) {
    for v in ids {
        let _ = write!(out, " {v}");
    }
}

impl fmt::Display for GoodSetTrace {
    /// One `rule` line per reduction, then one `base` line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = format!("# {} good-set trace\n", crate::VERSION);
        for r in &self.reductions {
            let _ = write!(out, "rule {} removed", r.rule.tag());
            write_ids(&mut out, r.removed.iter().copied());
            let _ = write!(out, " swapped {} added", r.swapped);
            write_ids(&mut out, r.added.iter().copied());
            out.push('\n');
        }
        if let Some(b) = &self.base {
            let _ = write!(out, "base {} vertices", b.kind.tag());
            write_ids(&mut out, b.vertices.iter().copied());
            out.push_str(" set");
            write_ids(&mut out, b.set.iter());
            out.push('\n');
        }
        f.write_str(&out)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("trace line {line}: {msg}")]
pub struct TraceParseError {
    pub line: usize,
    pub msg: String,
}

/// Splits `tokens` at the keywords in `keys` (which must appear in order)
/// and parses the ids between them.
fn keyed_ids(tokens: &[&str], keys: &[&str], line: usize) -> Result<Vec<Vec<Vertex>>, TraceParseError> {
    let err = |msg: String| TraceParseError { line, msg };
    let mut groups = Vec::new();
    let mut i = 0;
    for (k, key) in keys.iter().enumerate() {
        if tokens.get(i) != Some(key) {
            return Err(err(format!("expected {key:?}")));
        }
        i += 1;
        let mut ids = Vec::new();
        while i < tokens.len() && keys.get(k + 1) != Some(&tokens[i]) {
            ids.push(tokens[i].parse().map_err(|_| err(format!("{:?} is not a vertex id", tokens[i])))?);
            i += 1;
        }
        groups.push(ids);
    }
    Ok(groups)
}

impl FromStr for GoodSetTrace {
    type Err = TraceParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut reductions = Vec::new();
        let mut base = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: &str| TraceParseError { line, msg: msg.to_string() };
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            if base.is_some() {
                return Err(err("content after the base line"));
            }
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            match tokens[0] {
                "rule" => {
                    let tag = tokens.get(1).ok_or_else(|| err("missing rule id"))?;
                    let rule = Rule::ALL.into_iter().find(|r| r.tag() == *tag).ok_or_else(|| err("unknown rule id"))?;
                    let g = keyed_ids(&tokens[2..], &["removed", "swapped", "added"], line)?;
                    let [removed, swapped, added]: [Vec<Vertex>; 3] = g.try_into().expect("three groups");
                    if swapped.len() != 1 {
                        return Err(err("swapped takes exactly one vertex"));
                    }
                    reductions.push(Reduction { rule, removed, swapped: swapped[0], added });
                }
                "base" => {
                    let tag = tokens.get(1).ok_or_else(|| err("missing base kind"))?;
                    let kind = [BaseKind::AllButOneEnd, BaseKind::Path, BaseKind::Exact]
                        .into_iter()
                        .find(|k| k.tag() == *tag)
                        .ok_or_else(|| err("unknown base kind"))?;
                    let g = keyed_ids(&tokens[2..], &["vertices", "set"], line)?;
                    let [vertices, set]: [Vec<Vertex>; 2] = g.try_into().expect("two groups");
                    base = Some(BaseCase { kind, vertices, set: set.into() });
                }
                _ => return Err(err("expected 'rule' or 'base'")),
            }
        }
        Ok(GoodSetTrace { reductions, base })
    }
}

/// Checks the three goodness conditions, describing the first failure.
pub fn audit_good_set(t: &Graph, s: &VertexSet) -> Result<(), String> {
    let n = t.order();
    if let Some(v) = t.endvertices().iter().find(|&v| !s.contains(v)) {
        return Err(format!("endvertex {v} missing from {s}"));
    }
    if 4 * s.len() < n + 3 {
        return Err(format!("|S| = {} is below (n+3)/4 for n = {n}", s.len()));
    }
    let report = is_exponentially_independent(t, s);
    if let Some(v) = report.first_violation {
        return Err(format!(
            "{s} is not exponentially independent: vertex {v} has weight {}",
            report.weight_of(v).expect("entry exists")
        ));
    }
    Ok(())
}

/// Good set of a subcubic tree containing a degree-2 vertex, built by
/// repeatedly deleting 2 to 4 vertices near the end of a longest path,
/// solving the smaller tree, and lifting the answer back. Every lift is
/// re-audited on its own tree.
///
/// Trees without a degree-2 vertex get all endvertices but the smallest,
/// which is only checked for independence.
pub fn tree_good_set(t: &Graph) -> Result<(VertexSet, GoodSetTrace), ConstructError> {
    let n = t.order();
    if n < 2 {
        return Err(ConstructError::TooFewVertices);
    }
    if !t.is_tree() {
        return Err(ConstructError::NotATree);
    }
    if !t.is_subcubic() {
        return Err(ConstructError::NotSubcubic(t.max_degree()));
    }
    let mut trace = GoodSetTrace { reductions: Vec::new(), base: None };
    let violation =
        |msg: String, trace: &GoodSetTrace| ConstructError::InvariantViolation { msg, trace: trace.clone() };

    if t.degree2_vertices().is_empty() {
        let ends = t.endvertices();
        let s = ends.without(ends.as_slice()[0]);
        trace.base = Some(BaseCase { kind: BaseKind::AllButOneEnd, vertices: t.vertices().collect(), set: s.clone() });
        if !Verifier::new(t).is_ei(&s) {
            return Err(violation("all-but-one endvertex set is not independent".into(), &trace));
        }
        return Ok((s, trace));
    }

    let mut alive: Vec<Vertex> = t.vertices().collect();
    let mut levels: Vec<Vec<Vertex>> = Vec::new();
    loop {
        let (h, map) = t.induced_subgraph(&alive);
        let local = if h.is_path() && h.order() >= 8 {
            Some((BaseKind::Path, path_rule(&h)))
        } else if h.order() <= 8 {
            match alpha_e_exact(&h, &h.endvertices(), None) {
                Ok(r) => Some((BaseKind::Exact, r.witness)),
                Err(e) => return Err(violation(format!("base case on {:?}: {e}", alive), &trace)),
            }
        } else {
            None
        };
        if let Some((kind, set)) = local {
            trace.base = Some(BaseCase { kind, vertices: alive.clone(), set: set.mapped(&map) });
            break;
        }
        let Some(r) = find_reduction(&h) else {
            return Err(violation(format!("no reduction applies to the tree on {:?}", alive), &trace));
        };
        let r = Reduction {
            rule: r.rule,
            removed: r.removed.iter().map(|&v| map[v]).collect(),
            swapped: map[r.swapped],
            added: r.added.iter().map(|&v| map[v]).collect(),
        };
        levels.push(alive.clone());
        alive.retain(|v| !r.removed.contains(v));
        trace.reductions.push(r);
    }

    let base = trace.base.as_ref().expect("loop exits with a base case");
    let mut s = base.set.clone();
    let audit = |vertices: &[Vertex], s: &VertexSet| -> Result<(), String> {
        let (h, _) = t.induced_subgraph(vertices);
        let local: VertexSet = s
            .iter()
            .map(|v| vertices.binary_search(&v).map_err(|_| format!("{v} is not in this tree")))
            .collect::<Result<_, _>>()?;
        audit_good_set(&h, &local)
    };
    audit(&base.vertices, &s).map_err(|m| violation(format!("base case: {m}"), &trace))?;
    for (r, level) in trace.reductions.iter().zip(&levels).rev() {
        if !s.remove(r.swapped) {
            return Err(violation(
                format!("{} lift: swapped vertex {} not in the set", r.rule.tag(), r.swapped),
                &trace,
            ));
        }
        for &v in &r.added {
            s.insert(v);
        }
        audit(level, &s).map_err(|m| violation(format!("{} lift: {m}", r.rule.tag()), &trace))?;
    }
    Ok((s, trace))
}

/// Both ends plus interior vertices spaced 3 apart, with one trailing gap of
/// 2 or 4 when `n − 1` is not a multiple of 3.
fn path_rule(h: &Graph) -> VertexSet {
    let n = h.order();
    let start = h.endvertices().as_slice()[0];
    let mut order = Vec::with_capacity(n);
    let (mut prev, mut cur) = (usize::MAX, start);
    loop {
        order.push(cur);
        match h.neighbors(cur).iter().find(|&&w| w != prev) {
            Some(&next) => {
                prev = cur;
                cur = next;
            }
            None => break,
        }
    }
    let last = n - 1;
    let mut positions: Vec<usize> = match last % 3 {
        0 => (0..=last).step_by(3).collect(),
        2 => (0..=last - 2).step_by(3).collect(),
        _ => (0..=last - 4).step_by(3).collect(),
    };
    if *positions.last().expect("non-empty") != last {
        positions.push(last);
    }
    positions.into_iter().map(|i| order[i]).collect()
}

fn find_reduction(h: &Graph) -> Option<Reduction> {
    for v in h.vertices() {
        let leaves: Vec<Vertex> = h.neighbors(v).iter().copied().filter(|&u| h.degree(u) == 1).collect();
        if leaves.len() >= 2 {
            let added = leaves[..2].to_vec();
            return Some(Reduction { rule: Rule::R1, removed: added.clone(), swapped: v, added });
        }
    }
    diametral_paths(h).find_map(|p| reduction_on_path(h, &p).filter(|r| keeps_degree2(h, &r.removed)))
}

fn keeps_degree2(h: &Graph, removed: &[Vertex]) -> bool {
    h.vertices().any(|v| {
        !removed.contains(&v) && h.degree(v) - h.neighbors(v).iter().filter(|w| removed.contains(w)).count() == 2
    })
}

fn bfs_parents(h: &Graph, src: Vertex) -> (Vec<usize>, Vec<Vertex>) {
    let n = h.order();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::from([src]);
    dist[src] = 0;
    while let Some(x) = queue.pop_front() {
        for &y in h.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    (dist, parent)
}

/// Longest paths starting at each diametral endvertex in ascending id order,
/// each running to the smallest-id vertex farthest from its start.
fn diametral_paths(h: &Graph) -> impl Iterator<Item = Vec<Vertex>> + '_ {
    let far = |dist: &[usize]| (0..dist.len()).max_by_key(|&v| (dist[v], std::cmp::Reverse(v))).expect("non-empty");
    let (d0, _) = bfs_parents(h, 0);
    let a = far(&d0);
    let (da, _) = bfs_parents(h, a);
    let b = far(&da);
    let (db, _) = bfs_parents(h, b);
    let diam = da[b];
    // in a tree, ecc(v) = max(dist(a, v), dist(b, v)) for a diametral pair a, b
    h.vertices().filter(move |&v| da[v].max(db[v]) == diam).map(move |start| {
        let (dist, parent) = bfs_parents(h, start);
        let end = far(&dist);
        let mut path = vec![end];
        while *path.last().expect("non-empty") != start {
            path.push(parent[*path.last().expect("non-empty")]);
        }
        path.reverse();
        path
    })
}

fn reduction_on_path(h: &Graph, w: &[Vertex]) -> Option<Reduction> {
    let k = (1..w.len()).find(|&i| h.degree(w[i]) == 3)? + 1;
    let other = |x: Vertex, not: &[Vertex]| h.neighbors(x).iter().copied().find(|y| !not.contains(y));
    let red = |rule, removed: Vec<Vertex>, swapped, added| Some(Reduction { rule, removed, swapped, added });
    match k {
        3 => {
            let w2p = other(w[2], &[w[1], w[3]])?;
            match h.degree(w2p) {
                1 => red(Rule::R3Leaf, vec![w[0], w[1], w2p], w[2], vec![w[0], w2p]),
                2 => {
                    let w1p = other(w2p, &[w[2]])?;
                    (h.degree(w1p) == 1).then_some(())?;
                    red(Rule::R3Path, vec![w[0], w1p, w2p], w[1], vec![w[0], w1p])
                }
                _ => None,
            }
        }
        4 => {
            let w3p = other(w[3], &[w[2], w[4]])?;
            let mut k_path = vec![w3p];
            let (mut prev, mut cur) = (w[3], w3p);
            while h.degree(cur) == 2 {
                let next = other(cur, &[prev])?;
                k_path.push(next);
                (prev, cur) = (cur, next);
            }
            if h.degree(cur) != 1 {
                return None;
            }
            match k_path[..] {
                [a] => red(Rule::R4One, vec![w[0], w[1], w[2], a], w[3], vec![w[0], a]),
                [a, b] => red(Rule::R4Two, vec![w[0], w[1], b, a], w[2], vec![w[0], b]),
                [a, b, c] => red(Rule::R4Three, vec![w[0], c, b, a], w[1], vec![w[0], c]),
                _ => None,
            }
        }
        k if k >= 5 => red(Rule::R2, vec![w[0], w[1], w[2]], w[3], vec![w[0], w[2]]),
        _ => None,
    }
}
