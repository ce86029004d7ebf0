//! Exact searches for `α_e` (largest exponentially independent set),
//! `γ_e` (smallest exponentially dominating set), and maximal independent sets
//! that fail to dominate.
//!
//! Ties between optimal witnesses are broken towards the lexicographically
//! smallest sorted id sequence, so results do not depend on search internals.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{Graph, Vertex, VertexSet};
use crate::weights::{is_exponentially_dominating, is_exponentially_independent, Verifier};

/// Largest order accepted by [`alpha_e_bruteforce`].
pub const BRUTEFORCE_MAX_ORDER: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("required set {0} is not exponentially independent")]
    Infeasible(VertexSet),
    #[error("required vertex {v} out of range for a graph of order {n}")]
    RequiredOutOfRange { v: Vertex, n: usize },
    #[error("graph of order {n} is too large for exhaustive enumeration (max {max})")]
    TooLarge { n: usize, max: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    /// The time budget ran out; the witness is the best found so far.
    TimedOut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub optimum: usize,
    pub witness: VertexSet,
    pub nodes_explored: u64,
    pub status: Status,
}

impl SearchResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Key-value block followed by the witness ids on one line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "optimum {}", self.optimum);
        let _ = writeln!(
            out,
            "status {}",
            match self.status {
                Status::Optimal => "optimal",
                Status::TimedOut => "timed-out",
            }
        );
        let _ = writeln!(out, "nodes {}", self.nodes_explored);
        out.push_str("witness");
        for v in self.witness.iter() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
        out
    }
}

struct Clock {
    deadline: Option<Instant>,
    expired: bool,
}

impl Clock {
    fn new(budget: Option<Duration>) -> Self {
        Clock { deadline: budget.map(|b| Instant::now() + b), expired: false }
    }

    /// Checked every 1024 nodes to keep `Instant::now` off the hot path.
    fn tick(&mut self, nodes: u64) -> bool {
        if !self.expired && nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                self.expired = Instant::now() >= d;
            }
        }
        self.expired
    }
}

struct Bnb<'g> {
    ver: Verifier<'g>,
    mask: Vec<bool>,
    current: Vec<Vertex>,
    best: Vec<Vertex>,
    nodes: u64,
    clock: Clock,
}

impl Bnb<'_> {
    fn search(&mut self, cands: &[Vertex]) {
        self.nodes += 1;
        if self.clock.tick(self.nodes) {
            return;
        }
        if self.current.len() > self.best.len() {
            self.best.clone_from(&self.current);
        }
        if self.current.len() + cands.len() <= self.best.len() {
            return;
        }
        let (&v, rest) = cands.split_first().expect("bound keeps cands non-empty");
        self.mask[v] = true;
        self.current.push(v);
        let mut kept = Vec::with_capacity(rest.len());
        for &w in rest {
            if self.ver.can_add(&mut self.mask, w) {
                kept.push(w);
            }
        }
        self.search(&kept);
        self.current.pop();
        self.mask[v] = false;
        self.search(rest);
    }
}

fn check_required(g: &Graph, required: &VertexSet) -> Result<(), SolverError> {
    if let Some(v) = required.iter().find(|&v| v >= g.order()) {
        return Err(SolverError::RequiredOutOfRange { v, n: g.order() });
    }
    if !is_exponentially_independent(g, required).verdict {
        return Err(SolverError::Infeasible(required.clone()));
    }
    Ok(())
}

/// Maximum exponentially independent set containing `required`.
///
/// Include/exclude branching over vertices in ascending id order. A
/// candidate is dropped as soon as adding it to the current set breaks
/// independence, which is sound because every subset of an independent set is
/// independent. A subtree is cut when the current size plus the remaining
/// candidates cannot beat the incumbent.
pub fn alpha_e_exact(
    g: &Graph,
    required: &VertexSet,
    time_budget: Option<Duration>,
) -> Result<SearchResult, SolverError> {
    alpha_e_exact_excluding(g, required, &VertexSet::new(), time_budget)
}

/// [`alpha_e_exact`] with the vertices of `excluded` removed from the
/// candidate pool (they may still lie on paths between members).
pub fn alpha_e_exact_excluding(
    g: &Graph,
    required: &VertexSet,
    excluded: &VertexSet,
    time_budget: Option<Duration>,
) -> Result<SearchResult, SolverError> {
    check_required(g, required)?;
    let n = g.order();
    let mut ver = Verifier::new(g);
    let mut mask = required.to_mask(n);
    let mut cands = Vec::new();
    for v in g.vertices() {
        if !mask[v] && !excluded.contains(v) && ver.can_add(&mut mask, v) {
            cands.push(v);
        }
    }
    let mut bnb = Bnb { ver, mask, current: Vec::new(), best: Vec::new(), nodes: 0, clock: Clock::new(time_budget) };
    bnb.search(&cands);
    let witness = required.union(&bnb.best.iter().copied().collect());
    Ok(SearchResult {
        optimum: witness.len(),
        witness,
        nodes_explored: bnb.nodes,
        status: if bnb.clock.expired { Status::TimedOut } else { Status::Optimal },
    })
}

/// Size-`s` subsets of `0..n` in lexicographic order, as index vectors.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    first: bool,
}

impl Combinations {
    fn new(n: usize, s: usize) -> Self {
        Combinations { n, idx: (0..s).collect(), first: true }
    }

    fn advance(&mut self) -> Option<&[usize]> {
        let s = self.idx.len();
        if s > self.n {
            return None;
        }
        if self.first {
            self.first = false;
            return Some(&self.idx);
        }
        let mut i = s;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] < self.n - s + i {
                break;
            }
        }
        self.idx[i] += 1;
        for j in i + 1..s {
            self.idx[j] = self.idx[j - 1] + 1;
        }
        Some(&self.idx)
    }
}

/// Exhaustive `α_e`: sizes are tried from `n` downwards and, per size, all
/// subsets in lexicographic order, each checked by a full (non-incremental)
/// verification. Meant as a test oracle for [`alpha_e_exact`].
pub fn alpha_e_bruteforce(g: &Graph) -> Result<SearchResult, SolverError> {
    let n = g.order();
    if n > BRUTEFORCE_MAX_ORDER {
        return Err(SolverError::TooLarge { n, max: BRUTEFORCE_MAX_ORDER });
    }
    let mut ver = Verifier::new(g);
    let mut nodes = 0u64;
    let mut mask = vec![false; n];
    for s in (0..=n).rev() {
        let mut combos = Combinations::new(n, s);
        while let Some(idx) = combos.advance() {
            nodes += 1;
            mask.iter_mut().for_each(|m| *m = false);
            for &i in idx {
                mask[i] = true;
            }
            if ver.is_ei_mask(&mask) {
                let witness: VertexSet = idx.iter().copied().collect();
                return Ok(SearchResult { optimum: s, witness, nodes_explored: nodes, status: Status::Optimal });
            }
        }
    }
    unreachable!("the empty set is always independent")
}

/// Minimum exponentially dominating set by increasing size; disconnected
/// graphs are solved per component and the results combined. No pruning is
/// applied since adding vertices can block paths and destroy domination.
///
/// On timeout the result carries a greedy upper bound instead.
pub fn gamma_e_exact(g: &Graph, time_budget: Option<Duration>) -> SearchResult {
    let mut clock = Clock::new(time_budget);
    let mut witness = VertexSet::new();
    let mut nodes = 0u64;
    let mut timed_out = false;
    for comp in g.components() {
        let (h, map) = g.induced_subgraph(&comp);
        let part = if timed_out { None } else { gamma_component(&h, &mut clock, &mut nodes) };
        let part = part.unwrap_or_else(|| {
            timed_out = true;
            greedy_dominating(&h)
        });
        witness = witness.union(&part.mapped(&map));
    }
    SearchResult {
        optimum: witness.len(),
        witness,
        nodes_explored: nodes,
        status: if timed_out { Status::TimedOut } else { Status::Optimal },
    }
}

fn gamma_component(h: &Graph, clock: &mut Clock, nodes: &mut u64) -> Option<VertexSet> {
    let n = h.order();
    let mut ver = Verifier::new(h);
    let mut mask = vec![false; n];
    for s in 1..=n {
        let mut combos = Combinations::new(n, s);
        while let Some(idx) = combos.advance() {
            *nodes += 1;
            if clock.tick(*nodes) {
                return None;
            }
            mask.iter_mut().for_each(|m| *m = false);
            for &i in idx {
                mask[i] = true;
            }
            if ver.is_ed_mask(&mask) {
                return Some(idx.iter().copied().collect());
            }
        }
    }
    unreachable!("the full vertex set dominates")
}

/// Repeatedly adds the vertex that leaves the fewest under-weighted vertices
/// (smallest id on ties). Terminates because the full vertex set dominates.
pub fn greedy_dominating(g: &Graph) -> VertexSet {
    let n = g.order();
    let mut ver = Verifier::new(g);
    let mut mask = vec![false; n];
    let deficit = |ver: &mut Verifier, mask: &[bool]| (0..n).filter(|&u| !mask[u] && !ver.reaches_one(mask, u)).count();
    let mut current = deficit(&mut ver, &mask);
    while current > 0 {
        let mut best: Option<(usize, Vertex)> = None;
        for v in 0..n {
            if mask[v] {
                continue;
            }
            mask[v] = true;
            let d = deficit(&mut ver, &mask);
            mask[v] = false;
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        let (d, v) = best.expect("some vertex is outside the set while a deficit remains");
        mask[v] = true;
        current = d;
    }
    (0..n).filter(|&v| mask[v]).collect()
}

/// First set, in lexicographic order, that is exponentially independent,
/// inclusion-maximal among such sets, and not exponentially dominating.
pub fn find_maximal_ei_not_ed(g: &Graph) -> Option<VertexSet> {
    let n = g.order();
    let mut ver = Verifier::new(g);
    let mut mask = vec![false; n];
    let mut current = Vec::new();
    let cands: Vec<Vertex> = g.vertices().collect();
    maximal_search(&mut ver, &mut mask, &mut current, &cands)
}

fn maximal_search(
    ver: &mut Verifier,
    mask: &mut [bool],
    current: &mut Vec<Vertex>,
    cands: &[Vertex],
) -> Option<VertexSet> {
    if cands.is_empty() {
        let n = mask.len();
        let maximal = (0..n).all(|v| mask[v] || !ver.can_add(mask, v));
        if maximal && !ver.is_ed_mask(mask) {
            return Some(current.iter().copied().collect());
        }
        return None;
    }
    for (i, &v) in cands.iter().enumerate() {
        mask[v] = true;
        current.push(v);
        let kept: Vec<Vertex> = cands[i + 1..].iter().copied().filter(|&w| ver.can_add(mask, w)).collect();
        let found = maximal_search(ver, mask, current, &kept);
        current.pop();
        mask[v] = false;
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Certificate that a set is a maximal independent set failing to dominate:
/// the domination report's first under-weighted vertex.
pub fn ed_violation(g: &Graph, s: &VertexSet) -> Option<Vertex> {
    is_exponentially_dominating(g, s).first_violation
}
