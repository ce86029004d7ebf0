//! Blocked distances, the influence weight `w_(G,S)(u)`, and the two verifiers.
//!
//! Exact answers come from [`Dyadic`] sums. The hot paths used by the solvers
//! ([`Verifier`]) decide the same thresholds with an integer budget that is
//! exact as well and stops the traversal as soon as the outcome is fixed.

use std::fmt::Write as _;

use crate::dyadic::Dyadic;
use crate::graph::{absorbing_bfs, absorbing_bfs_visit, BfsScratch, Distance, Graph, Vertex, VertexSet};

/// Distance between `u` and `v` in `G − (S ∖ {u, v})`.
pub fn blocked_distance(g: &Graph, s: &VertexSet, u: Vertex, v: Vertex) -> Distance {
    if u == v {
        return Distance::Finite(0);
    }
    absorbing_bfs(g, u, s)[v]
}

/// Per-distance counts of members of `s` reachable from `u`; `u` itself is
/// counted at distance 0 when it belongs to `s`.
fn member_distances(g: &Graph, mask: &[bool], u: Vertex, scratch: &mut BfsScratch) -> Vec<(Vertex, usize)> {
    let mut found = Vec::new();
    absorbing_bfs_visit(
        g,
        u,
        |v| mask[v],
        scratch,
        |v, d| {
            if mask[v] {
                found.push((v, d));
            }
            true
        },
    );
    found.sort_unstable();
    found
}

fn sum_influence(found: &[(Vertex, usize)]) -> Dyadic {
    let top = found.iter().map(|&(_, d)| d).max().unwrap_or(0);
    let mut counts = vec![0u64; top + 1];
    for &(_, d) in found {
        counts[d] += 1;
    }
    Dyadic::from_distance_counts(&counts)
}

/// `w_(G,S)(u) = sum over v in S of (1/2)^(dist_(G,S)(u,v) - 1)`; unreachable
/// members contribute nothing and `u ∈ S` contributes 2 for itself.
pub fn weight(g: &Graph, s: &VertexSet, u: Vertex) -> Dyadic {
    let mask = s.to_mask(g.order());
    sum_influence(&member_distances(g, &mask, u, &mut BfsScratch::new()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Independence,
    Domination,
}

impl Mode {
    pub fn tag(self) -> &'static str {
        match self {
            Mode::Independence => "ei",
            Mode::Domination => "ed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contribution {
    pub source: Vertex,
    pub distance: usize,
    pub term: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexWeight {
    pub vertex: Vertex,
    pub weight: Dyadic,
    pub contributions: Vec<Contribution>,
    /// Whether this vertex meets the threshold of the report's mode.
    pub ok: bool,
}

/// Full decomposition of a verifier run, sorted by vertex id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightReport {
    pub mode: Mode,
    pub entries: Vec<VertexWeight>,
    pub verdict: bool,
    pub first_violation: Option<Vertex>,
}

impl WeightReport {
    pub fn entry(&self, v: Vertex) -> Option<&VertexWeight> {
        self.entries.binary_search_by_key(&v, |e| e.vertex).ok().map(|i| &self.entries[i])
    }

    pub fn weight_of(&self, v: Vertex) -> Option<&Dyadic> {
        self.entry(v).map(|e| &e.weight)
    }

    pub fn max_weight(&self) -> Dyadic {
        self.entries.iter().map(|e| &e.weight).max().cloned().unwrap_or_default()
    }

    /// Line-oriented rendering: a short header, then per vertex
    /// `u w=<num>/2^<e> (<decimal>)` followed by one indented line per
    /// contribution.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode {}", self.mode.tag());
        let _ = writeln!(out, "verdict {}", self.verdict);
        match self.first_violation {
            Some(v) => {
                let _ = writeln!(out, "first_violation {v}");
            }
            None => out.push_str("first_violation none\n"),
        }
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{} w={} ({}){}",
                e.vertex,
                e.weight,
                e.weight.to_decimal(30),
                if e.ok { "" } else { " VIOLATION" }
            );
            for c in &e.contributions {
                let _ = writeln!(out, "  from {} dist {} term {}", c.source, c.distance, c.term);
            }
        }
        out
    }
}

fn entry_for(
    g: &Graph,
    mask: &[bool],
    u: Vertex,
    skip_self: bool,
    scratch: &mut BfsScratch,
) -> (Dyadic, Vec<Contribution>) {
    let mut found = member_distances(g, mask, u, scratch);
    if skip_self {
        found.retain(|&(v, _)| v != u);
    }
    let w = sum_influence(&found);
    let contributions = found
        .into_iter()
        .map(|(source, distance)| Contribution { source, distance, term: Dyadic::influence(distance) })
        .collect();
    (w, contributions)
}

/// `S` is exponentially independent iff `w_(G, S∖{u})(u) < 1` for all `u ∈ S`.
pub fn is_exponentially_independent(g: &Graph, s: &VertexSet) -> WeightReport {
    let mask = s.to_mask(g.order());
    let mut scratch = BfsScratch::new();
    let entries: Vec<VertexWeight> = s
        .iter()
        .map(|u| {
            // S ∖ {u} as blockers: u is the BFS source, so it is expanded anyway
            let (weight, contributions) = entry_for(g, &mask, u, true, &mut scratch);
            let ok = weight.lt_one();
            VertexWeight { vertex: u, weight, contributions, ok }
        })
        .collect();
    finish(Mode::Independence, entries)
}

/// `S` is exponentially dominating iff `w_(G,S)(u) ≥ 1` for every vertex `u`.
pub fn is_exponentially_dominating(g: &Graph, s: &VertexSet) -> WeightReport {
    let mask = s.to_mask(g.order());
    let mut scratch = BfsScratch::new();
    let entries: Vec<VertexWeight> = g
        .vertices()
        .map(|u| {
            let (weight, contributions) = entry_for(g, &mask, u, false, &mut scratch);
            let ok = weight.ge_one();
            VertexWeight { vertex: u, weight, contributions, ok }
        })
        .collect();
    finish(Mode::Domination, entries)
}

fn finish(mode: Mode, entries: Vec<VertexWeight>) -> WeightReport {
    let first_violation = entries.iter().find(|e| !e.ok).map(|e| e.vertex);
    WeightReport { mode, verdict: first_violation.is_none(), first_violation, entries }
}

/// Threshold checks with early exit, reusing BFS buffers across calls.
///
/// The budget trick: scanning members in nondecreasing distance, keep
/// `V = (1 − partial sum) · 2^(d−1)` at the current depth `d`. Each member at
/// depth `d` subtracts exactly 1; moving one level deeper doubles `V`.
/// `V ≤ 0` means the sum reached 1; once `V` exceeds the number of vertices
/// the remaining members can no longer exhaust it.
pub struct Verifier<'g> {
    g: &'g Graph,
    scratch: BfsScratch,
    affected: Vec<Vertex>,
}

impl<'g> Verifier<'g> {
    pub fn new(g: &'g Graph) -> Self {
        Verifier { g, scratch: BfsScratch::new(), affected: Vec::new() }
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    /// Whether the influence on `u` from the members of `mask` other than `u`,
    /// with all members acting as blockers, is at least 1.
    pub fn reaches_one(&mut self, mask: &[bool], u: Vertex) -> bool {
        let cap = self.g.order() as i64 + 1;
        let mut level = 1usize;
        let mut budget: i64 = 1;
        let mut reached = false;
        absorbing_bfs_visit(
            self.g,
            u,
            |v| mask[v],
            &mut self.scratch,
            |v, d| {
                if d == 0 {
                    return true;
                }
                if d > level {
                    let shift = d - level;
                    if shift >= 64 {
                        return false;
                    }
                    let next = (budget as i128) << shift;
                    if next >= cap as i128 {
                        return false;
                    }
                    budget = next as i64;
                    level = d;
                }
                if mask[v] {
                    budget -= 1;
                    if budget <= 0 {
                        reached = true;
                        return false;
                    }
                }
                true
            },
        );
        reached
    }

    pub fn is_ei_mask(&mut self, mask: &[bool]) -> bool {
        (0..self.g.order()).filter(|&u| mask[u]).all(|u| !self.reaches_one(mask, u))
    }

    pub fn is_ei(&mut self, s: &VertexSet) -> bool {
        let mask = s.to_mask(self.g.order());
        self.is_ei_mask(&mask)
    }

    pub fn is_ed_mask(&mut self, mask: &[bool]) -> bool {
        (0..self.g.order()).filter(|&u| !mask[u]).all(|u| self.reaches_one(mask, u))
    }

    pub fn is_ed(&mut self, s: &VertexSet) -> bool {
        let mask = s.to_mask(self.g.order());
        self.is_ed_mask(&mask)
    }

    /// Given that `mask` is exponentially independent and `u ∉ mask`, decides
    /// whether `mask ∪ {u}` still is. Only `u` and the members reachable from
    /// `u` through non-members can change weight. `mask` is restored on return.
    pub fn can_add(&mut self, mask: &mut [bool], u: Vertex) -> bool {
        debug_assert!(!mask[u]);
        mask[u] = true;
        self.affected.clear();
        let affected = &mut self.affected;
        absorbing_bfs_visit(
            self.g,
            u,
            |v| mask[v],
            &mut self.scratch,
            |v, d| {
                if d > 0 && mask[v] {
                    affected.push(v);
                }
                true
            },
        );
        let ok = !self.reaches_one(mask, u)
            && (0..self.affected.len()).all(|i| {
                let x = self.affected[i];
                !self.reaches_one(mask, x)
            });
        mask[u] = false;
        ok
    }
}

/// Fast boolean verdicts without building a report.
pub fn is_ei(g: &Graph, s: &VertexSet) -> bool {
    Verifier::new(g).is_ei(s)
}

pub fn is_ed(g: &Graph, s: &VertexSet) -> bool {
    Verifier::new(g).is_ed(s)
}
