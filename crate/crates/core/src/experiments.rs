//! Reproducible experiments producing CSV tables: bound tables over graph
//! corpora, the random-set probability in perfect binary trees, the γ_e ≤ α_e
//! scan over small trees, and the endvertex-forcing study on `T'_k`.
//!
//! Identical configurations give byte-identical output, independent of the
//! number of worker threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::constructors::{greedy_packing, theorem1_dstar, tree_good_set, ConstructError};
use crate::dyadic::Dyadic;
use crate::families::{
    enumerate_trees, gen_cycle, gen_path, gen_perfect_binary, gen_tk, gen_tprime, random_subcubic_graph,
    random_subcubic_tree, FamilyError,
};
use crate::graph::{Graph, VertexSet};
use crate::solvers::{alpha_e_exact, alpha_e_exact_excluding, find_maximal_ei_not_ed, gamma_e_exact, SolverError};
use crate::weights::{is_exponentially_dominating, is_exponentially_independent, weight, Verifier};

/// Largest order for which tables report an exact α_e.
pub const EXACT_ALPHA_MAX: usize = 20;
/// Largest order for which tables report an exact γ_e.
pub const EXACT_GAMMA_MAX: usize = 16;
/// Largest tree order accepted by the conjecture scan.
pub const SCAN_MAX_ORDER: usize = 10;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("corpus item {item:?}: {msg}")]
    Corpus { item: String, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("row has {found} cells, table has {expected} columns")]
    ColumnCount { expected: usize, found: usize },
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("witness failed re-verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

type Result<T> = std::result::Result<T, ExperimentError>;

fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidParameter(msg.into())
}

/// Name, seed and string parameters of one experiment run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        ExperimentConfig { name: name.into(), seed, ..Default::default() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| invalid(format!("{key}={v:?} does not parse"))),
        }
    }

    /// Comment lines echoing the configuration (without the output path,
    /// which does not affect results).
    pub fn echo(&self) -> Vec<String> {
        let mut lines =
            vec![crate::VERSION.to_string(), format!("experiment {}", self.name), format!("seed {}", self.seed)];
        lines.extend(self.params.iter().map(|(k, v)| format!("param {k}={v}")));
        lines
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Bool(bool),
    Text(String),
    Dyadic(Dyadic),
    /// Fixed six-decimal rendering.
    Float(f64),
    /// Not applicable or not decided.
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Dyadic(d) => d.to_string(),
            Cell::Float(x) => format!("{x:.6}"),
            Cell::Empty => String::new(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<bool>> for Cell {
    fn from(v: Option<bool>) -> Self {
        v.map_or(Cell::Empty, Cell::Bool)
    }
}

/// A dyadic value as the `p/2^e` cell and its decimal companion.
pub fn dyadic_cells(d: &Dyadic) -> [Cell; 2] {
    [Cell::Dyadic(d.clone()), Cell::Text(d.to_decimal(12))]
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), footer: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(ExperimentError::ColumnCount { expected: self.header.len(), found: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Cell of `row` under column `name`, rendered.
    pub fn get(&self, row: usize, name: &str) -> Option<String> {
        Some(self.rows.get(row)?.get(self.column(name)?)?.render())
    }

    /// RFC 4180 body followed by `# ` footer lines.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| ExperimentError::Csv(e.into_error().into()))?;
        let mut out = String::from_utf8(bytes).expect("cells are UTF-8");
        for line in &self.footer {
            let _ = writeln!(out, "# {line}");
        }
        Ok(out)
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

/// One graph of a corpus.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
}

fn parse_range(item: &str, text: &str) -> Result<RangeInclusive<usize>> {
    let bad = |msg: &str| ExperimentError::Corpus { item: item.to_string(), msg: msg.to_string() };
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("{s:?} is not a number")));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let v = num(text)?;
            (v, v)
        }
    };
    if a > b {
        return Err(bad("empty range"));
    }
    if b - a > 10_000 {
        return Err(bad("range too long"));
    }
    Ok(a..=b)
}

/// Parses a corpus spec: items separated by commas or whitespace, each one of
/// `tk:A..B`, `tprime:A..B`, `pbt:A..B`, `path:A..B`, `cycle:A..B`,
/// `random-tree:N@SEEDS`, `random-graph:N+E@SEEDS` or `trees:N` (all
/// trees up to order `N`, one per isomorphism class). Single values are
/// accepted in place of ranges.
pub fn parse_corpus(spec: &str) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for item in spec.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
        let bad = |msg: &str| ExperimentError::Corpus { item: item.to_string(), msg: msg.to_string() };
        let (kind, arg) = item.split_once(':').ok_or_else(|| bad("expected kind:arguments"))?;
        let wrap = |e: FamilyError| bad(&e.to_string());
        match kind {
            "tk" | "tprime" | "pbt" | "path" | "cycle" => {
                for v in parse_range(item, arg)? {
                    let lg = match kind {
                        "tk" => gen_tk(v),
                        "tprime" => gen_tprime(v),
                        "pbt" if v > 16 => return Err(bad("depth above 16")),
                        "pbt" => gen_perfect_binary(v),
                        "path" => gen_path(v),
                        _ => gen_cycle(v),
                    }
                    .map_err(wrap)?;
                    out.push(Instance { name: lg.name, graph: lg.graph });
                }
            }
            "random-tree" | "random-graph" => {
                let (shape, seeds) = arg.split_once('@').ok_or_else(|| bad("expected N@SEED"))?;
                let (n, extra) = match (kind, shape.split_once('+')) {
                    ("random-graph", Some((n, e))) => (n, e),
                    ("random-graph", None) => return Err(bad("expected N+E@SEED")),
                    _ => (shape, "0"),
                };
                let n: usize = n.parse().map_err(|_| bad("order is not a number"))?;
                let extra: usize = extra.parse().map_err(|_| bad("edge count is not a number"))?;
                if n > 100_000 {
                    return Err(bad("order above 100000"));
                }
                for seed in parse_range(item, seeds)? {
                    let (g, name) = if kind == "random-tree" {
                        (random_subcubic_tree(n, seed as u64), format!("random-tree:{n}@{seed}"))
                    } else {
                        (random_subcubic_graph(n, extra, seed as u64), format!("random-graph:{n}+{extra}@{seed}"))
                    };
                    out.push(Instance { name, graph: g.map_err(wrap)? });
                }
            }
            "trees" => {
                let n: usize = arg.parse().map_err(|_| bad("order is not a number"))?;
                if n > SCAN_MAX_ORDER {
                    return Err(bad(&format!("tree enumeration is limited to order {SCAN_MAX_ORDER}")));
                }
                let mut counts = vec![0usize; n + 1];
                for t in enumerate_trees(n, usize::MAX, true) {
                    let order = t.order();
                    counts[order] += 1;
                    out.push(Instance { name: format!("tree:{order}#{}", counts[order]), graph: t });
                }
            }
            _ => return Err(bad("unknown kind")),
        }
    }
    Ok(out)
}

fn verify_ei(g: &Graph, s: &VertexSet, what: &str) -> Result<()> {
    if is_exponentially_independent(g, s).verdict {
        Ok(())
    } else {
        Err(ExperimentError::Verification(format!("{what}: {s} is not exponentially independent")))
    }
}

fn verify_ed(g: &Graph, s: &VertexSet, what: &str) -> Result<()> {
    if is_exponentially_dominating(g, s).verdict {
        Ok(())
    } else {
        Err(ExperimentError::Verification(format!("{what}: {s} is not exponentially dominating")))
    }
}

/// `n / (3·2^6·log₂²n)`; `None` below order 2 where the expression degenerates.
pub fn log_lower_bound(n: usize) -> Option<f64> {
    (n >= 2).then(|| {
        let l = (n as f64).log2();
        n as f64 / (192.0 * l * l)
    })
}

/// Per instance: order, exact α_e (or the best constructive lower bound above
/// [`EXACT_ALPHA_MAX`]), exact γ_e up to [`EXACT_GAMMA_MAX`], and each bound
/// with whether it holds. Empty cells mean "does not apply" or "not decided by
/// a lower bound".
pub fn bound_table(corpus: &str, jobs: usize) -> Result<CsvTable> {
    let instances = parse_corpus(corpus)?;
    let rows: Vec<Result<Vec<Cell>>> = pool(jobs)?.install(|| instances.par_iter().map(bound_row).collect());
    let mut table = CsvTable::new(&[
        "instance",
        "n",
        "m",
        "tree",
        "subcubic",
        "connected",
        "alpha_e",
        "alpha_kind",
        "gamma_e",
        "gamma_le_alpha",
        "half_upper",
        "half_ok",
        "tree_lower",
        "tree_ok",
        "log_lower",
        "log_ok",
        "good_set_lower",
        "good_set_ok",
    ]);
    for row in rows {
        table.push(row?)?;
    }
    Ok(table)
}

fn bound_row(inst: &Instance) -> Result<Vec<Cell>> {
    let g = &inst.graph;
    let n = g.order();
    let tree = g.is_tree();
    let subcubic = g.is_subcubic();
    let connected = g.is_connected();
    let (alpha, exact) = if n <= EXACT_ALPHA_MAX {
        let r = alpha_e_exact(g, &VertexSet::new(), None)?;
        verify_ei(g, &r.witness, &inst.name)?;
        (r.optimum, true)
    } else {
        let mut best = VertexSet::new();
        if tree && subcubic {
            best = tree_good_set(g)?.0;
        }
        if n >= 4 {
            let p = greedy_packing(g, theorem1_dstar(n)?);
            if p.len() > best.len() {
                best = p;
            }
        }
        verify_ei(g, &best, &inst.name)?;
        (best.len(), false)
    };
    let gamma = if n <= EXACT_GAMMA_MAX {
        let r = gamma_e_exact(g, None);
        verify_ed(g, &r.witness, &inst.name)?;
        Some(r.optimum)
    } else {
        None
    };
    // a lower bound can confirm "alpha >= bound" but never refute it
    let lower_ok = |holds: bool| if exact || holds { Some(holds) } else { None };
    let half_applies = connected && subcubic;
    let tree_applies = tree && subcubic;
    let good_set_applies = tree_applies && !g.degree2_vertices().is_empty();
    let log_bound = log_lower_bound(n).filter(|_| subcubic);
    let row = vec![
        inst.name.clone().into(),
        n.into(),
        g.size().into(),
        tree.into(),
        subcubic.into(),
        connected.into(),
        alpha.into(),
        (if exact { "exact" } else { "lower-bound" }).into(),
        gamma.map_or(Cell::Empty, Cell::from),
        gamma.filter(|_| exact).map(|gm| gm <= alpha).into(),
        Cell::Float((n as f64 + 1.0) / 2.0),
        (if half_applies && exact { Some(2 * alpha <= n + 1) } else { None }).into(),
        Cell::Float((2.0 * n as f64 + 8.0) / 13.0),
        (if tree_applies { lower_ok(13 * alpha >= 2 * n + 8) } else { None }).into(),
        log_bound.map_or(Cell::Empty, Cell::Float),
        log_bound.and_then(|b| lower_ok(alpha as f64 >= b)).into(),
        Cell::Float((n as f64 + 3.0) / 4.0),
        (if good_set_applies { lower_ok(4 * alpha >= n + 3) } else { None }).into(),
    ];
    Ok(row)
}

/// 95% normal-approximation half-width of a binomial proportion.
pub fn wald_half_width(successes: u64, trials: u64) -> f64 {
    let p = successes as f64 / trials as f64;
    1.96 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Random generator for one `(k, trial)` pair: seeded by `seed`, on stream
/// `k·2^32 + trial`, so any trial can be replayed alone.
pub fn trial_rng(seed: u64, k: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | trial);
    rng
}

/// The sampled set of one trial: the root plus every other vertex of the
/// perfect binary tree of depth `k` independently with probability `p`.
pub fn sample_trial_set(k: usize, n: usize, p: Ratio<u64>, seed: u64, trial: u64) -> VertexSet {
    let mut rng = trial_rng(seed, k, trial);
    std::iter::once(0).chain((1..n).filter(|_| rng.random_range(0..*p.denom()) < *p.numer())).collect()
}

/// Monte Carlo estimate, per depth `k`, of the probability that the root
/// plus a Bernoulli(`p`) sample of the other vertices of the perfect binary
/// tree of depth `k` is exponentially independent.
pub fn random_ei_probability(
    ks: RangeInclusive<usize>,
    p: Ratio<u64>,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<CsvTable> {
    if ks.is_empty() {
        return Err(invalid("empty depth range"));
    }
    if *ks.end() > 20 {
        return Err(invalid("depth above 20"));
    }
    if *p.numer() == 0 || p > Ratio::from_integer(1) {
        return Err(invalid(format!("p = {p} is outside (0, 1]")));
    }
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    if trials > u32::MAX as u64 {
        return Err(invalid("trials above 2^32"));
    }
    let pool = pool(jobs)?;
    let mut table = CsvTable::new(&["k", "n", "p", "trials", "successes", "p_hat", "half_width_95"]);
    for k in ks {
        let g = gen_perfect_binary(k)?.graph;
        let n = g.order();
        let successes: u64 = pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map_init(|| Verifier::new(&g), |ver, t| u64::from(ver.is_ei(&sample_trial_set(k, n, p, seed, t))))
                .sum()
        });
        table.push(vec![
            k.into(),
            n.into(),
            p.to_string().into(),
            Cell::Int(trials),
            Cell::Int(successes),
            Cell::Float(successes as f64 / trials as f64),
            Cell::Float(wald_half_width(successes, trials)),
        ])?;
    }
    Ok(table)
}

fn edge_string(g: &Graph) -> String {
    g.edges().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(" ")
}

fn ids(s: &VertexSet) -> String {
    s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Options for [`conjecture_scan`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub n_max: usize,
    /// Extra seeded random connected subcubic graphs (orders 4 to 12).
    pub random_graphs: usize,
    pub seed: u64,
}

/// Exact γ_e and α_e for every tree up to `n_max` vertices (one per
/// isomorphism class) plus optional random graphs. The footer carries a
/// `FINDINGS:` section listing every γ_e > α_e instance and the first
/// maximal independent set that does not dominate.
pub fn conjecture_scan(opts: &ScanOptions, jobs: usize) -> Result<CsvTable> {
    if opts.n_max > SCAN_MAX_ORDER {
        return Err(invalid(format!("n_max {} exceeds {SCAN_MAX_ORDER}", opts.n_max)));
    }
    if opts.n_max == 0 {
        return Err(invalid("n_max must be positive"));
    }
    let mut instances = parse_corpus(&format!("trees:{}", opts.n_max))?;
    for i in 0..opts.random_graphs {
        let seed = opts.seed.wrapping_add(i as u64);
        let n = 4 + (i % 9);
        let extra = 1 + i % 3;
        let g = random_subcubic_graph(n, extra, seed)?;
        instances.push(Instance { name: format!("random-graph:{n}+{extra}@{seed}"), graph: g });
    }
    let rows: Vec<Result<ScanRow>> = pool(jobs)?.install(|| instances.par_iter().map(scan_row).collect());
    let mut table = CsvTable::new(&[
        "instance",
        "n",
        "edges",
        "alpha_e",
        "alpha_witness",
        "gamma_e",
        "gamma_witness",
        "gamma_le_alpha",
        "maximal_ei_not_ed",
    ]);
    let mut violations = Vec::new();
    let mut first_maximal = None;
    for (inst, row) in instances.iter().zip(rows) {
        let (row, ok, maximal) = row?;
        if !ok {
            violations.push(inst.name.clone());
        }
        if first_maximal.is_none() {
            first_maximal = maximal.map(|m| format!("{} set {m}", inst.name));
        }
        table.push(row)?;
    }
    table.footer.push("FINDINGS:".into());
    table.footer.push(format!("instances {}", instances.len()));
    table.footer.push(format!("gamma_gt_alpha {}", violations.len()));
    for v in &violations {
        table.footer.push(format!("violation {v}"));
    }
    table.footer.push(format!("maximal_ei_not_ed {}", first_maximal.as_deref().unwrap_or("none")));
    Ok(table)
}

/// Cells, whether γ_e ≤ α_e held, and the maximal-set certificate if any.
type ScanRow = (Vec<Cell>, bool, Option<String>);

fn scan_row(inst: &Instance) -> Result<ScanRow> {
    let g = &inst.graph;
    let a = alpha_e_exact(g, &VertexSet::new(), None)?;
    verify_ei(g, &a.witness, &inst.name)?;
    let gm = gamma_e_exact(g, None);
    verify_ed(g, &gm.witness, &inst.name)?;
    let maximal = find_maximal_ei_not_ed(g);
    let certificate = match &maximal {
        Some(s) => {
            verify_ei(g, s, &inst.name)?;
            let v = is_exponentially_dominating(g, s)
                .first_violation
                .ok_or_else(|| ExperimentError::Verification(format!("{}: {s} unexpectedly dominates", inst.name)))?;
            Some(format!("{} violation {v}", ids(s)))
        }
        None => None,
    };
    let ok = gm.optimum <= a.optimum;
    let row = vec![
        inst.name.clone().into(),
        g.order().into(),
        edge_string(g).into(),
        a.optimum.into(),
        ids(&a.witness).into(),
        gm.optimum.into(),
        ids(&gm.witness).into(),
        ok.into(),
        certificate.clone().map_or(Cell::Empty, Cell::Text),
    ];
    Ok((row, ok, certificate))
}

/// Exact weight received by `x` from the endvertices of blocks `i−1`, `i` and
/// `i+1` of `T'_k`, term by term.
pub fn fact2_chain(k: usize, i: usize, role: &str) -> Result<[Dyadic; 3]> {
    if i < 2 || i + 1 > k {
        return Err(invalid(format!("block {i} is not interior in T'_{k}")));
    }
    let t = gen_tprime(k)?;
    let x = t.v(&format!("{role}_{i}"));
    let term = |j: usize| weight(&t.graph, t.s(&format!("L_{j}")), x);
    Ok([term(i - 1), term(i), term(i + 1)])
}

/// Largest independent set of `T'_k` containing every endvertex, with each
/// interior `a_i`, `b_i`, `c_i` excluded up front only after its exact
/// weight chain is confirmed to exceed 1. Reports the chains, the optimum,
/// whether the interior blocks of the witness are exactly their endvertices,
/// and the circles-and-square sets for comparison.
pub fn fact2_check(k: usize) -> Result<CsvTable> {
    if !(2..=12).contains(&k) {
        return Err(invalid(format!("k = {k} is outside 2..=12")));
    }
    let t = gen_tprime(k)?;
    let g = &t.graph;
    let mut table = CsvTable::new(&["k", "item", "block", "value", "decimal", "holds"]);
    let mut excluded = VertexSet::new();
    for i in 2..k {
        for role in ["a", "b", "c"] {
            let terms = fact2_chain(k, i, role)?;
            let sum: Dyadic = terms.iter().sum();
            let holds = sum > Dyadic::one();
            if holds {
                excluded.insert(t.v(&format!("{role}_{i}")));
            }
            let [d, dec] = dyadic_cells(&sum);
            let parts = terms.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" + ");
            table.push(vec![k.into(), format!("chain_{role} {parts}").into(), i.into(), d, dec, holds.into()])?;
        }
    }
    let ends = g.endvertices();
    let r = alpha_e_exact_excluding(g, &ends, &excluded, None)?;
    verify_ei(g, &r.witness, "constrained optimum")?;
    let plain = alpha_e_exact(g, &ends, None)?;
    let count = |v: usize| [Cell::Int(v as u64), Cell::Text(v.to_string())];
    let [c1, c2] = count(r.optimum);
    table.push(vec![k.into(), "constrained_optimum".into(), Cell::Empty, c1, c2, (r.optimum <= 4 * k + 6).into()])?;
    let [c1, c2] = count(plain.optimum);
    table.push(vec![
        k.into(),
        "constrained_optimum_without_preexclusion".into(),
        Cell::Empty,
        c1,
        c2,
        (plain.optimum == r.optimum).into(),
    ])?;
    for i in 2..k {
        let block: VertexSet = r.witness.iter().filter(|&v| t.s(&format!("V_{i}")).contains(v)).collect();
        let forced = &block == t.s(&format!("L_{i}"));
        table.push(vec![
            k.into(),
            "interior_block_equals_L".into(),
            i.into(),
            Cell::Empty,
            Cell::Empty,
            forced.into(),
        ])?;
    }
    for phase in 0..3 {
        let s = crate::families::circles_square_set(k, phase)?;
        let ok = is_exponentially_independent(g, &s).verdict;
        let [c1, c2] = count(s.len());
        table.push(vec![k.into(), format!("circles_square_phase{phase}").into(), Cell::Empty, c1, c2, ok.into()])?;
    }
    Ok(table)
}

/// Runs a named experiment from its configuration: `bound-table` (param
/// `corpus`), `random-ei` (`kmin`, `kmax`, `p`, `trials`),
/// `conjecture-scan` (`nmax`, `random`), `fact2` (`k`). The configuration
/// echo is appended to the footer.
pub fn run_experiment(config: &ExperimentConfig, jobs: usize) -> Result<CsvTable> {
    let mut table = match config.name.as_str() {
        "bound-table" => {
            let corpus = config.params.get("corpus").ok_or_else(|| invalid("bound-table needs corpus"))?;
            bound_table(corpus, jobs)?
        }
        "random-ei" => {
            let p: Ratio<u64> = config.get("p", Ratio::new(1, 2))?;
            let (lo, hi) = (config.get("kmin", 3usize)?, config.get("kmax", 9usize)?);
            random_ei_probability(lo..=hi, p, config.get("trials", 2000u64)?, config.seed, jobs)?
        }
        "conjecture-scan" => {
            let opts = ScanOptions {
                n_max: config.get("nmax", 7usize)?,
                random_graphs: config.get("random", 0usize)?,
                seed: config.seed,
            };
            conjecture_scan(&opts, jobs)?
        }
        "fact2" => fact2_check(config.get("k", 3usize)?)?,
        other => return Err(ExperimentError::UnknownExperiment(other.to_string())),
    };
    let findings = std::mem::take(&mut table.footer);
    table.footer = config.echo();
    table.footer.extend(findings);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering_and_quoting() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec!["x,y".into(), Cell::Dyadic("3/4".parse().unwrap())]).unwrap();
        t.push(vec![Cell::Bool(true), Cell::Empty]).unwrap();
        t.footer.push("note".into());
        assert_eq!(t.to_csv().unwrap(), "a,b\n\"x,y\",3/2^2\ntrue,\n# note\n");
        assert!(matches!(t.push(vec![Cell::Empty]), Err(ExperimentError::ColumnCount { expected: 2, found: 1 })));
    }

    #[test]
    fn corpus_parsing() {
        let c = parse_corpus("tk:1..3, path:5 random-tree:20@1..2,random-graph:10+2@4 trees:4").unwrap();
        let names: Vec<&str> = c.iter().map(|i| i.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "T_1",
                "T_2",
                "T_3",
                "P_5",
                "random-tree:20@1",
                "random-tree:20@2",
                "random-graph:10+2@4",
                "tree:1#1",
                "tree:2#1",
                "tree:3#1",
                "tree:4#1",
                "tree:4#2"
            ]
        );
        for bad in ["tk", "tk:3..1", "tk:x", "blob:3", "random-tree:5", "random-graph:5@1", "trees:11", "pbt:30"] {
            assert!(matches!(parse_corpus(bad), Err(ExperimentError::Corpus { .. })), "{bad}");
        }
        assert!(parse_corpus("cycle:2").is_err());
    }

    #[test]
    fn bound_rows_for_tk() {
        let t = bound_table("tk:1..4", 1).unwrap();
        for (row, k) in (1..=4).enumerate() {
            let n = 3 * k + 4;
            assert_eq!(t.get(row, "alpha_e").unwrap(), ((n + 2) / 3).to_string());
            assert_eq!(t.get(row, "alpha_kind").unwrap(), "exact");
            for col in ["half_ok", "tree_ok", "log_ok", "good_set_ok", "gamma_le_alpha"] {
                assert_eq!(t.get(row, col).unwrap(), "true", "{col}");
            }
        }
    }

    #[test]
    fn bound_rows_for_large_instances_use_lower_bounds() {
        let t = bound_table("random-tree:120@3 cycle:40", 2).unwrap();
        assert_eq!(t.get(0, "alpha_kind").unwrap(), "lower-bound");
        assert_eq!(t.get(0, "good_set_ok").unwrap(), "true");
        assert_eq!(t.get(0, "half_ok").unwrap(), "");
        assert_eq!(t.get(0, "gamma_e").unwrap(), "");
        assert_eq!(t.get(1, "tree").unwrap(), "false");
        assert_eq!(t.get(1, "good_set_ok").unwrap(), "");
    }

    #[test]
    fn random_ei_edge_cases() {
        let t = random_ei_probability(2..=4, Ratio::new(1, 1), 50, 1, 1).unwrap();
        for row in 0..3 {
            assert_eq!(t.get(row, "successes").unwrap(), "0");
        }
        assert!(random_ei_probability(3..=9, Ratio::new(1, 2), 0, 1, 1).is_err());
        assert!(random_ei_probability(3..=9, Ratio::new(0, 2), 10, 1, 1).is_err());
        assert!(random_ei_probability(3..=9, Ratio::new(3, 2), 10, 1, 1).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=4;
        assert!(random_ei_probability(empty, Ratio::new(1, 2), 10, 1, 1).is_err());
    }

    #[test]
    fn random_ei_is_reproducible_per_trial_and_across_jobs() {
        let a = random_ei_probability(1..=4, Ratio::new(1, 2), 300, 9, 1).unwrap().to_csv().unwrap();
        let b = random_ei_probability(1..=4, Ratio::new(1, 2), 300, 9, 4).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
        let g = gen_perfect_binary(3).unwrap().graph;
        assert_eq!(
            sample_trial_set(3, g.order(), Ratio::new(1, 2), 9, 17),
            sample_trial_set(3, 15, Ratio::new(1, 2), 9, 17)
        );
        assert!(sample_trial_set(3, 15, Ratio::new(1, 2), 9, 17).contains(0));
    }

    #[test]
    fn scan_small_trees() {
        let t = conjecture_scan(&ScanOptions { n_max: 5, random_graphs: 3, seed: 2 }, 2).unwrap();
        assert_eq!(t.get(0, "instance").unwrap(), "tree:1#1");
        assert_eq!((t.get(0, "alpha_e").unwrap(), t.get(0, "gamma_e").unwrap()), ("1".into(), "1".into()));
        // P_3
        assert_eq!(t.get(2, "alpha_e").unwrap(), "2");
        assert_eq!(t.get(2, "gamma_e").unwrap(), "1");
        assert!(t.footer.contains(&"FINDINGS:".to_string()));
        assert!(t.footer.contains(&"gamma_gt_alpha 0".to_string()));
        assert!(conjecture_scan(&ScanOptions { n_max: 11, random_graphs: 0, seed: 0 }, 1).is_err());
    }

    #[test]
    fn fact2_chains_are_exact() {
        let d = |s: &str| -> Dyadic { s.parse().unwrap() };
        let a = fact2_chain(3, 2, "a").unwrap();
        assert_eq!(a, [d("23/64"), d("11/16"), d("11/64")]);
        assert_eq!(a.iter().sum::<Dyadic>(), d("78/64"));
        let b = fact2_chain(3, 2, "b").unwrap();
        assert_eq!(b, [d("23/128"), d("23/32"), d("11/32")]);
        assert_eq!(b.iter().sum::<Dyadic>(), d("159/128"));
        let c = fact2_chain(3, 2, "c").unwrap();
        assert_eq!(c, [d("23/256"), d("7/8"), d("11/256")]);
        assert_eq!(c.iter().sum::<Dyadic>(), d("258/256"));
        assert!(fact2_chain(3, 1, "a").is_err());
    }

    #[test]
    fn fact2_table() {
        let t = fact2_check(3).unwrap();
        let find = |item: &str| (0..t.rows.len()).find(|&r| t.get(r, "item").unwrap() == item).unwrap();
        let r = find("constrained_optimum");
        assert_eq!(t.get(r, "value").unwrap(), "14");
        assert_eq!(t.get(r, "holds").unwrap(), "true");
        assert_eq!(t.get(find("interior_block_equals_L"), "holds").unwrap(), "true");
        assert_eq!(t.get(find("constrained_optimum_without_preexclusion"), "holds").unwrap(), "true");
        for row in 0..3 {
            assert_eq!(t.get(row, "holds").unwrap(), "true");
        }
        assert!(fact2_check(1).is_err());
    }

    #[test]
    fn run_by_name_echoes_config() {
        let cfg = ExperimentConfig::new("random-ei", 5).with("kmin", 1).with("kmax", 2).with("trials", 20);
        let csv = run_experiment(&cfg, 1).unwrap().to_csv().unwrap();
        assert!(csv.contains("# experiment random-ei\n# seed 5\n# param kmax=2\n"));
        assert!(run_experiment(&ExperimentConfig::new("nope", 0), 1).is_err());
        assert!(run_experiment(&ExperimentConfig::new("random-ei", 0).with("p", "x"), 1).is_err());
    }
}
