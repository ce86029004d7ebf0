use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use expind::constructors::{greedy_packing, theorem1_dstar, tree_good_set};
use expind::experiments::{run_experiment, ExperimentConfig};
use expind::families::{
    canonical_set_tk, circles_square_set, gen_cycle, gen_ladder, gen_path, gen_perfect_binary, gen_tdelta, gen_tk,
    gen_tprime, grandchild_set, leaf_set, random_subcubic_graph, random_subcubic_tree, FamilyError, LabeledGraph,
};
use expind::graph::{parse_edge_list, to_dot, write_edge_list, Graph, VertexSet};
use expind::io::{parse_set, write_set};
use expind::solvers::{alpha_e_exact, gamma_e_exact, SearchResult};
use expind::weights::{is_exponentially_dominating, is_exponentially_independent, weight};

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "expind", version, about = "Exponential independence and domination in graphs")]
struct Cli {
    /// Worker threads for experiments.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph family as an edge list plus role labels.
    Gen(GenArgs),
    /// Check a set for exponential independence or domination.
    Verify(VerifyArgs),
    /// Compute α_e or γ_e exactly.
    Solve(SolveArgs),
    /// Build an exponentially independent set constructively.
    Construct(ConstructArgs),
    /// Run a named experiment and write its CSV table.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Tk,
    Tprime,
    Tdelta,
    Pbt,
    Path,
    Cycle,
    Ladder,
    RandomTree,
    RandomGraph,
}

#[derive(Args)]
struct FamilyParams {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    delta: Option<usize>,
    /// Order for path, cycle, ladder length and random families.
    #[arg(long)]
    n: Option<usize>,
    /// Edges added on top of the spanning tree for random-graph.
    #[arg(long, default_value_t = 0)]
    extra: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[command(flatten)]
    params: FamilyParams,
    /// Edge list destination (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    labels_out: Option<PathBuf>,
    #[arg(long)]
    dot_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ei,
    Ed,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    set: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Write the weight report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also print the exact weight the set sends to this vertex.
    #[arg(long)]
    probe: Vec<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    AlphaE,
    GammaE,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    param: Param,
    #[arg(long)]
    require_endvertices: bool,
    #[arg(long)]
    require_set: Option<PathBuf>,
    /// Seconds before the search stops and reports its incumbent.
    #[arg(long)]
    timeout: Option<f64>,
    /// Also write the witness as a set file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Packing,
    TreeGood,
    FamilyCanonical,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// Input graph (packing, tree-good).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Packing radius; defaults to ⌈log₂ log₂ n⌉ + 2.
    #[arg(long)]
    dstar: Option<usize>,
    /// Family for family-canonical: tk, tprime, pbt or tdelta.
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[command(flatten)]
    params: FamilyParams,
    /// Block phase of the circles-and-square set on tprime.
    #[arg(long, default_value_t = 1)]
    phase: usize,
    /// Set file destination (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reduction trace destination (tree-good).
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Edge list of the generated family (family-canonical).
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// bound-table, random-ei, conjecture-scan or fact2.
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV destination (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corpus spec for bound-table, e.g. "tk:1..6,random-tree:200@1..5".
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long)]
    nmax: Option<usize>,
    /// Random graphs added to the conjecture scan.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    /// Sampling probability as a fraction, e.g. 1/2.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
}

/// Marks errors caused by the invocation itself rather than by inputs.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn family_error(e: FamilyError) -> anyhow::Error {
    match e {
        FamilyError::InvalidParameter(_) => usage(e.to_string()),
        other => other.into(),
    }
}

fn need(v: Option<usize>, flag: &str, family: &str) -> Result<usize> {
    v.ok_or_else(|| usage(format!("{family} needs --{flag}")))
}

fn generate(family: Family, p: &FamilyParams) -> Result<LabeledGraph> {
    let lg = match family {
        Family::Tk => gen_tk(need(p.k, "k", "tk")?),
        Family::Tprime => gen_tprime(need(p.k, "k", "tprime")?),
        Family::Tdelta => gen_tdelta(need(p.delta, "delta", "tdelta")?, need(p.depth, "depth", "tdelta")?),
        Family::Pbt => gen_perfect_binary(need(p.depth, "depth", "pbt")?),
        Family::Path => gen_path(need(p.n, "n", "path")?),
        Family::Cycle => gen_cycle(need(p.n, "n", "cycle")?),
        Family::Ladder => gen_ladder(need(p.n, "n", "ladder")?),
        Family::RandomTree => {
            let n = need(p.n, "n", "random-tree")?;
            random_subcubic_tree(n, p.seed).map(|g| LabeledGraph::new(format!("random-tree:{n}@{}", p.seed), g))
        }
        Family::RandomGraph => {
            let n = need(p.n, "n", "random-graph")?;
            random_subcubic_graph(n, p.extra, p.seed)
                .map(|g| LabeledGraph::new(format!("random-graph:{n}+{}@{}", p.extra, p.seed), g))
        }
    };
    lg.map_err(family_error)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_set(path: &Path, n: usize) -> Result<VertexSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_set(&text, n).with_context(|| format!("parsing {}", path.display()))
}

fn check_ei(g: &Graph, s: &VertexSet) -> Result<()> {
    if !is_exponentially_independent(g, s).verdict {
        bail!("witness {s} failed re-verification as exponentially independent");
    }
    Ok(())
}

fn gen(args: &GenArgs) -> Result<u8> {
    let lg = generate(args.family, &args.params)?;
    emit(args.out.as_deref(), &write_edge_list(&lg.graph))?;
    if let Some(p) = &args.labels_out {
        emit(Some(p), &lg.labels_text())?;
    }
    if let Some(p) = &args.dot_out {
        emit(Some(p), &to_dot(&lg.graph, &VertexSet::new()))?;
    }
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Result<u8> {
    let g = read_graph(&args.graph)?;
    let s = read_set(&args.set, g.order())?;
    let report = match args.mode {
        Mode::Ei => is_exponentially_independent(&g, &s),
        Mode::Ed => is_exponentially_dominating(&g, &s),
    };
    let mut text = format!("# {}\n", expind::VERSION);
    text.push_str(&report.to_text());
    for &v in &args.probe {
        if v >= g.order() {
            return Err(usage(format!("probe vertex {v} out of range for order {}", g.order())));
        }
        // a member's own weight is taken against the rest of the set
        let w = weight(&g, &s.without(v), v);
        let _ = writeln!(text, "probe {v} w={w} ({})", w.to_decimal(30));
    }
    emit(args.report.as_deref(), &text)?;
    Ok(if report.verdict { 0 } else { EXIT_FALSE })
}

fn solve(args: &SolveArgs) -> Result<u8> {
    let g = read_graph(&args.graph)?;
    let budget = match args.timeout {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(usage("--timeout must be positive")),
        t => t.map(Duration::from_secs_f64),
    };
    let mut required = VertexSet::new();
    if args.require_endvertices {
        required = required.union(&g.endvertices());
    }
    if let Some(p) = &args.require_set {
        required = required.union(&read_set(p, g.order())?);
    }
    let result: SearchResult = match args.param {
        Param::AlphaE => {
            let r = alpha_e_exact(&g, &required, budget)?;
            check_ei(&g, &r.witness)?;
            r
        }
        Param::GammaE => {
            if !required.is_empty() {
                return Err(usage("required vertices only apply to alpha-e"));
            }
            let r = gamma_e_exact(&g, budget);
            if !is_exponentially_dominating(&g, &r.witness).verdict {
                bail!("witness {} failed re-verification as exponentially dominating", r.witness);
            }
            r
        }
    };
    print!("# {}\n{}", expind::VERSION, result.to_text());
    if let Some(p) = &args.out {
        emit(Some(p), &write_set(&result.witness))?;
    }
    if !result.is_optimal() {
        eprintln!("timed out; printed witness is the best incumbent");
        return Ok(EXIT_RUNTIME);
    }
    Ok(0)
}

fn construct(args: &ConstructArgs) -> Result<u8> {
    let input = || -> Result<Graph> {
        let p = args.graph.as_deref().ok_or_else(|| usage("this method needs --graph"))?;
        read_graph(p)
    };
    let (g, s) = match args.method {
        Method::Packing => {
            let g = input()?;
            let dstar = match args.dstar {
                Some(0) => return Err(usage("--dstar must be positive")),
                Some(d) => d,
                None => theorem1_dstar(g.order()).map_err(|e| usage(e.to_string()))?,
            };
            let s = greedy_packing(&g, dstar);
            (g, s)
        }
        Method::TreeGood => {
            let g = input()?;
            let (s, trace) = tree_good_set(&g)?;
            if let Some(p) = &args.trace_out {
                emit(Some(p), &trace.to_string())?;
            }
            (g, s)
        }
        Method::FamilyCanonical => {
            let family = args.family.ok_or_else(|| usage("family-canonical needs --family"))?;
            let lg = generate(family, &args.params)?;
            let s = match family {
                Family::Tk => canonical_set_tk(lg_k(&args.params)?),
                Family::Tprime => circles_square_set(lg_k(&args.params)?, args.phase),
                Family::Pbt => Ok(leaf_set(need(args.params.depth, "depth", "pbt")?)),
                Family::Tdelta if args.params.delta == Some(4) => match args.params.depth {
                    Some(d) if d >= 3 => grandchild_set(d - 2),
                    _ => return Err(usage("tdelta canonical set needs --depth >= 3")),
                },
                _ => return Err(usage("family-canonical supports tk, tprime, pbt and tdelta with --delta 4")),
            }
            .map_err(family_error)?;
            if let Some(p) = &args.graph_out {
                emit(Some(p), &write_edge_list(&lg.graph))?;
            }
            (lg.graph, s)
        }
    };
    check_ei(&g, &s)?;
    emit(args.out.as_deref(), &write_set(&s))?;
    Ok(0)
}

fn lg_k(p: &FamilyParams) -> Result<usize> {
    need(p.k, "k", "family")
}

fn experiment(args: &ExperimentArgs, jobs: usize) -> Result<u8> {
    let mut cfg = ExperimentConfig::new(args.name.clone(), args.seed);
    let opt = |v: Option<String>, key: &str, cfg: ExperimentConfig| match v {
        Some(v) => cfg.with(key, v),
        None => cfg,
    };
    cfg = opt(args.corpus.clone(), "corpus", cfg);
    cfg = opt(args.nmax.map(|v| v.to_string()), "nmax", cfg);
    cfg = opt(args.random.map(|v| v.to_string()), "random", cfg);
    cfg = opt(args.kmin.map(|v| v.to_string()), "kmin", cfg);
    cfg = opt(args.kmax.map(|v| v.to_string()), "kmax", cfg);
    cfg = opt(args.p.clone(), "p", cfg);
    cfg = opt(args.trials.map(|v| v.to_string()), "trials", cfg);
    cfg = opt(args.k.map(|v| v.to_string()), "k", cfg);
    cfg.output = args.out.clone();
    let table = run_experiment(&cfg, jobs).map_err(|e| match e {
        expind::experiments::ExperimentError::InvalidParameter(_)
        | expind::experiments::ExperimentError::UnknownExperiment(_)
        | expind::experiments::ExperimentError::Corpus { .. } => usage(e.to_string()),
        other => other.into(),
    })?;
    emit(args.out.as_deref(), &table.to_csv()?)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
        Command::Solve(a) => solve(a),
        Command::Construct(a) => construct(a),
        Command::Experiment(a) => experiment(a, cli.jobs as usize),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Usage>() { EXIT_USAGE } else { EXIT_RUNTIME })
        }
    }
}
