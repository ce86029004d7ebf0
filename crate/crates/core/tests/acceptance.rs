//! Acceptance criteria, one line each. Every criterion also returns a textual
//! record of what it computed; the determinism criterion reruns everything
//! with a different worker count and compares those records byte for byte.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use expind::constructors::{
    greedy_packing, packing_size_bound, pairwise_distance_exceeds, theorem1_dstar, theorem1b_condition,
    theorem1b_dstar, tree_good_set,
};
use expind::experiments::{conjecture_scan, random_ei_probability, ScanOptions};
use expind::families::{
    enumerate_trees, gen_cycle, gen_path, gen_perfect_binary, gen_tdelta, gen_tk, gen_tprime, grandchild_set, leaf_set,
    random_subcubic_graph, random_subcubic_tree,
};
use expind::graph::{Graph, VertexSet};
use expind::solvers::{alpha_e_bruteforce, alpha_e_exact, find_maximal_ei_not_ed};
use expind::weights::{is_exponentially_dominating, is_exponentially_independent, weight};
use expind::Dyadic;

struct Outcome {
    pass: bool,
    detail: String,
    record: String,
}

fn outcome(failures: Vec<String>, ok_detail: String, record: String) -> Outcome {
    match failures.first() {
        None => Outcome { pass: true, detail: ok_detail, record },
        Some(first) => {
            Outcome { pass: false, detail: format!("{} failure(s), first: {first}", failures.len()), record }
        }
    }
}

fn d(s: &str) -> Dyadic {
    s.parse().unwrap()
}

fn ei(g: &Graph, s: &VertexSet) -> bool {
    is_exponentially_independent(g, s).verdict
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().unwrap()
}

fn ac1(_jobs: usize) -> Outcome {
    let mut fails = Vec::new();
    let mut rec = String::new();
    for k in [3, 4] {
        let t = gen_tprime(k).unwrap();
        for i in 2..k {
            let li = t.s(&format!("L_{i}"));
            let checks = [
                (format!("b_{}", i - 1), "11/32"),
                (format!("a_{}", i + 1), "23/64"),
                (format!("a_{i}"), "11/16"),
                (format!("b_{i}"), "23/32"),
                (format!("c_{i}"), "7/8"),
            ];
            for (role, want) in checks {
                let w = weight(&t.graph, li, t.v(&role));
                let _ = writeln!(rec, "k={k} i={i} {role} {w}");
                if w != d(want) {
                    fails.push(format!("k={k} i={i} {role}: {w} != {want}"));
                }
            }
        }
    }
    outcome(fails, "11/32 23/64 11/16 23/32 7/8 exact for k=3,4".into(), rec)
}

fn ac2(_jobs: usize) -> Outcome {
    let mut fails = Vec::new();
    let mut rec = String::new();
    for k in 1..=4 {
        let t = gen_tk(k).unwrap();
        let g = &t.graph;
        let r = alpha_e_exact(g, &VertexSet::new(), None).unwrap();
        let ends = g.endvertices();
        let _ = writeln!(rec, "k={k} n={} alpha={} witness={}", g.order(), r.optimum, r.witness);
        if r.optimum != k + 2 {
            fails.push(format!("T_{k}: alpha {} != {}", r.optimum, k + 2));
        }
        if !ei(g, &r.witness) || r.witness.len() != r.optimum {
            fails.push(format!("T_{k}: witness does not re-verify"));
        }
        // the endvertex set is itself an optimal witness
        if ends.len() != k + 2 || !ei(g, &ends) {
            fails.push(format!("T_{k}: endvertex set {ends} is not an optimal witness"));
        }
    }
    outcome(fails, "alpha_e(T_k) = k+2 for k=1..4, endvertex sets optimal".into(), rec)
}

fn ac3(_jobs: usize) -> Outcome {
    let g = gen_path(5).unwrap().graph;
    let r = alpha_e_exact(&g, &VertexSet::new(), None).unwrap();
    let (s, _) = tree_good_set(&g).unwrap();
    let mut fails = Vec::new();
    if r.optimum != 2 {
        fails.push(format!("alpha_e(P_5) = {}", r.optimum));
    }
    if s != VertexSet::from([0, 4]) || !ei(&g, &s) {
        fails.push(format!("tree_good_set(P_5) = {s}"));
    }
    outcome(fails, "alpha_e(P_5)=2, good set {0,4}".into(), format!("{} {s}\n", r.optimum))
}

fn ac4(_jobs: usize) -> Outcome {
    let mut fails = Vec::new();
    let mut rec = String::new();
    let g = gen_perfect_binary(2).unwrap().graph;
    let r = alpha_e_exact(&g, &VertexSet::new(), None).unwrap();
    let _ = writeln!(rec, "alpha={} witness={}", r.optimum, r.witness);
    if r.optimum != 4 || 2 * r.optimum != g.order() + 1 {
        fails.push(format!("alpha_e(depth 2) = {}", r.optimum));
    }
    if r.witness != leaf_set(2) {
        fails.push(format!("witness {} is not the leaf set", r.witness));
    }
    for k in 2..=8 {
        let g = gen_perfect_binary(k).unwrap().graph;
        let rep = is_exponentially_independent(&g, &leaf_set(k));
        let _ = writeln!(rec, "k={k} leaves ei={} max={}", rep.verdict, rep.max_weight());
        if !rep.verdict {
            fails.push(format!("leaf set of depth {k} is not EI"));
        }
    }
    outcome(fails, "alpha_e=4=(n+1)/2 at depth 2 with leaf witness; leaf sets EI for depths 2..8".into(), rec)
}

fn ac5(jobs: usize) -> Outcome {
    let mut trees = Vec::new();
    let mut seed = 0u64;
    while trees.len() < 1000 {
        let n = 4 + (seed as usize * 37) % 197;
        let t = random_subcubic_tree(n, seed).unwrap();
        if !t.degree2_vertices().is_empty() {
            trees.push((seed, t));
        }
        seed += 1;
    }
    let results: Vec<(String, Option<String>)> = pool(jobs).install(|| {
        trees
            .par_iter()
            .map(|(seed, t)| {
                let n = t.order();
                let line = |s: &str| format!("seed={seed} n={n} {s}");
                match tree_good_set(t) {
                    Err(e) => (line("error"), Some(line(&e.to_string()))),
                    Ok((s, trace)) => {
                        let mut bad = None;
                        if !ei(t, &s) {
                            bad = Some("not EI");
                        } else if !t.endvertices().is_subset(&s) {
                            bad = Some("misses an endvertex");
                        } else if 4 * s.len() < n + 3 {
                            bad = Some("below (n+3)/4");
                        } else if trace.replay().as_ref() != Some(&s) {
                            bad = Some("trace replay differs");
                        }
                        (line(&format!("size={} {s}", s.len())), bad.map(line))
                    }
                }
            })
            .collect()
    });
    let max_n = trees.iter().map(|(_, t)| t.order()).max().unwrap();
    let rec: String = results.iter().map(|(l, _)| format!("{l}\n")).collect();
    let fails = results.into_iter().filter_map(|(_, f)| f).collect();
    outcome(fails, format!("1000 trees, n up to {max_n}, zero invariant violations"), rec)
}

fn ac6(jobs: usize) -> Outcome {
    let mut corpus: Vec<(String, Graph)> = Vec::new();
    for n in [4, 5, 6, 7, 10, 33, 100, 257, 1000, 2500, 5000] {
        corpus.push((format!("C_{n}"), gen_cycle(n).unwrap().graph));
    }
    for (i, n) in [4, 9, 17, 64, 200, 731, 1500, 3000, 5000].into_iter().enumerate() {
        corpus.push((format!("tree {n}@{i}"), random_subcubic_tree(n, i as u64).unwrap()));
        corpus.push((format!("graph {n}@{i}"), random_subcubic_graph(n, n / 10 + 1, 100 + i as u64).unwrap()));
    }
    for k in (1..=12).chain([100, 1000, 1665]) {
        corpus.push((format!("T_{k}"), gen_tk(k).unwrap().graph));
    }
    for k in (1..=12).chain([50, 384]) {
        corpus.push((format!("T'_{k}"), gen_tprime(k).unwrap().graph));
    }
    let results: Vec<(String, Option<String>)> = pool(jobs).install(|| {
        corpus
            .par_iter()
            .map(|(name, g)| {
                let n = g.order();
                assert!((4..=5000).contains(&n), "{name}");
                let dstar = theorem1_dstar(n).unwrap();
                let s = greedy_packing(g, dstar);
                let bound = packing_size_bound(n, dstar);
                let line = format!("{name} n={n} dstar={dstar} size={} bound={bound}", s.len());
                let bad = if !ei(g, &s) {
                    Some(format!("{name}: packing not EI"))
                } else if s.len() < bound {
                    Some(format!("{name}: size {} < {bound}", s.len()))
                } else {
                    None
                };
                (line, bad)
            })
            .collect()
    });
    let rec: String = results.iter().map(|(l, _)| format!("{l}\n")).collect();
    let count = results.len();
    let fails = results.into_iter().filter_map(|(_, f)| f).collect();
    outcome(fails, format!("{count} instances, 4 <= n <= 5000, all EI and above the maximality bound"), rec)
}

fn ac7(_jobs: usize) -> Outcome {
    let mut fails = Vec::new();
    let mut rec = String::new();
    let dstar = theorem1b_dstar(1);
    if dstar != 9 {
        fails.push(format!("theorem1b_dstar(1) = {dstar}"));
    }
    if !theorem1b_condition(1, 9) || theorem1b_condition(1, 8) {
        fails.push("condition boundary is not at t = 9".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let n = rng.random_range(100..=600);
        let g = gen_cycle(n).unwrap().graph;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        // half of the sets stop early and are not maximal
        let cap = if trial % 2 == 0 { usize::MAX } else { rng.random_range(1..=n / 38) };
        let mut s = VertexSet::new();
        for v in order {
            if s.len() >= cap {
                break;
            }
            let far = s.iter().all(|u| {
                let diff = u.abs_diff(v);
                diff.min(n - diff) > 2 * dstar
            });
            if far {
                s.insert(v);
            }
        }
        let _ = writeln!(rec, "trial={trial} n={n} size={} {s}", s.len());
        if !pairwise_distance_exceeds(&g, &s, 2 * dstar) {
            fails.push(format!("trial {trial}: sampled set violates the distance constraint"));
        }
        if !ei(&g, &s) {
            fails.push(format!("trial {trial}: C_{n} set {s} is not EI"));
        }
    }
    outcome(fails, "d*=9; 100 sets on C_n with pairwise distance > 18 all EI".into(), rec)
}

fn ac8(_jobs: usize) -> Outcome {
    let mut fails = Vec::new();
    let mut rec = String::new();
    let half = d("1/2");
    for dd in 1..=3 {
        let g = gen_tdelta(4, dd + 2).unwrap().graph;
        let s = grandchild_set(dd).unwrap();
        let rep = is_exponentially_independent(&g, &s);
        let max = rep.max_weight();
        let _ = writeln!(rec, "d={dd} n={} size={} max={max}", g.order(), s.len());
        if !rep.verdict || max >= half {
            fails.push(format!("d={dd}: verdict {} max weight {max}", rep.verdict));
        }
    }
    outcome(fails, "grandchild sets EI with all weights < 1/2 for d=1,2,3".into(), rec)
}

fn ac9(jobs: usize) -> Outcome {
    let mut corpus: Vec<(String, Graph)> =
        enumerate_trees(9, usize::MAX, true).enumerate().map(|(i, t)| (format!("tree#{i}"), t)).collect();
    let trees = corpus.len();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..200 {
        let n = rng.random_range(4..=12);
        let extra = rng.random_range(0..=3);
        let seed: u64 = rng.random();
        corpus.push((format!("graph#{i} {n}+{extra}@{seed}"), random_subcubic_graph(n, extra, seed).unwrap()));
    }
    let results: Vec<(String, Option<String>)> = pool(jobs).install(|| {
        corpus
            .par_iter()
            .map(|(name, g)| {
                let a = alpha_e_exact(g, &VertexSet::new(), None).unwrap();
                let b = alpha_e_bruteforce(g).unwrap();
                let line = format!("{name} bb={} {} brute={} {}", a.optimum, a.witness, b.optimum, b.witness);
                let bad = if a.optimum != b.optimum {
                    Some(format!("{name}: {} != {}", a.optimum, b.optimum))
                } else if !ei(g, &a.witness) || !ei(g, &b.witness) || a.witness.len() != a.optimum {
                    Some(format!("{name}: witness does not re-verify"))
                } else {
                    None
                };
                (line, bad)
            })
            .collect()
    });
    let rec: String = results.iter().map(|(l, _)| format!("{l}\n")).collect();
    let fails = results.into_iter().filter_map(|(_, f)| f).collect();
    outcome(fails, format!("{trees} trees (n<=9) and 200 random graphs (n<=12) agree"), rec)
}

fn ac10(_jobs: usize) -> Outcome {
    let mut fails = Vec::new();
    let mut rec = String::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for pair in 0..500 {
        let n = rng.random_range(2..=40);
        let g = random_subcubic_graph(n, rng.random_range(0..=n / 4), rng.random()).unwrap();
        let mut order: Vec<usize> = g.vertices().collect();
        order.shuffle(&mut rng);
        let mut s = VertexSet::new();
        for v in order {
            if ei(&g, &s.with(v)) {
                s.insert(v);
            }
        }
        let sub: VertexSet = s.iter().filter(|_| rng.random_bool(0.5)).collect();
        let _ = writeln!(rec, "pair={pair} n={n} set={s} subset={sub}");
        if !ei(&g, &s) || !ei(&g, &sub) {
            fails.push(format!("pair {pair}: subset {sub} of {s} is not EI"));
        }
    }
    outcome(fails, "500 (EI set, subset) pairs, every subset EI".into(), rec)
}

fn ac11(jobs: usize) -> Outcome {
    let t = random_ei_probability(3..=9, Ratio::new(1, 2), 2000, 1, jobs).unwrap();
    let col = |r: usize, c: &str| -> f64 { t.get(r, c).unwrap().parse().unwrap() };
    let mut fails = Vec::new();
    let mut summary = Vec::new();
    for r in 0..t.rows.len() {
        summary.push(format!("{}", col(r, "p_hat")));
        if r + 1 < t.rows.len() {
            let (a, b) = (col(r, "p_hat"), col(r + 1, "p_hat"));
            let slack = col(r, "half_width_95") + col(r + 1, "half_width_95");
            if b > a + slack {
                fails.push(format!("p_hat rises from {a} to {b} beyond the intervals"));
            }
        }
    }
    let (first, last) = (col(0, "p_hat"), col(t.rows.len() - 1, "p_hat"));
    if last >= first {
        fails.push(format!("p_hat(9) = {last} is not below p_hat(3) = {first}"));
    }
    outcome(fails, format!("p_hat(3..9) = {}", summary.join(" ")), t.to_csv().unwrap())
}

fn ac12(jobs: usize) -> Outcome {
    let mut fails = Vec::new();
    let t = conjecture_scan(&ScanOptions { n_max: 9, random_graphs: 0, seed: 0 }, jobs).unwrap();
    let violations = t.footer.iter().find_map(|l| l.strip_prefix("gamma_gt_alpha ")).unwrap_or("?").to_string();
    if !t.footer.iter().any(|l| l == "FINDINGS:") {
        fails.push("report has no FINDINGS section".into());
    }
    // an independently certified maximal EI set that does not dominate
    let mut certified = None;
    for tree in enumerate_trees(8, usize::MAX, true) {
        if let Some(s) = find_maximal_ei_not_ed(&tree) {
            let maximal = tree.vertices().all(|v| s.contains(v) || !ei(&tree, &s.with(v)));
            if ei(&tree, &s) && maximal && !is_exponentially_dominating(&tree, &s).verdict {
                certified = Some(format!("n={} set {s}", tree.order()));
                break;
            }
            fails.push(format!("witness {s} fails certification"));
        }
    }
    if certified.is_none() {
        fails.push("no maximal EI set that fails to dominate over trees n <= 8".into());
    }
    let mut rec = t.to_csv().unwrap();
    let _ = writeln!(rec, "certified {certified:?}");
    outcome(
        fails,
        format!(
            "{} trees scanned, gamma_e > alpha_e instances: {violations}; certified witness {}",
            t.rows.len(),
            certified.as_deref().unwrap_or("none")
        ),
        rec,
    )
}

type Criterion = (&'static str, &'static str, Duration, fn(usize) -> Outcome);

const CRITERIA: [Criterion; 12] = [
    ("AC-1", "exact dyadic fingerprints", Duration::from_secs(1), ac1),
    ("AC-2", "alpha_e(T_k) = k+2", Duration::from_secs(60), ac2),
    ("AC-3", "P_5", Duration::from_secs(1), ac3),
    ("AC-4", "perfect binary trees", Duration::from_secs(10), ac4),
    ("AC-5", "good sets on random trees", Duration::from_secs(120), ac5),
    ("AC-6", "greedy packing", Duration::from_secs(300), ac6),
    ("AC-7", "packing on cycles", Duration::from_secs(60), ac7),
    ("AC-8", "grandchild sets in T(4,d+2)", Duration::from_secs(30), ac8),
    ("AC-9", "branch and bound vs brute force", Duration::from_secs(300), ac9),
    ("AC-10", "hereditarity", Duration::from_secs(60), ac10),
    ("AC-11", "random sets in perfect binary trees", Duration::from_secs(300), ac11),
    ("AC-12", "conjecture scan", Duration::from_secs(600), ac12),
];

fn main() -> ExitCode {
    let jobs = std::thread::available_parallelism().map_or(2, |n| n.get()).max(2);
    let mut all_pass = true;
    let mut records = Vec::new();
    for (id, title, limit, run) in CRITERIA {
        let start = Instant::now();
        let o = run(jobs);
        let took = start.elapsed();
        let pass = o.pass && took <= limit;
        all_pass &= pass;
        let timing = if took <= limit { String::new() } else { format!(" (over the {}s limit)", limit.as_secs()) };
        println!(
            "[{}] {id} {title}: {} [{:.2}s]{timing}",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
        records.push(o.record);
    }
    // rerun with a single worker and again with the original count
    let mut diverged = Vec::new();
    for (i, (id, _, _, run)) in CRITERIA.iter().enumerate() {
        for rerun_jobs in [1, jobs] {
            if run(rerun_jobs).record != records[i] {
                diverged.push(format!("{id} with {rerun_jobs} job(s)"));
            }
        }
    }
    let pass = diverged.is_empty();
    all_pass &= pass;
    println!(
        "[{}] AC-13 determinism: {}",
        if pass { "PASS" } else { "FAIL" },
        if pass {
            format!("all records byte-identical across reruns with 1 and {jobs} jobs")
        } else {
            format!("diverged: {}", diverged.join(", "))
        }
    );
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
