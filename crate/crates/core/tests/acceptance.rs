//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mtcut::capforest::capforest;
use mtcut::flow::{compute_bounds, isolating_cuts, min_st_cut};
use mtcut::generate::{generate_random_graph, make_terminals, TerminalSpec};
use mtcut::ilp::{build_ilp, kernel_ilp, lp_text, read_lp, solve_lp_exhaustive, IlpBackend, KernelIlpOptions};
use mtcut::io::format_assignment;
use mtcut::kernel::{apply_rule_group, kernelize, RuleGroup};
use mtcut::oracle::{brute_force, g_ex, DEFAULT_CAP};
use mtcut::search::{solve, Problem};
use mtcut::{EdgeSelection, Graph, QueueOrder, ReductionConfig, SearchConfig, Weight};

const BATCH: u64 = 500;

/// Oracle-suite instance `i`: n in 6..=12, k in {3, 4}, weights 1..=5.
fn instance(i: u64) -> Graph {
    let n = 6 + (i % 7) as usize;
    let k = 3 + (i % 2) as usize;
    let degree = 2.0 + (i % 5) as f64 * 0.5;
    let g = generate_random_graph(n, degree, 5, 1000 + i);
    let mut rng = ChaCha8Rng::seed_from_u64(i);
    make_terminals(g, &TerminalSpec::Random { k }, &mut rng).expect("k <= n")
}

struct Suite {
    graphs: Vec<Graph>,
    optima: Vec<Weight>,
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], detail: String) -> Outcome {
    match failures.first() {
        None => Outcome { pass: true, detail },
        Some(first) => Outcome { pass: false, detail: format!("{} failures, first: {first}", failures.len()) },
    }
}

fn oracle_equivalence(s: &Suite) -> Outcome {
    let mut failures = Vec::new();
    let mut runs = 0u64;
    for (i, (g, &opt)) in s.graphs.iter().zip(&s.optima).enumerate() {
        for &edge_selection in EdgeSelection::ALL {
            for &queue_order in QueueOrder::ALL {
                for threads in [1, 2, 4] {
                    let cfg = SearchConfig { edge_selection, queue_order, threads, ..SearchConfig::default() };
                    let r = solve(g, &cfg).expect("solvable");
                    runs += 1;
                    if r.weight != opt || g.crossing_weight(&r.assignment) != opt || !r.optimal {
                        failures.push(format!(
                            "instance {i} {edge_selection}/{queue_order}/{threads}: got {} want {opt}",
                            r.weight
                        ));
                    }
                }
            }
        }
    }
    outcome(&failures, format!("{} instances, {runs} solves, all exact", s.graphs.len()))
}

fn kernel_safety(s: &Suite) -> Outcome {
    let mut failures = Vec::new();
    let mut shrunk = 0;
    for (i, (g, &opt)) in s.graphs.iter().zip(&s.optima).enumerate() {
        let mut check = |label: String, p: &Problem| {
            let w = brute_force(&p.graph, DEFAULT_CAP).expect("small").weight + p.deleted;
            if w != opt {
                failures.push(format!("instance {i} {label}: {w} != {opt}"));
            }
        };
        for group in RuleGroup::ALL {
            let mut p = Problem::new(g.clone());
            apply_rule_group(&mut p, group);
            check(format!("{group:?}"), &p);
        }
        for incumbent in [Weight::MAX, opt] {
            let mut p = Problem::new(g.clone());
            kernelize(&mut p, &ReductionConfig::all(), incumbent);
            if p.graph.num_vertices() < g.num_vertices() {
                shrunk += 1;
            }
            check(format!("kernelize(incumbent {incumbent})"), &p);
        }
    }
    outcome(
        &failures,
        format!("6 rule groups + full kernelize on {} instances, {shrunk} kernels shrank", s.graphs.len()),
    )
}

fn bounds_and_guarantee(s: &Suite) -> Outcome {
    let mut failures = Vec::new();
    let mut tight = 0;
    for (i, (g, &opt)) in s.graphs.iter().zip(&s.optima).enumerate() {
        let k = g.terminals().len() as u128;
        let b = compute_bounds(g, &isolating_cuts(g), 0);
        let witness = g.crossing_weight(&b.witness);
        if !(b.lower <= opt && opt <= b.upper) {
            failures.push(format!("instance {i}: {} <= {opt} <= {} violated", b.lower, b.upper));
        }
        if witness != b.upper {
            failures.push(format!("instance {i}: witness weighs {witness}, upper is {}", b.upper));
        }
        // UB <= 2 (1 - 1/k) OPT  <=>  k UB <= 2 (k - 1) OPT
        if k * b.upper as u128 > 2 * (k - 1) * opt as u128 {
            failures.push(format!("instance {i}: upper {} exceeds 2(1-1/{k}) * {opt}", b.upper));
        }
        if b.lower == b.upper {
            tight += 1;
        }
    }
    outcome(&failures, format!("{} instances, {tight} closed by bounds alone", s.graphs.len()))
}

fn capforest_soundness() -> Outcome {
    let mut failures = Vec::new();
    let mut edges = 0;
    for i in 0..150u64 {
        let n = 2 + (i % 9) as usize;
        let g = generate_random_graph(n, 1.5 + (i % 6) as f64, 7, 5000 + i);
        for ((u, v), gamma) in capforest(&g).iter() {
            edges += 1;
            let lambda = min_st_cut(&g, u, &[v]).value;
            if gamma > lambda {
                failures.push(format!("graph {i} edge ({u},{v}): gamma {gamma} > lambda {lambda}"));
            }
        }
    }
    outcome(&failures, format!("150 graphs, {edges} edges checked against pairwise max-flow"))
}

fn median(v: &mut [u64]) -> u64 {
    v.sort_unstable();
    let m = v.len() / 2;
    if !v.len().is_multiple_of(2) {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2
    }
}

fn kernel_effectiveness() -> Outcome {
    let mut with = Vec::new();
    let mut without = Vec::new();
    let mut failures = Vec::new();
    for i in 0..20u64 {
        let g = generate_random_graph(200, 3.0, 5, 9000 + i);
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let g = make_terminals(g, &TerminalSpec::Grown { k: 5, fraction: 0.4 }, &mut rng).expect("fits");
        let all = solve(&g, &SearchConfig::default()).expect("solvable");
        let none_cfg = SearchConfig { reductions: ReductionConfig::none(), ..SearchConfig::default() };
        let none = solve(&g, &none_cfg).expect("solvable");
        if all.weight != none.weight {
            failures.push(format!("instance {i}: {} with reductions, {} without", all.weight, none.weight));
        }
        with.push(all.stats.problems_explored);
        without.push(none.stats.problems_explored);
    }
    let (m_with, m_without) = (median(&mut with), median(&mut without));
    if m_with > m_without {
        failures.push(format!("median problems {m_with} with reductions > {m_without} without"));
    }
    outcome(&failures, format!("median problems explored: {m_with} with reductions, {m_without} without"))
}

fn kernel_ilp_consistency(s: &Suite) -> Outcome {
    let mut failures = Vec::new();
    let mut nontrivial = 0;
    for (i, (g, &opt)) in s.graphs.iter().zip(&s.optima).enumerate() {
        let mut p = Problem::new(g.clone());
        kernelize(&mut p, &ReductionConfig::all(), Weight::MAX);
        if p.lower >= p.upper {
            continue;
        }
        nontrivial += 1;
        let kernel = p.graph.compact();
        let exported = lp_text(&build_ilp(&kernel).lp);
        let model = read_lp(&exported).expect("own LP output parses");
        let lp_value = solve_lp_exhaustive(&model, DEFAULT_CAP).expect("small model").objective as Weight;
        let oracle_value = brute_force(&kernel, DEFAULT_CAP).expect("small").weight;
        if lp_value + p.deleted != opt || oracle_value + p.deleted != opt {
            failures.push(format!("instance {i}: lp {lp_value} oracle {oracle_value} + {} vs {opt}", p.deleted));
        }
        let options = KernelIlpOptions {
            reductions: ReductionConfig::all(),
            backend: IlpBackend::Exhaustive { cap: DEFAULT_CAP },
            output_prefix: None,
        };
        let lifted = kernel_ilp(g, &options).expect("pipeline").result.expect("solved");
        if lifted.weight != opt || g.crossing_weight(&lifted.assignment) != opt {
            failures.push(format!("instance {i}: kernel+ILP pipeline gave {}", lifted.weight));
        }
    }
    if nontrivial == 0 {
        failures.push("no instance kept a nontrivial kernel".into());
    }
    outcome(&failures, format!("{nontrivial} instances with a nontrivial kernel, all consistent"))
}

fn determinism() -> Outcome {
    let mut failures = Vec::new();
    let mut graphs: Vec<Graph> = (0..40).map(instance).collect();
    for i in 0..3u64 {
        let g = generate_random_graph(200, 3.0, 5, 9000 + i);
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        graphs.push(make_terminals(g, &TerminalSpec::Grown { k: 5, fraction: 0.4 }, &mut rng).expect("fits"));
    }
    for (i, g) in graphs.iter().enumerate() {
        for &edge_selection in EdgeSelection::ALL {
            for &queue_order in QueueOrder::ALL {
                let cfg = SearchConfig { edge_selection, queue_order, seed: 17, ..SearchConfig::default() };
                let a = solve(g, &cfg).expect("solvable");
                let b = solve(g, &cfg).expect("solvable");
                let mut sa = a.stats.clone();
                let mut sb = b.stats.clone();
                sa.wall_time = Default::default();
                sb.wall_time = Default::default();
                if format_assignment(&a.assignment) != format_assignment(&b.assignment)
                    || sa != sb
                    || a.weight != b.weight
                {
                    failures.push(format!("instance {i} {edge_selection}/{queue_order} differs between runs"));
                }
            }
        }
    }
    outcome(&failures, format!("{} instances x 40 configurations, identical twice", graphs.len()))
}

fn g_ex_regression() -> Outcome {
    let g = g_ex();
    let mut root = Problem::new(g.clone());
    kernelize(&mut root, &ReductionConfig::all(), Weight::MAX);
    let r = solve(&g, &SearchConfig::default()).expect("solvable");
    let ok = r.weight == 4
        && r.optimal
        && r.stats.problems_explored == 1
        && root.lower == 4
        && root.upper == 4
        && g.crossing_weight(&r.assignment) == 4;
    Outcome {
        pass: ok,
        detail: format!(
            "weight {}, root bounds {}/{}, problems explored {}",
            r.weight, root.lower, root.upper, r.stats.problems_explored
        ),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let graphs: Vec<Graph> = (0..BATCH).map(instance).collect();
    let optima = graphs.iter().map(|g| brute_force(g, DEFAULT_CAP).expect("small instance").weight).collect();
    let suite = Suite { graphs, optima };

    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Box::new(|| oracle_equivalence(&suite))),
        ("kernelization safety", Box::new(|| kernel_safety(&suite))),
        ("bound validity and 2(1-1/k) guarantee", Box::new(|| bounds_and_guarantee(&suite))),
        ("capforest soundness", Box::new(capforest_soundness)),
        ("kernel effectiveness", Box::new(kernel_effectiveness)),
        ("kernel+ILP consistency", Box::new(|| kernel_ilp_consistency(&suite))),
        ("determinism", Box::new(determinism)),
        ("reference instance regression", Box::new(g_ex_regression)),
    ];

    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {verdict} ({}; {:.1}s)", n + 1, o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
