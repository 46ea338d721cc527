use std::time::Duration;

use mtcut::generate::{generate_random_graph, make_terminals, TerminalSpec};
use mtcut::ilp::{build_ilp, evaluate_assignment, lp_text, read_lp};
use mtcut::io::{format_assignment, parse_assignment, parse_metis, parse_terminals, write_metis};
use mtcut::oracle::{brute_force, g_ex, DEFAULT_CAP};
use mtcut::search::SolveError;
use mtcut::{solve, Graph, ReductionConfig, SearchConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const G_EX_METIS: &str = "\
% t1 t2 t3 a b
5 5 1
4 3
4 1 5 1
5 2
1 3 2 1 5 2
3 2 2 1 4 2
";

#[test]
fn reference_instance_from_text() {
    let mut g = parse_metis(G_EX_METIS).unwrap();
    let t = parse_terminals("# terminals\n1 2\n3\n").unwrap();
    g.set_terminals(&t).unwrap();
    let r = solve(&g, &SearchConfig::default()).unwrap();
    assert_eq!(r.weight, 4);
    assert_eq!(parse_assignment(&format_assignment(&r.assignment)).unwrap(), r.assignment);
    assert_eq!(write_metis(&g), write_metis(&g_ex()));
}

#[test]
fn no_terminals_is_an_error() {
    let g = parse_metis(G_EX_METIS).unwrap();
    assert!(matches!(solve(&g, &SearchConfig::default()), Err(SolveError::NoTerminals)));
}

#[test]
fn lp_export_round_trips_and_scores_like_the_graph() {
    let g = g_ex();
    let model = build_ilp(&g);
    assert_eq!(read_lp(&lp_text(&model.lp)).unwrap(), model.lp);
    for a in [[0, 1, 2, 0, 0], [0, 1, 2, 0, 2], [0, 1, 2, 1, 1]] {
        assert_eq!(evaluate_assignment(&g, &a).unwrap(), g.crossing_weight(&a));
    }
}

#[test]
fn grown_terminals_solve_to_the_oracle_value() {
    for seed in 0..10 {
        let g = generate_random_graph(14, 2.5, 4, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = make_terminals(g, &TerminalSpec::Grown { k: 3, fraction: 0.3 }, &mut rng).unwrap();
        let want = brute_force(&g, DEFAULT_CAP).unwrap().weight;
        for reductions in [ReductionConfig::all(), ReductionConfig::none()] {
            let r = solve(&g, &SearchConfig { reductions, ..SearchConfig::default() }).unwrap();
            assert_eq!(r.weight, want, "seed {seed}");
        }
    }
}

#[test]
fn zero_time_limit_still_returns_a_feasible_cut() {
    let g = generate_random_graph(200, 3.0, 5, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g: Graph = make_terminals(g, &TerminalSpec::Random { k: 6 }, &mut rng).unwrap();
    let cfg = SearchConfig { time_limit: Some(Duration::ZERO), ..SearchConfig::default() };
    let r = solve(&g, &cfg).unwrap();
    assert_eq!(g.crossing_weight(&r.assignment), r.weight);
    let t = g.terminals();
    for (b, v) in t.iter().enumerate() {
        assert_eq!(r.assignment[v], b);
    }
}
