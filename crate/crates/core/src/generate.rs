//! Seeded random instances and terminal placement.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId, Weight};

#[derive(Debug, Error)]
pub enum TerminalError {
    #[error("{k} terminals requested but the graph has {n} vertices")]
    TooMany { k: usize, n: usize },
    #[error("growth fraction must lie strictly between 0 and 1, got {0}")]
    Fraction(f64),
    #[error("{k} balls of {quota} vertices do not fit into {n} vertices")]
    Overlap { k: usize, quota: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Where terminals come from.
#[derive(Clone, Debug, PartialEq)]
pub enum TerminalSpec {
    Explicit(Vec<VertexId>),
    Random {
        k: usize,
    },
    /// `k` random seeds, each grown by BFS to `floor(fraction * n / k)`
    /// vertices and contracted into one terminal.
    Grown {
        k: usize,
        fraction: f64,
    },
}

/// Connected graph: a random spanning tree plus uniform extra edges until
/// the average degree reaches `avg_deg` (or the graph is complete). Weights
/// are uniform in `1..=max_w`.
pub fn generate_random_graph(n: usize, avg_deg: f64, max_w: Weight, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_w = max_w.max(1);
    let mut g = Graph::new(n);
    if n < 2 {
        return g;
    }
    let mut pairs = BTreeSet::new();
    let mut add = |g: &mut Graph, rng: &mut ChaCha8Rng, u: VertexId, v: VertexId| {
        let key = (u.min(v), u.max(v));
        if u != v && pairs.insert(key) {
            g.add_edge(u, v, rng.gen_range(1..=max_w)).expect("valid edge");
        }
    };

    let order = sample(&mut rng, n, n).into_vec();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        add(&mut g, &mut rng, order[i], parent);
    }

    let max_edges = n * (n - 1) / 2;
    let target = ((n as f64 * avg_deg / 2.0).round() as usize).clamp(n - 1, max_edges);
    while g.num_edges() < target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        add(&mut g, &mut rng, u, v);
    }
    g
}

/// Places terminals on `g`. Grown terminals change the instance: each ball
/// is contracted into its seed and the result is compacted, so the returned
/// graph may be smaller (its members still name the input vertices).
pub fn make_terminals(mut g: Graph, spec: &TerminalSpec, rng: &mut ChaCha8Rng) -> Result<Graph, TerminalError> {
    let n = g.num_vertices();
    match spec {
        TerminalSpec::Explicit(ids) => {
            g.set_terminals(ids)?;
            Ok(g)
        }
        TerminalSpec::Random { k } => {
            let seeds = random_seeds(&g, *k, rng)?;
            g.set_terminals(&seeds)?;
            Ok(g)
        }
        TerminalSpec::Grown { k, fraction } => {
            if !(*fraction > 0.0 && *fraction < 1.0) {
                return Err(TerminalError::Fraction(*fraction));
            }
            let seeds = random_seeds(&g, *k, rng)?;
            let quota = ((fraction * n as f64) / *k as f64).floor() as usize;
            let quota = quota.max(1);
            if quota * k > n {
                return Err(TerminalError::Overlap { k: *k, quota, n });
            }
            let balls = grow_balls(&g, &seeds, quota);
            let mut terminals = Vec::with_capacity(*k);
            for ball in &balls {
                let survivor = if ball.len() > 1 { g.contract_vertex_set(ball)? } else { ball[0] };
                terminals.push(survivor);
            }
            let live: Vec<VertexId> = g.vertices().collect();
            let mut g = g.compact();
            let renamed: Vec<VertexId> =
                terminals.iter().map(|t| live.binary_search(t).expect("survivor is live")).collect();
            g.set_terminals(&renamed)?;
            Ok(g)
        }
    }
}

fn random_seeds(g: &Graph, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<VertexId>, TerminalError> {
    let live: Vec<VertexId> = g.vertices().collect();
    if k > live.len() {
        return Err(TerminalError::TooMany { k, n: live.len() });
    }
    Ok(sample(rng, live.len(), k).into_iter().map(|i| live[i]).collect())
}

/// Simultaneous BFS from `seeds`; one vertex per seed per turn, round robin,
/// until every ball has `quota` vertices or its frontier is exhausted.
fn grow_balls(g: &Graph, seeds: &[VertexId], quota: usize) -> Vec<Vec<VertexId>> {
    let mut owner = vec![usize::MAX; g.capacity()];
    let mut balls: Vec<Vec<VertexId>> = Vec::with_capacity(seeds.len());
    let mut frontier: Vec<VecDeque<VertexId>> = Vec::with_capacity(seeds.len());
    for (i, &s) in seeds.iter().enumerate() {
        owner[s] = i;
        balls.push(vec![s]);
        frontier.push(g.neighbors(s).map(|(x, _)| x).collect());
    }
    loop {
        let mut progressed = false;
        for i in 0..seeds.len() {
            if balls[i].len() >= quota {
                continue;
            }
            while let Some(x) = frontier[i].pop_front() {
                if owner[x] != usize::MAX {
                    continue;
                }
                owner[x] = i;
                balls[i].push(x);
                frontier[i].extend(g.neighbors(x).map(|(y, _)| y).filter(|&y| owner[y] == usize::MAX));
                progressed = true;
                break;
            }
        }
        if !progressed {
            return balls;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force;
    use crate::search::{solve, SearchConfig};

    #[test]
    fn sparse_graph_is_connected_tree_plus() {
        let g = generate_random_graph(5, 2.0, 3, 7);
        assert_eq!(g.num_edges(), 5);
        assert_eq!(g.connected_components().len(), 1);
        assert!(g.edges().iter().all(|e| (1..=3).contains(&e.weight)));
    }

    #[test]
    fn same_seed_same_graph() {
        let a = generate_random_graph(30, 4.0, 9, 11);
        let b = generate_random_graph(30, 4.0, 9, 11);
        assert_eq!(a.edges(), b.edges());
        let c = generate_random_graph(30, 4.0, 9, 12);
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn dense_request_caps_at_complete_graph() {
        let g = generate_random_graph(6, 50.0, 1, 0);
        assert_eq!(g.num_edges(), 15);
    }

    #[test]
    fn explicit_terminals_are_verbatim() {
        let g = generate_random_graph(10, 3.0, 5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = make_terminals(g, &TerminalSpec::Explicit(vec![0, 3, 7]), &mut rng).unwrap();
        assert_eq!(g.terminals().as_slice(), &[0, 3, 7]);
    }

    #[test]
    fn tiny_balls_match_random_mode() {
        let g = generate_random_graph(20, 3.0, 5, 1);
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        let random = make_terminals(g.clone(), &TerminalSpec::Random { k: 4 }, &mut r1).unwrap();
        let grown = make_terminals(g, &TerminalSpec::Grown { k: 4, fraction: 0.1 }, &mut r2).unwrap();
        let originals = |g: &Graph| -> Vec<usize> { g.terminals().iter().map(|t| g.members(t)[0]).collect() };
        assert_eq!(originals(&random), originals(&grown));
        assert_eq!(grown.num_vertices(), 20);
    }

    #[test]
    fn grown_balls_contract() {
        let g = generate_random_graph(40, 3.0, 5, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grown = make_terminals(g, &TerminalSpec::Grown { k: 4, fraction: 0.5 }, &mut rng).unwrap();
        grown.assert_consistent();
        let mut merged = 0;
        for t in grown.terminals().iter() {
            assert!(grown.members(t).len() <= 5);
            merged += grown.members(t).len() - 1;
        }
        assert!(merged > 0);
        assert_eq!(grown.num_vertices(), 40 - merged);
    }

    #[test]
    fn grown_instance_solves_to_oracle() {
        let g = generate_random_graph(16, 3.0, 5, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let grown = make_terminals(g, &TerminalSpec::Grown { k: 3, fraction: 0.4 }, &mut rng).unwrap();
        let opt = brute_force(&grown, 10_000_000).unwrap().weight;
        assert_eq!(solve(&grown, &SearchConfig::default()).unwrap().weight, opt);
    }

    #[test]
    fn bad_terminal_requests() {
        let g = generate_random_graph(5, 2.0, 1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            make_terminals(g.clone(), &TerminalSpec::Random { k: 6 }, &mut rng),
            Err(TerminalError::TooMany { .. })
        ));
        assert!(matches!(
            make_terminals(g.clone(), &TerminalSpec::Grown { k: 2, fraction: 1.5 }, &mut rng),
            Err(TerminalError::Fraction(_))
        ));
        assert!(make_terminals(g, &TerminalSpec::Explicit(vec![1, 1]), &mut rng).is_err());
    }
}
