//! Exhaustive multiterminal cut: tries every block assignment of the
//! non-terminal vertices. Ground truth for the tests; only usable on tiny
//! graphs.

use thiserror::Error;

use crate::graph::{Assignment, Graph, VertexId, Weight};

pub const DEFAULT_CAP: u64 = 10_000_000;

/// How many optimal assignments are kept.
pub const STORED_OPTIMA: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force needs {required} assignments, cap is {cap}")]
    CapExceeded { required: String, cap: u64 },
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub weight: Weight,
    /// Optimal assignments in enumeration order (at most [`STORED_OPTIMA`]).
    pub optima: Vec<Assignment>,
    pub enumerated: u64,
}

/// Number of assignments the oracle would enumerate, if it fits in `u64`.
pub fn enumeration_size(g: &Graph) -> Option<u64> {
    let k = g.terminals().len().max(1) as u64;
    let free = g.vertices().filter(|&v| !g.is_terminal(v)).count() as u32;
    k.checked_pow(free)
}

/// Minimum multiterminal cut by full enumeration. Non-terminals are visited
/// as a mixed-radix counter in ascending id order (first vertex is the least
/// significant digit), so the first optimum found is deterministic.
pub fn brute_force(g: &Graph, cap: u64) -> Result<OracleResult, OracleError> {
    let k = g.terminals().len().max(1);
    match enumeration_size(g) {
        Some(size) if size <= cap => {}
        other => {
            let required = other.map_or_else(
                || format!("{k}^{}", g.vertices().filter(|&v| !g.is_terminal(v)).count()),
                |s| s.to_string(),
            );
            return Err(OracleError::CapExceeded { required, cap });
        }
    }

    let mut assignment: Assignment = vec![0; g.capacity()];
    for (i, t) in g.terminals().iter().enumerate() {
        assignment[t] = i;
    }
    let free: Vec<VertexId> = g.vertices().filter(|&v| !g.is_terminal(v)).collect();
    let edges = g.edges();

    let mut best = Weight::MAX;
    let mut optima = Vec::new();
    let mut enumerated = 0u64;
    loop {
        enumerated += 1;
        let w: Weight = edges.iter().filter(|e| assignment[e.u] != assignment[e.v]).map(|e| e.weight).sum();
        if w < best {
            best = w;
            optima.clear();
        }
        if w == best && optima.len() < STORED_OPTIMA {
            optima.push(assignment.clone());
        }

        let mut digit = 0;
        loop {
            if digit == free.len() {
                return Ok(OracleResult { weight: best, optima, enumerated });
            }
            let v = free[digit];
            assignment[v] += 1;
            if assignment[v] < k {
                break;
            }
            assignment[v] = 0;
            digit += 1;
        }
    }
}

/// The five-vertex reference instance: terminals t1, t2, t3 (ids 0, 1, 2),
/// non-terminals a = 3, b = 4, edges t1a:3, t2a:1, t3b:2, ab:2, t2b:1.
/// Its optimum is 4.
pub fn g_ex() -> Graph {
    let mut g = Graph::from_edges(5, [(0, 3, 3), (1, 3, 1), (2, 4, 2), (3, 4, 2), (1, 4, 1)]).expect("valid edges");
    g.set_terminals(&[0, 1, 2]).expect("valid terminals");
    g
}
