//! Connectivity lower bounds for every edge from one maximum-adjacency scan.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::graph::{Graph, VertexId, Weight};

/// Per-edge lower bound on pairwise connectivity, keyed by `(min, max)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GammaMap {
    bounds: BTreeMap<(VertexId, VertexId), Weight>,
}

impl GammaMap {
    pub fn get(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        self.bounds.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((VertexId, VertexId), Weight)> + '_ {
        self.bounds.iter().map(|(&k, &w)| (k, w))
    }
}

/// Scans vertices in maximum-attachment order. When `x` is scanned, every
/// edge `(x, y)` to an unscanned `y` gets `gamma = r(y) + w(x, y)` and `r(y)`
/// grows by `w(x, y)`. Ties in `r` go to the smallest vertex id, and a new
/// scan starts from the smallest unscanned vertex when the heap runs dry.
pub fn capforest(g: &Graph) -> GammaMap {
    let mut attach: Vec<Weight> = vec![0; g.capacity()];
    let mut scanned = vec![false; g.capacity()];
    let mut heap: BinaryHeap<(Weight, Reverse<VertexId>)> = BinaryHeap::new();
    let mut bounds = BTreeMap::new();

    for start in g.vertices() {
        if scanned[start] {
            continue;
        }
        heap.push((0, Reverse(start)));
        while let Some((r, Reverse(x))) = heap.pop() {
            if scanned[x] || r != attach[x] {
                continue;
            }
            scanned[x] = true;
            for (y, w) in g.neighbors(x) {
                if scanned[y] {
                    continue;
                }
                attach[y] += w;
                bounds.insert((x.min(y), x.max(y)), attach[y]);
                heap.push((attach[y], Reverse(y)));
            }
        }
    }
    GammaMap { bounds }
}
