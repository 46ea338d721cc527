//! Weighted undirected graph with contraction, deletion and terminal
//! bookkeeping.
//!
//! Vertex ids are slots in a vector; contraction kills one slot and keeps the
//! other, so ids stay stable until [`Graph::compact`] rebuilds a dense graph.
//! Every live vertex remembers the set of original vertex ids it stands for,
//! which is how a cut on a kernel is reported on the input graph.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::union_find::UnionFind;

pub type VertexId = usize;
pub type Weight = u64;

/// Block index per vertex slot. Entries of dead slots are meaningless.
pub type Assignment = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    MissingVertex(VertexId),
    #[error("edge ({0}, {1}) does not exist")]
    MissingEdge(VertexId, VertexId),
    #[error("edge ({0}, {1}) has weight zero")]
    ZeroWeight(VertexId, VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("contracting would merge terminals {0} and {1}")]
    TerminalContraction(VertexId, VertexId),
    #[error("vertex set is not connected")]
    Disconnected,
    #[error("vertex set is empty")]
    EmptySet,
    #[error("terminal vertex {0} listed twice")]
    DuplicateTerminal(VertexId),
    #[error("vertex {0} is a terminal")]
    IsTerminal(VertexId),
    #[error("vertex {0} still has incident edges")]
    NotIsolated(VertexId),
    #[error("terminal {terminal} is assigned to block {block}")]
    TerminalMisassigned { terminal: usize, block: usize },
    #[error("assignment has {got} entries, expected {expected}")]
    AssignmentLength { got: usize, expected: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Weight,
}

/// Ordered terminals; terminal `i` owns block `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TerminalSet {
    vertices: Vec<VertexId>,
}

impl TerminalSet {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self, GraphError> {
        let mut seen = vertices.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateTerminal(w[0]));
        }
        Ok(TerminalSet { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> VertexId {
        self.vertices[i]
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentClass {
    /// No terminal: weight 0, any block.
    NoTerminal,
    /// One terminal: weight 0, the whole component joins it.
    SingleTerminal,
    /// Two terminals: one minimum s-t-cut.
    TwoTerminals,
    /// Three or more terminals: branch and reduce.
    MultiTerminal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Live vertices, ascending.
    pub vertices: Vec<VertexId>,
    /// Terminal indices (not vertex ids) inside the component, ascending.
    pub terminals: Vec<usize>,
    pub class: ComponentClass,
}

#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<BTreeMap<VertexId, Weight>>,
    degree: Vec<Weight>,
    alive: Vec<bool>,
    live_count: usize,
    edge_count: usize,
    members: Vec<Vec<usize>>,
    terminal_of: Vec<Option<usize>>,
    terminals: TerminalSet,
    dropped: Vec<usize>,
    original_count: usize,
}

impl Graph {
    /// `n` isolated vertices; vertex `i` stands for original vertex `i`.
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeMap::new(); n],
            degree: vec![0; n],
            alive: vec![true; n],
            live_count: n,
            edge_count: 0,
            members: (0..n).map(|v| vec![v]).collect(),
            terminal_of: vec![None; n],
            terminals: TerminalSet::default(),
            dropped: Vec::new(),
            original_count: n,
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Weight)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.alive.len() && self.alive[v] {
            Ok(())
        } else {
            Err(GraphError::MissingVertex(v))
        }
    }

    /// Adds an edge, summing into an existing one.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: Weight) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if w == 0 {
            return Err(GraphError::ZeroWeight(u, v));
        }
        let entry = self.adj[u].entry(v).or_insert(0);
        if *entry == 0 {
            self.edge_count += 1;
        }
        *entry += w;
        *self.adj[v].entry(u).or_insert(0) += w;
        self.degree[u] += w;
        self.degree[v] += w;
        Ok(())
    }

    pub fn set_terminals(&mut self, vertices: &[VertexId]) -> Result<(), GraphError> {
        for &v in vertices {
            self.check_vertex(v)?;
        }
        let set = TerminalSet::new(vertices.to_vec())?;
        for t in self.terminal_of.iter_mut() {
            *t = None;
        }
        for (i, &v) in vertices.iter().enumerate() {
            self.terminal_of[v] = Some(i);
        }
        self.terminals = set;
        Ok(())
    }

    pub fn terminals(&self) -> &TerminalSet {
        &self.terminals
    }

    pub fn terminal_index(&self, v: VertexId) -> Option<usize> {
        self.terminal_of.get(v).copied().flatten()
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminal_index(v).is_some()
    }

    /// Terminal indices with at least one incident edge.
    pub fn active_terminals(&self) -> Vec<usize> {
        (0..self.terminals.len()).filter(|&i| !self.adj[self.terminals.vertex(i)].is_empty()).collect()
    }

    /// Number of live vertices.
    pub fn num_vertices(&self) -> usize {
        self.live_count
    }

    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    /// Number of vertex slots, live or dead.
    pub fn capacity(&self) -> usize {
        self.alive.len()
    }

    pub fn original_count(&self) -> usize {
        self.original_count
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.alive.len()).filter(move |&v| self.alive[v])
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, Weight)> + '_ {
        self.adj[v].iter().map(|(&x, &w)| (x, w))
    }

    /// Number of distinct neighbours.
    pub fn neighbor_count(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        self.adj.get(u).and_then(|a| a.get(&v)).copied()
    }

    /// Weighted degree.
    pub fn degree(&self, v: VertexId) -> Weight {
        self.degree[v]
    }

    /// All edges with `u < v`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in self.vertices() {
            for (&v, &weight) in self.adj[u].range(u + 1..) {
                out.push(Edge { u, v, weight });
            }
        }
        out
    }

    pub fn total_weight(&self) -> Weight {
        self.vertices().map(|v| self.degree[v]).sum::<Weight>() / 2
    }

    /// Original vertex ids represented by `v`.
    pub fn members(&self, v: VertexId) -> &[usize] {
        &self.members[v]
    }

    /// Original ids of removed isolated vertices; they may join any block.
    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    /// Contracts the edge `(u, v)`. The surviving vertex is the terminal
    /// endpoint if there is one, otherwise the endpoint with more neighbours
    /// (`u` on ties). Returns the survivor.
    pub fn contract_edge(&mut self, u: VertexId, v: VertexId) -> Result<VertexId, GraphError> {
        if self.weight(u, v).is_none() || !self.contains(u) || !self.contains(v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        if self.is_terminal(u) && self.is_terminal(v) {
            return Err(GraphError::TerminalContraction(u, v));
        }
        let (keep, gone) = if self.is_terminal(v) {
            (v, u)
        } else if self.is_terminal(u) || self.adj[u].len() >= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.merge_into(keep, gone);
        Ok(keep)
    }

    /// Removes the edge and returns its weight.
    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) -> Result<Weight, GraphError> {
        if !self.contains(u) || !self.contains(v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        let w = self.adj[u].remove(&v).ok_or(GraphError::MissingEdge(u, v))?;
        self.adj[v].remove(&u);
        self.degree[u] -= w;
        self.degree[v] -= w;
        self.edge_count -= 1;
        Ok(w)
    }

    /// Merges a connected vertex set holding at most one terminal into a
    /// single vertex and returns it.
    pub fn contract_vertex_set(&mut self, set: &[VertexId]) -> Result<VertexId, GraphError> {
        let first = *set.first().ok_or(GraphError::EmptySet)?;
        for &v in set {
            self.check_vertex(v)?;
        }
        let terminals: Vec<VertexId> = set.iter().copied().filter(|&v| self.is_terminal(v)).collect();
        if terminals.len() > 1 {
            return Err(GraphError::TerminalContraction(terminals[0], terminals[1]));
        }
        let mut inside: BTreeMap<VertexId, bool> = set.iter().map(|&v| (v, false)).collect();
        let mut queue = VecDeque::from([first]);
        inside.insert(first, true);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &y in self.adj[x].keys() {
                if let Some(seen) = inside.get_mut(&y) {
                    if !*seen {
                        *seen = true;
                        reached += 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        if reached != inside.len() {
            return Err(GraphError::Disconnected);
        }
        Ok(self.merge_group(set))
    }

    /// Merges every non-trivial set of `uf` (indexed by vertex slot) into one
    /// vertex. Each set must hold at most one terminal. Returns the survivors.
    pub fn contract_classes(&mut self, uf: &mut UnionFind) -> Vec<VertexId> {
        uf.groups().into_iter().map(|group| self.merge_group(&group)).collect()
    }

    /// Merges `group` without a connectivity check. Survivor: the terminal if
    /// present, otherwise the vertex with the most neighbours.
    pub(crate) fn merge_group(&mut self, group: &[VertexId]) -> VertexId {
        let keep = group.iter().copied().find(|&v| self.is_terminal(v)).unwrap_or_else(|| {
            group.iter().copied().max_by_key(|&v| (self.adj[v].len(), std::cmp::Reverse(v))).expect("non-empty group")
        });
        for &v in group {
            if v != keep {
                debug_assert!(!self.is_terminal(v), "group holds two terminals");
                self.merge_into(keep, v);
            }
        }
        keep
    }

    fn merge_into(&mut self, keep: VertexId, gone: VertexId) {
        let gone_adj = std::mem::take(&mut self.adj[gone]);
        for (x, w) in gone_adj {
            self.adj[x].remove(&gone);
            if x == keep {
                self.degree[keep] -= w;
                self.edge_count -= 1;
                continue;
            }
            match self.adj[keep].get_mut(&x) {
                Some(existing) => {
                    *existing += w;
                    *self.adj[x].get_mut(&keep).expect("symmetric adjacency") += w;
                    self.edge_count -= 1;
                }
                None => {
                    self.adj[keep].insert(x, w);
                    self.adj[x].insert(keep, w);
                }
            }
            self.degree[keep] += w;
        }
        self.degree[gone] = 0;
        self.alive[gone] = false;
        self.live_count -= 1;

        let mut moved = std::mem::take(&mut self.members[gone]);
        if moved.len() > self.members[keep].len() {
            std::mem::swap(&mut moved, &mut self.members[keep]);
        }
        self.members[keep].extend(moved);

        if let Some(i) = self.terminal_of[gone].take() {
            self.terminal_of[keep] = Some(i);
            self.terminals.vertices[i] = keep;
        }
    }

    /// Removes a non-terminal vertex without incident edges.
    pub fn remove_isolated(&mut self, v: VertexId) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        if self.is_terminal(v) {
            return Err(GraphError::IsTerminal(v));
        }
        if !self.adj[v].is_empty() {
            return Err(GraphError::NotIsolated(v));
        }
        self.alive[v] = false;
        self.live_count -= 1;
        let members = std::mem::take(&mut self.members[v]);
        self.dropped.extend(members);
        Ok(())
    }

    /// Connected components of the live vertices, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Component> {
        let mut seen = vec![false; self.capacity()];
        let mut out = Vec::new();
        for start in self.vertices() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut vertices = vec![start];
            let mut head = 0;
            while head < vertices.len() {
                let x = vertices[head];
                head += 1;
                for &y in self.adj[x].keys() {
                    if !seen[y] {
                        seen[y] = true;
                        vertices.push(y);
                    }
                }
            }
            vertices.sort_unstable();
            let mut terminals: Vec<usize> = vertices.iter().filter_map(|&v| self.terminal_index(v)).collect();
            terminals.sort_unstable();
            let class = match terminals.len() {
                0 => ComponentClass::NoTerminal,
                1 => ComponentClass::SingleTerminal,
                2 => ComponentClass::TwoTerminals,
                _ => ComponentClass::MultiTerminal,
            };
            out.push(Component { vertices, terminals, class });
        }
        out
    }

    /// Dense copy of the subgraph induced by `vertices` (ascending order is
    /// preserved as the new ids). Terminals are `terminals` (indices into this
    /// graph's terminal set), renumbered `0..` in the given order. Original ids
    /// and the original count are kept.
    pub fn extract(&self, vertices: &[VertexId], terminals: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.capacity()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let n = vertices.len();
        let mut g = Graph::new(n);
        g.original_count = self.original_count;
        for (i, &v) in vertices.iter().enumerate() {
            g.members[i] = self.members[v].clone();
            for (&x, &w) in &self.adj[v] {
                let j = index[x];
                if j != usize::MAX && i < j {
                    g.adj[i].insert(j, w);
                    g.adj[j].insert(i, w);
                    g.degree[i] += w;
                    g.degree[j] += w;
                    g.edge_count += 1;
                }
            }
        }
        let local: Vec<VertexId> = terminals.iter().map(|&t| index[self.terminals.vertex(t)]).collect();
        g.set_terminals(&local).expect("terminals lie inside the extracted vertex set");
        g
    }

    /// Forgets the original ids: every live vertex becomes its own original
    /// vertex. Only meaningful on a dense graph (all slots live).
    pub fn rebase(&mut self) {
        debug_assert_eq!(self.live_count, self.capacity());
        for (i, m) in self.members.iter_mut().enumerate() {
            *m = vec![i];
        }
        self.dropped.clear();
        self.original_count = self.capacity();
    }

    /// Dense copy of all live vertices; terminal order is kept.
    pub fn compact(&self) -> Graph {
        let vertices: Vec<VertexId> = self.vertices().collect();
        let terminals: Vec<usize> = (0..self.terminals.len()).collect();
        let mut g = self.extract(&vertices, &terminals);
        g.dropped = self.dropped.clone();
        g
    }

    /// Sum of weights of edges whose endpoints lie in different blocks.
    pub fn crossing_weight(&self, assignment: &[usize]) -> Weight {
        self.edges().iter().filter(|e| assignment[e.u] != assignment[e.v]).map(|e| e.weight).sum()
    }

    /// Writes the block of every original vertex represented here into
    /// `out` (indexed by original id). Dropped vertices get `dropped_block`.
    pub fn lift_into(&self, assignment: &[usize], dropped_block: usize, out: &mut [usize]) {
        for v in self.vertices() {
            for &o in &self.members[v] {
                out[o] = assignment[v];
            }
        }
        for &o in &self.dropped {
            out[o] = dropped_block;
        }
    }

    /// Panics if internal bookkeeping is inconsistent. Used by tests.
    pub fn assert_consistent(&self) {
        let mut edges = 0;
        let mut seen = vec![false; self.original_count];
        for v in self.vertices() {
            let mut sum = 0;
            for (&x, &w) in &self.adj[v] {
                assert!(self.alive[x], "edge to dead vertex");
                assert_ne!(x, v, "self-loop");
                assert!(w > 0, "zero weight");
                assert_eq!(self.adj[x].get(&v), Some(&w), "asymmetric edge");
                sum += w;
                if v < x {
                    edges += 1;
                }
            }
            assert_eq!(sum, self.degree[v], "degree of {v}");
            for &o in &self.members[v] {
                assert!(!seen[o], "original {o} represented twice");
                seen[o] = true;
            }
        }
        for &o in &self.dropped {
            assert!(!seen[o], "original {o} represented twice");
            seen[o] = true;
        }
        assert_eq!(edges, self.edge_count);
        assert_eq!(self.vertices().count(), self.live_count);
        for (i, t) in self.terminals.iter().enumerate() {
            assert!(self.alive[t]);
            assert_eq!(self.terminal_of[t], Some(i));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force, g_ex};
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)]).unwrap()
    }

    #[test]
    fn contract_merges_parallel_edges() {
        let mut g = triangle();
        let keep = g.contract_edge(0, 1).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.weight(keep, 2), Some(5));
        assert_eq!(g.degree(2), 5);
        g.assert_consistent();
    }

    #[test]
    fn contract_terminal_edge_keeps_terminal() {
        let mut g = Graph::from_edges(2, [(0, 1, 3)]).unwrap();
        g.set_terminals(&[1]).unwrap();
        let keep = g.contract_edge(0, 1).unwrap();
        assert_eq!(keep, 1);
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.terminals().vertex(0), 1);
        assert_eq!(g.members(1).len(), 2);
    }

    #[test]
    fn contracting_two_terminals_fails() {
        let mut g = Graph::from_edges(2, [(0, 1, 3)]).unwrap();
        g.set_terminals(&[0, 1]).unwrap();
        assert_eq!(g.contract_edge(0, 1), Err(GraphError::TerminalContraction(0, 1)));
    }

    #[test]
    fn delete_edge_returns_weight() {
        let mut g = Graph::from_edges(2, [(0, 1, 5)]).unwrap();
        assert_eq!(g.delete_edge(0, 1), Ok(5));
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.degree(0), 0);
        assert_eq!(g.delete_edge(0, 1), Err(GraphError::MissingEdge(0, 1)));
    }

    #[test]
    fn delete_drops_endpoint_degrees() {
        let mut g = triangle();
        let (d1, d2) = (g.degree(1), g.degree(2));
        let w = g.delete_edge(1, 2).unwrap();
        assert_eq!(g.degree(1), d1 - w);
        assert_eq!(g.degree(2), d2 - w);
    }

    #[test]
    fn zero_weight_and_self_loops_rejected() {
        let mut g = Graph::new(2);
        assert_eq!(g.add_edge(0, 1, 0), Err(GraphError::ZeroWeight(0, 1)));
        assert_eq!(g.add_edge(1, 1, 2), Err(GraphError::SelfLoop(1)));
    }

    #[test]
    fn contract_vertex_set_variants() {
        let mut g = triangle();
        assert_eq!(g.contract_vertex_set(&[2]), Ok(2));
        assert_eq!(g.num_vertices(), 3);

        // star centre 0 with leaves 1..=4; contract centre and two leaves
        let mut star = Graph::from_edges(5, [(0, 1, 1), (0, 2, 2), (0, 3, 3), (0, 4, 4)]).unwrap();
        let c = star.contract_vertex_set(&[0, 1, 2]).unwrap();
        assert_eq!(star.num_vertices(), 3);
        assert_eq!(star.weight(c, 3), Some(3));
        assert_eq!(star.weight(c, 4), Some(4));
        star.assert_consistent();

        let mut g = Graph::from_edges(4, [(0, 1, 1), (2, 3, 1)]).unwrap();
        assert_eq!(g.contract_vertex_set(&[0, 2]), Err(GraphError::Disconnected));
        g.set_terminals(&[0, 1]).unwrap();
        assert!(matches!(g.contract_vertex_set(&[0, 1]), Err(GraphError::TerminalContraction(..))));
    }

    #[test]
    fn g_ex_contractions_preserve_optimum() {
        // (a,b) shares a block in an optimum, as does the isolating side {t1, a}
        let mut g = g_ex();
        assert_eq!(brute_force(&g, 1_000).unwrap().weight, 4);
        g.contract_edge(3, 4).unwrap();
        assert_eq!(brute_force(&g, 1_000).unwrap().weight, 4);

        let mut g = g_ex();
        g.contract_vertex_set(&[0, 3]).unwrap();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(brute_force(&g, 1_000).unwrap().weight, 4);
    }

    #[test]
    fn g_ex_deletion_accounts_weight() {
        let mut g = g_ex();
        let w = g.delete_edge(1, 3).unwrap();
        assert_eq!(w, 1);
        assert_eq!(brute_force(&g, 1_000).unwrap().weight + w, 4);
    }

    #[test]
    fn components_are_classified() {
        let mut g = Graph::from_edges(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)]).unwrap();
        g.set_terminals(&[0, 3]).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.class == ComponentClass::SingleTerminal));

        let mut g = Graph::from_edges(3, [(0, 1, 7)]).unwrap();
        g.set_terminals(&[0, 1, 2]).unwrap();
        let classes: Vec<_> = g.connected_components().iter().map(|c| c.class).collect();
        assert_eq!(classes, vec![ComponentClass::TwoTerminals, ComponentClass::SingleTerminal]);
    }

    #[test]
    fn extract_keeps_members_and_terminals() {
        let mut g = Graph::from_edges(5, [(0, 1, 1), (3, 4, 2), (2, 3, 3)]).unwrap();
        g.set_terminals(&[4, 0, 2]).unwrap();
        let sub = g.extract(&[2, 3, 4], &[0, 2]);
        assert_eq!(sub.num_vertices(), 3);
        assert_eq!(sub.num_edges(), 2);
        assert_eq!(sub.terminals().as_slice(), &[2, 0]);
        assert_eq!(sub.members(1), &[3]);
        assert_eq!(sub.original_count(), 5);
        sub.assert_consistent_partial();
    }

    impl Graph {
        fn assert_consistent_partial(&self) {
            for v in self.vertices() {
                let sum: Weight = self.neighbors(v).map(|(_, w)| w).sum();
                assert_eq!(sum, self.degree(v));
            }
        }
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, u64)>)> {
        (3usize..10).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n, 1u64..6), 0..25)))
    }

    proptest! {
        #[test]
        fn contraction_keeps_members_a_partition(
            (n, edges) in arb_graph(),
            picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..8),
        ) {
            let edges: Vec<_> = edges.into_iter().filter(|(u, v, _)| u != v).collect();
            let mut g = Graph::from_edges(n, edges).unwrap();
            let total = g.total_weight();
            let mut removed = 0;
            for pick in picks {
                let es = g.edges();
                if es.is_empty() { break; }
                let e = es[pick.index(es.len())];
                let before = g.weight(e.u, e.v).unwrap();
                g.contract_edge(e.u, e.v).unwrap();
                removed += before;
                g.assert_consistent();
            }
            prop_assert_eq!(g.total_weight() + removed, total);
            let mut all: Vec<usize> = g.vertices().flat_map(|v| g.members(v).to_vec()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}
