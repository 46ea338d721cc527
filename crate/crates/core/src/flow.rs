//! Minimum s-T-cuts through a super-sink, isolating cuts and the bounds
//! derived from them.
//!
//! Max flow is FIFO push-relabel with an initial global relabel and the gap
//! heuristic. Both the smallest and the largest source side of a minimum cut
//! are read off the residual network.

use std::collections::VecDeque;

use crate::graph::{Assignment, Graph, VertexId, Weight};

/// A minimum cut separating one source from a set of sinks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STCut {
    pub value: Weight,
    /// Vertices reachable from the source in the residual network.
    pub min_side: Vec<VertexId>,
    /// Source component minus everything that still reaches a sink in the
    /// residual network. Same cut value as `min_side`.
    pub max_side: Vec<VertexId>,
}

/// Residual network over the live vertices of a graph plus one super-sink.
/// Built once and reused for every source of a round.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    slot_to_node: Vec<usize>,
    node_to_slot: Vec<VertexId>,
    first: Vec<usize>,
    head: Vec<usize>,
    rev: Vec<usize>,
    cap: Vec<Weight>,
    res: Vec<Weight>,
    sink_arc: Vec<usize>,
    component: Vec<usize>,
    infinite: Weight,
}

const NONE: usize = usize::MAX;

impl FlowNetwork {
    pub fn new(g: &Graph) -> Self {
        let mut slot_to_node = vec![NONE; g.capacity()];
        let node_to_slot: Vec<VertexId> = g.vertices().collect();
        for (i, &v) in node_to_slot.iter().enumerate() {
            slot_to_node[v] = i;
        }
        let n = node_to_slot.len();
        let sink = n;

        // arcs per node: graph neighbours plus one arc to the sink
        let mut first = vec![0; n + 2];
        for (i, &v) in node_to_slot.iter().enumerate() {
            first[i + 1] = first[i] + g.neighbor_count(v) + 1;
        }
        first[n + 1] = first[n] + n;
        let arcs = first[n + 1];
        let mut head = vec![0; arcs];
        let mut rev = vec![0; arcs];
        let mut cap = vec![0; arcs];
        let mut fill = first.clone();
        let mut sink_arc = vec![0; n];
        for (i, &v) in node_to_slot.iter().enumerate() {
            for (x, w) in g.neighbors(v) {
                let j = slot_to_node[x];
                if i < j {
                    let a = fill[i];
                    let b = fill[j];
                    fill[i] += 1;
                    fill[j] += 1;
                    head[a] = j;
                    head[b] = i;
                    rev[a] = b;
                    rev[b] = a;
                    cap[a] = w;
                    cap[b] = w;
                }
            }
        }
        for i in 0..n {
            let a = fill[i];
            let b = fill[sink];
            fill[i] += 1;
            fill[sink] += 1;
            head[a] = sink;
            head[b] = i;
            rev[a] = b;
            rev[b] = a;
            sink_arc[i] = a;
        }

        let mut component = vec![NONE; n];
        let mut label = 0;
        for start in 0..n {
            if component[start] != NONE {
                continue;
            }
            component[start] = label;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &head[first[x]..first[x + 1]] {
                    if y != sink && component[y] == NONE {
                        component[y] = label;
                        stack.push(y);
                    }
                }
            }
            label += 1;
        }

        let infinite = g.total_weight() + 1;
        let res = cap.clone();
        FlowNetwork { slot_to_node, node_to_slot, first, head, rev, cap, res, sink_arc, component, infinite }
    }

    fn node_count(&self) -> usize {
        self.node_to_slot.len() + 1
    }

    /// Minimum cut separating `source` from every vertex of `sinks`
    /// (`source` itself is ignored if listed).
    pub fn min_cut(&mut self, source: VertexId, sinks: &[VertexId]) -> STCut {
        let n = self.node_to_slot.len();
        let sink = n;
        let s = self.slot_to_node[source];
        assert!(s != NONE, "source {source} is not a live vertex");

        for &a in &self.sink_arc {
            self.cap[a] = 0;
        }
        for &t in sinks {
            let node = self.slot_to_node[t];
            if node != NONE && node != s {
                let a = self.sink_arc[node];
                self.cap[a] = self.infinite;
            }
        }
        self.res.copy_from_slice(&self.cap);

        let value = self.push_relabel(s, sink);

        let mut from_source = vec![false; n + 1];
        from_source[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for a in self.first[x]..self.first[x + 1] {
                let y = self.head[a];
                if self.res[a] > 0 && !from_source[y] {
                    from_source[y] = true;
                    queue.push_back(y);
                }
            }
        }
        debug_assert!(!from_source[sink]);

        let mut to_sink = vec![false; n + 1];
        to_sink[sink] = true;
        queue.push_back(sink);
        while let Some(x) = queue.pop_front() {
            for a in self.first[x]..self.first[x + 1] {
                let y = self.head[a];
                if self.res[self.rev[a]] > 0 && !to_sink[y] {
                    to_sink[y] = true;
                    queue.push_back(y);
                }
            }
        }

        let comp = self.component[s];
        let mut min_side = Vec::new();
        let mut max_side = Vec::new();
        for x in 0..n {
            if from_source[x] {
                min_side.push(self.node_to_slot[x]);
            }
            if self.component[x] == comp && !to_sink[x] {
                max_side.push(self.node_to_slot[x]);
            }
        }
        debug_assert_eq!(self.side_weight(&min_side), value);
        debug_assert_eq!(self.side_weight(&max_side), value);
        STCut { value, min_side, max_side }
    }

    /// Weight of graph edges leaving `side`.
    fn side_weight(&self, side: &[VertexId]) -> Weight {
        let n = self.node_to_slot.len();
        let mut inside = vec![false; n];
        for &v in side {
            inside[self.slot_to_node[v]] = true;
        }
        let mut w = 0;
        for &v in side {
            let x = self.slot_to_node[v];
            for a in self.first[x]..self.first[x + 1] {
                let y = self.head[a];
                if y < n && !inside[y] {
                    w += self.cap[a];
                }
            }
        }
        w
    }

    fn push_relabel(&mut self, s: usize, sink: usize) -> Weight {
        let nodes = self.node_count();
        let mut height = vec![nodes; nodes];
        let mut excess: Vec<Weight> = vec![0; nodes];
        let mut count = vec![0usize; 2 * nodes + 2];
        let mut current: Vec<usize> = self.first[..nodes].to_vec();

        // exact distance labels towards the sink
        height[sink] = 0;
        let mut queue = VecDeque::from([sink]);
        while let Some(x) = queue.pop_front() {
            for a in self.first[x]..self.first[x + 1] {
                let y = self.head[a];
                if y != s && height[y] == nodes && self.res[self.rev[a]] > 0 {
                    height[y] = height[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        height[s] = nodes;
        for &h in &height {
            count[h] += 1;
        }

        let mut active = VecDeque::new();
        for a in self.first[s]..self.first[s + 1] {
            let d = self.res[a];
            if d == 0 {
                continue;
            }
            let y = self.head[a];
            self.res[a] -= d;
            self.res[self.rev[a]] += d;
            if excess[y] == 0 && y != sink {
                active.push_back(y);
            }
            excess[y] += d;
        }

        while let Some(v) = active.pop_front() {
            while excess[v] > 0 {
                if current[v] == self.first[v + 1] {
                    let old = height[v];
                    let mut new = usize::MAX;
                    for a in self.first[v]..self.first[v + 1] {
                        if self.res[a] > 0 {
                            new = new.min(height[self.head[a]] + 1);
                        }
                    }
                    debug_assert!(new != usize::MAX, "active vertex without residual arc");
                    count[old] -= 1;
                    if count[old] == 0 && old < nodes {
                        for u in 0..nodes {
                            if u != s && height[u] > old && height[u] < nodes {
                                count[height[u]] -= 1;
                                height[u] = nodes + 1;
                                count[nodes + 1] += 1;
                            }
                        }
                        new = new.max(nodes + 1);
                    }
                    height[v] = new;
                    count[new] += 1;
                    current[v] = self.first[v];
                    continue;
                }
                let a = current[v];
                let y = self.head[a];
                if self.res[a] > 0 && height[v] == height[y] + 1 {
                    let d = excess[v].min(self.res[a]);
                    self.res[a] -= d;
                    self.res[self.rev[a]] += d;
                    excess[v] -= d;
                    if excess[y] == 0 && y != s && y != sink {
                        active.push_back(y);
                    }
                    excess[y] += d;
                } else {
                    current[v] += 1;
                }
            }
        }
        excess[sink]
    }
}

/// Minimum cut separating `source` from `sinks` on a fresh network.
pub fn min_st_cut(g: &Graph, source: VertexId, sinks: &[VertexId]) -> STCut {
    FlowNetwork::new(g).min_cut(source, sinks)
}

fn isolating_cut(g: &Graph, net: &mut FlowNetwork, i: usize) -> STCut {
    let t = g.terminals().vertex(i);
    if g.neighbor_count(t) == 0 {
        return STCut { value: 0, min_side: vec![t], max_side: vec![t] };
    }
    let others: Vec<VertexId> = g.terminals().iter().filter(|&x| x != t).collect();
    net.min_cut(t, &others)
}

/// One minimum isolating cut per terminal (inactive terminals get value 0
/// and the trivial side).
pub fn isolating_cuts(g: &Graph) -> Vec<STCut> {
    let mut net = FlowNetwork::new(g);
    (0..g.terminals().len()).map(|i| isolating_cut(g, &mut net, i)).collect()
}

/// [`isolating_cuts`] with the flow problems spread over `threads` threads.
pub fn isolating_cuts_parallel(g: &Graph, threads: usize) -> Vec<STCut> {
    let k = g.terminals().len();
    if threads <= 1 || k <= 1 {
        return isolating_cuts(g);
    }
    let net = FlowNetwork::new(g);
    let threads = threads.min(k);
    let mut out: Vec<Option<STCut>> = vec![None; k];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let mut net = net.clone();
                scope.spawn(move || {
                    (w..k).step_by(threads).map(|i| (i, isolating_cut(g, &mut net, i))).collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, cut) in h.join().expect("flow worker panicked") {
                out[i] = Some(cut);
            }
        }
    });
    out.into_iter().map(|c| c.expect("every terminal handled")).collect()
}

/// Lower and upper bound for one problem plus the assignment realising the
/// upper bound (indexed by vertex slot).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundPair {
    pub lower: Weight,
    pub upper: Weight,
    pub witness: Assignment,
}

/// `(lower, upper)` from isolating cut values alone:
/// `lower = deleted + ceil(sum / 2)`, `upper = deleted + sum - max`.
pub fn bound_formulas(lambdas: &[Weight], deleted: Weight) -> (Weight, Weight) {
    let sum: Weight = lambdas.iter().sum();
    let max = lambdas.iter().copied().max().unwrap_or(0);
    (deleted + sum.div_ceil(2), deleted + sum - max)
}

/// Index of the heaviest isolating cut (first one on ties).
pub fn heaviest(cuts: &[STCut]) -> Option<usize> {
    let max = cuts.iter().map(|c| c.value).max()?;
    cuts.iter().position(|c| c.value == max)
}

/// Bounds from the isolating cuts of `g`. The witness gives every terminal
/// but the heaviest its minimal isolating side and everything else to the
/// heaviest terminal. `upper` is `deleted` plus the witness's crossing
/// weight, which never exceeds the sum-minus-max formula.
pub fn compute_bounds(g: &Graph, cuts: &[STCut], deleted: Weight) -> BoundPair {
    let lambdas: Vec<Weight> = cuts.iter().map(|c| c.value).collect();
    let (lower, formula_upper) = bound_formulas(&lambdas, deleted);
    let mut witness = vec![0; g.capacity()];
    if let Some(h) = heaviest(cuts) {
        for v in g.vertices() {
            witness[v] = h;
        }
        for (i, cut) in cuts.iter().enumerate() {
            if i != h {
                for &v in &cut.min_side {
                    witness[v] = i;
                }
            }
        }
    }
    let upper = deleted + g.crossing_weight(&witness);
    debug_assert!(upper <= formula_upper);
    BoundPair { lower, upper, witness }
}
