//! Data reductions for multiterminal cut.
//!
//! Every reduction either contracts an edge whose endpoints share a block in
//! an optimum, or deletes an edge that an optimum cuts (its weight moves into
//! the problem's deleted counter). Local rules only mark edges in a
//! union-find; one batch contraction per pass applies them.
//!
//! Marks come in two strengths. A *sure* mark holds in every optimum
//! (DegreeOne, strict DegreeTwo, strict HeavyEdge, SemiEnclosed,
//! HighConnectivity); any number of them combine. A *some* mark only holds in
//! some optimum (DegreeTwo tie, HeavyEdge at exactly half the degree,
//! HeavyTriangle). Its proof moves one endpoint into the other's block, which
//! can break another some-mark on the moved vertex, so within one batch the
//! non-terminal endpoints of some-marks must be pairwise disjoint.

use serde::{Deserialize, Serialize};

use crate::capforest::{capforest, GammaMap};
use crate::flow::{compute_bounds, isolating_cuts_parallel, BoundPair, STCut};
use crate::graph::{Graph, VertexId, Weight};
use crate::search::Problem;
use crate::union_find::UnionFind;

/// Which local rule groups run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionConfig {
    /// IsolatedVertex, DegreeOne, DegreeTwo.
    pub low: bool,
    /// HeavyEdge, SemiEnclosed.
    pub high: bool,
    /// HeavyTriangle.
    pub triangle: bool,
    /// HighConnectivity.
    pub high_connectivity: bool,
}

impl ReductionConfig {
    pub const fn all() -> Self {
        ReductionConfig { low: true, high: true, triangle: true, high_connectivity: true }
    }

    pub const fn none() -> Self {
        ReductionConfig { low: false, high: false, triangle: false, high_connectivity: false }
    }

    pub fn any(&self) -> bool {
        self.low || self.high || self.triangle || self.high_connectivity
    }

    /// `all`, `none`, or a comma separated subset of
    /// `low,high,triangle,highconn`.
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "all" => return Ok(Self::all()),
            "none" | "" => return Ok(Self::none()),
            _ => {}
        }
        let mut cfg = Self::none();
        for part in s.split(',') {
            match part.trim().to_ascii_lowercase().as_str() {
                "low" => cfg.low = true,
                "high" => cfg.high = true,
                "triangle" => cfg.triangle = true,
                "highconn" | "highconnectivity" | "high-connectivity" => cfg.high_connectivity = true,
                other => return Err(format!("unknown reduction `{other}`")),
            }
        }
        Ok(cfg)
    }
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self::all()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    IsolatedVertex,
    DegreeOne,
    DegreeTwo,
    HeavyEdge,
    SemiEnclosed,
    HeavyTriangle,
    HighConnectivity,
}

/// Reduction counters. Contraction rules count applied unions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLog {
    pub isolated_vertex: u64,
    pub degree_one: u64,
    pub degree_two: u64,
    pub heavy_edge: u64,
    pub semi_enclosed: u64,
    pub heavy_triangle: u64,
    pub high_connectivity: u64,
    /// Vertices merged into terminals by isolating-cut contraction.
    pub isolating_cut_contraction: u64,
    pub terminal_edge_deletion: u64,
    pub contracted_vertices: u64,
    pub deleted_weight: Weight,
}

impl ReductionLog {
    fn bump(&mut self, rule: Rule) {
        let slot = match rule {
            Rule::IsolatedVertex => &mut self.isolated_vertex,
            Rule::DegreeOne => &mut self.degree_one,
            Rule::DegreeTwo => &mut self.degree_two,
            Rule::HeavyEdge => &mut self.heavy_edge,
            Rule::SemiEnclosed => &mut self.semi_enclosed,
            Rule::HeavyTriangle => &mut self.heavy_triangle,
            Rule::HighConnectivity => &mut self.high_connectivity,
        };
        *slot += 1;
    }

    pub fn merge(&mut self, other: &ReductionLog) {
        self.isolated_vertex += other.isolated_vertex;
        self.degree_one += other.degree_one;
        self.degree_two += other.degree_two;
        self.heavy_edge += other.heavy_edge;
        self.semi_enclosed += other.semi_enclosed;
        self.heavy_triangle += other.heavy_triangle;
        self.high_connectivity += other.high_connectivity;
        self.isolating_cut_contraction += other.isolating_cut_contraction;
        self.terminal_edge_deletion += other.terminal_edge_deletion;
        self.contracted_vertices += other.contracted_vertices;
        self.deleted_weight += other.deleted_weight;
    }

    /// `(name, count)` pairs in a fixed order, for reports.
    pub fn entries(&self) -> [(&'static str, u64); 11] {
        [
            ("isolated_vertex", self.isolated_vertex),
            ("degree_one", self.degree_one),
            ("degree_two", self.degree_two),
            ("heavy_edge", self.heavy_edge),
            ("semi_enclosed", self.semi_enclosed),
            ("heavy_triangle", self.heavy_triangle),
            ("high_connectivity", self.high_connectivity),
            ("isolating_cut_contraction", self.isolating_cut_contraction),
            ("terminal_edge_deletion", self.terminal_edge_deletion),
            ("contracted_vertices", self.contracted_vertices),
            ("deleted_weight", self.deleted_weight),
        ]
    }
}

/// Source of the best known solution value, and sink for new witnesses.
pub trait Incumbent {
    fn value(&self) -> Weight;
    /// Called with every bound computation; `bounds.witness` is indexed by
    /// the slots of `graph`, and `bounds.upper` already includes the
    /// deleted weight.
    fn offer(&self, _graph: &Graph, _bounds: &BoundPair) {}
}

/// A fixed incumbent value that ignores offers.
impl Incumbent for Weight {
    fn value(&self) -> Weight {
        *self
    }
}

#[derive(Clone, Debug)]
pub struct KernelOutcome {
    /// Bounds of the final graph (not folded with earlier ones).
    pub bounds: BoundPair,
    /// Isolating cut values of the final graph.
    pub lambdas: Vec<Weight>,
    pub log: ReductionLog,
}

struct MarkBatch {
    uf: UnionFind,
    claimed: Vec<bool>,
    isolated: Vec<VertexId>,
    log: ReductionLog,
    marks: usize,
}

impl MarkBatch {
    fn new(g: &Graph) -> Self {
        let mut uf = UnionFind::new(g.capacity());
        for t in g.terminals().iter() {
            uf.mark(t);
        }
        MarkBatch {
            uf,
            claimed: vec![false; g.capacity()],
            isolated: Vec::new(),
            log: ReductionLog::default(),
            marks: 0,
        }
    }

    fn is_empty(&self) -> bool {
        self.marks == 0 && self.isolated.is_empty()
    }

    fn sure(&mut self, u: VertexId, v: VertexId, rule: Rule) -> bool {
        if self.uf.union(u, v) {
            self.log.bump(rule);
            self.marks += 1;
            true
        } else {
            false
        }
    }

    fn some(&mut self, g: &Graph, u: VertexId, v: VertexId, rule: Rule) -> bool {
        let blocked = |x: VertexId| !g.is_terminal(x) && self.claimed[x];
        if blocked(u) || blocked(v) {
            return false;
        }
        if !self.uf.union(u, v) {
            return false;
        }
        self.claimed[u] = true;
        self.claimed[v] = true;
        self.log.bump(rule);
        self.marks += 1;
        true
    }
}

/// Vertices to examine in a pass; `None` means all.
type Scope<'a> = Option<&'a [bool]>;

fn in_scope(scope: Scope<'_>, v: VertexId) -> bool {
    scope.is_none_or(|s| s[v])
}

/// Deletes every edge between two terminals; returns `(i, j, weight)` per
/// deleted edge, with terminal indices `i < j`.
pub fn delete_terminal_edges(p: &mut Problem, log: &mut ReductionLog) -> Vec<(usize, usize, Weight)> {
    let g = &mut p.graph;
    let mut found = Vec::new();
    for i in 0..g.terminals().len() {
        let t = g.terminals().vertex(i);
        for (x, _) in g.neighbors(t) {
            if let Some(j) = g.terminal_index(x) {
                if i < j {
                    found.push((i, j));
                }
            }
        }
    }
    let mut out = Vec::with_capacity(found.len());
    for (i, j) in found {
        let (a, b) = (g.terminals().vertex(i), g.terminals().vertex(j));
        let w = g.delete_edge(a, b).expect("terminal edge exists");
        p.deleted += w;
        log.terminal_edge_deletion += 1;
        log.deleted_weight += w;
        out.push((i, j, w));
    }
    out
}

/// Contracts isolating sides into their terminals, in terminal order. The
/// maximal side is used unless it overlaps an earlier contracted side; then
/// the minimal side is tried. Returns the number of vertices merged away.
fn contract_sides(g: &mut Graph, cuts: &[STCut], log: &mut ReductionLog) -> usize {
    let mut used = vec![false; g.capacity()];
    let mut merged = 0;
    for cut in cuts {
        let free = |side: &[VertexId]| side.len() > 1 && side.iter().all(|&v| !used[v]);
        let side = if free(&cut.max_side) {
            &cut.max_side
        } else if free(&cut.min_side) {
            &cut.min_side
        } else {
            continue;
        };
        for &v in side {
            used[v] = true;
        }
        g.contract_vertex_set(side).expect("isolating side is connected and holds one terminal");
        merged += side.len() - 1;
    }
    log.isolating_cut_contraction += merged as u64;
    log.contracted_vertices += merged as u64;
    merged
}

/// Contracts every terminal's largest isolating cut into it, deletes the
/// terminal-terminal edges this creates and recomputes the bounds.
pub fn contract_isolating_cuts(p: &mut Problem, log: &mut ReductionLog) -> BoundPair {
    let cuts = isolating_cuts_parallel(&p.graph, 1);
    contract_sides(&mut p.graph, &cuts, log);
    delete_terminal_edges(p, log);
    let cuts = isolating_cuts_parallel(&p.graph, 1);
    let bounds = compute_bounds(&p.graph, &cuts, p.deleted);
    p.absorb_bounds(&bounds, &cuts);
    bounds
}

fn reduce_low(g: &Graph, scope: Scope<'_>, batch: &mut MarkBatch) {
    for v in g.vertices() {
        if g.is_terminal(v) || !in_scope(scope, v) {
            continue;
        }
        let mut nb = g.neighbors(v);
        match g.neighbor_count(v) {
            0 => {
                batch.isolated.push(v);
                batch.log.bump(Rule::IsolatedVertex);
            }
            1 => {
                let (x, _) = nb.next().expect("one neighbour");
                batch.sure(v, x, Rule::DegreeOne);
            }
            2 => {
                let (a, wa) = nb.next().expect("two neighbours");
                let (b, wb) = nb.next().expect("two neighbours");
                if wa > wb {
                    batch.sure(v, a, Rule::DegreeTwo);
                } else if wb > wa {
                    batch.sure(v, b, Rule::DegreeTwo);
                } else if !batch.some(g, v, a, Rule::DegreeTwo) {
                    batch.some(g, v, b, Rule::DegreeTwo);
                }
            }
            _ => {}
        }
    }
}

fn reduce_high(g: &Graph, scope: Scope<'_>, batch: &mut MarkBatch) {
    for v in g.vertices() {
        if g.is_terminal(v) || !in_scope(scope, v) || g.neighbor_count(v) == 0 {
            continue;
        }
        let deg = g.degree(v);

        let mut heaviest: Option<(VertexId, Weight)> = None;
        let (mut t1, mut w1, mut w2) = (None, 0, 0);
        let mut terminal_weight = 0;
        for (x, w) in g.neighbors(v) {
            if heaviest.is_none_or(|(_, hw)| w > hw) {
                heaviest = Some((x, w));
            }
            if g.is_terminal(x) {
                terminal_weight += w;
                if w > w1 {
                    w2 = w1;
                    w1 = w;
                    t1 = Some(x);
                } else if w > w2 {
                    w2 = w;
                }
            }
        }

        let (x, w) = heaviest.expect("has neighbours");
        if 2 * w > deg {
            batch.sure(v, x, Rule::HeavyEdge);
        } else if 2 * w == deg {
            batch.some(g, v, x, Rule::HeavyEdge);
        }

        if let Some(t1) = t1 {
            let non_terminal = deg - terminal_weight;
            if w1 > w2 + non_terminal {
                batch.sure(v, t1, Rule::SemiEnclosed);
            }
        }
    }
}

/// Whether the triangle `(v1, v2, third)` lets `(v1, v2)` be contracted.
/// With `o_i` the weight at `v_i` outside the triangle, some optimum keeps
/// `v1, v2` together when `w12 >= o1 && w12 + w23 >= o2` (or the mirrored
/// condition): whichever block `third` lands in, moving one of the two never
/// costs more.
fn triangle_contractible(g: &Graph, v1: VertexId, v2: VertexId, third: VertexId) -> bool {
    let w12 = g.weight(v1, v2).expect("triangle edge");
    let w13 = g.weight(v1, third).expect("triangle edge");
    let w23 = g.weight(v2, third).expect("triangle edge");
    let o1 = g.degree(v1) - w12 - w13;
    let o2 = g.degree(v2) - w12 - w23;
    (w12 >= o1 && w12 + w23 >= o2) || (w12 >= o2 && w12 + w13 >= o1)
}

fn reduce_triangle(g: &Graph, scope: Scope<'_>, batch: &mut MarkBatch) {
    for u in g.vertices() {
        if g.is_terminal(u) {
            continue;
        }
        for (v, _) in g.neighbors(u) {
            if v < u || g.is_terminal(v) || !(in_scope(scope, u) || in_scope(scope, v)) {
                continue;
            }
            let (small, large) = if g.neighbor_count(u) <= g.neighbor_count(v) { (u, v) } else { (v, u) };
            let found = g
                .neighbors(small)
                .any(|(x, _)| x != large && g.weight(large, x).is_some() && triangle_contractible(g, u, v, x));
            if found {
                batch.some(g, u, v, Rule::HeavyTriangle);
            }
        }
    }
}

/// Sum of isolating cut values without the two largest.
fn sum_without_two_largest(lambdas: &[Weight]) -> Weight {
    let mut sorted = lambdas.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().skip(2).sum()
}

/// Marks edges with `gamma > budget - S / 4`, where `budget` is an upper
/// bound on the current graph's optimum and `S` sums all isolating cut
/// values but the two largest. Compared as `4 gamma > 4 budget - S`.
fn reduce_high_connectivity(g: &Graph, gamma: &GammaMap, lambdas: &[Weight], budget: Weight, batch: &mut MarkBatch) {
    let rest = sum_without_two_largest(lambdas) as i128;
    let threshold = 4 * budget as i128 - rest;
    for ((u, v), bound) in gamma.iter() {
        if g.is_terminal(u) && g.is_terminal(v) {
            continue;
        }
        if 4 * bound as i128 > threshold {
            batch.sure(u, v, Rule::HighConnectivity);
        }
    }
}

/// Applies a batch; returns the vertices whose neighbourhood changed.
fn apply_batch(g: &mut Graph, mut batch: MarkBatch, log: &mut ReductionLog) -> Vec<VertexId> {
    for &v in &batch.isolated {
        g.remove_isolated(v).expect("isolated non-terminal");
    }
    let before = g.num_vertices();
    let survivors = g.contract_classes(&mut batch.uf);
    batch.log.contracted_vertices += (before - g.num_vertices()) as u64;
    log.merge(&batch.log);
    survivors
}

/// Local and connectivity rules to a fixed point. The first pass scans
/// everything, later passes only the changed vertices and their neighbours.
/// Returns whether anything changed.
fn rule_phase(
    p: &mut Problem,
    cfg: &ReductionConfig,
    lambdas: &[Weight],
    incumbent: &dyn Incumbent,
    log: &mut ReductionLog,
) -> bool {
    let mut changed = false;
    let mut dirty: Option<Vec<bool>> = None;
    let mut gamma: Option<GammaMap> = None;
    loop {
        let g = &p.graph;
        let scope = dirty.as_deref();
        let mut batch = MarkBatch::new(g);
        if cfg.low {
            reduce_low(g, scope, &mut batch);
        }
        if cfg.high {
            reduce_high(g, scope, &mut batch);
        }
        if cfg.triangle {
            reduce_triangle(g, scope, &mut batch);
        }
        if cfg.high_connectivity {
            let best = incumbent.value().min(p.upper);
            if best != Weight::MAX && best >= p.deleted {
                let gamma = gamma.get_or_insert_with(|| capforest(g));
                reduce_high_connectivity(g, gamma, lambdas, best - p.deleted, &mut batch);
            }
        }
        if batch.is_empty() {
            return changed;
        }
        changed = true;
        gamma = None;
        let survivors = apply_batch(&mut p.graph, batch, log);
        let g = &p.graph;
        let mut next = vec![false; g.capacity()];
        for v in survivors {
            next[v] = true;
            for (x, _) in g.neighbors(v) {
                next[x] = true;
            }
        }
        dirty = Some(next);
    }
}

/// Kernelization driver.
#[derive(Clone, Copy, Debug)]
pub struct Kernelizer {
    pub config: ReductionConfig,
    /// Threads used for the isolating cut flows.
    pub flow_threads: usize,
}

impl Kernelizer {
    pub fn new(config: ReductionConfig) -> Self {
        Kernelizer { config, flow_threads: 1 }
    }

    /// Runs rounds of: terminal-edge deletion, isolating cuts (bounds, then
    /// contraction of the sides), and the enabled rules to a fixed point,
    /// until a round changes nothing. The last round's cuts were computed on
    /// the final graph, so the returned bounds are exact for it.
    pub fn run(&self, p: &mut Problem, incumbent: &dyn Incumbent) -> KernelOutcome {
        let mut log = ReductionLog::default();
        loop {
            let mut changed = !delete_terminal_edges(p, &mut log).is_empty();

            let cuts = isolating_cuts_parallel(&p.graph, self.flow_threads);
            let bounds = compute_bounds(&p.graph, &cuts, p.deleted);
            p.absorb_bounds(&bounds, &cuts);
            incumbent.offer(&p.graph, &bounds);

            let mut lambdas: Vec<Weight> = cuts.iter().map(|c| c.value).collect();
            if contract_sides(&mut p.graph, &cuts, &mut log) > 0 {
                changed = true;
                for (i, j, w) in delete_terminal_edges(p, &mut log) {
                    lambdas[i] = lambdas[i].saturating_sub(w);
                    lambdas[j] = lambdas[j].saturating_sub(w);
                }
            }

            if self.config.any() && rule_phase(p, &self.config, &lambdas, incumbent, &mut log) {
                changed = true;
            }

            if !changed {
                return KernelOutcome { bounds, lambdas, log };
            }
        }
    }
}

/// Single-threaded kernelization against a fixed incumbent value.
pub fn kernelize(p: &mut Problem, cfg: &ReductionConfig, incumbent: Weight) -> KernelOutcome {
    Kernelizer::new(*cfg).run(p, &incumbent)
}

/// One reduction family in isolation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleGroup {
    Low,
    High,
    Triangle,
    HighConnectivity,
    IsolatingCuts,
    TerminalEdges,
}

impl RuleGroup {
    pub const ALL: [RuleGroup; 6] = [
        RuleGroup::Low,
        RuleGroup::High,
        RuleGroup::Triangle,
        RuleGroup::HighConnectivity,
        RuleGroup::IsolatingCuts,
        RuleGroup::TerminalEdges,
    ];
}

/// Applies only `group`: local groups run to their own fixed point,
/// isolating cuts contract once, terminal edges are deleted once.
/// HighConnectivity uses the problem's own upper bound as incumbent.
pub fn apply_rule_group(p: &mut Problem, group: RuleGroup) -> ReductionLog {
    let mut log = ReductionLog::default();
    let cfg = |low, high, triangle, high_connectivity| ReductionConfig { low, high, triangle, high_connectivity };
    let local = match group {
        RuleGroup::Low => cfg(true, false, false, false),
        RuleGroup::High => cfg(false, true, false, false),
        RuleGroup::Triangle => cfg(false, false, true, false),
        RuleGroup::HighConnectivity => cfg(false, false, false, true),
        RuleGroup::IsolatingCuts => {
            let cuts = isolating_cuts_parallel(&p.graph, 1);
            contract_sides(&mut p.graph, &cuts, &mut log);
            return log;
        }
        RuleGroup::TerminalEdges => {
            delete_terminal_edges(p, &mut log);
            return log;
        }
    };
    let cuts = isolating_cuts_parallel(&p.graph, 1);
    let bounds = compute_bounds(&p.graph, &cuts, p.deleted);
    p.absorb_bounds(&bounds, &cuts);
    let lambdas: Vec<Weight> = cuts.iter().map(|c| c.value).collect();
    rule_phase(p, &local, &lambdas, &Weight::MAX, &mut log);
    log
}
