//! Branch and reduce.
//!
//! Each connected component with three or more terminals is solved by a
//! best-first search over problems. A problem is kernelized when it is
//! created; popping it either prunes it against the incumbent, closes it
//! (lower bound meets upper bound) or branches on one edge into `G/e` and
//! `G-e`.
//!
//! With several threads every worker owns a priority queue. New problems go
//! to the worker's own queue when it is among the smallest, otherwise to a
//! random smallest queue; idle workers steal from the others. Workers share
//! the incumbent, the queue sizes and an in-flight counter used to detect
//! termination.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{min_st_cut, BoundPair, STCut};
use crate::graph::{Assignment, ComponentClass, Graph, VertexId, Weight};
use crate::kernel::{Incumbent, Kernelizer, ReductionConfig, ReductionLog};

/// One node of the search tree.
#[derive(Clone, Debug)]
pub struct Problem {
    pub graph: Graph,
    /// Lower bound on the best solution inside this branch, deleted weight
    /// included.
    pub lower: Weight,
    /// Upper bound (weight of a known solution of this branch).
    pub upper: Weight,
    /// Weight of all edges deleted on the way here.
    pub deleted: Weight,
    /// Isolating cut values from the last bound computation.
    pub lambdas: Vec<Weight>,
    seq: u64,
    kernel_best: Weight,
}

impl Problem {
    pub fn new(graph: Graph) -> Self {
        Problem {
            graph,
            lower: 0,
            upper: Weight::MAX,
            deleted: 0,
            lambdas: Vec::new(),
            seq: 0,
            kernel_best: Weight::MAX,
        }
    }

    /// Terminals that still have an incident edge.
    pub fn active_terminals(&self) -> usize {
        self.graph.active_terminals().len()
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub(crate) fn absorb_bounds(&mut self, bounds: &BoundPair, cuts: &[STCut]) {
        self.lower = self.lower.max(bounds.lower);
        self.upper = self.upper.min(bounds.upper);
        self.lambdas = cuts.iter().map(|c| c.value).collect();
    }

    /// `2 * deleted + sum of isolating cuts`: twice the unrounded lower bound.
    fn doubled_bound(&self) -> u128 {
        2 * self.deleted as u128 + self.lambdas.iter().map(|&l| l as u128).sum::<u128>()
    }

    fn estimated_bytes(&self) -> usize {
        std::mem::size_of::<Problem>() + self.graph.capacity() * 96 + self.graph.num_edges() * 2 * 48
    }
}

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.name().to_ascii_lowercase() == key)
                    .ok_or_else(|| format!("unknown {} `{s}`", stringify!($name)))
            }
        }
    };
}

named_enum! {
    /// Which edge to branch on.
    EdgeSelection {
        HeavyEdge => "HeavyEdge",
        HeavyVertex => "HeavyVertex",
        Connection => "Connection",
        NonTerminalWeight => "NonTerminalWeight",
        HeavyGlobal => "HeavyGlobal",
    }
}

named_enum! {
    /// Priority of open problems.
    QueueOrder {
        LowerBound => "LowerBound",
        UpperBound => "UpperBound",
        BoundSum => "BoundSum",
        BiggerDistance => "BiggerDistance",
        LowerDistance => "LowerDistance",
        MostDeleted => "MostDeleted",
        SmallerGraph => "SmallerGraph",
        FewTerminals => "FewTerminals",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub edge_selection: EdgeSelection,
    pub queue_order: QueueOrder,
    pub reductions: ReductionConfig,
    pub threads: usize,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// Rough cap on the bytes held by open problems.
    pub memory_limit: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            edge_selection: EdgeSelection::HeavyVertex,
            queue_order: QueueOrder::LowerBound,
            reductions: ReductionConfig::all(),
            threads: 1,
            time_limit: None,
            seed: 0,
            memory_limit: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub problems_explored: u64,
    pub reductions: ReductionLog,
    pub wall_time: Duration,
    /// Vertices and edges left after kernelizing the roots of all components
    /// that needed a search.
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub weight: Weight,
    /// Block (terminal index) of every vertex.
    pub assignment: Assignment,
    /// False when the time limit stopped the search.
    pub optimal: bool,
    pub stats: SearchStats,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instance has no terminals")]
    NoTerminals,
    #[error("open problems exceeded the memory budget of {limit} bytes")]
    MemoryBudget { limit: usize, best: Box<CutResult> },
}

/// Orders two problems; `Less` means `a` is explored first.
pub fn compare_problems(a: &Problem, b: &Problem, order: QueueOrder) -> Ordering {
    let by_lower = a.lower.cmp(&b.lower).then(a.upper.cmp(&b.upper));
    let gap = |p: &Problem| p.upper.saturating_sub(p.lower);
    let primary = match order {
        QueueOrder::LowerBound => by_lower,
        QueueOrder::UpperBound => a.upper.cmp(&b.upper).then(a.lower.cmp(&b.lower)),
        QueueOrder::BoundSum => {
            let sum = |p: &Problem| p.lower as u128 + p.upper as u128;
            sum(a).cmp(&sum(b)).then(by_lower)
        }
        QueueOrder::BiggerDistance => gap(b).cmp(&gap(a)).then(by_lower),
        QueueOrder::LowerDistance => gap(a).cmp(&gap(b)).then(by_lower),
        QueueOrder::MostDeleted => b.deleted.cmp(&a.deleted).then(by_lower),
        QueueOrder::SmallerGraph => a.graph.num_vertices().cmp(&b.graph.num_vertices()).then(by_lower),
        QueueOrder::FewTerminals => a.active_terminals().cmp(&b.active_terminals()).then(by_lower),
    };
    primary.then(a.seq.cmp(&b.seq))
}

/// Heaviest terminal link of a non-terminal vertex: `(terminal, weight)`,
/// smallest terminal id on ties.
fn heaviest_terminal_link(g: &Graph, v: VertexId) -> Option<(VertexId, Weight)> {
    let mut best: Option<(VertexId, Weight)> = None;
    for (x, w) in g.neighbors(v) {
        if g.is_terminal(x) && best.is_none_or(|(_, bw)| w > bw) {
            best = Some((x, w));
        }
    }
    best
}

fn ordered(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

/// Picks the edge to branch on. Candidates with equal score are decided by
/// the smallest vertex id, then the smallest edge `(min, max)`. Returns
/// `None` when no terminal has a non-terminal neighbour (or, for
/// HeavyGlobal, when there are no edges).
pub fn select_branch_edge(g: &Graph, strategy: EdgeSelection) -> Option<(VertexId, VertexId)> {
    // (score, vertex, edge); max score, then min vertex, then min edge
    let mut best: Option<(u128, VertexId, (VertexId, VertexId))> = None;
    let mut consider = |score: u128, vertex: VertexId, edge: (VertexId, VertexId)| {
        let better = match best {
            None => true,
            Some((s, v, e)) => score > s || (score == s && (vertex, edge) < (v, e)),
        };
        if better {
            best = Some((score, vertex, edge));
        }
    };

    match strategy {
        EdgeSelection::HeavyGlobal => {
            for e in g.edges() {
                consider(e.weight as u128, e.u, (e.u, e.v));
            }
        }
        EdgeSelection::HeavyEdge => {
            for t in g.terminals().iter() {
                for (x, w) in g.neighbors(t) {
                    if !g.is_terminal(x) {
                        let edge = ordered(t, x);
                        consider(w as u128, edge.0, edge);
                    }
                }
            }
        }
        EdgeSelection::HeavyVertex => {
            for t in g.terminals().iter() {
                for (x, w) in g.neighbors(t) {
                    if g.is_terminal(x) {
                        continue;
                    }
                    let (lt, _) = heaviest_terminal_link(g, x).expect("adjacent to t");
                    consider(w as u128 + g.degree(x) as u128, x, ordered(lt, x));
                }
            }
        }
        EdgeSelection::Connection | EdgeSelection::NonTerminalWeight => {
            for v in g.vertices() {
                if g.is_terminal(v) {
                    continue;
                }
                let Some((lt, _)) = heaviest_terminal_link(g, v) else { continue };
                let to_terminals: Weight = g.neighbors(v).filter(|&(x, _)| g.is_terminal(x)).map(|(_, w)| w).sum();
                let score =
                    if strategy == EdgeSelection::Connection { to_terminals } else { g.degree(v) - to_terminals };
                consider(score as u128, v, ordered(lt, v));
            }
        }
    }
    best.map(|(_, _, e)| e)
}

/// The two children of branching on `(u, v)`: `G/e` and `G-e`. Their bounds
/// are inherited and still need kernelization.
pub fn branch(p: &Problem, u: VertexId, v: VertexId) -> (Problem, Problem) {
    let mut contracted = p.clone();
    contracted.upper = Weight::MAX;
    contracted.graph.contract_edge(u, v).expect("branch edge exists");

    let mut deleted = p.clone();
    deleted.upper = Weight::MAX;
    let w = deleted.graph.delete_edge(u, v).expect("branch edge exists");
    deleted.deleted += w;
    (contracted, deleted)
}

struct Entry {
    problem: Problem,
    order: QueueOrder,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // BinaryHeap pops the greatest, so the first problem must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        compare_problems(&other.problem, &self.problem, self.order)
    }
}

/// One priority queue per worker.
pub struct QueueSet {
    queues: Vec<Mutex<BinaryHeap<Entry>>>,
    sizes: Vec<AtomicUsize>,
    order: QueueOrder,
}

impl QueueSet {
    pub fn new(workers: usize, order: QueueOrder) -> Self {
        let workers = workers.max(1);
        QueueSet {
            queues: (0..workers).map(|_| Mutex::new(BinaryHeap::new())).collect(),
            sizes: (0..workers).map(|_| AtomicUsize::new(0)).collect(),
            order,
        }
    }

    pub fn len(&self, q: usize) -> usize {
        self.sizes[q].load(AtomicOrdering::Acquire)
    }

    pub fn total(&self) -> usize {
        (0..self.queues.len()).map(|q| self.len(q)).sum()
    }

    /// Pushes onto the local queue if it is one of the smallest, otherwise
    /// onto a uniformly chosen smallest queue. Returns the queue used.
    pub fn push(&self, local: usize, problem: Problem, rng: &mut ChaCha8Rng) -> usize {
        let sizes: Vec<usize> = (0..self.queues.len()).map(|q| self.len(q)).collect();
        let min = *sizes.iter().min().expect("at least one queue");
        let target = if sizes[local] == min {
            local
        } else {
            let smallest: Vec<usize> = (0..sizes.len()).filter(|&q| sizes[q] == min).collect();
            *smallest.choose(rng).expect("nonempty")
        };
        let mut queue = self.queues[target].lock().expect("queue lock");
        queue.push(Entry { problem, order: self.order });
        self.sizes[target].store(queue.len(), AtomicOrdering::Release);
        target
    }

    /// Pops from the local queue, or steals from the first nonempty other one.
    pub fn pop(&self, local: usize) -> Option<Problem> {
        let n = self.queues.len();
        (0..n).map(|i| (local + i) % n).find_map(|q| {
            if self.len(q) == 0 {
                return None;
            }
            let mut queue = self.queues[q].lock().expect("queue lock");
            let entry = queue.pop();
            self.sizes[q].store(queue.len(), AtomicOrdering::Release);
            entry.map(|e| e.problem)
        })
    }
}

/// Best solution seen so far, lifted to the vertices of `original`.
pub(crate) struct BestWitness<'a> {
    original: &'a Graph,
    best: AtomicU64,
    witness: Mutex<Option<Assignment>>,
}

impl<'a> BestWitness<'a> {
    pub(crate) fn new(original: &'a Graph) -> Self {
        BestWitness { original, best: AtomicU64::new(Weight::MAX), witness: Mutex::new(None) }
    }

    pub(crate) fn into_best(self) -> Option<(Weight, Assignment)> {
        let best = self.best.into_inner();
        self.witness.into_inner().expect("witness lock").map(|w| (best, w))
    }
}

impl Incumbent for BestWitness<'_> {
    fn value(&self) -> Weight {
        self.best.load(AtomicOrdering::Acquire)
    }

    fn offer(&self, graph: &Graph, bounds: &BoundPair) {
        if bounds.upper >= self.value() {
            return;
        }
        let mut lifted = vec![0; self.original.capacity()];
        graph.lift_into(&bounds.witness, 0, &mut lifted);
        // deleted edges may end up uncut, so the real weight can be lower
        let weight = self.original.crossing_weight(&lifted);
        debug_assert!(weight <= bounds.upper);
        let mut witness = self.witness.lock().expect("witness lock");
        if weight < self.value() {
            *witness = Some(lifted);
            self.best.store(weight, AtomicOrdering::Release);
        }
    }
}

struct Search<'a> {
    shared: BestWitness<'a>,
    queues: QueueSet,
    in_flight: AtomicUsize,
    seq: AtomicU64,
    explored: AtomicU64,
    bytes: AtomicUsize,
    stop: AtomicBool,
    out_of_memory: AtomicBool,
    config: &'a SearchConfig,
    deadline: Option<Instant>,
}

impl Search<'_> {
    fn kernelizer(&self) -> Kernelizer {
        Kernelizer { config: self.config.reductions, flow_threads: 1 }
    }

    fn kernelize(&self, p: &mut Problem, log: &mut ReductionLog) {
        p.kernel_best = self.shared.value();
        let out = self.kernelizer().run(p, &self.shared);
        log.merge(&out.log);
    }

    fn enqueue(&self, worker: usize, mut p: Problem, rng: &mut ChaCha8Rng) {
        p.seq = self.seq.fetch_add(1, AtomicOrdering::Relaxed);
        let bytes = self.bytes.fetch_add(p.estimated_bytes(), AtomicOrdering::Relaxed) + p.estimated_bytes();
        if self.config.memory_limit.is_some_and(|limit| bytes > limit) {
            self.out_of_memory.store(true, AtomicOrdering::Release);
            self.stop.store(true, AtomicOrdering::Release);
        }
        self.in_flight.fetch_add(1, AtomicOrdering::AcqRel);
        self.queues.push(worker, p, rng);
    }

    fn process(&self, worker: usize, mut p: Problem, rng: &mut ChaCha8Rng, log: &mut ReductionLog) {
        self.explored.fetch_add(1, AtomicOrdering::Relaxed);
        if p.lower >= self.shared.value() {
            return;
        }
        if self.config.reductions.high_connectivity && self.shared.value() < p.kernel_best {
            self.kernelize(&mut p, log);
            if p.lower >= self.shared.value() {
                return;
            }
        }
        if p.lower >= p.upper {
            return;
        }

        let Some((u, v)) = select_branch_edge(&p.graph, self.config.edge_selection) else {
            debug_assert!(false, "open problem without a branch edge");
            return;
        };
        let terminal_incident = p.graph.is_terminal(u) || p.graph.is_terminal(v);
        let parent_bound = p.doubled_bound();
        let (a, b) = branch(&p, u, v);
        drop(p);
        for mut child in [a, b] {
            self.kernelize(&mut child, log);
            if terminal_incident {
                debug_assert!(
                    child.doubled_bound() > parent_bound,
                    "branching on a terminal edge did not raise the bound"
                );
            }
            if child.lower < self.shared.value() && child.lower < child.upper {
                self.enqueue(worker, child, rng);
            }
        }
    }

    fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn worker(&self, worker: usize) -> ReductionLog {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed.wrapping_add(worker as u64));
        let mut log = ReductionLog::default();
        let mut idle = 0u32;
        loop {
            if self.stop.load(AtomicOrdering::Acquire) {
                break;
            }
            match self.queues.pop(worker) {
                Some(p) => {
                    idle = 0;
                    self.bytes.fetch_sub(p.estimated_bytes(), AtomicOrdering::Relaxed);
                    if self.timed_out() {
                        self.stop.store(true, AtomicOrdering::Release);
                    } else {
                        self.process(worker, p, &mut rng, &mut log);
                    }
                    self.in_flight.fetch_sub(1, AtomicOrdering::AcqRel);
                }
                None => {
                    if self.in_flight.load(AtomicOrdering::Acquire) == 0 {
                        break;
                    }
                    idle += 1;
                    if idle < 64 {
                        std::thread::yield_now();
                    } else {
                        std::thread::sleep(Duration::from_micros(50));
                    }
                }
            }
        }
        log
    }
}

struct ComponentOutcome {
    weight: Weight,
    assignment: Assignment,
    optimal: bool,
    out_of_memory: bool,
    explored: u64,
    log: ReductionLog,
    kernel: (usize, usize),
}

/// Branch and reduce on a dense graph whose vertices are their own
/// original ids.
fn search_component(g: &Graph, cfg: &SearchConfig, deadline: Option<Instant>) -> ComponentOutcome {
    let threads = cfg.threads.max(1);
    let search = Search {
        shared: BestWitness::new(g),
        queues: QueueSet::new(threads, cfg.queue_order),
        in_flight: AtomicUsize::new(0),
        seq: AtomicU64::new(0),
        explored: AtomicU64::new(0),
        bytes: AtomicUsize::new(0),
        stop: AtomicBool::new(false),
        out_of_memory: AtomicBool::new(false),
        config: cfg,
        deadline,
    };

    let mut log = ReductionLog::default();
    let mut root = Problem::new(g.clone());
    let kernelizer = Kernelizer { config: cfg.reductions, flow_threads: threads };
    root.kernel_best = Weight::MAX;
    log.merge(&kernelizer.run(&mut root, &search.shared).log);
    let kernel = (root.graph.num_vertices(), root.graph.num_edges());

    if root.lower < search.shared.value() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        search.enqueue(0, root, &mut rng);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (1..threads)
                .map(|w| {
                    scope.spawn({
                        let search = &search;
                        move || search.worker(w)
                    })
                })
                .collect();
            log.merge(&search.worker(0));
            for h in handles {
                log.merge(&h.join().expect("search worker panicked"));
            }
        });
    } else {
        search.explored.store(1, AtomicOrdering::Relaxed);
    }

    let stopped = search.stop.load(AtomicOrdering::Acquire)
        && search.queues.total() + search.in_flight.load(AtomicOrdering::Acquire) > 0;
    let out_of_memory = search.out_of_memory.into_inner();
    let explored = search.explored.into_inner();
    let (weight, assignment) = search.shared.into_best().expect("root kernelization offers a witness");
    ComponentOutcome { weight, assignment, optimal: !stopped, out_of_memory, explored, log, kernel }
}

/// Minimum multiterminal cut of `g` for its terminal set. The assignment
/// maps every vertex slot of `g` to a terminal index.
pub fn solve(g: &Graph, cfg: &SearchConfig) -> Result<CutResult, SolveError> {
    let start = Instant::now();
    let k = g.terminals().len();
    if k == 0 {
        return Err(SolveError::NoTerminals);
    }
    let deadline = cfg.time_limit.map(|d| start + d);

    let mut assignment = vec![0; g.capacity()];
    let mut stats = SearchStats::default();
    let mut optimal = true;
    let mut out_of_memory = false;

    for comp in g.connected_components() {
        match comp.class {
            ComponentClass::NoTerminal => {}
            ComponentClass::SingleTerminal => {
                for &v in &comp.vertices {
                    assignment[v] = comp.terminals[0];
                }
            }
            ComponentClass::TwoTerminals => {
                let (a, b) = (comp.terminals[0], comp.terminals[1]);
                let cut = min_st_cut(g, g.terminals().vertex(a), &[g.terminals().vertex(b)]);
                for &v in &comp.vertices {
                    assignment[v] = b;
                }
                for &v in &cut.min_side {
                    assignment[v] = a;
                }
            }
            ComponentClass::MultiTerminal => {
                let mut local = g.extract(&comp.vertices, &comp.terminals);
                local.rebase();
                let out = search_component(&local, cfg, deadline);
                for (i, &v) in comp.vertices.iter().enumerate() {
                    assignment[v] = comp.terminals[out.assignment[i]];
                }
                debug_assert_eq!(local.crossing_weight(&out.assignment), out.weight);
                optimal &= out.optimal;
                out_of_memory |= out.out_of_memory;
                stats.problems_explored += out.explored;
                stats.reductions.merge(&out.log);
                stats.kernel_vertices += out.kernel.0;
                stats.kernel_edges += out.kernel.1;
            }
        }
    }

    stats.wall_time = start.elapsed();
    let result = CutResult { weight: g.crossing_weight(&assignment), assignment, optimal, stats };
    if out_of_memory {
        let limit = cfg.memory_limit.unwrap_or(0);
        return Err(SolveError::MemoryBudget { limit, best: Box::new(result) });
    }
    Ok(result)
}
