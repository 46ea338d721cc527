//! Integer program for multiterminal cut, LP file export and the
//! kernel-then-ILP pipeline.
//!
//! Variables: `x_v_b` (vertex `v` in block `b`) and `e_u_v` (edge `{u, v}`
//! is cut), all binary and 1-indexed in their names. Rows: for every edge
//! and block `e_u_v - x_u_b + x_v_b >= 0` and `e_u_v + x_u_b - x_v_b >= 0`;
//! for every vertex `sum_b x_v_b = 1`. Terminal `i` is fixed to block `i`
//! through variable bounds.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::min_st_cut;
use crate::graph::{Assignment, ComponentClass, Graph, GraphError, VertexId, Weight};
use crate::kernel::{Kernelizer, ReductionConfig};
use crate::search::{BestWitness, CutResult, Problem, SearchStats};

#[derive(Debug, Error)]
pub enum IlpError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("model has {required} assignments, cap is {cap}")]
    CapExceeded { required: String, cap: u64 },
    #[error("model is infeasible")]
    Infeasible,
    #[error("solution: {0}")]
    Solution(String),
    #[error("solver command failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        }
    }

    fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Sense::Ge => lhs >= rhs,
            Sense::Le => lhs <= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(i64, String)>,
    pub sense: Sense,
    pub rhs: i64,
}

/// A minimisation problem over binary variables, as stored in an LP file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpModel {
    pub objective: Vec<(i64, String)>,
    pub rows: Vec<Row>,
    /// Variables fixed through the bounds section.
    pub fixed: Vec<(String, i64)>,
    pub binaries: Vec<String>,
}

/// The multiterminal cut program of one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpModel {
    pub lp: LpModel,
    /// Vertex slots in the order of the `x` variables.
    pub vertices: Vec<VertexId>,
    pub blocks: usize,
    pub edges: usize,
}

impl IlpModel {
    pub fn variable_count(&self) -> usize {
        self.lp.binaries.len()
    }

    pub fn row_count(&self) -> usize {
        self.lp.rows.len()
    }

    pub fn fixing_count(&self) -> usize {
        self.lp.fixed.len()
    }
}

fn x_name(v: usize, b: usize) -> String {
    format!("x_{}_{}", v + 1, b + 1)
}

fn e_name(u: usize, v: usize) -> String {
    format!("e_{}_{}", u + 1, v + 1)
}

fn coef(w: Weight) -> i64 {
    i64::try_from(w).expect("edge weight fits in an LP coefficient")
}

/// Builds the program over the live vertices of `g`, densely renumbered.
pub fn build_ilp(g: &Graph) -> IlpModel {
    let vertices: Vec<VertexId> = g.vertices().collect();
    let mut index = vec![usize::MAX; g.capacity()];
    for (i, &v) in vertices.iter().enumerate() {
        index[v] = i;
    }
    let k = g.terminals().len();
    let edges = g.edges();
    let mut lp = LpModel::default();

    for e in &edges {
        lp.objective.push((coef(e.weight), e_name(index[e.u], index[e.v])));
    }
    let mut r = 0;
    for e in &edges {
        let (u, v) = (index[e.u], index[e.v]);
        for b in 0..k {
            for sign in [-1, 1] {
                r += 1;
                lp.rows.push(Row {
                    name: format!("c{r}"),
                    terms: vec![(1, e_name(u, v)), (sign, x_name(u, b)), (-sign, x_name(v, b))],
                    sense: Sense::Ge,
                    rhs: 0,
                });
            }
        }
    }
    for v in 0..vertices.len() {
        lp.rows.push(Row {
            name: format!("a{}", v + 1),
            terms: (0..k).map(|b| (1, x_name(v, b))).collect(),
            sense: Sense::Eq,
            rhs: 1,
        });
    }
    for (i, t) in g.terminals().iter().enumerate() {
        for b in 0..k {
            lp.fixed.push((x_name(index[t], b), i64::from(i == b)));
        }
    }
    for v in 0..vertices.len() {
        for b in 0..k {
            lp.binaries.push(x_name(v, b));
        }
    }
    for e in &edges {
        lp.binaries.push(e_name(index[e.u], index[e.v]));
    }
    IlpModel { lp, vertices, blocks: k, edges: edges.len() }
}

const LINE_LIMIT: usize = 200;

fn push_wrapped(out: &mut String, line: &mut String, token: &str) {
    if line.len() + 1 + token.len() > LINE_LIMIT {
        out.push_str(line);
        out.push('\n');
        line.clear();
        line.push_str("   ");
    }
    line.push(' ');
    line.push_str(token);
}

fn write_terms(out: &mut String, head: &str, terms: &[(i64, String)], tail: Option<String>) {
    let mut line = format!(" {head}");
    for (i, (c, name)) in terms.iter().enumerate() {
        let sign = if *c < 0 { "-" } else { "+" };
        let term = match (i, c.abs()) {
            (0, 1) if *c > 0 => name.clone(),
            (0, a) if *c > 0 => format!("{a} {name}"),
            (_, 1) => format!("{sign} {name}"),
            (_, a) => format!("{sign} {a} {name}"),
        };
        push_wrapped(out, &mut line, &term);
    }
    if terms.is_empty() {
        push_wrapped(out, &mut line, "0");
    }
    if let Some(tail) = tail {
        push_wrapped(out, &mut line, &tail);
    }
    out.push_str(&line);
    out.push('\n');
}

/// CPLEX LP text. Deterministic for a given model.
pub fn lp_text(m: &LpModel) -> String {
    let mut out = String::from("\\ minimum multiterminal cut\nMinimize\n");
    write_terms(&mut out, "obj:", &m.objective, None);
    out.push_str("Subject To\n");
    for row in &m.rows {
        write_terms(
            &mut out,
            &format!("{}:", row.name),
            &row.terms,
            Some(format!("{} {}", row.sense.symbol(), row.rhs)),
        );
    }
    out.push_str("Bounds\n");
    for (name, value) in &m.fixed {
        writeln!(out, " {name} = {value}").expect("writing to a string");
    }
    out.push_str("Binary\n");
    let mut line = String::new();
    for name in &m.binaries {
        push_wrapped(&mut out, &mut line, name);
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

pub fn write_lp(m: &IlpModel, path: impl AsRef<Path>) -> Result<(), IlpError> {
    fs::write(path, lp_text(&m.lp))?;
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binary,
    End,
}

fn lp_error(line: usize, message: impl Into<String>) -> IlpError {
    IlpError::Parse { line, message: message.into() }
}

/// Parses `[+|-] [coef] name` sequences.
fn parse_terms(tokens: &[(usize, String)]) -> Result<Vec<(i64, String)>, IlpError> {
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut value: Option<i64> = None;
    for (line, tok) in tokens {
        match tok.as_str() {
            "+" => sign = 1,
            "-" => sign = -1,
            t if t.parse::<i64>().is_ok() => {
                value = Some(t.parse().expect("checked"));
            }
            name if name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') => {
                terms.push((sign * value.unwrap_or(1), name.to_string()));
                sign = 1;
                value = None;
            }
            other => return Err(lp_error(*line, format!("unexpected token `{other}`"))),
        }
    }
    if value.is_some_and(|v| v != 0) {
        return Err(lp_error(tokens.last().map_or(0, |t| t.0), "constant term in expression"));
    }
    Ok(terms)
}

/// Reads the LP dialect written by [`lp_text`].
pub fn read_lp(text: &str) -> Result<LpModel, IlpError> {
    let mut model = LpModel::default();
    let mut section = Section::None;
    let mut objective: Vec<(usize, String)> = Vec::new();
    let mut pending: Vec<(usize, String)> = Vec::new();
    let mut pending_name: Option<String> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('\\').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let keyword = content.to_ascii_lowercase();
        let next = match keyword.as_str() {
            "minimize" | "minimise" | "min" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binary" | "binaries" | "bin" => Some(Section::Binary),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(next) = next {
            if !pending.is_empty() {
                return Err(lp_error(line, "unterminated constraint"));
            }
            section = next;
            continue;
        }

        let mut tokens = content.split_whitespace().map(|t| (line, t.to_string()));
        match section {
            Section::None | Section::End => return Err(lp_error(line, "content outside a section")),
            Section::Objective => {
                for (l, t) in tokens {
                    if t.ends_with(':') && objective.is_empty() {
                        continue;
                    }
                    objective.push((l, t));
                }
            }
            Section::Constraints => {
                for (l, t) in tokens.by_ref() {
                    if pending.is_empty() && pending_name.is_none() && t.ends_with(':') {
                        pending_name = Some(t.trim_end_matches(':').to_string());
                        continue;
                    }
                    pending.push((l, t));
                    let n = pending.len();
                    if n >= 2 {
                        if let Some(sense) = match pending[n - 2].1.as_str() {
                            ">=" | "=>" => Some(Sense::Ge),
                            "<=" | "=<" => Some(Sense::Le),
                            "=" => Some(Sense::Eq),
                            _ => None,
                        } {
                            let rhs: i64 = pending[n - 1].1.parse().map_err(|_| lp_error(l, "bad right-hand side"))?;
                            let terms = parse_terms(&pending[..n - 2])?;
                            let name = pending_name.take().unwrap_or_else(|| format!("r{}", model.rows.len() + 1));
                            model.rows.push(Row { name, terms, sense, rhs });
                            pending.clear();
                        }
                    }
                }
            }
            Section::Bounds => {
                let parts: Vec<(usize, String)> = tokens.collect();
                match &parts[..] {
                    [(_, name), (_, eq), (l, value)] if eq == "=" => {
                        let value = value.parse().map_err(|_| lp_error(*l, "bad bound"))?;
                        model.fixed.push((name.clone(), value));
                    }
                    _ => return Err(lp_error(line, "only `name = value` bounds are supported")),
                }
            }
            Section::Binary => model.binaries.extend(tokens.map(|(_, t)| t)),
        }
    }
    if section != Section::End {
        return Err(lp_error(text.lines().count(), "missing End"));
    }
    if !pending.is_empty() {
        return Err(lp_error(text.lines().count(), "unterminated constraint"));
    }
    model.objective = parse_terms(&objective)?;
    Ok(model)
}

/// Crossing weight of `assignment` after checking that terminal `i` sits in
/// block `i`.
pub fn evaluate_assignment(g: &Graph, assignment: &[usize]) -> Result<Weight, GraphError> {
    if assignment.len() != g.capacity() {
        return Err(GraphError::AssignmentLength { got: assignment.len(), expected: g.capacity() });
    }
    for (i, t) in g.terminals().iter().enumerate() {
        if assignment[t] != i {
            return Err(GraphError::TerminalMisassigned { terminal: t, block: assignment[t] });
        }
    }
    Ok(g.crossing_weight(assignment))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverStatus {
    Optimal,
    Feasible,
    Timeout,
    Unavailable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpSolution {
    pub objective: i128,
    pub values: BTreeMap<String, i64>,
    pub status: SolverStatus,
}

impl IlpSolution {
    /// Block of every vertex of `model`, in model order.
    pub fn assignment(&self, model: &IlpModel) -> Result<Vec<usize>, IlpError> {
        (0..model.vertices.len())
            .map(|v| {
                let blocks: Vec<usize> =
                    (0..model.blocks).filter(|&b| self.values.get(&x_name(v, b)).copied().unwrap_or(0) == 1).collect();
                match blocks[..] {
                    [b] => Ok(b),
                    _ => Err(IlpError::Solution(format!("vertex {} is in {} blocks", v + 1, blocks.len()))),
                }
            })
            .collect()
    }
}

fn row_value(row: &Row, values: &HashMap<&str, i64>) -> i128 {
    row.terms.iter().map(|(c, name)| *c as i128 * values.get(name.as_str()).copied().unwrap_or(0) as i128).sum()
}

/// Exact solve of a binary model by enumeration. Rows of the form
/// `sum x = 1` over unfixed-or-fixed binaries define choice groups; every
/// other variable takes the smallest value its rows allow. Only meant for
/// tiny models.
pub fn solve_lp_exhaustive(m: &LpModel, cap: u64) -> Result<IlpSolution, IlpError> {
    let fixed: HashMap<&str, i64> = m.fixed.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let mut grouped: HashMap<&str, ()> = HashMap::new();
    let mut groups: Vec<Vec<&str>> = Vec::new();
    for row in &m.rows {
        if row.sense == Sense::Eq && row.rhs == 1 && row.terms.iter().all(|(c, _)| *c == 1) {
            let names: Vec<&str> = row.terms.iter().map(|(_, n)| n.as_str()).collect();
            if names.iter().any(|n| grouped.contains_key(n)) {
                continue;
            }
            let options: Vec<&str> = names.iter().copied().filter(|n| fixed.get(n).copied() != Some(0)).collect();
            if options.is_empty() {
                return Err(IlpError::Infeasible);
            }
            for n in &names {
                grouped.insert(n, ());
            }
            groups.push(options);
        }
    }
    let derived: Vec<&str> = m.binaries.iter().map(String::as_str).filter(|n| !grouped.contains_key(n)).collect();

    let mut total: u64 = 1;
    for g in &groups {
        total = total
            .checked_mul(g.len() as u64)
            .filter(|&t| t <= cap)
            .ok_or_else(|| IlpError::CapExceeded { required: format!("more than {cap}"), cap })?;
    }

    let mut choice = vec![0usize; groups.len()];
    let mut best: Option<(i128, HashMap<&str, i64>)> = None;
    loop {
        let mut values: HashMap<&str, i64> = HashMap::new();
        for (g, &c) in groups.iter().zip(&choice) {
            for (i, &n) in g.iter().enumerate() {
                values.insert(n, i64::from(i == c));
            }
        }
        for &n in &derived {
            values.insert(n, fixed.get(n).copied().unwrap_or(0));
        }
        // raise derived variables that violated >= rows need
        for row in &m.rows {
            if row.sense != Sense::Ge || row_value(row, &values) >= row.rhs as i128 {
                continue;
            }
            for (c, name) in &row.terms {
                if *c > 0 && derived.contains(&name.as_str()) && !fixed.contains_key(name.as_str()) {
                    values.insert(name.as_str(), 1);
                }
            }
        }
        let feasible = m.rows.iter().all(|row| row.sense.holds(row_value(row, &values), row.rhs as i128))
            && m.fixed.iter().all(|(n, v)| values.get(n.as_str()).copied().unwrap_or(0) == *v);
        if feasible {
            let obj: i128 = m
                .objective
                .iter()
                .map(|(c, n)| *c as i128 * values.get(n.as_str()).copied().unwrap_or(0) as i128)
                .sum();
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, values));
            }
        }

        let mut digit = 0;
        loop {
            if digit == groups.len() {
                let (objective, values) = best.ok_or(IlpError::Infeasible)?;
                let values = values.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
                return Ok(IlpSolution { objective, values, status: SolverStatus::Optimal });
            }
            choice[digit] += 1;
            if choice[digit] < groups[digit].len() {
                break;
            }
            choice[digit] = 0;
            digit += 1;
        }
    }
}

/// Reads `name value` lines; an optional `status <word>` line sets the
/// status. Anything else is ignored.
pub fn parse_solution(text: &str, m: &LpModel) -> IlpSolution {
    let known: HashMap<&str, ()> = m.binaries.iter().map(|n| (n.as_str(), ())).collect();
    let mut values = BTreeMap::new();
    let mut status = SolverStatus::Optimal;
    for line in text.lines() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[..] {
            ["status", word] | ["Status", word] | ["status:", word] => {
                status = match word.to_ascii_lowercase().as_str() {
                    "optimal" => SolverStatus::Optimal,
                    "timeout" | "timelimit" | "time_limit" => SolverStatus::Timeout,
                    _ => SolverStatus::Feasible,
                }
            }
            [name, value] if known.contains_key(name) => {
                if let Ok(v) = value.parse::<f64>() {
                    values.insert(name.to_string(), v.round() as i64);
                }
            }
            _ => {}
        }
    }
    let objective = m.objective.iter().map(|(c, n)| *c as i128 * values.get(n).copied().unwrap_or(0) as i128).sum();
    IlpSolution { objective, values, status }
}

/// Runs `template` through `sh -c` with `{lp}` and `{sol}` replaced by the
/// paths, then parses the solution file.
pub fn run_external_solver(template: &str, lp: &Path, sol: &Path, m: &LpModel) -> Result<IlpSolution, IlpError> {
    let command = template.replace("{lp}", &lp.display().to_string()).replace("{sol}", &sol.display().to_string());
    let status = Command::new("sh").arg("-c").arg(&command).status()?;
    if !status.success() {
        return Err(IlpError::Solver(format!("`{command}` exited with {status}")));
    }
    let text = fs::read_to_string(sol).map_err(|e| IlpError::Solver(format!("{}: {e}", sol.display())))?;
    Ok(parse_solution(&text, m))
}

/// Kernel vertex to original vertices, written next to each LP file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub component: usize,
    /// 1-indexed original vertices behind each kernel vertex, in LP order.
    pub vertices: Vec<Vec<usize>>,
    /// 1-indexed original terminal per block.
    pub terminals: Vec<usize>,
    pub deleted_weight: Weight,
}

/// How kernel programs get solved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IlpBackend {
    /// Write the files only.
    Export,
    /// Enumerate with [`solve_lp_exhaustive`] up to the cap.
    Exhaustive { cap: u64 },
    /// External command template with `{lp}` and `{sol}` placeholders.
    External { template: String },
}

#[derive(Clone, Debug)]
pub struct KernelIlpOptions {
    pub reductions: ReductionConfig,
    pub backend: IlpBackend,
    /// Files go to `<prefix>.c<component>.lp` and `.json`; none means no
    /// files (only valid with a solving backend).
    pub output_prefix: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentReport {
    pub component: usize,
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
    pub deleted_weight: Weight,
    /// Bounds met during kernelization; no program was needed.
    pub closed: bool,
    pub lp_file: Option<PathBuf>,
    pub manifest_file: Option<PathBuf>,
    pub status: SolverStatus,
}

#[derive(Clone, Debug)]
pub struct KernelIlpOutcome {
    pub components: Vec<ComponentReport>,
    /// Present when every component was solved.
    pub result: Option<CutResult>,
}

impl KernelIlpOutcome {
    pub fn status(&self) -> SolverStatus {
        let worst = |s: SolverStatus| match s {
            SolverStatus::Optimal => 0,
            SolverStatus::Feasible => 1,
            SolverStatus::Timeout => 2,
            SolverStatus::Unavailable => 3,
        };
        self.components.iter().map(|c| c.status).max_by_key(|&s| worst(s)).unwrap_or(SolverStatus::Optimal)
    }
}

/// Kernelizes every component with three or more terminals and solves the
/// remaining program per `options.backend`. Components with fewer terminals
/// are solved directly. With all reductions off the program covers the raw
/// component.
pub fn kernel_ilp(g: &Graph, options: &KernelIlpOptions) -> Result<KernelIlpOutcome, IlpError> {
    let start = Instant::now();
    let mut assignment: Assignment = vec![0; g.capacity()];
    let mut components = Vec::new();
    let mut complete = true;
    let mut optimal = true;
    let mut stats = SearchStats::default();

    for (ci, comp) in g.connected_components().into_iter().enumerate() {
        match comp.class {
            ComponentClass::NoTerminal => continue,
            ComponentClass::SingleTerminal => {
                for &v in &comp.vertices {
                    assignment[v] = comp.terminals[0];
                }
                continue;
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
                continue;
            }
            ComponentClass::MultiTerminal => {}
        }

        let mut local = g.extract(&comp.vertices, &comp.terminals);
        local.rebase();
        let keeper = BestWitness::new(&local);
        let mut p = Problem::new(local.clone());
        let closed = if options.reductions.any() {
            let out = Kernelizer::new(options.reductions).run(&mut p, &keeper);
            stats.reductions.merge(&out.log);
            p.lower >= p.upper
        } else {
            false
        };
        let kernel = p.graph.compact();
        stats.kernel_vertices += kernel.num_vertices();
        stats.kernel_edges += kernel.num_edges();
        let mut report = ComponentReport {
            component: ci,
            kernel_vertices: kernel.num_vertices(),
            kernel_edges: kernel.num_edges(),
            deleted_weight: p.deleted,
            closed,
            lp_file: None,
            manifest_file: None,
            status: SolverStatus::Optimal,
        };

        let local_assignment = if closed {
            let (_, witness) = keeper.into_best().expect("kernelization offers a witness");
            Some(witness)
        } else {
            let model = build_ilp(&kernel);
            let mut paths = None;
            if let Some(prefix) = &options.output_prefix {
                let lp_path = PathBuf::from(format!("{}.c{ci}.lp", prefix.display()));
                let manifest_path = PathBuf::from(format!("{}.c{ci}.json", prefix.display()));
                write_lp(&model, &lp_path)?;
                let manifest = Manifest {
                    component: ci,
                    vertices: kernel
                        .vertices()
                        .map(|v| kernel.members(v).iter().map(|&o| comp.vertices[o] + 1).collect())
                        .collect(),
                    terminals: comp.terminals.iter().map(|&t| g.terminals().vertex(t) + 1).collect(),
                    deleted_weight: p.deleted,
                };
                fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
                report.lp_file = Some(lp_path.clone());
                report.manifest_file = Some(manifest_path);
                paths = Some(lp_path);
            }
            let solution = match &options.backend {
                IlpBackend::Export => None,
                IlpBackend::Exhaustive { cap } => Some(solve_lp_exhaustive(&model.lp, *cap)?),
                IlpBackend::External { template } => {
                    let lp_path = match paths {
                        Some(p) => p,
                        None => {
                            let dir = std::env::temp_dir().join(format!("mtcut-{}-c{ci}.lp", std::process::id()));
                            write_lp(&model, &dir)?;
                            dir
                        }
                    };
                    let sol_path = lp_path.with_extension("sol");
                    Some(run_external_solver(template, &lp_path, &sol_path, &model.lp)?)
                }
            };
            match solution {
                None => {
                    report.status = SolverStatus::Unavailable;
                    None
                }
                Some(sol) => {
                    report.status = sol.status;
                    let kernel_assignment = sol.assignment(&model)?;
                    let mut lifted = vec![0; local.capacity()];
                    kernel.lift_into(&kernel_assignment, 0, &mut lifted);
                    Some(lifted)
                }
            }
        };

        optimal &= report.status == SolverStatus::Optimal;
        match local_assignment {
            Some(a) => {
                for (i, &v) in comp.vertices.iter().enumerate() {
                    assignment[v] = comp.terminals[a[i]];
                }
            }
            None => complete = false,
        }
        components.push(report);
    }

    stats.wall_time = start.elapsed();
    let result = complete.then(|| CutResult { weight: g.crossing_weight(&assignment), assignment, optimal, stats });
    Ok(KernelIlpOutcome { components, result })
}
