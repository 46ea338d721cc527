//! `mtcut`: exact minimum multiterminal cut from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use mtcut::generate::{generate_random_graph, make_terminals, TerminalSpec};
use mtcut::ilp::{build_ilp, kernel_ilp, write_lp, IlpBackend, IlpError, KernelIlpOptions, SolverStatus};
use mtcut::io::{format_assignment, parse_metis, read_terminals, write_metis};
use mtcut::kernel::Kernelizer;
use mtcut::oracle::{brute_force, DEFAULT_CAP};
use mtcut::report::RunReport;
use mtcut::search::{solve, Problem, SolveError};
use mtcut::{CutResult, EdgeSelection, Graph, QueueOrder, ReductionConfig, SearchConfig};

const EXIT_TIMEOUT: u8 = 10;
const EXIT_INPUT: u8 = 11;
const EXIT_RESOURCE: u8 = 12;
const EXIT_SOLVER: u8 = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Solve,
    Kernel,
    IlpExport,
    KernelIlp,
    Oracle,
}

#[derive(Debug, Parser)]
#[command(name = "mtcut", version, about = "Exact minimum multiterminal cut")]
struct Args {
    /// METIS graph file.
    #[arg(long, required_unless_present = "generate", conflicts_with = "generate")]
    graph: Option<PathBuf>,
    /// Generate a random graph instead: N,AVG_DEGREE,MAX_WEIGHT (uses --seed).
    #[arg(long, value_name = "N,DEG,MAXW")]
    generate: Option<String>,
    /// File with 1-indexed terminal ids.
    #[arg(long, group = "terminal_source")]
    terminals: Option<PathBuf>,
    /// K uniformly random terminals.
    #[arg(long, value_name = "K", group = "terminal_source")]
    random_terminals: Option<usize>,
    /// K random seeds grown by BFS to fraction P of the vertices, contracted.
    #[arg(long, value_name = "K,P", group = "terminal_source")]
    grow_terminals: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "solve")]
    mode: Mode,
    #[arg(long, default_value = "HeavyVertex")]
    edge_selection: EdgeSelection,
    #[arg(long, default_value = "LowerBound")]
    queue_order: QueueOrder,
    /// all, none, or a list of low,high,triangle,highconn.
    #[arg(long, default_value = "all")]
    reductions: String,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Seconds; the best solution found so far is reported on expiry.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Rough memory budget for open problems, in MiB.
    #[arg(long)]
    memory_limit: Option<usize>,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Assignment output: one `vertex block` line per vertex.
    #[arg(long)]
    assignment: Option<PathBuf>,
    /// External ILP solver, e.g. `solver {lp} {sol}`.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Prefix for LP and manifest files (default: the graph path).
    #[arg(long)]
    output_prefix: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(s: &str, what: &str) -> Result<(A, B), Failure> {
    let (a, b) =
        s.split_once(',').ok_or_else(|| fail(EXIT_INPUT, format!("{what} expects two comma separated values")))?;
    let a = a.trim().parse().map_err(|_| fail(EXIT_INPUT, format!("bad {what} `{s}`")))?;
    let b = b.trim().parse().map_err(|_| fail(EXIT_INPUT, format!("bad {what} `{s}`")))?;
    Ok((a, b))
}

struct Instance {
    name: String,
    hash: String,
    /// Graph as read or generated, before terminal contraction.
    original_vertices: usize,
    graph: Graph,
}

fn load(args: &Args) -> Result<Instance, Failure> {
    let (name, text) = match (&args.graph, &args.generate) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            (path.display().to_string(), text)
        }
        (None, Some(spec)) => {
            let parts: Vec<&str> = spec.split(',').collect();
            let [n, deg, maxw] = parts[..] else {
                return Err(fail(EXIT_INPUT, "--generate expects N,DEG,MAXW"));
            };
            let bad = || fail(EXIT_INPUT, format!("bad --generate `{spec}`"));
            let g = generate_random_graph(
                n.trim().parse().map_err(|_| bad())?,
                deg.trim().parse().map_err(|_| bad())?,
                maxw.trim().parse().map_err(|_| bad())?,
                args.seed,
            );
            (format!("generated:{spec}:seed={}", args.seed), write_metis(&g))
        }
        (None, None) => return Err(fail(EXIT_INPUT, "either --graph or --generate is required")),
    };
    let hash = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let graph = parse_metis(&text).map_err(|e| fail(EXIT_INPUT, format!("{name}: {e}")))?;

    let spec = if let Some(path) = &args.terminals {
        TerminalSpec::Explicit(read_terminals(path).map_err(|e| fail(EXIT_INPUT, e))?)
    } else if let Some(k) = args.random_terminals {
        TerminalSpec::Random { k }
    } else if let Some(s) = &args.grow_terminals {
        let (k, fraction) = parse_pair(s, "--grow-terminals")?;
        TerminalSpec::Grown { k, fraction }
    } else {
        return Err(fail(EXIT_INPUT, "one of --terminals, --random-terminals, --grow-terminals is required"));
    };
    let original_vertices = graph.capacity();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let graph = make_terminals(graph, &spec, &mut rng).map_err(|e| fail(EXIT_INPUT, e))?;
    Ok(Instance { name, hash, original_vertices, graph })
}

/// Assignment of the instance's vertices mapped back to the input vertices.
fn lift(inst: &Instance, assignment: &[usize]) -> Vec<usize> {
    let mut out = vec![0; inst.original_vertices];
    inst.graph.lift_into(assignment, 0, &mut out);
    out
}

fn search_config(args: &Args) -> Result<SearchConfig, Failure> {
    Ok(SearchConfig {
        edge_selection: args.edge_selection,
        queue_order: args.queue_order,
        reductions: ReductionConfig::parse(&args.reductions).map_err(|e| fail(EXIT_INPUT, e))?,
        threads: args.threads.max(1),
        time_limit: args.time_limit.map(Duration::from_secs_f64),
        seed: args.seed,
        memory_limit: args.memory_limit.map(|mib| mib << 20),
    })
}

fn prefix(args: &Args) -> PathBuf {
    args.output_prefix.clone().or_else(|| args.graph.clone()).unwrap_or_else(|| PathBuf::from("mtcut"))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(EXIT_RESOURCE, format!("{}: {e}", path.display())))
}

fn base_report(args: &Args, inst: &Instance, cfg: &SearchConfig) -> RunReport {
    let mode = args.mode.to_possible_value().expect("named mode").get_name().to_string();
    let mut config = vec![
        ("mode".to_string(), mode.clone()),
        ("seed".to_string(), args.seed.to_string()),
        ("edge_selection".to_string(), cfg.edge_selection.to_string()),
        ("queue_order".to_string(), cfg.queue_order.to_string()),
        ("reductions".to_string(), args.reductions.clone()),
        ("threads".to_string(), cfg.threads.to_string()),
    ];
    if let Some(t) = args.time_limit {
        config.push(("time_limit".to_string(), t.to_string()));
    }
    if let Some(s) = &args.terminals {
        config.push(("terminals".to_string(), s.display().to_string()));
    }
    if let Some(k) = args.random_terminals {
        config.push(("random_terminals".to_string(), k.to_string()));
    }
    if let Some(s) = &args.grow_terminals {
        config.push(("grow_terminals".to_string(), s.clone()));
    }
    RunReport {
        instance: inst.name.clone(),
        instance_sha256: inst.hash.clone(),
        mode,
        vertices: inst.graph.num_vertices(),
        edges: inst.graph.num_edges(),
        terminals: inst.graph.terminals().len(),
        config,
        ..RunReport::default()
    }
}

fn record_result(report: &mut RunReport, r: &CutResult) {
    report.weight = Some(r.weight);
    report.optimal = r.optimal;
    report.status = if r.optimal { "optimal" } else { "timeout" }.to_string();
    report.problems_explored = r.stats.problems_explored;
    report.kernel_vertices = r.stats.kernel_vertices;
    report.kernel_edges = r.stats.kernel_edges;
    report.reductions = r.stats.reductions;
}

fn emit_assignment(args: &Args, inst: &Instance, report: &mut RunReport, assignment: &[usize]) -> Result<(), Failure> {
    if let Some(path) = &args.assignment {
        write_file(path, &format_assignment(&lift(inst, assignment)))?;
        report.outputs.push(path.display().to_string());
    }
    Ok(())
}

fn run(args: &Args) -> Result<u8, Failure> {
    let start = Instant::now();
    let cfg = search_config(args)?;
    let inst = load(args)?;
    let mut report = base_report(args, &inst, &cfg);
    let mut code = 0;

    match args.mode {
        Mode::Solve => {
            let result = match solve(&inst.graph, &cfg) {
                Ok(r) => r,
                Err(SolveError::MemoryBudget { best, .. }) => {
                    record_result(&mut report, &best);
                    report.status = "memory budget exceeded".into();
                    report.optimal = false;
                    code = EXIT_RESOURCE;
                    *best
                }
                Err(e) => return Err(fail(EXIT_INPUT, e)),
            };
            if code == 0 {
                record_result(&mut report, &result);
                if !result.optimal {
                    code = EXIT_TIMEOUT;
                }
            }
            emit_assignment(args, &inst, &mut report, &result.assignment)?;
        }
        Mode::Kernel => {
            let mut p = Problem::new(inst.graph.clone());
            let out = Kernelizer { config: cfg.reductions, flow_threads: cfg.threads }.run(&mut p, &u64::MAX);
            report.status = "kernelized".into();
            report.kernel_vertices = p.graph.num_vertices();
            report.kernel_edges = p.graph.num_edges();
            report.reductions = out.log;
            report.config.push(("lower_bound".into(), p.lower.to_string()));
            report.config.push(("upper_bound".into(), p.upper.to_string()));
        }
        Mode::IlpExport => {
            let model = build_ilp(&inst.graph);
            let path = PathBuf::from(format!("{}.lp", prefix(args).display()));
            write_lp(&model, &path).map_err(|e| fail(EXIT_RESOURCE, e))?;
            report.status = "exported".into();
            report.outputs.push(path.display().to_string());
        }
        Mode::KernelIlp => {
            let backend = match &args.solver_cmd {
                Some(t) => IlpBackend::External { template: t.clone() },
                None => IlpBackend::Export,
            };
            let options = KernelIlpOptions { reductions: cfg.reductions, backend, output_prefix: Some(prefix(args)) };
            let outcome = kernel_ilp(&inst.graph, &options).map_err(|e| match e {
                IlpError::Solver(_) | IlpError::Solution(_) | IlpError::Infeasible => fail(EXIT_SOLVER, e),
                other => fail(EXIT_RESOURCE, other),
            })?;
            for c in &outcome.components {
                report.kernel_vertices += c.kernel_vertices;
                report.kernel_edges += c.kernel_edges;
                report.outputs.extend(c.lp_file.iter().chain(&c.manifest_file).map(|p| p.display().to_string()));
            }
            let status = outcome.status();
            match &outcome.result {
                Some(r) => {
                    record_result(&mut report, r);
                    report.kernel_vertices = r.stats.kernel_vertices;
                    report.kernel_edges = r.stats.kernel_edges;
                    report.optimal = status == SolverStatus::Optimal;
                    report.status = format!("{status:?}").to_lowercase();
                    if status == SolverStatus::Timeout {
                        code = EXIT_TIMEOUT;
                    }
                    emit_assignment(args, &inst, &mut report, &r.assignment)?;
                }
                None => {
                    report.status = "unavailable".into();
                    code = EXIT_SOLVER;
                }
            }
        }
        Mode::Oracle => {
            let r = brute_force(&inst.graph, DEFAULT_CAP).map_err(|e| fail(EXIT_RESOURCE, e))?;
            report.weight = Some(r.weight);
            report.optimal = true;
            report.status = "optimal".into();
            report.config.push(("enumerated".into(), r.enumerated.to_string()));
            emit_assignment(args, &inst, &mut report, &r.optima[0])?;
        }
    }

    report.wall_time_secs = start.elapsed().as_secs_f64();
    if let Some(path) = &args.report {
        write_file(path, &report.to_json())?;
    }
    print!("{}", report.human());
    Ok(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mtcut: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
