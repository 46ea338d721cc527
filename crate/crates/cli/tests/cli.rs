use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mtcut::io::write_metis;
use mtcut::oracle::g_ex;

fn mtcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtcut")).args(args).output().expect("binary runs")
}

/// Writes the reference instance and its terminal file into `dir`.
fn write_g_ex(dir: &Path) -> (String, String) {
    let graph = dir.join("gex.graph");
    let terminals = dir.join("gex.terminals");
    fs::write(&graph, write_metis(&g_ex())).unwrap();
    fs::write(&terminals, "1\n2\n3\n").unwrap();
    (graph.display().to_string(), terminals.display().to_string())
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solves_reference_instance() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, terms) = write_g_ex(dir.path());
    let assignment = dir.path().join("a.txt");
    let json = dir.path().join("r.json");
    let out = mtcut(&[
        "--graph",
        &graph,
        "--terminals",
        &terms,
        "--assignment",
        assignment.to_str().unwrap(),
        "--report",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&json);
    assert_eq!(r["weight"], 4);
    assert_eq!(r["optimal"], true);
    assert_eq!(r["problems_explored"], 1);
    let blocks = mtcut::io::parse_assignment(&fs::read_to_string(&assignment).unwrap()).unwrap();
    assert_eq!(g_ex().crossing_weight(&blocks), 4);
}

#[test]
fn kernel_mode_reports_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, terms) = write_g_ex(dir.path());
    let json = dir.path().join("r.json");
    let out =
        mtcut(&["--graph", &graph, "--terminals", &terms, "--mode", "kernel", "--report", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&json);
    assert_eq!(r["status"], "kernelized");
    let config = r["config"].as_array().unwrap();
    let lower = config.iter().find(|kv| kv[0] == "lower_bound").unwrap();
    assert_eq!(lower[1], "4");
}

#[test]
fn kernel_ilp_without_solver_exports_and_reports_unavailable() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, terms) = write_g_ex(dir.path());
    let prefix = dir.path().join("out");
    let out = mtcut(&[
        "--graph",
        &graph,
        "--terminals",
        &terms,
        "--mode",
        "kernel-ilp",
        "--reductions",
        "none",
        "--output-prefix",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(13));
    let lp = fs::read_to_string(dir.path().join("out.c0.lp")).unwrap();
    assert!(lp.contains("\nMinimize\n"));
    assert!(dir.path().join("out.c0.json").exists());
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = mtcut(&[
        "--generate",
        "60,3,5",
        "--random-terminals",
        "3",
        "--mode",
        "oracle",
        "--report",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(12));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn malformed_graph_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.graph");
    fs::write(&graph, "3 2\n2\nx\n").unwrap();
    let out = mtcut(&["--graph", graph.to_str().unwrap(), "--random-terminals", "2"]);
    assert_eq!(out.status.code(), Some(11));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let a = dir.path().join(format!("{tag}.txt"));
        let j = dir.path().join(format!("{tag}.json"));
        let out = mtcut(&[
            "--generate",
            "120,3,5",
            "--grow-terminals",
            "4,0.3",
            "--seed",
            "7",
            "--assignment",
            a.to_str().unwrap(),
            "--report",
            j.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let mut r = report(&j);
        r["wall_time_secs"] = 0.into();
        r["outputs"] = serde_json::Value::Null;
        (fs::read(&a).unwrap(), r)
    };
    let (a1, r1) = run("one");
    let (a2, r2) = run("two");
    assert_eq!(a1, a2);
    assert_eq!(r1, r2);
}
