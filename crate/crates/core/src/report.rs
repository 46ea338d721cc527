//! Run reports: a human summary and a JSON document.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graph::Weight;
use crate::kernel::ReductionLog;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    /// SHA-256 of the instance file, hex.
    pub instance_sha256: String,
    pub mode: String,
    pub vertices: usize,
    pub edges: usize,
    pub terminals: usize,
    pub weight: Option<Weight>,
    pub optimal: bool,
    pub status: String,
    pub problems_explored: u64,
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
    pub reductions: ReductionLog,
    pub wall_time_secs: f64,
    /// Flag values the run used, as `name -> value`.
    pub config: Vec<(String, String)>,
    /// Files written besides the report.
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            writeln!(s, "{k:<25} {v}").expect("writing to a string");
        };
        line("instance", self.instance.clone());
        line("mode", self.mode.clone());
        line("graph", format!("n={} m={} k={}", self.vertices, self.edges, self.terminals));
        line("status", self.status.clone());
        if let Some(w) = self.weight {
            line("weight", w.to_string());
        }
        line("optimal", self.optimal.to_string());
        line("problems", self.problems_explored.to_string());
        line("kernel", format!("n={} m={}", self.kernel_vertices, self.kernel_edges));
        for (name, count) in self.reductions.entries() {
            if count > 0 {
                line(name, count.to_string());
            }
        }
        line("time", format!("{:.3}s", self.wall_time_secs));
        for o in &self.outputs {
            line("wrote", o.clone());
        }
        s
    }
}
