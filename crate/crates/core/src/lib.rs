//! Exact minimum multiterminal cut.
//!
//! The solver decomposes the input into connected components, shrinks every
//! component with safe data reductions (contracting edges that some optimum
//! keeps inside one block, deleting edges every optimum cuts) and finishes
//! with a best-first branch-and-reduce search over `G/e` and `G-e`. An ILP
//! export path and a brute-force oracle are included for cross-checking.

pub mod capforest;
pub mod flow;
pub mod generate;
pub mod graph;
pub mod ilp;
pub mod io;
pub mod kernel;
pub mod oracle;
pub mod report;
pub mod search;
pub mod union_find;

pub use graph::{Assignment, Graph, GraphError, TerminalSet, VertexId, Weight};
pub use kernel::{ReductionConfig, ReductionLog};
pub use search::{solve, CutResult, EdgeSelection, QueueOrder, SearchConfig};
