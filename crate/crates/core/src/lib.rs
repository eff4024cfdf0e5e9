//! Tarjan's strongly connected components algorithm in three forms: a
//! functional rendition over an immutable environment with ghost colors, a
//! checked mode that evaluates its contracts at run time, and a linear-time
//! iterative version. A brute-force oracle and a seeded graph generator
//! support differential testing.

pub mod algorithm;
pub mod checker;
pub mod environment;
pub mod fast_scc;
pub mod gen;
pub mod graph;
pub mod io;
pub mod oracle;

pub use algorithm::{sufficient_fuel, tarjan, tarjan_fueled, ChoiceOrder, DfsResult, Mutation};
pub use checker::{run_checked, CheckConfig, CheckedRun, FailMode, Suite};
pub use environment::{CheckReport, Env, NumMark};
pub use fast_scc::tarjan_fast;
pub use gen::{generate, GraphSpec, Model};
pub use graph::{Graph, GraphError, VertexId, VertexSet};
pub use oracle::{scc_oracle, SccPartition};
