//! Gradual transformations between graph solutions, a bounded-recourse
//! wrapper for dynamic matching algorithms, and a recourse lower-bound harness.

pub mod adversary;
pub mod bench;
pub mod gen;
pub mod graph;
pub mod io;
pub mod manifest;
pub mod mcm;
pub mod msf;
pub mod mwm;
pub mod oracle;
pub mod script;
pub mod solution;
pub mod wrapper;

pub use graph::{Edge, EdgeId, Graph, GraphError, Tolerance, UpdateEvent, VertexId};
pub use script::{ChangeOp, Granularity, OpKind, Phase, Problem, ReplayReport, Script, Verdict};
pub use solution::{Matching, SolutionStats, SpanningForest, ValidityReport};
