//! Solvers for rooted k-stroll, point-to-point orienteering and deadline TSP.
//!
//! Distances are exact rationals stored as integer ticks. Two backends: an exact
//! dynamic program over tree decompositions and a randomized split-tree scheme
//! for doubling metrics. `harness` holds generators, run reports, benchmarks and
//! calibration; `oracle` holds brute-force references for small inputs.

pub mod deadline;
pub mod decomposition;
pub mod doubling;
pub mod error;
pub mod harness;
pub mod instance;
pub mod metric;
pub mod oracle;
pub mod path;
pub mod rational;
pub mod treewidth;
