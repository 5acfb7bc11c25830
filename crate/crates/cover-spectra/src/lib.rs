//! Random covering graphs of a fixed base graph: samplers for the standard
//! permutation, involution and full-cycle models, adjacency and
//! non-backtracking spectra, exact expected subgraph counts, and the trace
//! and tree estimates used to study new eigenvalues.

pub mod covers;
pub mod error;
pub mod expectations;
pub mod graph;
pub mod rng;
pub mod spectra;
pub mod tangles;
pub mod trace_lab;
pub mod walks;

pub use error::{Error, Result};
pub use graph::Graph;
