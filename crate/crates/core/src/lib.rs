//! String pointer reduction system for ciliate gene assembly.
//!
//! Legal strings are rewritten by three rule kinds (snr, spr, sdr). The
//! reduction graph and the pointer-component graph derived from it decide,
//! without search, which pointers can be handled by snr rules in a
//! successful reduction and in which orders. The [`verify`] module replays
//! those characterizations against an exhaustive strategy enumerator.

pub mod dot;
pub mod enumerate;
pub mod legal_string;
pub mod pc_graph;
pub mod reduction;
pub mod reduction_graph;
pub mod report;
pub mod verify;

pub use legal_string::{Label, LegalString, LegalStringError, Pointer, PointerString};
pub use pc_graph::{PcGraph, PcGraphError, PcVertex};
pub use reduction::{Reduction, ReductionError, ReductionRule, RuleKind};
pub use reduction_graph::{GraphError, ReductionGraph};

/// The running example used throughout the docs and tests.
pub const RUNNING_EXAMPLE: &str = "5 4 3 7 2 5 6 2 -7 3 4 6";
