//! Paley digraphs, the Mathon-type colored digraph, transitive
//! subtournament search, and lower bounds for directed Ramsey numbers.

pub mod bounds;
pub mod gfq;
pub mod graphs;
pub mod ttsearch;
pub mod verifier;

/// Version string recorded in cache entries and reports.
pub const TOOL_VERSION: &str = concat!("dramsey-", env!("CARGO_PKG_VERSION"));
