//! Admissible graphs, their canonical classes, linear combinations and
//! enumeration.

mod canon;
mod digraph;
mod enumerate;
mod sum;

pub use canon::{canonical_form, GraphClass};
pub use digraph::{parse_graph, BareDigraph, DirectedGraph, MAX_VERTICES};
pub use enumerate::{
    enumerate_graphs, enumerate_graphs_with_budget, Enumeration, GraphFilter, DEFAULT_MAX_VERTICES,
};
pub use sum::GraphSum;
