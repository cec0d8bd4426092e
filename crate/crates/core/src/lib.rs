//! Exact graph calculus for universal star-products on `R^d`.

pub mod error;
pub mod eval;
pub mod graph;
pub mod homological;
pub mod linalg;
pub mod mc;
pub mod poisson;
pub mod poly;
pub mod polyvector;
pub mod rational;

pub use error::{Error, Result};
pub use graph::{canonical_form, enumerate_graphs, parse_graph, DirectedGraph, GraphClass, GraphFilter, GraphSum};
pub use poly::{poly_derive, poly_mul, Poly};
pub use rational::Rational;
