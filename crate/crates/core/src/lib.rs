//! Directed assortative configuration graphs.
//!
//! Given a node-type distribution `P` over bi-degrees `(j, k)` and an
//! edge-type distribution `Q` over `(source out-degree, target in-degree)`
//! pairs with matching degree-weighted marginals, [`generator::generate`]
//! builds a random directed multigraph whose empirical node and edge types
//! converge to `P` and `Q`. The [`copula`] module produces `Q` from `P` for a
//! target assortativity, [`erasure`] simplifies the multigraph, and
//! [`metrics`] measures how close a realized graph is to its targets.

pub mod copula;
pub mod dist;
pub mod erasure;
pub mod error;
pub mod generator;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod sweep;
pub mod variant;

pub use copula::Copula;
pub use dist::{EdgeTypeDistribution, NodeTypeDistribution, ValidationReport};
pub use error::{Error, Result};
pub use generator::{generate, generate_seeded, GenerateOptions, GeneratedGraph, GraphRng, OnReject};
pub use graph::{EdgeType, MultiDigraph, NodeType};
