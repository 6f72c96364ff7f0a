//! Exact metric dimension of graphs: a brute-force oracle, a dynamic program
//! over nice tree decompositions of bounded length on bounded-degree graphs,
//! and a dynamic program over modular decompositions.

pub mod decomp;
pub mod error;
pub mod generators;
pub mod mw;
pub mod graph;
pub mod oracle;
pub mod tl;
pub mod vertex_set;

pub use error::{Error, Result};
pub use graph::{all_pairs_distances, is_resolving_set, DistanceMatrix, Graph, Vertex};
pub use vertex_set::VertexSet;
