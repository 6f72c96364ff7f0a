//! Structural decompositions consumed by the solvers.

mod chordal;
mod heuristic;
mod modular;
mod nice;
mod td;

pub use chordal::{clique_tree, find_chordless_cycle, mcs_order};
pub use heuristic::{heuristic_td, min_fill_order};
pub use modular::{is_module, modular_decompose, ModularDecomposition, ModularKind, ModularNode, ModularTree};
pub use nice::{make_nice, NiceKind, NiceNode, NiceTreeDecomposition};
pub use td::{contract_nested_bags, parse_td, validate_td, validate_td_with, write_td, TdReport, TreeDecomposition};
