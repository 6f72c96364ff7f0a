//! Metric dimension over tree decompositions of bounded length.

pub mod bounds;
pub mod layout;
pub mod lemmas;
pub mod profile;
pub mod solver;

pub use bounds::{alpha, degree_lower_bound, locality_radius, width_bound};
pub use layout::Layout;
pub use lemmas::{check_structural_lemmas, check_structural_lemmas_with, LemmaCounts, LemmaReport};
pub use profile::{build_r, cover, project, resolved_across, OrderedPartition, ProfileSet};
pub use solver::{run_rooted, solve_tl, solve_tl_with_td, ProfileDomain, RootedRun, TableEntry, TlConfig, TlResult, TlStats};
