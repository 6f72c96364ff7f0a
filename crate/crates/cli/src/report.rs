use metdim::tl::TlStats;
use serde::Serialize;

use crate::Algo;

/// Key order is part of the output format.
#[derive(Serialize)]
pub struct SolveReport {
    pub n: usize,
    pub m: usize,
    pub algorithm: Algo,
    pub md: usize,
    pub witness: Vec<usize>,
    /// Present only for `--labeled` input.
    pub witness_labels: Option<Vec<String>>,
    pub params: Params,
    pub timings_ms: Timings,
    pub corpus_checks: Checks,
    pub tl_stats: Option<TlStats>,
}

#[derive(Serialize)]
pub struct Params {
    pub delta: usize,
    pub ell: Option<u32>,
    pub s: Option<usize>,
    pub mw_width: Option<usize>,
}

#[derive(Serialize)]
pub struct Timings {
    pub parse: f64,
    pub decompose: f64,
    pub solve: f64,
    pub total: f64,
}

#[derive(Serialize)]
pub struct Checks {
    pub witness_verified: bool,
    /// `Δ <= 2^md + md - 1`; does not hold in general, reported for the record.
    pub degree_bound: bool,
    /// `Δ <= 3^md - 1`; must always hold.
    pub neighbour_bound: bool,
}
