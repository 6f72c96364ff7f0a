use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use metdim::decomp::{clique_tree, heuristic_td, modular_decompose, parse_td, validate_td, write_td, TreeDecomposition};
use metdim::generators::{gen, Family};
use metdim::graph::{first_unresolved_pair, graph_stats, parse_edge_list, parse_labeled_edge_list};
use metdim::mw::md_modular;
use metdim::oracle::{degree_bound_holds, metric_dimension_bruteforce, neighbour_bound_holds, verify_witness};
use metdim::tl::{solve_tl_with_td, TlConfig, TlStats};
use metdim::{all_pairs_distances, Graph, VertexSet};
use serde::Serialize;

mod report;

use report::{Checks, Params, SolveReport, Timings};

#[derive(Parser)]
#[command(name = "metdim", version, about = "Exact metric dimension solvers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the metric dimension of a connected graph.
    Solve(SolveArgs),
    /// Check whether a vertex set is resolving.
    Verify(VerifyArgs),
    /// Write a tree decomposition or a modular decomposition.
    Decompose(DecomposeArgs),
    /// Generate a graph from a named family.
    Gen(GenArgs),
    /// Print basic graph statistics.
    Stats(StatsArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge-list file (`u v` per line, `#` comments, optional `n <count>`).
    #[arg(long)]
    input: PathBuf,
    /// Treat vertex tokens as arbitrary labels instead of 0-based ids.
    #[arg(long)]
    labeled: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Algo {
    Auto,
    Brute,
    Mw,
    Tl,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "auto")]
    algo: Algo,
    /// PACE `.td` file for the tree-length solver.
    #[arg(long)]
    td: Option<PathBuf>,
    /// Build a decomposition: clique tree if chordal, min-fill otherwise.
    #[arg(long)]
    td_auto: bool,
    /// Give up (exit 3) when no resolving set of this size exists.
    #[arg(long)]
    budget_k: Option<usize>,
    /// Write a JSON report here (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Print the witness set.
    #[arg(long)]
    witness: bool,
    /// Largest modular width `auto` hands to the modular solver.
    #[arg(long, default_value_t = 12)]
    mw_cap: usize,
    /// Largest vertex count `auto` hands to brute force.
    #[arg(long, default_value_t = 20)]
    brute_n_cap: usize,
    /// Largest set size `auto` lets brute force try.
    #[arg(long, default_value_t = 5)]
    brute_k_cap: usize,
    /// Override the locality radius of the tree-length solver.
    #[arg(long)]
    tl_s: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma separated vertices (labels with `--labeled`).
    #[arg(long)]
    set: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Modular,
    CliqueTree,
    HeuristicTd,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// path, cycle, complete, star, random_tree, random_cograph,
    /// random_chordal, random_bounded_degree, petersen
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Seed for the random families; 0 when absent.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    json: bool,
}

/// Exit codes.
const INPUT_ERROR: u8 = 2;
const BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Solve(a) => solve(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Decompose(a) => decompose(a),
        Cmd::Gen(a) => generate(a),
        Cmd::Stats(a) => stats(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<metdim::Error>() {
        Some(metdim::Error::ExceedsBudget { .. } | metdim::Error::TableBudgetExceeded { .. }) => BUDGET,
        Some(_) => INPUT_ERROR,
        None if e.downcast_ref::<std::io::Error>().is_some() => INPUT_ERROR,
        None => 1,
    }
}

struct Loaded {
    g: Graph,
    labels: Option<Vec<String>>,
}

impl Loaded {
    fn name(&self, v: usize) -> String {
        self.labels.as_ref().map_or_else(|| v.to_string(), |l| l[v].clone())
    }
}

fn load(a: &InputArgs) -> anyhow::Result<Loaded> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let loaded = if a.labeled {
        let (g, labels) = parse_labeled_edge_list(&text)?;
        Loaded { g, labels: Some(labels) }
    } else {
        Loaded { g: parse_edge_list(&text)?, labels: None }
    };
    Ok(loaded)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) if p != Path::new("-") => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn auto_td(g: &Graph) -> TreeDecomposition {
    clique_tree(g).unwrap_or_else(|_| heuristic_td(g))
}

struct Outcome {
    algorithm: Algo,
    md: usize,
    witness: VertexSet,
    tl: Option<TlStats>,
    ell: Option<u32>,
}

fn solve(a: SolveArgs) -> anyhow::Result<ExitCode> {
    let total = Instant::now();
    let loaded = load(&a.input)?;
    let parse_ms = ms(total);
    let g = &loaded.g;
    if !g.is_connected() {
        return Err(metdim::Error::Disconnected.into());
    }
    let td_file = match &a.td {
        Some(p) => Some(parse_td(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?),
        None => None,
    };

    let dec_start = Instant::now();
    let modular = matches!(a.algo, Algo::Auto | Algo::Mw).then(|| modular_decompose(g));
    let mw_width = modular.as_ref().map(|m| m.width);
    let modular_ms = ms(dec_start);
    let mut decompose_ms = modular_ms;

    let solve_start = Instant::now();
    let run_tl = |decompose_ms: &mut f64| -> anyhow::Result<Outcome> {
        let t = Instant::now();
        let td = match (&td_file, a.td_auto) {
            (Some(td), _) => td.clone(),
            (None, true) => auto_td(g),
            (None, false) => bail!(metdim::Error::Contract("the tree-length solver needs --td or --td-auto".into())),
        };
        let rep = validate_td(g, &td)?;
        if !rep.valid {
            return Err(metdim::Error::InvalidDecomposition(rep.reason.unwrap_or_default()).into());
        }
        *decompose_ms += ms(t);
        let cfg = TlConfig { s_override: a.tl_s, max_k: a.budget_k, ..TlConfig::default() };
        let r = solve_tl_with_td(g, &td, &cfg)?;
        Ok(Outcome { algorithm: Algo::Tl, md: r.md, witness: r.witness, tl: Some(r.stats), ell: Some(rep.length) })
    };
    let run_brute = |budget: Option<usize>| -> metdim::Result<Outcome> {
        let b = metric_dimension_bruteforce(g, &all_pairs_distances(g), budget)?;
        Ok(Outcome { algorithm: Algo::Brute, md: b.md, witness: b.witness, tl: None, ell: None })
    };
    let run_mw = || -> anyhow::Result<Outcome> {
        let tree = &modular.as_ref().expect("modular decomposition computed").tree;
        let r = md_modular(g, tree)?;
        Ok(Outcome { algorithm: Algo::Mw, md: r.md, witness: r.witness, tl: None, ell: None })
    };
    let out = match a.algo {
        Algo::Brute => run_brute(a.budget_k)?,
        Algo::Mw => run_mw()?,
        Algo::Tl => run_tl(&mut decompose_ms)?,
        Algo::Auto => {
            if mw_width.is_some_and(|w| w <= a.mw_cap) {
                run_mw()?
            } else if g.n() <= a.brute_n_cap {
                let cap = a.budget_k.map_or(a.brute_k_cap, |k| k.min(a.brute_k_cap));
                match run_brute(Some(cap)) {
                    Ok(o) => o,
                    Err(metdim::Error::ExceedsBudget { .. }) if a.budget_k.is_none_or(|k| k > cap) => run_tl(&mut decompose_ms)?,
                    Err(e) => return Err(e.into()),
                }
            } else {
                run_tl(&mut decompose_ms)?
            }
        }
    };
    // Decomposition work done inside the tl branch is reported separately.
    let solve_ms = ms(solve_start) - (decompose_ms - modular_ms);
    if let Some(k) = a.budget_k {
        if out.md > k {
            return Err(metdim::Error::ExceedsBudget { budget: k }.into());
        }
    }
    let verified = verify_witness(g, out.md, &out.witness);
    if !verified {
        bail!("internal error: witness {:?} does not certify md {}", out.witness.to_vec(), out.md);
    }

    println!("md {}", out.md);
    if a.witness {
        let names: Vec<String> = out.witness.iter().map(|v| loaded.name(v)).collect();
        println!("witness {}", names.join(" "));
    }
    if let Some(path) = &a.json {
        let delta = g.max_degree();
        let report = SolveReport {
            n: g.n(),
            m: g.m(),
            algorithm: out.algorithm,
            md: out.md,
            witness: out.witness.to_vec(),
            witness_labels: loaded.labels.as_ref().map(|_| out.witness.iter().map(|v| loaded.name(v)).collect()),
            params: Params { delta, ell: out.ell, s: out.tl.as_ref().map(|s| s.s), mw_width },
            timings_ms: Timings { parse: parse_ms, decompose: decompose_ms, solve: solve_ms.max(0.0), total: ms(total) },
            corpus_checks: Checks {
                witness_verified: verified,
                degree_bound: degree_bound_holds(delta, out.md),
                neighbour_bound: neighbour_bound_holds(delta, out.md),
            },
            tl_stats: out.tl,
        };
        emit(Some(path), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> anyhow::Result<ExitCode> {
    let loaded = load(&a.input)?;
    let g = &loaded.g;
    let mut set = Vec::new();
    for tok in a.set.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v = match &loaded.labels {
            Some(l) => l.iter().position(|x| x == tok),
            None => tok.parse::<usize>().ok().filter(|&v| v < g.n()),
        };
        match v {
            Some(v) => set.push(v),
            None => return Err(metdim::Error::Contract(format!("unknown vertex {tok:?}")).into()),
        }
    }
    let d = all_pairs_distances(g);
    match first_unresolved_pair(&d, &set) {
        None => {
            println!("resolving");
            Ok(ExitCode::SUCCESS)
        }
        Some((x, y)) => {
            println!("not resolving: {} {} have equal distances", loaded.name(x), loaded.name(y));
            Ok(ExitCode::from(1))
        }
    }
}

fn decompose(a: DecomposeArgs) -> anyhow::Result<ExitCode> {
    let g = load(&a.input)?.g;
    let text = match a.mode {
        Mode::Modular => {
            let dec = modular_decompose(&g);
            format!("width {}\n{}", dec.width, dec.tree.render())
        }
        Mode::CliqueTree => write_td(&clique_tree(&g)?),
        Mode::HeuristicTd => write_td(&heuristic_td(&g)),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn generate(a: GenArgs) -> anyhow::Result<ExitCode> {
    let g = gen(a.family, a.n, a.seed)?;
    emit(a.out.as_deref(), &g.to_edge_list())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct StatsReport {
    n: usize,
    m: usize,
    max_degree: usize,
    diameter: Option<u32>,
    connected: bool,
    modular_width: usize,
    heuristic_td_width: usize,
    heuristic_td_length: u32,
    clique_tree_width: Option<usize>,
}

fn stats(a: StatsArgs) -> anyhow::Result<ExitCode> {
    let g = load(&a.input)?.g;
    let st = graph_stats(&g);
    let td = heuristic_td(&g);
    let rep = validate_td(&g, &td)?;
    let chordal = clique_tree(&g).ok().map(|t| validate_td(&g, &t)).transpose()?;
    let r = StatsReport {
        n: st.n,
        m: st.m,
        max_degree: st.max_degree,
        diameter: st.connected.then_some(st.diameter),
        connected: st.connected,
        modular_width: modular_decompose(&g).width,
        heuristic_td_width: rep.width,
        heuristic_td_length: rep.length,
        clique_tree_width: chordal.map(|c| c.width),
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&r)?);
    } else {
        println!("n {}", r.n);
        println!("m {}", r.m);
        println!("max_degree {}", r.max_degree);
        println!("diameter {}", r.diameter.map_or("inf".into(), |d| d.to_string()));
        println!("connected {}", r.connected);
        println!("modular_width {}", r.modular_width);
        println!("heuristic_td width {} length {}", r.heuristic_td_width, r.heuristic_td_length);
        match r.clique_tree_width {
            Some(w) => println!("clique_tree width {w}"),
            None => println!("clique_tree none (not chordal)"),
        }
    }
    Ok(ExitCode::SUCCESS)
}
