//! The end-to-end solve pipeline and its report.

use std::time::Instant;

use serde::Serialize;

use crate::assoc::{
    chromatic_number, code_from_coloring, greedy_coloring, AssociatedGraph, Coloring, EXACT_COLORING_LIMIT,
};
use crate::codes::{
    brute_force_solve, construct_code, expand_solution, verify_solution_with, NetworkSolution, Simulation, Violation,
    BRUTE_FORCE_LINK_LIMIT,
};
use crate::error::{Error, Result};
use crate::gf::{smallest_supported_order, Field};
use crate::instances::gen_random;
use crate::labeling::{solvable, LabeledRegionGraph, RegionKind};
use crate::minimize::{minimize_with, structural_audit, EditOrder, MinimalityReport};
use crate::network::{normalize_sinks, Network};
use crate::region::RegionState;
use crate::GenParams;

/// Above this many `q² · |E|` simulation steps, verification samples message
/// pairs instead of enumerating them.
pub const EXHAUSTIVE_SIMULATION_LIMIT: u64 = 100_000_000;
pub const SAMPLED_PAIRS: usize = 4096;

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Field order to use instead of the smallest sufficient one.
    pub field: Option<u32>,
    /// Reduce to a minimal feasible region graph and color its associated graph.
    pub minimize: bool,
    /// Cross-check the verdict against the brute-force oracle.
    pub oracle: bool,
    /// Shuffle minimization candidates and sampled verification with this
    /// seed instead of using the canonical order.
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Solvable,
    Unsolvable,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    pub total: usize,
    pub x1: usize,
    pub x2: usize,
    pub coding: usize,
    pub singular: usize,
}

impl RegionCounts {
    pub fn of(labeled: &LabeledRegionGraph) -> RegionCounts {
        let count = |k| labeled.kinds.iter().filter(|&&x| x == k).count();
        RegionCounts {
            total: labeled.len(),
            x1: count(RegionKind::X1),
            x2: count(RegionKind::X2),
            coding: count(RegionKind::Coding),
            singular: count(RegionKind::Singular),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleResult {
    Agrees,
    Disagrees,
    Skipped,
}

/// Everything the pipeline learned. Serialization is canonical: fixed field
/// order and no timings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub links: usize,
    pub sinks: usize,
    pub basic_regions: RegionCounts,
    /// Heads of the coding regions of the basic graph.
    pub coding_regions: Vec<String>,
    /// Heads of the singular regions of the basic graph.
    pub singular_regions: Vec<String>,
    pub field_order: Option<u32>,
    pub encoding_link_count: Option<usize>,
    pub encoding_links: Vec<String>,
    pub bound_encoding: usize,
    pub bound_coding: usize,
    pub verification: Option<String>,
    pub minimality: Option<MinimalityReport>,
    pub oracle: Option<OracleResult>,
    /// Remarks about field selection, e.g. rounding up to a supported order.
    pub notes: Vec<String>,
}

/// Artifacts kept alongside the report.
#[derive(Clone, Debug)]
pub struct Run {
    pub network: Network,
    pub basic: RegionState,
    pub basic_labeled: LabeledRegionGraph,
    /// The state the code was built on: the basic graph or its minimization.
    pub used: Option<(RegionState, LabeledRegionGraph)>,
    pub associated: Option<AssociatedGraph>,
    pub solution: Option<NetworkSolution>,
    pub report: RunReport,
    /// Milliseconds per stage, excluding parsing and serialization.
    pub timings: Vec<(&'static str, f64)>,
}

fn heads(state: &RegionState, regions: &[usize]) -> Vec<String> {
    regions
        .iter()
        .map(|&r| format!("R{} ({})", r + 1, state.decomposition.region(r).head()))
        .collect()
}

/// Exhaustive simulation when small enough, otherwise seeded sampling.
pub fn simulation_for(network: &Network, field: &Field, seed: u64) -> Simulation {
    let q = field.order() as u64;
    if q * q * network.num_links() as u64 > EXHAUSTIVE_SIMULATION_LIMIT {
        Simulation::Sampled {
            pairs: SAMPLED_PAIRS,
            seed,
        }
    } else {
        Simulation::Exhaustive
    }
}

fn describe(network: &Network, v: &Violation) -> String {
    format!("{} ({}): {:?}", v.link, network.describe_link(v.link), v.condition)
}

/// Sink normalization, basic decomposition, labeling and feasibility; then,
/// if solvable, a code over the smallest sufficient field (or the requested
/// one), its expansion to the links, and verification.
pub fn run(input: &Network, options: SolveOptions) -> Result<Run> {
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, f64)>| {
        timings.push((name, clock.elapsed().as_secs_f64() * 1e3));
        clock = Instant::now();
    };

    let network = normalize_sinks(input);
    let sinks = network.num_sinks();
    let s = solvable(&network);
    lap("decompose_label_feasibility", &mut timings);

    let mut report = RunReport {
        verdict: if s.solvable {
            Verdict::Solvable
        } else {
            Verdict::Unsolvable
        },
        links: network.num_links(),
        sinks,
        basic_regions: RegionCounts::of(&s.labeled),
        coding_regions: heads(&s.state, &s.labeled.coding()),
        singular_regions: heads(&s.state, &s.labeled.singular()),
        field_order: None,
        encoding_link_count: None,
        encoding_links: Vec::new(),
        bound_encoding: crate::minimize::bound_encoding(sinks),
        bound_coding: crate::minimize::bound_coding(sinks),
        verification: None,
        minimality: None,
        oracle: None,
        notes: Vec::new(),
    };
    let mut out = Run {
        network: network.clone(),
        basic: s.state.clone(),
        basic_labeled: s.labeled.clone(),
        used: None,
        associated: None,
        solution: None,
        report: report.clone(),
        timings: Vec::new(),
    };

    if s.solvable {
        let (state, labeled, code, coloring, omega) = if options.minimize {
            let order = options.seed.map_or(EditOrder::Canonical, EditOrder::Shuffled);
            let m = minimize_with(&s.state, order)?;
            lap("minimize", &mut timings);
            let omega = AssociatedGraph::build(&m.labeled);
            let adj = omega.adjacency();
            let coloring: Coloring = if adj.len() > EXACT_COLORING_LIMIT {
                greedy_coloring(&adj)
            } else {
                chromatic_number(&adj)?
            };
            let field = pick_field(options.field, coloring.chi.saturating_sub(1) as u64, &mut report.notes)?;
            let code = code_from_coloring(&m.labeled, &omega, &coloring, field)?;
            lap("color_and_code", &mut timings);
            (m.result, m.labeled, code, Some(coloring), Some(omega))
        } else {
            let field = pick_field(options.field, s.labeled.coding().len() as u64 + 1, &mut report.notes)?;
            let code = construct_code(&s.labeled, field)?;
            lap("code", &mut timings);
            (s.state.clone(), s.labeled.clone(), code, None, None)
        };
        let solution = expand_solution(&network, &state, &code);
        let verdict = verify_solution_with(
            &network,
            &solution,
            simulation_for(&network, &solution.field, options.seed.unwrap_or(0)),
        );
        lap("expand_and_verify", &mut timings);
        report.field_order = Some(solution.field.order());
        report.encoding_link_count = Some(solution.encoding_links.len());
        report.encoding_links = solution
            .encoding_links
            .iter()
            .map(|&e| format!("{e} ({})", network.describe_link(e)))
            .collect();
        report.verification = Some(match &verdict {
            Ok(()) => "ok".into(),
            Err(v) => describe(&network, v),
        });
        if options.minimize {
            let mut m = structural_audit(&labeled, sinks);
            m.record_solution(
                solution.encoding_links.len(),
                solution.field.order(),
                coloring.as_ref().map(|c| c.chi),
                options.field.is_some(),
            );
            report.minimality = Some(m);
        }
        out.used = Some((state, labeled));
        out.associated = omega;
        out.solution = Some(solution);
    }

    if options.oracle {
        report.oracle = Some(if network.num_real_links() > BRUTE_FORCE_LINK_LIMIT {
            OracleResult::Skipped
        } else {
            let found = brute_force_solve(&network)?.is_some();
            if found == s.solvable {
                OracleResult::Agrees
            } else {
                OracleResult::Disagrees
            }
        });
        lap("oracle", &mut timings);
    }
    out.report = report;
    out.timings = timings;
    Ok(out)
}

fn pick_field(requested: Option<u32>, needed: u64, notes: &mut Vec<String>) -> Result<Field> {
    match requested {
        Some(q) => Field::new(q as u64),
        None => {
            let needed = needed.max(2);
            let q = smallest_supported_order(needed).ok_or(Error::UnsupportedOrder(needed))?;
            if q as u64 != needed {
                notes.push(format!("order {needed} is not supported; using GF({q})"));
            }
            Field::new(q as u64)
        }
    }
}

/// Parameters of the layered random instance timed at a given size.
pub fn bench_params(links: usize, seed: u64) -> GenParams {
    GenParams {
        nodes: (links / 4).max(3),
        links,
        sinks1: 8.min(links / 8).max(1),
        sinks2: 8.min(links / 8).max(1),
        seed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub links: usize,
    pub regions: usize,
    pub median_ms: f64,
    pub runs: usize,
}

/// Median time of decomposition, labeling and feasibility per size. Runs
/// are interleaved across sizes so machine noise affects all of them alike.
pub fn scaling_bench(sizes: &[usize], seed: u64, runs: usize) -> Result<Vec<BenchRow>> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("sizes must be strictly ascending".into()));
    }
    let runs = runs.max(1);
    let mut nets = Vec::with_capacity(sizes.len());
    for &links in sizes {
        let net = gen_random(&bench_params(links, seed))?;
        // warm-up run, also gives the region count
        let regions = std::hint::black_box(solvable(&net)).labeled.len();
        nets.push((net, regions));
    }
    let mut times = vec![Vec::with_capacity(runs); sizes.len()];
    for _ in 0..runs {
        for ((net, _), t) in nets.iter().zip(&mut times) {
            let clock = Instant::now();
            std::hint::black_box(solvable(net));
            t.push(clock.elapsed().as_secs_f64() * 1e3);
        }
    }
    Ok(sizes
        .iter()
        .zip(nets)
        .zip(times)
        .map(|((&links, (_, regions)), mut t)| {
            t.sort_by(f64::total_cmp);
            BenchRow {
                links,
                regions,
                median_ms: t[t.len() / 2],
                runs,
            }
        })
        .collect())
}

impl RunReport {
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
