use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use smnc_core::codes::{verify_solution_with, SolutionDoc};
use smnc_core::export::{associated_graph_dot, line_graph_dot, region_graph_dot};
use smnc_core::instances::{
    gen_random_doc, gen_tight_encoding, gen_tight_field, load_any, realize_doc, RegionGraphSpec,
};
use smnc_core::labeling::solvable;
use smnc_core::network::normalize_sinks;
use smnc_core::pipeline::{run, scaling_bench, simulation_for, Run, Verdict};
use smnc_core::{GenParams, Network, SolveOptions};

const EXIT_UNSOLVABLE: u8 = 2;

/// Two-session simple multicast network coding: solvability, code
/// construction and region-graph minimization.
#[derive(Parser)]
#[command(name = "smnc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide solvability and, if solvable, build and verify a code.
    Solve(SolveArgs),
    /// Print the basic region decomposition and its region graph.
    Decompose {
        instance: PathBuf,
        /// Write the labeled region graph as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the line graph as DOT.
        #[arg(long)]
        line_dot: Option<PathBuf>,
    },
    /// Reduce to a minimal region graph; emits its DOT and the minimality report.
    Minimize {
        instance: PathBuf,
        /// DOT destination (default: stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Report destination (default: stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Shuffle the edit order with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the minimality report only.
    Bounds {
        instance: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a random instance or a tight family member.
    Gen(GenArgs),
    /// Check a solution file against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        /// Seed for sampled simulation on large instances.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time decomposition, labeling and feasibility on random instances.
    Bench {
        /// Link counts, strictly ascending.
        #[arg(long, value_delimiter = ',', default_values_t = [10_000usize, 20_000, 40_000, 80_000])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 9)]
        runs: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Field order to use (a prime or a power of two).
    #[arg(long)]
    field: Option<u32>,
    /// Minimize the region graph and color its associated graph.
    #[arg(long)]
    minimize: bool,
    /// Write the labeled basic region graph as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the canonical run report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the solution (field order and kernel per link id).
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Write the associated graph as DOT (with --minimize).
    #[arg(long, requires = "minimize")]
    assoc_dot: Option<PathBuf>,
    /// Seed for the minimization edit order and sampled verification.
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-check the verdict with brute force.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, required_unless_present_any = ["tight_encoding", "tight_field"])]
    nodes: Option<usize>,
    #[arg(long, required_unless_present_any = ["tight_encoding", "tight_field"])]
    links: Option<usize>,
    #[arg(long, default_value_t = 2)]
    sinks1: usize,
    #[arg(long, default_value_t = 2)]
    sinks2: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tight encoding-link family with n coding regions.
    #[arg(long, value_name = "N", conflicts_with = "tight_field")]
    tight_encoding: Option<usize>,
    /// Tight field-size family with n coding regions.
    #[arg(long, value_name = "N")]
    tight_field: Option<usize>,
    /// Emit the region-graph spec instead of a realized instance.
    #[arg(long)]
    emit_spec: bool,
    /// Output path (default: stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<Network> {
    let text = read(path)?;
    load_any(&text).with_context(|| format!("cannot load {}", path.display()))
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("cannot write {}", p.display())),
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    emit(Some(path), content)
}

fn print_timings(run: &Run) {
    for (stage, ms) in &run.timings {
        eprintln!("time {stage}: {ms:.3} ms");
    }
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        "none".into()
    } else {
        items.join(", ")
    }
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let network = load(&args.instance)?;
    let options = SolveOptions {
        field: args.field,
        minimize: args.minimize,
        oracle: args.oracle,
        seed: args.seed,
    };
    let run = run(&network, options)?;
    let r = &run.report;
    let counts = &r.basic_regions;
    println!(
        "verdict: {}",
        if r.verdict == Verdict::Solvable {
            "solvable"
        } else {
            "unsolvable"
        }
    );
    println!("links: {} ({} sinks)", r.links, r.sinks);
    println!(
        "regions: {} (X1 {}, X2 {}, coding {}, singular {})",
        counts.total, counts.x1, counts.x2, counts.coding, counts.singular
    );
    println!("coding regions: {}", list(&r.coding_regions));
    println!("singular regions: {}", list(&r.singular_regions));
    if let Some(q) = r.field_order {
        println!("field: GF({q})");
        println!(
            "encoding links: {} [{}]",
            r.encoding_links.len(),
            r.encoding_links.join(", ")
        );
        println!("verification: {}", r.verification.as_deref().unwrap_or("skipped"));
    }
    println!(
        "bounds: encoding links <= {}, coding regions <= {}",
        r.bound_encoding, r.bound_coding
    );
    if let Some(m) = &r.minimality {
        println!(
            "minimal graph: {} regions, {} coding, chromatic number {}",
            m.regions,
            m.n_coding,
            m.chromatic_number.map_or("-".into(), |c| c.to_string())
        );
        for a in m.failures() {
            println!("audit failed: {} {}", a.name, a.witness.as_deref().unwrap_or(""));
        }
    }
    for note in &r.notes {
        println!("note: {note}");
    }
    if let Some(o) = &r.oracle {
        println!("oracle: {}", serde_json::to_value(o)?.as_str().unwrap_or_default());
    }
    print_timings(&run);

    if let Some(p) = &args.dot {
        write_file(p, &region_graph_dot(&run.basic, Some(&run.basic_labeled)))?;
    }
    if let Some(p) = &args.json {
        write_file(p, &r.to_canonical_json())?;
    }
    if let (Some(p), Some(omega)) = (&args.assoc_dot, &run.associated) {
        write_file(p, &associated_graph_dot(omega))?;
    }
    if let Some(sol) = &run.solution {
        if let Some(p) = &args.solution {
            write_file(p, &sol.to_doc().to_canonical_json())?;
        }
        if r.verification.as_deref() != Some("ok") {
            bail!(
                "constructed code failed verification: {}",
                r.verification.as_deref().unwrap_or("")
            );
        }
    }
    if r.oracle == Some(smnc_core::pipeline::OracleResult::Disagrees) {
        bail!("brute-force oracle disagrees with the verdict");
    }
    Ok(match r.verdict {
        Verdict::Solvable => ExitCode::SUCCESS,
        Verdict::Unsolvable => ExitCode::from(EXIT_UNSOLVABLE),
    })
}

fn decompose(instance: &Path, dot: Option<&Path>, line_dot: Option<&Path>) -> Result<ExitCode> {
    let network = normalize_sinks(&load(instance)?);
    let s = solvable(&network);
    print!("{}", s.state.decomposition.dump());
    let edges: Vec<String> = s
        .state
        .graph
        .edges()
        .map(|(p, c)| format!("R{}->R{}", p + 1, c + 1))
        .collect();
    println!("edges: {}", list(&edges));
    let kinds: Vec<String> = (0..s.labeled.len())
        .map(|r| format!("R{}={:?}", r + 1, s.labeled.kind(r)))
        .collect();
    println!("kinds: {}", kinds.join(" "));
    if let Some(p) = dot {
        write_file(p, &region_graph_dot(&s.state, Some(&s.labeled)))?;
    }
    if let Some(p) = line_dot {
        write_file(p, &line_graph_dot(&network))?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Runs the minimizing pipeline; `None` (after a message) if unsolvable.
fn minimized(instance: &Path, seed: Option<u64>) -> Result<Option<Run>> {
    let network = load(instance)?;
    let options = SolveOptions {
        minimize: true,
        seed,
        ..Default::default()
    };
    let run = run(&network, options)?;
    print_timings(&run);
    if run.report.verdict == Verdict::Unsolvable {
        eprintln!("unsolvable: singular regions {}", list(&run.report.singular_regions));
        return Ok(None);
    }
    Ok(Some(run))
}

fn report_json(run: &Run) -> Result<String> {
    let m = run.report.minimality.as_ref().context("no minimality report")?;
    let mut s = serde_json::to_string_pretty(m)?;
    s.push('\n');
    Ok(s)
}

fn minimize_cmd(instance: &Path, dot: Option<&Path>, json: Option<&Path>, seed: Option<u64>) -> Result<ExitCode> {
    let Some(run) = minimized(instance, seed)? else {
        return Ok(ExitCode::from(EXIT_UNSOLVABLE));
    };
    let (state, labeled) = run.used.as_ref().context("no minimized graph")?;
    emit(dot, &region_graph_dot(state, Some(labeled)))?;
    emit(json, &report_json(&run)?)?;
    Ok(ExitCode::SUCCESS)
}

fn bounds(instance: &Path, json: Option<&Path>, seed: Option<u64>) -> Result<ExitCode> {
    let Some(run) = minimized(instance, seed)? else {
        return Ok(ExitCode::from(EXIT_UNSOLVABLE));
    };
    emit(json, &report_json(&run)?)?;
    Ok(ExitCode::SUCCESS)
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let spec: Option<RegionGraphSpec> = match (args.tight_encoding, args.tight_field) {
        (Some(n), _) => Some(gen_tight_encoding(n)?),
        (_, Some(n)) => Some(gen_tight_field(n)?),
        _ => None,
    };
    let text = match spec {
        Some(spec) if args.emit_spec => spec.to_json(),
        Some(spec) => realize_doc(&spec)?.to_canonical_json(),
        None => {
            if args.emit_spec {
                bail!("--emit-spec needs --tight-encoding or --tight-field");
            }
            let params = GenParams {
                nodes: args.nodes.context("--nodes is required")?,
                links: args.links.context("--links is required")?,
                sinks1: args.sinks1,
                sinks2: args.sinks2,
                seed: args.seed,
            };
            gen_random_doc(&params)?.to_canonical_json()
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(instance: &Path, solution: &Path, seed: u64) -> Result<ExitCode> {
    let network = normalize_sinks(&load(instance)?);
    let doc =
        SolutionDoc::from_json(&read(solution)?).with_context(|| format!("cannot load {}", solution.display()))?;
    let sol = doc.to_solution(&network)?;
    match verify_solution_with(&network, &sol, simulation_for(&network, &sol.field, seed)) {
        Ok(()) => {
            println!(
                "ok: GF({}), {} encoding links",
                sol.field.order(),
                sol.encoding_links.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(v) => {
            println!(
                "violation at {} ({}): {:?}",
                v.link,
                network.describe_link(v.link),
                v.condition
            );
            Ok(ExitCode::from(EXIT_UNSOLVABLE))
        }
    }
}

fn bench(sizes: &[usize], seed: u64, runs: usize, json: Option<&Path>) -> Result<ExitCode> {
    let rows = scaling_bench(sizes, seed, runs)?;
    println!("{:>10} {:>10} {:>12} {:>7}", "links", "regions", "median_ms", "ratio");
    for (i, r) in rows.iter().enumerate() {
        let ratio = i
            .checked_sub(1)
            .map_or("-".into(), |j| format!("{:.2}", r.median_ms / rows[j].median_ms));
        println!("{:>10} {:>10} {:>12.3} {:>7}", r.links, r.regions, r.median_ms, ratio);
    }
    if let Some(p) = json {
        let mut s = serde_json::to_string_pretty(&rows)?;
        s.push('\n');
        write_file(p, &s)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Decompose {
            instance,
            dot,
            line_dot,
        } => decompose(&instance, dot.as_deref(), line_dot.as_deref()),
        Command::Minimize {
            instance,
            dot,
            json,
            seed,
        } => minimize_cmd(&instance, dot.as_deref(), json.as_deref(), seed),
        Command::Bounds { instance, json, seed } => bounds(&instance, json.as_deref(), seed),
        Command::Gen(args) => gen(args),
        Command::Verify {
            instance,
            solution,
            seed,
        } => verify(&instance, &solution, seed),
        Command::Bench {
            sizes,
            seed,
            runs,
            json,
        } => bench(&sizes, seed, runs, json.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
