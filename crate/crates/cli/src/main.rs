use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acgraph::copula::{assortativity_coefficient, rho_bounds};
use acgraph::erasure::erase;
use acgraph::io::export::{write_node_list, EdgeLabel};
use acgraph::io::stats::EdgeTypeKind;
use acgraph::io::{
    export_graph, import_graph, load_config_with, read_edge_list, read_node_list, write_stats, EdgeSource,
    GraphFormat, Overrides, RunConfig, RunInfo, StatsDocument,
};
use acgraph::metrics::{empirical_summary, EmpiricalSummary};
use acgraph::sweep::{run_sweep, write_sweep_csv, SweepConfig};
use acgraph::variant::{empirical_summary_variant, generate_variant_seeded};
use acgraph::{generate_seeded, Error, GenerateOptions, MultiDigraph, Result};
use clap::{Args, Parser, Subcommand};

/// Directed assortative configuration graphs.
#[derive(Debug, Parser)]
#[command(name = "acgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a graph with edge types (source out-degree, target in-degree).
    Generate(GenerateArgs),
    /// Generate a graph with edge types (source out-degree, target out-degree) from a `qv` matrix.
    VariantGenerate(GenerateArgs),
    /// Print the attainable assortativity range, the mixture weight for a target, and the edge-type matrix.
    Calibrate(CalibrateArgs),
    /// Empirical statistics of a generated graph, or of one read from CSV files.
    Stats(StatsArgs),
    /// Replicated runs over several sizes; writes one CSV row per run.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Resample up to N times in total before falling back to the single-edge graph.
    #[arg(long, value_name = "N")]
    retry: Option<usize>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: Common,
    /// Target assortativity; replaces the edge-type source in the configuration.
    #[arg(long)]
    rho: Option<f64>,
    /// Remove self-loops and parallel edges before export.
    #[arg(long)]
    erase: bool,
    /// Graph output (edge list for csv).
    #[arg(long)]
    out_edges: Option<PathBuf>,
    /// Node list output (CSV).
    #[arg(long)]
    out_nodes: Option<PathBuf>,
    /// Stats JSON output; printed to stdout when no output path is given.
    #[arg(long)]
    out_stats: Option<PathBuf>,
    /// csv, graphml or dot; overrides `[output] format`.
    #[arg(long, value_parser = parse_format)]
    format: Option<GraphFormat>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    erase: bool,
    /// Read the graph from this edge list instead of generating one.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Node list matching `--edges`; without it degrees come from the edges.
    #[arg(long, requires = "edges")]
    nodes: Option<PathBuf>,
    #[arg(long)]
    out_stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    rho: Option<f64>,
    /// Comma-separated graph sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out_stats: Option<PathBuf>,
}

fn parse_format(s: &str) -> std::result::Result<GraphFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load(common: &Common, rho: Option<f64>, erase: bool) -> Result<RunConfig> {
    let overrides = Overrides { seed: common.seed, retry: common.retry, erase, rho };
    load_config_with(&common.config, &overrides)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

/// Write to `path`, or to stdout when `None`.
fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(path) => {
            let mut out = create(path)?;
            f(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            f(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

struct Generated {
    graph: MultiDigraph,
    run: RunInfo,
    kind: EdgeTypeKind,
}

fn generate_from(cfg: &RunConfig, variant: bool) -> Result<Generated> {
    if variant {
        let qv = cfg.out_out_edge_types()?;
        let out = generate_variant_seeded(&cfg.p, qv, cfg.n, cfg.delta, cfg.on_reject, cfg.seed)?;
        Ok(Generated { run: RunInfo::from(&out.report), graph: out.graph, kind: EdgeTypeKind::OutOut })
    } else {
        let q = cfg.main_edge_types()?;
        let opts = GenerateOptions { n: cfg.n, delta: cfg.delta, on_reject: cfg.on_reject };
        let out = generate_seeded(&cfg.p, q, &opts, cfg.seed)?;
        Ok(Generated { run: RunInfo::from(&out.report), graph: out.graph, kind: EdgeTypeKind::OutIn })
    }
}

fn summarize(cfg: &RunConfig, g: &MultiDigraph) -> Result<(EmpiricalSummary, EdgeTypeKind)> {
    match &cfg.edges {
        EdgeSource::OutOut(qv) => Ok((empirical_summary_variant(g, &cfg.p, qv), EdgeTypeKind::OutOut)),
        _ => Ok((empirical_summary(g, &cfg.p, cfg.main_edge_types()?), EdgeTypeKind::OutIn)),
    }
}

fn run_generate(args: GenerateArgs, variant: bool) -> Result<()> {
    if variant && args.rho.is_some() {
        return Err(Error::Validation("--rho does not apply to variant-generate".into()));
    }
    let cfg = load(&args.common, args.rho, args.erase)?;
    let generated = generate_from(&cfg, variant)?;
    let (erased, erasure) = erase(&generated.graph);
    let graph = if cfg.erase { erased } else { generated.graph };
    let (summary, _) = summarize(&cfg, &graph)?;
    let doc = StatsDocument::new(&summary, generated.run, &erasure, cfg.erase, generated.kind);

    let format = args.format.unwrap_or(cfg.output.format);
    let label = if variant { EdgeLabel::OutOut } else { EdgeLabel::OutIn };
    let out_edges = args.out_edges.or(cfg.output.edges.clone());
    let out_nodes = args.out_nodes.or(cfg.output.nodes.clone());
    let out_stats = args.out_stats.or(cfg.output.stats.clone());
    if let Some(path) = &out_edges {
        emit(Some(path), |w| export_graph(&graph, format, label, w))?;
    }
    if let Some(path) = &out_nodes {
        emit(Some(path), |w| write_node_list(&graph, w))?;
    }
    if out_stats.is_some() || (out_edges.is_none() && out_nodes.is_none()) {
        emit(out_stats.as_deref(), |w| write_stats(&doc, w))?;
    }
    Ok(())
}

fn run_calibrate(args: CalibrateArgs) -> Result<()> {
    let overrides = Overrides { rho: args.rho, ..Default::default() };
    let cfg = load_config_with(&args.config, &overrides)?;
    let (rho_min, rho_max) = rho_bounds(&cfg.p)?;
    let EdgeSource::Rho { rho, lambda, q } = &cfg.edges else {
        return Err(Error::Validation("calibrate needs a target: pass --rho or set `rho` in the config".into()));
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "rho_min = {rho_min}")?;
    writeln!(out, "rho_max = {rho_max}")?;
    writeln!(out, "rho_target = {rho}")?;
    writeln!(out, "lambda = {lambda}")?;
    writeln!(out, "rho_achieved = {}", assortativity_coefficient(q)?)?;
    writeln!(out, "# q[k][j], rows k = 1..{}, columns j = 1..{}", q.max_out(), q.max_in())?;
    for row in q.rows() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(out, "{}", cells.join(" "))?;
    }
    Ok(())
}

fn run_stats(args: StatsArgs) -> Result<()> {
    let cfg = load(&args.common, args.rho, args.erase)?;
    let (graph, run, kind) = match &args.edges {
        Some(edges) => {
            let edges = read_edge_list(open(edges)?)?;
            let nodes = args.nodes.as_deref().map(|p| open(p).and_then(read_node_list)).transpose()?;
            let kind = if cfg.edges.out_out().is_some() { EdgeTypeKind::OutOut } else { EdgeTypeKind::OutIn };
            (import_graph(edges, nodes)?, RunInfo::default(), kind)
        }
        None => {
            let g = generate_from(&cfg, cfg.edges.out_out().is_some())?;
            (g.graph, g.run, g.kind)
        }
    };
    let (erased, erasure) = erase(&graph);
    let graph = if cfg.erase { erased } else { graph };
    let (summary, _) = summarize(&cfg, &graph)?;
    let doc = StatsDocument::new(&summary, run, &erasure, cfg.erase, kind);
    emit(args.out_stats.as_deref(), |w| write_stats(&doc, w))
}

fn run_sweep_cmd(args: SweepArgs) -> Result<()> {
    let cfg = load(&args.common, args.rho, false)?;
    if args.reps == 0 {
        return Err(Error::Validation("--reps must be at least 1".into()));
    }
    let q = cfg.main_edge_types()?;
    let sweep = SweepConfig {
        sizes: args.sizes,
        reps: args.reps,
        base_seed: cfg.seed,
        delta: cfg.delta,
        on_reject: cfg.on_reject,
        parallel: true,
    };
    let rows = run_sweep(&cfg.p, q, &sweep)?;
    emit(args.out_stats.as_deref(), |w| write_sweep_csv(&rows, w))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => run_generate(args, false),
        Command::VariantGenerate(args) => run_generate(args, true),
        Command::Calibrate(args) => run_calibrate(args),
        Command::Stats(args) => run_stats(args),
        Command::Sweep(args) => run_sweep_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("acgraph: {e}");
            ExitCode::FAILURE
        }
    }
}
