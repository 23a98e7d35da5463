use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use igsim::dynamics::{run_election, sample_strategies, BehaviorDistribution, ElectionConfig, ElectionOutcome, StickTarget};
use igsim::experiments::config::{read_toml, SurfaceFile, SweepFile};
use igsim::experiments::pcc::pcc_to_csv;
use igsim::experiments::surface::surface_to_csv;
use igsim::experiments::{
    pcc_curves, read_records, regress_records, run_batch, surface_mean_abs_gap, write_records, Execution,
    PccMetric, RegressionModel,
};
use igsim::io::{read_assignment, read_graph, write_assignment, write_graph};
use igsim::metrics::{AssortmentConvention, GapConvention, MetricReport};
use igsim::{generate_hrc, HrcParams, PartyAssignment, Seed};

#[derive(Parser)]
#[command(name = "igsim", version, about = "Influence-gap election simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a party assignment and a homophilic relaxed-caveman graph.
    Generate(GenerateArgs),
    /// Metric report for one graph and assignment.
    Metrics(MetricsArgs),
    /// Run one election.
    Simulate(SimulateArgs),
    /// Batch of elections over a (p0, h) grid, written as records CSV.
    Sweep(SweepArgs),
    /// Mean absolute influence gap over the (p0, h) plane.
    Surface(SurfaceArgs),
    /// Regress final skew on initial majority and influence gap.
    Regress(RegressArgs),
    /// Per-cell correlation of predictors with the final skew.
    Pcc(PccArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 4)]
    cliques: usize,
    #[arg(long, default_value_t = 5)]
    clique_size: usize,
    /// Rewire probability.
    #[arg(long, default_value_t = 0.0)]
    p0: f64,
    /// Homophily factor.
    #[arg(long, default_value_t = 0.5)]
    h: f64,
    /// Party sizes as NAME=COUNT; defaults to an equal red/blue split.
    #[arg(long = "party", value_parser = parse_party)]
    parties: Vec<(String, usize)>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    graph_out: PathBuf,
    #[arg(long)]
    assignment_out: PathBuf,
}

fn parse_party(s: &str) -> Result<(String, usize), String> {
    let (name, count) = s.split_once('=').ok_or("expected NAME=COUNT")?;
    let count = count.parse().map_err(|_| format!("bad count in `{s}`"))?;
    Ok((name.to_string(), count))
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long, default_value = "dominant-negative")]
    assortment: AssortmentConvention,
    #[arg(long, default_value = "vs-most-influential")]
    gap: GapConvention,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ElectionArgs {
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long)]
    tick: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// assigned or current.
    #[arg(long)]
    stick: Option<StickTarget>,
    #[arg(long)]
    concentration: Option<f64>,
    /// TOML file with strategy means or empirical samples.
    #[arg(long)]
    strategies: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    election: ElectionArgs,
    /// Write the per-tick vote shares here.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    seed: u64,
    /// Flat TOML file; command-line flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially. Output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Records CSV; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    keys: SweepFile,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    keys: SurfaceFile,
}

#[derive(Args)]
struct RegressArgs {
    /// Records CSV files, pooled.
    #[arg(long = "records", required = true)]
    records: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PccArgs {
    #[arg(long = "records", required = true)]
    records: Vec<PathBuf>,
    /// Comma separated: majority, party-votes, influence-gap, dvs, efficiency-gap.
    #[arg(long, value_delimiter = ',', default_value = "majority,influence-gap,dvs,efficiency-gap")]
    metrics: Vec<PccMetric>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn execution(workers: Option<usize>) -> Execution {
    workers.map_or_else(Execution::default, Execution::with_workers)
}

fn load_pair(graph: &Path, assignment: &Path) -> Result<(igsim::Graph, PartyAssignment)> {
    let g = read_graph(&fs::read_to_string(graph).with_context(|| format!("reading {}", graph.display()))?)?;
    let text = fs::read_to_string(assignment).with_context(|| format!("reading {}", assignment.display()))?;
    let a = read_assignment(&text, g.node_count())?;
    Ok((g, a))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let params = HrcParams::new(args.cliques, args.clique_size, args.p0, args.h);
    let n = params.node_count();
    let parties = if args.parties.is_empty() {
        if n % 2 == 1 {
            bail!("equal red/blue split needs an even node count, got {n}; pass --party");
        }
        vec![("red".to_string(), n / 2), ("blue".to_string(), n / 2)]
    } else {
        args.parties
    };
    let seed = Seed(args.seed);
    let assignment = PartyAssignment::strong(&parties, n, seed.child(1, 0))?;
    let graph = generate_hrc(&params, &assignment, seed.child(2, 0))?;
    fs::write(&args.graph_out, write_graph(&graph))?;
    fs::write(&args.assignment_out, write_assignment(&assignment))?;
    Ok(())
}

fn metrics(args: MetricsArgs) -> Result<()> {
    let (g, a) = load_pair(&args.graph, &args.assignment)?;
    let report = MetricReport::compute(&g, &a, args.assortment, args.gap)?;
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => {
            let mut out = String::from("party,assortment,influence_gap,majority,dvs,eg\n");
            for (i, party) in report.parties.iter().enumerate() {
                let gaps: Vec<String> = report.influence_gap[i].iter().map(f64::to_string).collect();
                let eg = report.efficiency_gap.as_ref().map(|e| e[i].to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{party},{},{},{},{},{eg}\n",
                    report.assortment[i],
                    gaps.join(";"),
                    report.majority[i],
                    report.dvs[i]
                ));
            }
            out
        }
    };
    emit(None, &text)
}

fn election_setup(args: &ElectionArgs) -> Result<(ElectionConfig, BehaviorDistribution)> {
    let mut cfg = ElectionConfig::default();
    cfg.duration = args.duration.unwrap_or(cfg.duration);
    cfg.cutoff = args.cutoff.unwrap_or(cfg.cutoff);
    cfg.tick = args.tick.unwrap_or(cfg.tick);
    cfg.threshold = args.threshold.unwrap_or(cfg.threshold);
    cfg.stick = args.stick.unwrap_or(cfg.stick);
    let mut dist = match &args.strategies {
        Some(p) => BehaviorDistribution::from_toml(&fs::read_to_string(p)?)?,
        None => BehaviorDistribution::default(),
    };
    if let Some(nu) = args.concentration {
        dist.concentration = nu;
    }
    Ok((cfg, dist))
}

fn trajectory_csv(outcome: &ElectionOutcome) -> String {
    let mut out = String::from("tick,t_seconds");
    for p in &outcome.parties {
        out.push_str(&format!(",share_{p}"));
    }
    out.push('\n');
    for row in &outcome.trajectory {
        out.push_str(&format!("{},{}", row.tick, row.t_seconds));
        for s in &row.shares {
            out.push_str(&format!(",{s}"));
        }
        out.push('\n');
    }
    out
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let (g, a) = load_pair(&args.graph, &args.assignment)?;
    let (cfg, dist) = election_setup(&args.election)?;
    let seed = Seed(args.seed);
    let strategies = sample_strategies(&dist, g.node_count(), seed.child(3, 0))?;
    let outcome = run_election(&g, &a, &cfg, &strategies, seed.child(4, 0))?;
    if let Some(path) = &args.trajectory {
        fs::write(path, trajectory_csv(&outcome))?;
    }
    let summary = serde_json::json!({
        "parties": outcome.parties,
        "shares": outcome.shares,
        "skew": (0..outcome.parties.len()).map(|p| outcome.skew(igsim::PartyId(p))).collect::<Vec<_>>(),
        "winner": outcome.winner_name(),
        "ticks": outcome.trajectory.len() - 1,
    });
    emit(None, &(serde_json::to_string_pretty(&summary)? + "\n"))
}

fn sweep(args: SweepArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => read_toml::<SweepFile>(p)?,
        None => SweepFile::default(),
    };
    let cfg = file.overlay(args.keys).into_config(Seed(args.seed))?;
    let options = cfg.counts.options(cfg.node_count())?;
    eprintln!(
        "sweep: {} cells x {} elections, {} party-count options, l={} k={}",
        cfg.p0_grid.len() * cfg.h_grid.len(),
        cfg.elections_per_cell,
        options.len(),
        cfg.cliques,
        cfg.clique_size
    );
    let records = run_batch(&cfg, execution(args.workers))?;
    match &args.output {
        Some(p) => write_records(fs::File::create(p)?, &records)?,
        None => write_records(std::io::stdout().lock(), &records)?,
    }
    Ok(())
}

fn surface(args: SurfaceArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => read_toml::<SurfaceFile>(p)?,
        None => SurfaceFile::default(),
    };
    let cfg = file.overlay(args.keys).into_config(Seed(args.seed))?;
    let points = surface_mean_abs_gap(&cfg, execution(args.workers))?;
    emit(args.output.as_deref(), &surface_to_csv(&points))
}

fn load_records(paths: &[PathBuf]) -> Result<Vec<igsim::experiments::ElectionRecord>> {
    let mut all = Vec::new();
    for p in paths {
        let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
        all.extend(read_records(f).with_context(|| format!("reading {}", p.display()))?);
    }
    Ok(all)
}

fn regress(args: RegressArgs) -> Result<()> {
    let records = load_records(&args.records)?;
    let fits = regress_records(&records, &RegressionModel::ALL, args.train_fraction, Seed(args.seed))?;
    emit(args.output.as_deref(), &(serde_json::to_string_pretty(&fits)? + "\n"))
}

fn pcc(args: PccArgs) -> Result<()> {
    let records = load_records(&args.records)?;
    let parties = records.first().map_or(0, |r| r.party_count());
    let entries = pcc_curves(&records, &args.metrics, &(0..parties).collect::<Vec<_>>())?;
    emit(args.output.as_deref(), &pcc_to_csv(&entries))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Cmd::Generate(a) => generate(a),
        Cmd::Metrics(a) => metrics(a),
        Cmd::Simulate(a) => simulate(a),
        Cmd::Sweep(a) => sweep(a),
        Cmd::Surface(a) => surface(a),
        Cmd::Regress(a) => regress(a),
        Cmd::Pcc(a) => pcc(a),
    }
}
