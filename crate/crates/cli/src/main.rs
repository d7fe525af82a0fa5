//! `echoworld` — headless runner for the plantoid/m-agent world.
//!
//! Three subcommands: `run` (one simulation, optional per-tick CSV and PPM
//! snapshots), `batch` (replicated runs with derived seeds, raw and summary
//! CSVs) and `sweep` (cartesian sweep over lattice radius, chromosome length
//! and plantoid capacity). Exit codes: 0 success, 2 configuration error,
//! 3 I/O error.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use echoworld::seed::batch_seeds;
use echoworld::snapshot::write_ppm;
use echoworld::{run_batch, run_simulation_observed, Config, RunResult};

use output::{
    make_output_dir, summarize_cell, write_config_echo, write_result_json, write_runs_csv,
    write_summary_csv, TickCsv,
};

#[derive(Parser)]
#[command(name = "echoworld", version, about = "Plantoid / m-agent world simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single simulation, optionally streaming per-tick CSV and PPM snapshots.
    Run(RunArgs),
    /// Run `--replicates` simulations with seeds derived from the base seed.
    Batch(BatchArgs),
    /// Cartesian sweep over lattice radius, max chromosome length and plantoid capacity.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of letters in the formal alphabet.
    #[arg(long)]
    alphabet: Option<u16>,
    /// Base m-agent reservoir capacity.
    #[arg(long = "agent-base")]
    agent_base: Option<f64>,
    /// One-point mutation probability at replication.
    #[arg(long = "mutation-p")]
    mutation_p: Option<f64>,
    /// Plantoid replenishment per tick.
    #[arg(long)]
    replenish: Option<f64>,
    /// Probability that an eligible agent replicates.
    #[arg(long = "replication-p")]
    replication_p: Option<f64>,
    /// Initial number of m-agents (even unless a single-type flag is set).
    #[arg(long)]
    agents: Option<u32>,
    /// Populate only cog-1 agents.
    #[arg(long = "cog1-only")]
    cog1_only: bool,
    /// Populate only cog-0 agents.
    #[arg(long = "cog0-only")]
    cog0_only: bool,
    /// Hard tick bound per run.
    #[arg(long = "max-ticks")]
    max_ticks: Option<u64>,
    /// Base seed; batches derive per-run seeds from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Runs per batch (or per sweep cell).
    #[arg(long)]
    replicates: Option<u32>,
    /// Worker threads for batches; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Base output directory; each invocation creates a timestamped subdirectory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lattice radius r; the torus is (2r+1) x (2r+1).
    #[arg(long)]
    r: Option<u32>,
    /// Maximum chromosome (tag) length.
    #[arg(long = "max-gen")]
    max_gen: Option<u32>,
    /// Upper bound of the per-patch plantoid reservoir capacity.
    #[arg(long = "plantoid-cap")]
    plantoid_cap: Option<f64>,
    /// Write a PPM snapshot every k ticks (0 = off).
    #[arg(long = "snapshot-every", default_value_t = 0)]
    snapshot_every: u64,
    /// Also write the full per-tick series as ticks.csv.
    #[arg(long = "ticks-csv")]
    ticks_csv: bool,
    /// Keep every n-th tick in result.json's series.
    #[arg(long = "series-stride", default_value_t = 1)]
    series_stride: u64,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lattice radius r; the torus is (2r+1) x (2r+1).
    #[arg(long)]
    r: Option<u32>,
    /// Maximum chromosome (tag) length.
    #[arg(long = "max-gen")]
    max_gen: Option<u32>,
    /// Upper bound of the per-patch plantoid reservoir capacity.
    #[arg(long = "plantoid-cap")]
    plantoid_cap: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lattice radii to sweep (comma-separated).
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u32>>,
    /// Maximum chromosome lengths to sweep (comma-separated).
    #[arg(long = "max-gen", value_delimiter = ',')]
    max_gen: Option<Vec<u32>>,
    /// Plantoid capacity bounds to sweep (comma-separated).
    #[arg(long = "plantoid-cap", value_delimiter = ',')]
    plantoid_cap: Option<Vec<f64>>,
}

enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn io(context: &str, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<echoworld::ConfigError> for CliError {
    fn from(err: echoworld::ConfigError) -> Self {
        CliError::Config(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Batch(args) => cmd_batch(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
        Err(CliError::Io(message)) => {
            eprintln!("io error: {message}");
            ExitCode::from(3)
        }
    }
}

/// Defaults, overridden by the config file, overridden by flags.
fn build_config(common: &CommonArgs) -> Result<Config, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config error: {}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    if let Some(v) = common.alphabet {
        cfg.alphabet_size = v;
    }
    if let Some(v) = common.agent_base {
        cfg.agent_base_reservoir = v;
    }
    if let Some(v) = common.mutation_p {
        cfg.mutation_p = v;
    }
    if let Some(v) = common.replenish {
        cfg.replenish_rate = v;
    }
    if let Some(v) = common.replication_p {
        cfg.replication_p = v;
    }
    if let Some(v) = common.agents {
        cfg.initial_agents = v;
    }
    if common.cog1_only {
        cfg.cog1_only = true;
    }
    if common.cog0_only {
        cfg.cog0_only = true;
    }
    if let Some(v) = common.max_ticks {
        cfg.max_ticks = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.replicates {
        cfg.replicates = v;
    }
    Ok(cfg)
}

fn validated(cfg: Config) -> Result<Config, CliError> {
    cfg.validate()?;
    Ok(cfg)
}

fn setup_workers(jobs: Option<usize>) -> usize {
    if let Some(n) = jobs {
        if n > 0 {
            // Ignore the error when a pool already exists (tests).
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            return n;
        }
    }
    rayon::current_num_threads()
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut cfg = build_config(&args.common)?;
    if let Some(v) = args.r {
        cfg.r = v;
    }
    if let Some(v) = args.max_gen {
        cfg.max_gen = v;
    }
    if let Some(v) = args.plantoid_cap {
        cfg.max_plantoid_capacity = v;
    }
    let cfg = validated(cfg)?;
    let jobs = setup_workers(args.common.jobs);

    let dir = make_output_dir(&args.common.out)
        .map_err(|e| CliError::io("creating output directory", e))?;
    write_config_echo(&dir, "run", &cfg, jobs)
        .map_err(|e| CliError::io("writing config.json", e))?;

    let snapshots_dir = dir.join("snapshots");
    if args.snapshot_every > 0 {
        fs::create_dir_all(&snapshots_dir)
            .map_err(|e| CliError::io("creating snapshots directory", e))?;
    }
    let mut ticks_csv = if args.ticks_csv {
        Some(
            TickCsv::create(&dir.join("ticks.csv"))
                .map_err(|e| CliError::io("writing ticks.csv", e))?,
        )
    } else {
        None
    };

    let mut io_failure: Option<CliError> = None;
    let result = run_simulation_observed(&cfg, cfg.seed, |world, report| {
        if io_failure.is_some() {
            return;
        }
        if args.snapshot_every > 0 && report.tick % args.snapshot_every == 0 {
            let path = snapshots_dir.join(format!("tick_{:06}.ppm", report.tick));
            if let Err(e) = write_ppm(world, &path) {
                io_failure = Some(CliError::io("writing snapshot", e));
            }
        }
        if let Some(csv) = ticks_csv.as_mut() {
            if let Err(e) = csv.append(report) {
                io_failure = Some(CliError::io("writing ticks.csv", e));
            }
        }
    })?;
    if let Some(err) = io_failure {
        return Err(err);
    }
    if let Some(csv) = ticks_csv {
        csv.finish().map_err(|e| CliError::io("writing ticks.csv", e))?;
    }

    write_result_json(&dir, &cfg, &result, args.series_stride)
        .map_err(|e| CliError::io("writing result.json", e))?;
    print_run(&result);
    println!("output: {}", dir.display());
    Ok(())
}

fn print_run(result: &RunResult) {
    println!(
        "seed {} stopped after {} ticks ({:?}); cog-0 {} cog-1 {}; extinction ticks {:?}/{:?}",
        result.seed,
        result.ticks,
        result.stop,
        result.final_cog0,
        result.final_cog1,
        result.cog0_extinction_tick,
        result.cog1_extinction_tick,
    );
}

fn write_cell_outputs(dir: &Path, cells: &[(Config, Vec<RunResult>)]) -> Result<(), CliError> {
    write_runs_csv(&dir.join("runs.csv"), cells)
        .map_err(|e| CliError::io("writing runs.csv", e))?;
    let mut rows = Vec::new();
    for (cfg, runs) in cells {
        rows.extend(summarize_cell(cfg, runs));
    }
    write_summary_csv(&dir.join("summary.csv"), &rows)
        .map_err(|e| CliError::io("writing summary.csv", e))?;
    for row in &rows {
        println!(
            "r={} max_gen={} cap={} {}: n={} mean={:.2} ci=[{:.2},{:.2}] median={} skew={:.2} \
             min={} max={} censored={}",
            row.cfg.r,
            row.cfg.max_gen,
            row.cfg.max_plantoid_capacity,
            row.metric,
            row.stats.n,
            row.stats.mean,
            row.stats.ci95_low,
            row.stats.ci95_high,
            row.stats.median,
            row.stats.skewness,
            row.stats.min,
            row.stats.max,
            row.censored,
        );
    }
    Ok(())
}

fn cmd_batch(args: BatchArgs) -> Result<(), CliError> {
    let mut cfg = build_config(&args.common)?;
    if let Some(v) = args.r {
        cfg.r = v;
    }
    if let Some(v) = args.max_gen {
        cfg.max_gen = v;
    }
    if let Some(v) = args.plantoid_cap {
        cfg.max_plantoid_capacity = v;
    }
    let cfg = validated(cfg)?;
    let jobs = setup_workers(args.common.jobs);

    let dir = make_output_dir(&args.common.out)
        .map_err(|e| CliError::io("creating output directory", e))?;
    write_config_echo(&dir, "batch", &cfg, jobs)
        .map_err(|e| CliError::io("writing config.json", e))?;

    let seeds = batch_seeds(cfg.seed, cfg.replicates);
    let runs = run_batch(&cfg, &seeds)?;
    write_cell_outputs(&dir, &[(cfg, runs)])?;
    println!("output: {}", dir.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let base = validated(build_config(&args.common)?)?;
    let jobs = setup_workers(args.common.jobs);

    let radii = args.r.unwrap_or_else(|| vec![base.r]);
    let lengths = args.max_gen.unwrap_or_else(|| vec![base.max_gen]);
    let caps = args
        .plantoid_cap
        .unwrap_or_else(|| vec![base.max_plantoid_capacity]);

    let mut cells: Vec<(Config, Vec<RunResult>)> = Vec::new();
    for &r in &radii {
        for &max_gen in &lengths {
            for &cap in &caps {
                let cfg = validated(Config {
                    r,
                    max_gen,
                    max_plantoid_capacity: cap,
                    ..base.clone()
                })?;
                let seeds = batch_seeds(cfg.seed, cfg.replicates);
                let runs = run_batch(&cfg, &seeds)?;
                cells.push((cfg, runs));
            }
        }
    }

    let dir = make_output_dir(&args.common.out)
        .map_err(|e| CliError::io("creating output directory", e))?;
    write_config_echo(&dir, "sweep", &base, jobs)
        .map_err(|e| CliError::io("writing config.json", e))?;
    write_cell_outputs(&dir, &cells)?;
    println!("output: {}", dir.display());
    Ok(())
}
