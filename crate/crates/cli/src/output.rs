//! Output-directory layout and the CSV/JSON writers.
//!
//! Every invocation creates `out/<timestamp>/` holding `config.json`, the
//! run-level `runs.csv`, the batch-level `summary.csv` and, for single runs,
//! `result.json`, an optional `ticks.csv` and `snapshots/*.ppm`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use csv::{Terminator, WriterBuilder};
use echoworld::seed::{GENERATOR, SEED_MIXER};
use echoworld::stats::SummaryStats;
use echoworld::{quartiles, Config, RunResult, TickReport};
use serde::Serialize;

/// Create `base/<timestamp>` (suffixed when two invocations share a second).
pub fn make_output_dir(base: &Path) -> io::Result<PathBuf> {
    fs::create_dir_all(base)?;
    let stamp = chrono::Utc::now().format("%Y%m%d-%H%M%S").to_string();
    let mut dir = base.join(&stamp);
    let mut suffix = 1;
    loop {
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                suffix += 1;
                dir = base.join(format!("{stamp}-{suffix}"));
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    command: &'a str,
    config: &'a Config,
    generator: &'a str,
    seed_mixer: &'a str,
    jobs: usize,
}

pub fn write_config_echo(dir: &Path, command: &str, cfg: &Config, jobs: usize) -> io::Result<()> {
    let echo = ConfigEcho {
        command,
        config: cfg,
        generator: GENERATOR,
        seed_mixer: SEED_MIXER,
        jobs,
    };
    let json = serde_json::to_string_pretty(&echo).expect("config serializes");
    fs::write(dir.join("config.json"), json)
}

#[derive(Serialize)]
struct ResultDocument<'a> {
    config: &'a Config,
    generator: &'a str,
    seed_mixer: &'a str,
    series_stride: u64,
    result: RunResult,
}

pub fn write_result_json(
    dir: &Path,
    cfg: &Config,
    result: &RunResult,
    stride: u64,
) -> io::Result<()> {
    let doc = ResultDocument {
        config: cfg,
        generator: GENERATOR,
        seed_mixer: SEED_MIXER,
        series_stride: stride.max(1),
        result: result.with_series_stride(stride),
    };
    let json = serde_json::to_string_pretty(&doc).expect("result serializes");
    fs::write(dir.join("result.json"), json)
}

fn csv_writer(path: &Path) -> csv::Result<csv::Writer<fs::File>> {
    WriterBuilder::new()
        .terminator(Terminator::CRLF)
        .from_path(path)
}

fn stop_label(result: &RunResult) -> &'static str {
    match result.stop {
        echoworld::StopReason::Cog0Extinct => "cog0_extinct",
        echoworld::StopReason::TotalExtinction => "total_extinction",
        echoworld::StopReason::MaxTicks => "max_ticks",
    }
}

fn optional(value: Option<u64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per run, prefixed with the sweep-cell parameters.
pub fn write_runs_csv(path: &Path, cells: &[(Config, Vec<RunResult>)]) -> csv::Result<()> {
    let mut writer = csv_writer(path)?;
    writer.write_record([
        "r",
        "max_gen",
        "plantoid_cap",
        "run",
        "seed",
        "ticks",
        "stop",
        "cog0_extinction_tick",
        "cog1_extinction_tick",
        "final_cog0",
        "final_cog1",
        "final_plantoid_energy",
        "final_agent_energy",
    ])?;
    for (cfg, runs) in cells {
        for (index, run) in runs.iter().enumerate() {
            writer.write_record([
                cfg.r.to_string(),
                cfg.max_gen.to_string(),
                cfg.max_plantoid_capacity.to_string(),
                index.to_string(),
                run.seed.to_string(),
                run.ticks.to_string(),
                stop_label(run).to_string(),
                optional(run.cog0_extinction_tick),
                optional(run.cog1_extinction_tick),
                run.final_cog0.to_string(),
                run.final_cog1.to_string(),
                format!("{:.6}", run.final_plantoid_energy),
                format!("{:.6}", run.final_agent_energy),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub struct SummaryRow<'a> {
    pub cfg: &'a Config,
    pub metric: &'a str,
    pub stats: SummaryStats,
    pub quartiles: (f64, f64, f64),
    pub censored: usize,
}

/// One row per (sweep cell, metric): mean, 95% interval, median, skewness,
/// minimum, maximum, then sample size and the boxplot extras.
pub fn write_summary_csv(path: &Path, rows: &[SummaryRow<'_>]) -> csv::Result<()> {
    let mut writer = csv_writer(path)?;
    writer.write_record([
        "r",
        "max_gen",
        "plantoid_cap",
        "metric",
        "mean",
        "ci95_low",
        "ci95_high",
        "median",
        "skewness",
        "minimum",
        "maximum",
        "n",
        "censored",
        "skewness_adjusted",
        "q1",
        "q3",
    ])?;
    for row in rows {
        let s = row.stats;
        writer.write_record([
            row.cfg.r.to_string(),
            row.cfg.max_gen.to_string(),
            row.cfg.max_plantoid_capacity.to_string(),
            row.metric.to_string(),
            format!("{:.6}", s.mean),
            format!("{:.6}", s.ci95_low),
            format!("{:.6}", s.ci95_high),
            format!("{:.6}", s.median),
            format!("{:.6}", s.skewness),
            format!("{:.6}", s.min),
            format!("{:.6}", s.max),
            s.n.to_string(),
            row.censored.to_string(),
            format!("{:.6}", s.skewness_adjusted),
            format!("{:.6}", row.quartiles.0),
            format!("{:.6}", row.quartiles.2),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Summary rows for one cell's batch: cog-0 extinction ticks (when any
/// sample exists) and the final cog-1 population.
pub fn summarize_cell<'a>(cfg: &'a Config, runs: &[RunResult]) -> Vec<SummaryRow<'a>> {
    let mut rows = Vec::new();

    let extinction: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.cog0_extinction_tick)
        .map(|t| t as f64)
        .collect();
    let censored = runs
        .iter()
        .filter(|r| r.cog0_extinction_tick.is_none() && r.final_cog0 > 0)
        .count();
    if !extinction.is_empty() {
        rows.push(SummaryRow {
            cfg,
            metric: "cog0_extinction_tick",
            stats: echoworld::describe(&extinction).expect("non-empty"),
            quartiles: quartiles(&extinction).expect("non-empty"),
            censored,
        });
    }

    let finals: Vec<f64> = runs.iter().map(|r| r.final_cog1 as f64).collect();
    if !finals.is_empty() {
        rows.push(SummaryRow {
            cfg,
            metric: "final_cog1_count",
            stats: echoworld::describe(&finals).expect("non-empty"),
            quartiles: quartiles(&finals).expect("non-empty"),
            censored: 0,
        });
    }
    rows
}

pub struct TickCsv {
    writer: csv::Writer<fs::File>,
}

impl TickCsv {
    pub fn create(path: &Path) -> csv::Result<Self> {
        let mut writer = csv_writer(path)?;
        writer.write_record([
            "tick",
            "cog0",
            "cog1",
            "plantoid_energy",
            "agent_energy",
            "births",
            "deaths",
            "conflicts",
            "avoided_conflicts",
            "replenish_added",
            "feed_withdrawn",
            "replica_adjust",
        ])?;
        Ok(Self { writer })
    }

    pub fn append(&mut self, report: &TickReport) -> csv::Result<()> {
        self.writer.write_record([
            report.tick.to_string(),
            report.cog0.to_string(),
            report.cog1.to_string(),
            format!("{:.6}", report.plantoid_energy),
            format!("{:.6}", report.agent_energy),
            report.births.to_string(),
            report.deaths.to_string(),
            report.conflicts.to_string(),
            report.avoided_conflicts.to_string(),
            format!("{:.6}", report.replenish_added),
            format!("{:.6}", report.feed_withdrawn),
            format!("{:.6}", report.replica_adjust),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> csv::Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}
