//! End-to-end orchestration: run the configured experiments, persist the
//! robots table and derive summaries, Pareto flags and plots from it.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::RunConfig;
use crate::moea::{run_experiment, MoeaError, RobotProblem};
use crate::plot::{emit_svg_plot, PlotError, PlotPoint, PlotSeries};
use crate::report::{
    read_robots_csv, write_pareto_csv, write_robots_csv, write_summary_csv, ReportError, RobotRow,
    SummaryRow,
};
use crate::stats::{aggregate_generation, extract_pareto, StatsError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Moea(#[from] MoeaError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("no battery-mode rows in the robots table")]
    NoBatteryRows,
    #[error("unknown metric `{0}`; expected speed, battery or balance")]
    UnknownMetric(String),
}

/// The metrics aggregated per generation, with their CSV/plot names.
pub const METRICS: [&str; 3] = ["speed", "battery", "balance"];

pub fn metric_value(metric: &str, row: &RobotRow) -> Result<f64, PipelineError> {
    match metric {
        "speed" => Ok(row.speed_cms),
        "battery" => Ok(row.battery_remaining),
        "balance" => Ok(row.balance),
        other => Err(PipelineError::UnknownMetric(other.to_string())),
    }
}

pub fn metric_label(metric: &str) -> &'static str {
    match metric {
        "speed" => "speed (cm/s)",
        "battery" => "battery remaining",
        _ => "balance",
    }
}

/// Runs every experiment of the config and returns the concatenated log.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Vec<RobotRow>, PipelineError> {
    let mut rows = Vec::new();
    for mode in cfg.mode.experiment_modes() {
        let problem = RobotProblem {
            rewrite: cfg.rewrite,
            limits: cfg.limits,
            sim: cfg.sim,
            mode,
        };
        rows.extend(run_experiment(
            &problem,
            &cfg.evolution_for(mode),
            cfg.repetitions,
        )?);
    }
    Ok(rows)
}

/// Runs the pipeline and writes `robots.csv` into the output directory.
pub fn run_and_write(cfg: &RunConfig) -> Result<PathBuf, PipelineError> {
    let rows = run_pipeline(cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("robots.csv");
    write_robots_csv(&rows, BufWriter::new(File::create(&path)?))?;
    Ok(path)
}

pub fn load_robots(dir: &Path) -> Result<Vec<RobotRow>, PipelineError> {
    Ok(read_robots_csv(File::open(dir.join("robots.csv"))?)?)
}

fn experiments_in(rows: &[RobotRow]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in rows {
        if !out.iter().any(|e| e == &r.experiment) {
            out.push(r.experiment.clone());
        }
    }
    out
}

/// Aggregates every metric per (experiment, generation), pooling all runs.
pub fn summarize(rows: &[RobotRow]) -> Result<Vec<SummaryRow>, PipelineError> {
    let mut out = Vec::new();
    for experiment in experiments_in(rows) {
        let mut generations: Vec<u32> = rows
            .iter()
            .filter(|r| r.experiment == experiment)
            .map(|r| r.generation)
            .collect();
        generations.sort_unstable();
        generations.dedup();
        for gen in generations {
            for metric in METRICS {
                let values: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.experiment == experiment && r.generation == gen)
                    .map(|r| metric_value(metric, r))
                    .collect::<Result<_, _>>()?;
                let (median, q1, q3) = aggregate_generation(&values)?;
                out.push(SummaryRow {
                    experiment: experiment.clone(),
                    generation: gen,
                    metric: metric.to_string(),
                    median,
                    q1,
                    q3,
                });
            }
        }
    }
    Ok(out)
}

/// Writes `summary.csv` into `dir` and returns the rows.
pub fn summarize_to_dir(dir: &Path) -> Result<Vec<SummaryRow>, PipelineError> {
    let rows = load_robots(dir)?;
    let summary = summarize(&rows)?;
    write_summary_csv(
        &summary,
        BufWriter::new(File::create(dir.join("summary.csv"))?),
    )?;
    Ok(summary)
}

/// Final-generation rows of every experiment, pooled across runs. The group
/// tables and Pareto extraction operate on these.
pub fn final_generation_rows(rows: &[RobotRow]) -> Vec<RobotRow> {
    let mut out = Vec::new();
    for experiment in experiments_in(rows) {
        let last = rows
            .iter()
            .filter(|r| r.experiment == experiment)
            .map(|r| r.generation)
            .max()
            .unwrap_or(0);
        out.extend(
            rows.iter()
                .filter(|r| r.experiment == experiment && r.generation == last)
                .cloned(),
        );
    }
    out
}

/// Battery-mode rows of the final generation, pooled across runs.
pub fn final_battery_rows(rows: &[RobotRow]) -> Result<Vec<RobotRow>, PipelineError> {
    let last_gen = rows
        .iter()
        .filter(|r| r.experiment == "battery")
        .map(|r| r.generation)
        .max()
        .ok_or(PipelineError::NoBatteryRows)?;
    Ok(rows
        .iter()
        .filter(|r| r.experiment == "battery" && r.generation == last_gen)
        .cloned()
        .collect())
}

/// Flags the pooled final battery generation and writes `pareto.csv`.
pub fn pareto_to_dir(dir: &Path) -> Result<usize, PipelineError> {
    let rows = load_robots(dir)?;
    let pool = final_battery_rows(&rows)?;
    let flags = extract_pareto(&pool)?;
    write_pareto_csv(
        &pool,
        &flags,
        BufWriter::new(File::create(dir.join("pareto.csv"))?),
    )?;
    Ok(flags.iter().filter(|&&f| f).count())
}

/// Builds one plot series per experiment for `metric`.
pub fn series_for_metric(
    summary: &[SummaryRow],
    metric: &str,
) -> Result<Vec<PlotSeries>, PipelineError> {
    if !METRICS.contains(&metric) {
        return Err(PipelineError::UnknownMetric(metric.to_string()));
    }
    let mut series: Vec<PlotSeries> = Vec::new();
    for row in summary.iter().filter(|r| r.metric == metric) {
        let point = PlotPoint {
            generation: row.generation,
            median: row.median,
            q1: row.q1,
            q3: row.q3,
        };
        match series.iter_mut().find(|s| s.name == row.experiment) {
            Some(s) => s.points.push(point),
            None => series.push(PlotSeries {
                name: row.experiment.clone(),
                points: vec![point],
            }),
        }
    }
    Ok(series)
}

/// Aggregates the robots table in `dir` and writes `<metric>.svg`.
pub fn plot_to_dir(dir: &Path, metric: &str) -> Result<PathBuf, PipelineError> {
    let rows = load_robots(dir)?;
    let summary = summarize(&rows)?;
    let series = series_for_metric(&summary, metric)?;
    let path = dir.join(format!("{metric}.svg"));
    emit_svg_plot(&series, metric_label(metric), &path)?;
    Ok(path)
}
