//! Command-line interface for running experiments and analysing their logs.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use morphevo::calibrate::calibrate_cstart;
use morphevo::config::load_config;
use morphevo::pipeline::{self, metric_label};
use morphevo::stats::{size_speed_table, welch_t, GroupSummary, SummaryStats};

#[derive(Parser)]
#[command(
    name = "morphevo",
    version,
    about = "Evolve modular robots with and without a battery budget"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiments and write robots.csv
    Run {
        /// Path to a `key = value` config file
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. --set seed=7 (repeatable)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Estimate the initial battery charge from maximum-size robots
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        /// Number of maximum-size robots to measure
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Write summary.csv and print the size/speed group tables
    Stats {
        /// Directory containing robots.csv
        #[arg(long = "in")]
        dir: PathBuf,
        /// Speed cut (cm/s) for the joints-of-fast-robots table
        #[arg(long, default_value_t = 7.0)]
        speed_threshold: f64,
        /// Minimum joint count for the speed-of-large-robots table
        #[arg(long, default_value_t = 9)]
        joints_threshold: usize,
    },
    /// Flag the pooled final-generation battery Pareto set into pareto.csv
    Pareto {
        #[arg(long = "in")]
        dir: PathBuf,
    },
    /// Welch's t-test from two groups' summary statistics
    Ttest {
        #[arg(long)]
        mean_a: f64,
        #[arg(long)]
        sd_a: f64,
        #[arg(long)]
        n_a: usize,
        #[arg(long)]
        mean_b: f64,
        #[arg(long)]
        sd_b: f64,
        #[arg(long)]
        n_b: usize,
    },
    /// Render the median/quartile chart for one metric
    Plot {
        #[arg(long = "in")]
        dir: PathBuf,
        #[arg(long, value_parser = ["speed", "battery", "balance"])]
        metric: String,
    },
}

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

fn usage_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn runtime_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_RUNTIME)
}

fn parse_overrides(set: &[String]) -> Result<Vec<(String, String)>, String> {
    set.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.to_string()))
                .ok_or_else(|| format!("--set expects KEY=VALUE, got `{kv}`"))
        })
        .collect()
}

fn print_group_table(title: &str, groups: &[GroupSummary]) {
    println!("{title}");
    println!(
        "{:<12} {:>8} {:>10} {:>10}",
        "experiment", "n", "mean", "sd"
    );
    for g in groups {
        match g.stats {
            Some(s) => println!(
                "{:<12} {:>8} {:>10.3} {:>10.3}",
                g.experiment, s.n, s.mean, s.sd
            ),
            None => println!("{:<12} {:>8} {:>10} {:>10}", g.experiment, 0, "-", "-"),
        }
    }
}

fn welch_between(label: &str, groups: &[GroupSummary]) {
    let usable: Vec<(&str, SummaryStats)> = groups
        .iter()
        .filter_map(|g| {
            g.stats
                .filter(|s| s.n >= 2)
                .map(|s| (g.experiment.as_str(), s))
        })
        .collect();
    if usable.len() < 2 {
        println!("  (welch skipped: need two groups with n >= 2)");
        return;
    }
    match welch_t(&usable[0].1, &usable[1].1) {
        Ok(r) => println!(
            "  welch {} vs {} ({label}): t = {:.4}, df = {:.2}, p = {:.3e}",
            usable[0].0, usable[1].0, r.t, r.df, r.p_two_sided
        ),
        Err(e) => println!("  ({e})"),
    }
}

fn run(command: Command) -> ExitCode {
    match command {
        Command::Run { config, set } => {
            let overrides = match parse_overrides(&set) {
                Ok(o) => o,
                Err(e) => return usage_err(e),
            };
            let cfg = match load_config(&config, &overrides) {
                Ok(c) => c,
                Err(e) => return usage_err(e),
            };
            match pipeline::run_and_write(&cfg) {
                Ok(path) => {
                    println!("wrote {}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => runtime_err(e),
            }
        }
        Command::Calibrate { config, samples } => {
            let cfg = match load_config(&config, &[]) {
                Ok(c) => c,
                Err(e) => return usage_err(e),
            };
            if samples == 0 {
                return usage_err("--samples must be at least 1");
            }
            match calibrate_cstart(
                &cfg.sim,
                &cfg.rewrite,
                &cfg.limits,
                samples,
                cfg.evolution.master_seed,
            ) {
                Ok(c) => {
                    println!("calibrated c_start = {c:.6}");
                    ExitCode::SUCCESS
                }
                Err(e) => runtime_err(e),
            }
        }
        Command::Stats {
            dir,
            speed_threshold,
            joints_threshold,
        } => {
            let rows = match pipeline::load_robots(&dir) {
                Ok(r) => r,
                Err(e) => return runtime_err(e),
            };
            if let Err(e) = pipeline::summarize_to_dir(&dir) {
                return runtime_err(e);
            }
            println!("wrote {}", dir.join("summary.csv").display());
            // the group tables pool the final generation of every run
            let final_rows = pipeline::final_generation_rows(&rows);
            match size_speed_table(&final_rows, speed_threshold, joints_threshold) {
                Ok(tables) => {
                    print_group_table(
                        &format!("number of joints, robots with speed > {speed_threshold} cm/s"),
                        &tables.joints_of_fast,
                    );
                    welch_between("n_joints", &tables.joints_of_fast);
                    print_group_table(
                        &format!("speed (cm/s), robots with >= {joints_threshold} joints"),
                        &tables.speed_of_jointed,
                    );
                    welch_between("speed", &tables.speed_of_jointed);
                    ExitCode::SUCCESS
                }
                Err(e) => runtime_err(e),
            }
        }
        Command::Pareto { dir } => match pipeline::pareto_to_dir(&dir) {
            Ok(n) => {
                println!(
                    "wrote {} ({n} non-dominated)",
                    dir.join("pareto.csv").display()
                );
                ExitCode::SUCCESS
            }
            Err(e) => runtime_err(e),
        },
        Command::Ttest {
            mean_a,
            sd_a,
            n_a,
            mean_b,
            sd_b,
            n_b,
        } => {
            let a = SummaryStats::new(n_a, mean_a, sd_a);
            let b = SummaryStats::new(n_b, mean_b, sd_b);
            match welch_t(&a, &b) {
                Ok(r) => {
                    println!("t = {:.6}", r.t);
                    println!("df = {:.6}", r.df);
                    println!("p = {:.6e}", r.p_two_sided);
                    ExitCode::SUCCESS
                }
                Err(e) => usage_err(e),
            }
        }
        Command::Plot { dir, metric } => match pipeline::plot_to_dir(&dir, &metric) {
            Ok(path) => {
                println!("wrote {} ({})", path.display(), metric_label(&metric));
                ExitCode::SUCCESS
            }
            Err(e) => runtime_err(e),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
    };
    run(cli.command)
}
