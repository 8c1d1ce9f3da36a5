//! Analysis of experiment logs: quartile aggregation, Welch's t-test,
//! Pareto flagging and the size/speed group tables.

mod special;

pub use special::{inc_beta, ln_gamma, student_t_two_sided};

use thiserror::Error;

use crate::moea::dominates;
use crate::report::RobotRow;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty input")]
    Empty,
    #[error("welch: both groups need n >= 2")]
    TooFewSamples,
    #[error("welch: standard deviations must be non-negative and not both zero")]
    DegenerateVariance,
}

/// Count, mean and sample standard deviation of one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

impl SummaryStats {
    pub fn new(n: usize, mean: f64, sd: f64) -> Self {
        Self { n, mean, sd }
    }

    /// `None` on an empty slice; a singleton gets sd = 0.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n == 1 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Some(Self { n, mean, sd })
    }
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Median and quartiles by linear interpolation between order statistics.
pub fn aggregate_generation(values: &[f64]) -> Result<(f64, f64, f64), StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok((
        quantile(&sorted, 0.5),
        quantile(&sorted, 0.25),
        quantile(&sorted, 0.75),
    ))
}

/// Welch's t-test result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    pub p_two_sided: f64,
}

/// Unequal-variance two-sample t-test from summary statistics.
pub fn welch_t(a: &SummaryStats, b: &SummaryStats) -> Result<WelchResult, StatsError> {
    if a.n < 2 || b.n < 2 {
        return Err(StatsError::TooFewSamples);
    }
    if a.sd < 0.0 || b.sd < 0.0 || (a.sd == 0.0 && b.sd == 0.0) {
        return Err(StatsError::DegenerateVariance);
    }
    let va = a.sd * a.sd / a.n as f64;
    let vb = b.sd * b.sd / b.n as f64;
    let t = (a.mean - b.mean) / (va + vb).sqrt();
    let df = (va + vb) * (va + vb) / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    Ok(WelchResult {
        t,
        df,
        p_two_sided: student_t_two_sided(t, df),
    })
}

/// Flags each row as non-dominated (`true`) over the whole input, maximizing
/// speed and remaining battery. Order is preserved.
pub fn extract_pareto(rows: &[RobotRow]) -> Result<Vec<bool>, StatsError> {
    if rows.is_empty() {
        return Err(StatsError::Empty);
    }
    let objs: Vec<[f64; 2]> = rows
        .iter()
        .map(|r| [r.speed_cms, r.battery_remaining])
        .collect();
    Ok((0..objs.len())
        .map(|i| !objs.iter().any(|other| dominates(other, &objs[i])))
        .collect())
}

/// Summary of one experiment's group; `stats` is `None` for an empty group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub experiment: String,
    pub stats: Option<SummaryStats>,
}

/// The two group tables from the size/speed analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeSpeedTables {
    /// Per experiment: joint counts of robots faster than the speed threshold.
    pub joints_of_fast: Vec<GroupSummary>,
    /// Per experiment: speeds of robots with at least `joints_threshold` joints.
    pub speed_of_jointed: Vec<GroupSummary>,
}

/// Builds both group tables over `rows`, one group per experiment in
/// first-appearance order.
pub fn size_speed_table(
    rows: &[RobotRow],
    speed_threshold: f64,
    joints_threshold: usize,
) -> Result<SizeSpeedTables, StatsError> {
    if rows.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut experiments: Vec<&str> = Vec::new();
    for r in rows {
        if !experiments.contains(&r.experiment.as_str()) {
            experiments.push(&r.experiment);
        }
    }

    let mut joints_of_fast = Vec::new();
    let mut speed_of_jointed = Vec::new();
    for exp in experiments {
        let fast: Vec<f64> = rows
            .iter()
            .filter(|r| r.experiment == exp && r.speed_cms > speed_threshold)
            .map(|r| r.n_joints as f64)
            .collect();
        joints_of_fast.push(GroupSummary {
            experiment: exp.to_string(),
            stats: SummaryStats::from_values(&fast),
        });
        let jointed: Vec<f64> = rows
            .iter()
            .filter(|r| r.experiment == exp && r.n_joints >= joints_threshold)
            .map(|r| r.speed_cms)
            .collect();
        speed_of_jointed.push(GroupSummary {
            experiment: exp.to_string(),
            stats: SummaryStats::from_values(&jointed),
        });
    }
    Ok(SizeSpeedTables {
        joints_of_fast,
        speed_of_jointed,
    })
}
