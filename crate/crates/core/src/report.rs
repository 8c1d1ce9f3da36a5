//! Row types and CSV persistence for the robots, summary and Pareto tables.

use std::io::{Read, Write};

use thiserror::Error;

/// One logged robot: identity, morphology descriptors, metrics and genotype.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotRow {
    pub experiment: String,
    pub run: u32,
    pub generation: u32,
    pub robot_id: u32,
    pub n_modules: usize,
    pub n_bricks: usize,
    pub n_joints: usize,
    pub branching: usize,
    pub proportion: f64,
    pub speed_cms: f64,
    pub battery_remaining: f64,
    pub balance: f64,
    pub alive_steps: usize,
    pub genotype: String,
}

pub const ROBOT_COLUMNS: [&str; 14] = [
    "experiment",
    "run",
    "generation",
    "robot_id",
    "n_modules",
    "n_bricks",
    "n_joints",
    "branching",
    "proportion",
    "speed_cms",
    "battery_remaining",
    "balance",
    "alive_steps",
    "genotype",
];

/// One aggregated metric value for a generation.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub generation: u32,
    pub metric: String,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

pub const SUMMARY_COLUMNS: [&str; 6] = ["experiment", "generation", "metric", "median", "q1", "q3"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("record {record}: bad field `{field}`: {msg}")]
    Field {
        record: usize,
        field: &'static str,
        msg: String,
    },
    #[error("unexpected header: {0:?}")]
    Header(Vec<String>),
}

fn parse<T: std::str::FromStr>(
    record: usize,
    field: &'static str,
    value: &str,
) -> Result<T, ReportError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ReportError::Field {
        record,
        field,
        msg: e.to_string(),
    })
}

impl RobotRow {
    fn record(&self) -> [String; 14] {
        [
            self.experiment.clone(),
            self.run.to_string(),
            self.generation.to_string(),
            self.robot_id.to_string(),
            self.n_modules.to_string(),
            self.n_bricks.to_string(),
            self.n_joints.to_string(),
            self.branching.to_string(),
            self.proportion.to_string(),
            self.speed_cms.to_string(),
            self.battery_remaining.to_string(),
            self.balance.to_string(),
            self.alive_steps.to_string(),
            self.genotype.clone(),
        ]
    }

    fn from_record(idx: usize, rec: &csv::StringRecord) -> Result<Self, ReportError> {
        if rec.len() < 14 {
            return Err(ReportError::Field {
                record: idx,
                field: "record",
                msg: format!("expected 14 fields, got {}", rec.len()),
            });
        }
        Ok(Self {
            experiment: rec[0].to_string(),
            run: parse(idx, "run", &rec[1])?,
            generation: parse(idx, "generation", &rec[2])?,
            robot_id: parse(idx, "robot_id", &rec[3])?,
            n_modules: parse(idx, "n_modules", &rec[4])?,
            n_bricks: parse(idx, "n_bricks", &rec[5])?,
            n_joints: parse(idx, "n_joints", &rec[6])?,
            branching: parse(idx, "branching", &rec[7])?,
            proportion: parse(idx, "proportion", &rec[8])?,
            speed_cms: parse(idx, "speed_cms", &rec[9])?,
            battery_remaining: parse(idx, "battery_remaining", &rec[10])?,
            balance: parse(idx, "balance", &rec[11])?,
            alive_steps: parse(idx, "alive_steps", &rec[12])?,
            genotype: rec[13].to_string(),
        })
    }
}

/// Writes the robots table with the fixed column order.
pub fn write_robots_csv<W: Write>(rows: &[RobotRow], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROBOT_COLUMNS)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a robots table written by [`write_robots_csv`].
pub fn read_robots_csv<R: Read>(input: R) -> Result<Vec<RobotRow>, ReportError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != ROBOT_COLUMNS {
        return Err(ReportError::Header(header));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        rows.push(RobotRow::from_record(i, &rec?)?);
    }
    Ok(rows)
}

/// Writes the robots table plus a trailing `nondominated` flag column.
pub fn write_pareto_csv<W: Write>(
    rows: &[RobotRow],
    nondominated: &[bool],
    out: W,
) -> Result<(), ReportError> {
    assert_eq!(rows.len(), nondominated.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = ROBOT_COLUMNS.to_vec();
    header.push("nondominated");
    w.write_record(&header)?;
    for (row, &flag) in rows.iter().zip(nondominated) {
        let mut rec: Vec<String> = row.record().to_vec();
        rec.push(if flag { "1" } else { "0" }.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.generation.to_string(),
            r.metric.clone(),
            r.median.to_string(),
            r.q1.to_string(),
            r.q3.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<SummaryRow>, ReportError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SUMMARY_COLUMNS {
        return Err(ReportError::Header(header));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        rows.push(SummaryRow {
            experiment: rec[0].to_string(),
            generation: parse(i, "generation", &rec[1])?,
            metric: rec[2].to_string(),
            median: parse(i, "median", &rec[3])?,
            q1: parse(i, "q1", &rec[4])?,
            q3: parse(i, "q3", &rec[5])?,
        });
    }
    Ok(rows)
}
