//! Evolution of modular robots — bodies plus oscillator controllers encoded
//! by an L-system — for locomotion with and without a battery budget.
//!
//! The crate covers the whole pipeline: grammar genotypes ([`lsystem`]),
//! decoding to 2D modular bodies ([`body`]), joint oscillators
//! ([`controller`]), a deterministic surrogate locomotion simulator with an
//! energy model ([`sim`]), single- and bi-objective evolution with NSGA-II
//! machinery ([`moea`]), and the experiment harness: configuration, CSV
//! logging, statistics and SVG plots ([`config`], [`report`], [`stats`],
//! [`plot`], [`calibrate`], [`pipeline`]).

pub mod body;
pub mod calibrate;
pub mod config;
pub mod controller;
pub mod lsystem;
pub mod moea;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod seeds;
pub mod sim;
pub mod stats;

pub use body::{decode, descriptors, BodyGraph, BodyLimits, MorphDescriptors};
pub use config::{load_config, parse_config, RunConfig, RunMode};
pub use controller::OscillatorParams;
pub use lsystem::{Genotype, RewriteConfig, SymbolToken};
pub use moea::{EvolutionConfig, Individual, Mode, RobotProblem, SurvivorSelection};
pub use report::{RobotRow, SummaryRow};
pub use sim::{simulate, EvalResult, SimConfig};
pub use stats::{SummaryStats, WelchResult};
