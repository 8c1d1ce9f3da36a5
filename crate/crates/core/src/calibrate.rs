//! Initial-charge calibration.
//!
//! The charge is set below what a maximum-size robot typically consumes in a
//! full run, so that energy stays scarce during evolution: measured mean
//! consumption is scaled by `TARGET_CHARGE / REFERENCE_USE` (10/12).

use thiserror::Error;

use crate::body::{decode, BodyLimits};
use crate::lsystem::{random_genotype, rewrite, RewriteConfig};
use crate::seeds::{rng_for, Stream};
use crate::sim::{total_consumption, SimConfig, SimError};

/// Charge assigned per `REFERENCE_USE` units of observed mean consumption.
pub const TARGET_CHARGE: f64 = 10.0;
/// Observed mean full-run consumption that maps to `TARGET_CHARGE`.
pub const REFERENCE_USE: f64 = 12.0;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("samples must be at least 1")]
    NoSamples,
    #[error("measured consumption is zero; nothing to calibrate against")]
    ZeroConsumption,
    #[error("no robot with {target} joints found within {attempts} attempts")]
    NoMaxSizeRobot { target: usize, attempts: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Scales measured full-run consumptions of maximum-size robots into an
/// initial charge: `(TARGET_CHARGE / REFERENCE_USE) * mean`.
pub fn pressure_scaled_charge(consumptions: &[f64]) -> Result<f64, CalibrationError> {
    if consumptions.is_empty() {
        return Err(CalibrationError::NoSamples);
    }
    let mean = consumptions.iter().sum::<f64>() / consumptions.len() as f64;
    if mean.is_nan() || mean <= 0.0 {
        return Err(CalibrationError::ZeroConsumption);
    }
    Ok(mean * (TARGET_CHARGE / REFERENCE_USE))
}

/// Samples random robots until `samples` of them decode to the joint limit,
/// measures each one's unlimited-battery consumption and returns the scaled
/// charge. Fails if the retry budget (1000 attempts per sample) runs out.
pub fn calibrate_cstart(
    sim: &SimConfig,
    rewrite_cfg: &RewriteConfig,
    limits: &BodyLimits,
    samples: usize,
    seed: u64,
) -> Result<f64, CalibrationError> {
    if samples == 0 {
        return Err(CalibrationError::NoSamples);
    }
    let budget = samples * 1000;
    let mut consumptions = Vec::with_capacity(samples);
    for attempt in 0..budget {
        let mut rng = rng_for(
            seed,
            0,
            Stream::Calibration {
                index: attempt as u32,
            },
        );
        let genotype = random_genotype(&mut rng);
        let body = decode(&rewrite(&genotype, rewrite_cfg), *limits)
            .expect("rewritten genotypes always carry a core");
        if body.n_joints() != limits.max_joints {
            continue;
        }
        consumptions.push(total_consumption(&body, sim)?);
        if consumptions.len() == samples {
            return pressure_scaled_charge(&consumptions);
        }
    }
    Err(CalibrationError::NoMaxSizeRobot {
        target: limits.max_joints,
        attempts: budget,
    })
}
