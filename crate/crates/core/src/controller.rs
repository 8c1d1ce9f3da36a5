//! Sinusoidal oscillator controllers for the joint servos.
//!
//! Each joint carries its own parameter triple; joints are not coupled, so a
//! gait emerges purely from the phase offsets between joints.

use std::f64::consts::PI;

/// Hinge servo travel limit in radians; target angles stay within ±`ANGLE_CAP`.
pub const ANGLE_CAP: f64 = PI / 2.0;

/// Parameters of one joint oscillator.
///
/// `amplitude` is dimensionless in `[0, 1]`, `period` is in seconds in
/// `[1, 10]`, `phase` is in turns in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub amplitude: f64,
    pub period: f64,
    pub phase: f64,
}

impl OscillatorParams {
    pub const AMPLITUDE_RANGE: (f64, f64) = (0.0, 1.0);
    pub const PERIOD_RANGE: (f64, f64) = (1.0, 10.0);

    pub fn new(amplitude: f64, period: f64, phase: f64) -> Self {
        let p = Self {
            amplitude,
            period,
            phase,
        };
        debug_assert!(p.in_range(), "oscillator params out of range: {p:?}");
        p
    }

    pub fn in_range(&self) -> bool {
        (0.0..=1.0).contains(&self.amplitude)
            && (1.0..=10.0).contains(&self.period)
            && self.phase >= 0.0
            && self.phase < 1.0
    }

    /// Target hinge angle in radians at time `t` (seconds).
    ///
    /// θ(t) = A · (π/2) · sin(2π·t/T + 2π·P), always in `[-π/2, π/2]`.
    pub fn target_angle(&self, t: f64) -> f64 {
        self.amplitude * ANGLE_CAP * (2.0 * PI * t / self.period + 2.0 * PI * self.phase).sin()
    }
}
