//! Deterministic surrogate locomotion simulator.
//!
//! Joints track their oscillator targets; torque is the inertial load of the
//! distal subtree plus a damping term, and any positive joint work both
//! drains the battery and produces thrust. Drag-limited velocities integrate
//! into a planar trajectory. Once the battery is empty the run stops early.

use std::f64::consts::PI;

use thiserror::Error;

use crate::body::{BodyGraph, ModuleKind};
use crate::controller::OscillatorParams;

/// Simulation constants. All must be positive; `c_start` may be `+inf` to
/// disable battery depletion. `duration / dt` must be a whole number of steps.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub c_start: f64,
    /// Module edge length in meters.
    pub module_length: f64,
    /// Mass per module.
    pub module_mass: f64,
    /// Damping torque coefficient.
    pub beta: f64,
    /// Thrust per unit of positive joint power.
    pub kappa: f64,
    /// Translational drag.
    pub gamma_t: f64,
    /// Rotational drag.
    pub gamma_r: f64,
    /// Yaw rate at which balance saturates to zero.
    pub omega_ref: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            duration: 60.0,
            c_start: 10.0,
            module_length: 0.1,
            module_mass: 1.0,
            beta: 0.05,
            kappa: 1.0,
            gamma_t: 1.0,
            gamma_r: 1.0,
            omega_ref: PI,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let finite_positive = [
            ("dt", self.dt),
            ("duration", self.duration),
            ("module_length", self.module_length),
            ("module_mass", self.module_mass),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("gamma_t", self.gamma_t),
            ("gamma_r", self.gamma_r),
            ("omega_ref", self.omega_ref),
        ];
        for (name, v) in finite_positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::Config(format!(
                    "{name} must be finite and positive"
                )));
            }
        }
        if self.c_start.is_nan() || self.c_start <= 0.0 {
            return Err(SimError::Config("c_start must be positive".into()));
        }
        self.n_steps().map(|_| ())
    }

    /// Number of simulation steps; errors unless `duration / dt` is a whole
    /// number at least 1.
    pub fn n_steps(&self) -> Result<usize, SimError> {
        let ratio = self.duration / self.dt;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-6 {
            return Err(SimError::Config(
                "duration must be a positive whole multiple of dt".into(),
            ));
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid sim config: {0}")]
    Config(String),
    #[error("non-finite value at step {step}; check surrogate constants")]
    NonFinite { step: usize },
    #[error("duration must be positive")]
    NonPositiveDuration,
    #[error("balance needs at least one sample")]
    EmptyOmegaList,
}

/// Instantaneous state of one joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub theta: f64,
    /// Angular speed, rad/s.
    pub phi: f64,
    /// Angular acceleration, rad/s².
    pub alpha: f64,
    /// Signed torque, N·m.
    pub torque: f64,
    /// Constant rotational inertia of the distal subtree.
    pub inertia: f64,
    /// Number of modules beyond this joint.
    pub distal_count: usize,
}

impl JointState {
    /// State at the first step: the joint sits at its target with the speed
    /// and acceleration conventions zeroed.
    fn initial(inertia: f64, distal_count: usize, theta: f64) -> Self {
        Self {
            theta,
            phi: 0.0,
            alpha: 0.0,
            torque: 0.0,
            inertia,
            distal_count,
        }
    }

    /// Advances to the next target angle over one step of length `dt`.
    fn advanced(&self, theta: f64, dt: f64, beta: f64) -> Self {
        let phi = (theta - self.theta) / dt;
        let alpha = (phi - self.phi) / dt;
        let torque = self.inertia * alpha + beta * phi;
        Self {
            theta,
            phi,
            alpha,
            torque,
            inertia: self.inertia,
            distal_count: self.distal_count,
        }
    }
}

/// Battery charge accounting per the energy model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryState {
    c_start: f64,
    remaining: f64,
    last_delta: f64,
}

impl BatteryState {
    pub fn new(c_start: f64) -> Self {
        Self {
            c_start,
            remaining: c_start,
            last_delta: 0.0,
        }
    }

    pub fn c_start(&self) -> f64 {
        self.c_start
    }

    pub fn remaining(&self) -> f64 {
        self.remaining
    }

    /// Energy actually drawn in the most recent step.
    pub fn last_delta(&self) -> f64 {
        self.last_delta
    }

    /// Draws `demand` energy units; the draw is capped at the remaining
    /// charge. Returns `true` when the battery hits zero, which stops the
    /// simulation.
    pub fn drain(&mut self, demand: f64) -> bool {
        debug_assert!(demand >= 0.0);
        let next = self.remaining - demand;
        if next <= 0.0 {
            self.last_delta = self.remaining;
            self.remaining = 0.0;
            true
        } else {
            self.last_delta = demand;
            self.remaining = next;
            false
        }
    }
}

/// Planar pose of the body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseState {
    pub position: (f64, f64),
    pub heading: f64,
    pub last_omega: f64,
}

impl Default for PoseState {
    fn default() -> Self {
        Self {
            position: (0.0, 0.0),
            heading: 0.0,
            last_omega: 0.0,
        }
    }
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    /// Start-to-end straight-line speed, cm/s, over the nominal duration.
    pub speed: f64,
    pub battery_remaining: f64,
    /// Yaw-rate stability in `[0, 1]`; 1 is perfectly stable.
    pub balance: f64,
    pub alive_steps: usize,
    /// Straight-line displacement in meters.
    pub displacement: f64,
}

/// One row of the optional per-step trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub delta_c: f64,
}

/// Sum of positive joint powers: Σ max(0, M·Φ).
pub fn compute_power(pairs: &[(f64, f64)]) -> f64 {
    pairs.iter().map(|&(m, phi)| (m * phi).max(0.0)).sum()
}

/// Straight-line speed in cm/s between two positions in meters.
pub fn speed_of(start: (f64, f64), end: (f64, f64), duration: f64) -> Result<f64, SimError> {
    if duration.is_nan() || duration <= 0.0 {
        return Err(SimError::NonPositiveDuration);
    }
    let (dx, dy) = (end.0 - start.0, end.1 - start.1);
    Ok(dx.hypot(dy) / duration * 100.0)
}

/// Yaw-rate stability: 1 − min(1, mean|ω| / ω_ref).
pub fn balance_of(omegas: &[f64], omega_ref: f64) -> Result<f64, SimError> {
    if omegas.is_empty() {
        return Err(SimError::EmptyOmegaList);
    }
    let mean = omegas.iter().map(|w| w.abs()).sum::<f64>() / omegas.len() as f64;
    Ok(1.0 - (mean / omega_ref).min(1.0))
}

struct JointInfo {
    params: OscillatorParams,
    inertia: f64,
    distal_count: usize,
    attach_dir: (f64, f64),
    /// Lever arm from the core in the body frame, meters.
    lever: (f64, f64),
}

/// Per-body constants shared by all steps.
struct RobotModel {
    joints: Vec<JointInfo>,
    total_mass: f64,
    total_inertia: f64,
}

impl RobotModel {
    fn build(body: &BodyGraph, cfg: &SimConfig) -> Self {
        let len_m = cfg.module_length;
        let mass = cfg.module_mass;
        let core = body.core().grid_pos;

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); body.len()];
        for m in body.modules() {
            if let Some(a) = m.attachment {
                children[a.parent].push(m.id);
            }
        }

        let mut joints = Vec::with_capacity(body.n_joints());
        for m in body.modules() {
            let ModuleKind::Joint(params) = m.kind else {
                continue;
            };
            // breadth-first over the distal subtree; d counts modules from
            // the joint
            let mut inertia = 0.0;
            let mut count = 0usize;
            let mut frontier: Vec<(usize, usize)> =
                children[m.id].iter().map(|&c| (c, 1)).collect();
            while let Some((id, d)) = frontier.pop() {
                let arm = d as f64 * len_m;
                inertia += mass * arm * arm;
                count += 1;
                frontier.extend(children[id].iter().map(|&c| (c, d + 1)));
            }
            let a = m.attachment.expect("joint is never the core");
            joints.push(JointInfo {
                params,
                inertia,
                distal_count: count,
                attach_dir: a.attach_dir.as_vec(),
                lever: (
                    (m.grid_pos.0 - core.0) as f64 * len_m,
                    (m.grid_pos.1 - core.1) as f64 * len_m,
                ),
            });
        }

        let total_mass = body.len() as f64 * mass;
        let total_inertia = body
            .modules()
            .iter()
            .map(|m| {
                let rx = (m.grid_pos.0 - core.0) as f64 * len_m;
                let ry = (m.grid_pos.1 - core.1) as f64 * len_m;
                mass * (rx * rx + ry * ry)
            })
            .sum();

        Self {
            joints,
            total_mass,
            total_inertia,
        }
    }
}

fn rotated(v: (f64, f64), angle: f64) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    (v.0 * c - v.1 * s, v.0 * s + v.1 * c)
}

fn cross2(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

/// Advances all joints and the pose by one step at time `t`, returning the
/// step's energy demand. `states` is empty on the first step.
fn step(
    model: &RobotModel,
    states: &mut Vec<JointState>,
    pose: &mut PoseState,
    power_pairs: &mut Vec<(f64, f64)>,
    t: f64,
    step_idx: usize,
    cfg: &SimConfig,
) -> Result<f64, SimError> {
    let first = states.is_empty();
    power_pairs.clear();

    let mut force = (0.0f64, 0.0f64);
    let mut torque_yaw = 0.0f64;

    for (j, info) in model.joints.iter().enumerate() {
        let theta = info.params.target_angle(t);
        let next = if first {
            JointState::initial(info.inertia, info.distal_count, theta)
        } else {
            states[j].advanced(theta, cfg.dt, cfg.beta)
        };
        power_pairs.push((next.torque, next.phi));

        let thrust_mag = cfg.kappa * (next.torque * next.phi).max(0.0);
        if thrust_mag > 0.0 {
            let dir = rotated(info.attach_dir, next.theta + pose.heading + PI / 2.0);
            let sign = if next.phi < 0.0 { -1.0 } else { 1.0 };
            let thrust = (dir.0 * thrust_mag * sign, dir.1 * thrust_mag * sign);
            force.0 += thrust.0;
            force.1 += thrust.1;
            torque_yaw += cross2(rotated(info.lever, pose.heading), thrust);
        }

        if first {
            states.push(next);
        } else {
            states[j] = next;
        }
    }

    let delta_c = compute_power(power_pairs) * cfg.dt;

    let v = (
        force.0 / (cfg.gamma_t * model.total_mass),
        force.1 / (cfg.gamma_t * model.total_mass),
    );
    let omega = if model.total_inertia > 0.0 {
        torque_yaw / (cfg.gamma_r * model.total_inertia)
    } else {
        0.0
    };

    pose.position.0 += v.0 * cfg.dt;
    pose.position.1 += v.1 * cfg.dt;
    pose.heading += omega * cfg.dt;
    pose.last_omega = omega;

    let finite = delta_c.is_finite()
        && pose.position.0.is_finite()
        && pose.position.1.is_finite()
        && pose.heading.is_finite()
        && omega.is_finite();
    if !finite {
        return Err(SimError::NonFinite { step: step_idx });
    }
    Ok(delta_c)
}

fn run(
    body: &BodyGraph,
    cfg: &SimConfig,
    mut trace: Option<&mut Vec<TraceStep>>,
) -> Result<EvalResult, SimError> {
    cfg.validate()?;
    let n = cfg.n_steps()?;
    let model = RobotModel::build(body, cfg);

    let mut states: Vec<JointState> = Vec::new();
    let mut pose = PoseState::default();
    let mut battery = BatteryState::new(cfg.c_start);
    let mut power_pairs = Vec::with_capacity(model.joints.len());
    let mut omegas = Vec::with_capacity(n);

    for i in 0..n {
        let t = i as f64 * cfg.dt;
        let demand = step(&model, &mut states, &mut pose, &mut power_pairs, t, i, cfg)?;
        omegas.push(pose.last_omega);
        let depleted = battery.drain(demand);
        if let Some(rows) = trace.as_deref_mut() {
            rows.push(TraceStep {
                step: i,
                t,
                energy: battery.remaining(),
                x: pose.position.0,
                y: pose.position.1,
                psi: pose.heading,
                delta_c: battery.last_delta(),
            });
        }
        if depleted {
            break;
        }
    }

    Ok(EvalResult {
        speed: speed_of((0.0, 0.0), pose.position, cfg.duration)?,
        battery_remaining: battery.remaining(),
        balance: balance_of(&omegas, cfg.omega_ref)?,
        alive_steps: omegas.len(),
        displacement: {
            let (x, y) = pose.position;
            x.hypot(y)
        },
    })
}

/// Simulates a decoded body for the configured duration or until the battery
/// is depleted, whichever comes first.
pub fn simulate(body: &BodyGraph, cfg: &SimConfig) -> Result<EvalResult, SimError> {
    run(body, cfg, None)
}

/// Like [`simulate`], but also records the per-step trace.
pub fn simulate_with_trace(
    body: &BodyGraph,
    cfg: &SimConfig,
) -> Result<(EvalResult, Vec<TraceStep>), SimError> {
    let mut rows = Vec::new();
    let result = run(body, cfg, Some(&mut rows))?;
    Ok((result, rows))
}

/// Writes a trace as CSV with the columns `step,t,E,x,y,psi,dC`.
pub fn write_trace_csv<W: std::io::Write>(rows: &[TraceStep], out: W) -> std::io::Result<()> {
    use std::io::Write as _;
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "step,t,E,x,y,psi,dC")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.step, r.t, r.energy, r.x, r.y, r.psi, r.delta_c
        )?;
    }
    Ok(())
}

/// Total energy demanded over a full run with an unlimited battery.
pub fn total_consumption(body: &BodyGraph, cfg: &SimConfig) -> Result<f64, SimError> {
    let unlimited = SimConfig {
        c_start: f64::INFINITY,
        ..*cfg
    };
    let (_, rows) = simulate_with_trace(body, &unlimited)?;
    Ok(rows.iter().map(|r| r.delta_c).sum())
}
