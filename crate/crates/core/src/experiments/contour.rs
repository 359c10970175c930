//! Contour following beside a straight wall.
//!
//! The left fingertip starts in its open pose with a wall across its inward
//! ray. The base stays put; only the potential field moves the finger.

use serde::{Deserialize, Serialize};

use super::SimParams;
use crate::config::ReflexConfig;
use crate::error::Error;
use crate::finger::{command_torque, FingerState, JointCommand, JointVector, Side};
use crate::geometry::{DiskObject, GripperFrame};
use crate::reflex::{approach_command, open_pose};
use crate::sensing::{sample_proximity, sensor_rays, ProximityVector};
use crate::world::{SimObject, WorldState};

/// Right finger pose that keeps it clear of the wall.
const FOLDED: JointVector = [-2.0, 0.0, 0.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    /// Initial distance from the left in-ray origin to the wall.
    pub initial_distance: f64,
    /// Radius of the disk standing in for the wall.
    pub wall_radius: f64,
    pub duration: f64,
    /// Band around `d_des_in` counted as converged.
    pub tolerance: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            initial_distance: 0.08,
            wall_radius: 5.0,
            duration: 2.0,
            tolerance: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSample {
    pub time: f64,
    pub d_in: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourReport {
    pub target: f64,
    pub tolerance: f64,
    pub samples: Vec<ContourSample>,
    /// Start of the final stretch that stays inside the band, if any.
    pub settled_at: Option<f64>,
    pub final_distance: f64,
}

impl ContourReport {
    pub fn settled_within(&self, seconds: f64) -> bool {
        self.settled_at.is_some_and(|t| t <= seconds)
    }
}

/// Run the wall scenario and record the left inward distance every control tick.
pub fn run_contour_following(
    spec: &ContourSpec,
    cfg: &ReflexConfig,
    params: &SimParams,
) -> Result<ContourReport, Error> {
    let cp = &params.controller;
    let left = FingerState::new(Side::Left);
    let q_open = [open_pose(&left, cp), FOLDED];
    let fingers = [left.with_q(q_open[0]), FingerState::new(Side::Right).with_q(FOLDED)];
    let mut world = WorldState::new(GripperFrame::default(), fingers, 0);

    let ray = sensor_rays(&world, params.physics.r_tip)[2];
    let center = ray.origin + ray.dir * (spec.initial_distance + spec.wall_radius);
    let wall = DiskObject::new(0, center, spec.wall_radius, 1.0e6, "wall")?;
    world.objects.push(SimObject::at_rest(wall));

    let hold_right = JointCommand {
        q_des: FOLDED,
        ..JointCommand::default()
    };
    let mut q_ref = q_open;
    let mut d = ProximityVector::default();
    let mut joints = [JointCommand::default(); 2];
    let mut samples = Vec::new();
    let mut step: u64 = 0;
    while world.time <= spec.duration {
        if step.is_multiple_of(params.sense_every as u64) {
            d = sample_proximity(&world, &sensor_rays(&world, params.physics.r_tip));
        }
        if step.is_multiple_of(params.control_every as u64) {
            let (next, cmds) = approach_command(&world.fingers, &q_ref, &q_open, &d, cfg, cp);
            q_ref = [next[0], FOLDED];
            joints = [cmds[0], hold_right];
            samples.push(ContourSample {
                time: world.time,
                d_in: d.d_l_in,
            });
        }
        let torques = [0, 1].map(|i| command_torque(&joints[i], &world.fingers[i], &params.gains));
        world.step(&torques, &params.physics)?;
        step += 1;
    }

    let target = cfg.d_des_in;
    let inside = |s: &ContourSample| (s.d_in - target).abs() <= spec.tolerance;
    let settled_at = match samples.iter().rposition(|s| !inside(s)) {
        None => samples.first().map(|s| s.time),
        Some(i) if i + 1 < samples.len() => Some(samples[i + 1].time),
        Some(_) => None,
    };
    Ok(ContourReport {
        target,
        tolerance: spec.tolerance,
        final_distance: samples.last().map_or(f64::NAN, |s| s.d_in),
        samples,
        settled_at,
    })
}
