//! Sensorless comparison controller: open to the commanded width, close on a
//! fixed schedule once the base arrives, then transport.
//!
//! It only ever sees [`Kinematics`]; proximity and contact readings are not
//! part of its interface.

use serde::{Deserialize, Serialize};

use crate::config::ReflexConfig;
use crate::finger::{reach_toward, FingerState, JointCommand, JointVector, Side};
use crate::reflex::{ControllerParams, HandCommand, Kinematics, Motion, Phase};

/// Fixed duration of the closing maneuver.
pub const CLOSE_DURATION: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineState {
    pub phase: Phase,
    pub phase_entry_time: f64,
    q_open: [JointVector; 2],
    q_close: [JointVector; 2],
    motion: Option<Motion>,
}

fn pose_at(finger: &FingerState, x: f64, half_width: f64) -> JointVector {
    let target = crate::PlanarVec::new(x, finger.side.sign() * half_width);
    reach_toward(finger, target, 0.0)
}

impl BaselineState {
    /// Open pose leaves `clearance_baseline` between the tips and an object of
    /// `object_diameter` centered on the target.
    pub fn new(
        fingers: &[FingerState; 2],
        object_diameter: f64,
        cfg: &ReflexConfig,
        params: &ControllerParams,
        time: f64,
    ) -> Self {
        let half = 0.5 * (object_diameter + cfg.clearance_baseline) + params.r_tip;
        let x = params.grasp_offset;
        let q_open = Side::BOTH.map(|s| pose_at(&fingers[s.index()], x, half));
        let q_close = Side::BOTH.map(|s| {
            let f = fingers[s.index()].clone().with_q(q_open[s.index()]);
            pose_at(&f, x, 0.0)
        });
        Self {
            phase: Phase::Approach,
            phase_entry_time: time,
            q_open,
            q_close,
            motion: None,
        }
    }

    pub fn open_pose(&self) -> [JointVector; 2] {
        self.q_open
    }

    pub fn hold_command(&self) -> [JointCommand; 2] {
        match self.phase {
            Phase::Approach => self.q_open.map(JointCommand::hold),
            _ => self.q_close.map(JointCommand::hold),
        }
    }

    pub fn tick(mut self, k: &Kinematics) -> (HandCommand, Self) {
        let t = k.time;
        match self.phase {
            Phase::Approach if k.base_reached => {
                self.phase = Phase::Closing;
                self.phase_entry_time = t;
                self.motion = Some(Motion::new(self.q_open, self.q_close, t, CLOSE_DURATION));
            }
            Phase::Closing if self.motion.as_ref().is_some_and(|m| m.done(t)) => {
                self.phase = Phase::Transport;
                self.phase_entry_time = t;
                self.motion = None;
            }
            _ => {}
        }
        let joints = match (&self.phase, &self.motion) {
            (Phase::Closing, Some(m)) => m.sample(t),
            _ => self.hold_command(),
        };
        let advance_base = self.phase == Phase::Approach;
        (HandCommand { joints, advance_base }, self)
    }
}
