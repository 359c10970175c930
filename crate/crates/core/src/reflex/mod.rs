//! The reflexive grasping controller.
//!
//! Proximity-driven potential fields shape the open hand while the gripper
//! approaches; trigger predicates start a grasp; contact-based object
//! estimation picks a re-grasp when an attempt does not succeed.

mod controller;
mod estimate;
mod regrasp;

pub use controller::{
    approach_command, open_pose, ControllerParams, HandCommand, Kinematics, Motion, Observation, ReflexMode,
    ReflexState,
};
pub use estimate::{antipodal_within, contact_frame, estimate_from_contacts, estimate_object, ObjectEstimate};
pub use regrasp::{default_object, plan_regrasp, select_branch, sensed_object, RegraspBranch, RegraspPlan, TipTarget};

use serde::{Deserialize, Serialize};

use crate::config::ReflexConfig;
use crate::finger::Side;
use crate::geometry::PlanarVec;
use crate::sensing::{tip_ray_direction, ContactReading, ProximityVector, TipDirection};

/// One directional term of the fingertip potential field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldTerm {
    pub direction: TipDirection,
    pub active: bool,
    /// Signed magnitude along `unit`.
    pub magnitude: f64,
    pub unit: PlanarVec,
}

impl FieldTerm {
    pub fn force(&self) -> PlanarVec {
        self.unit * self.magnitude
    }
}

/// The three field terms for one fingertip, in (out, forward, in) order.
///
/// `tip_heading` is the distal link heading in the gripper frame; the unit
/// vectors are returned in the gripper frame.
pub fn field_terms(side: Side, d: &ProximityVector, cfg: &ReflexConfig, tip_heading: f64) -> [FieldTerm; 3] {
    let measured = d.tip(side);
    let settings = [
        (cfg.k_out, cfg.d_thresh_out, cfg.d_thresh_out),
        (cfg.k_forward, cfg.d_thresh_forward, cfg.d_thresh_forward),
        (cfg.k_in, cfg.d_thresh_in, cfg.d_des_in),
    ];
    let mut terms = [FieldTerm {
        direction: TipDirection::Out,
        active: false,
        magnitude: 0.0,
        unit: PlanarVec::ZERO,
    }; 3];
    for (i, dir) in TipDirection::ALL.into_iter().enumerate() {
        let (k, thresh, des) = settings[i];
        let active = measured[i] < thresh;
        terms[i] = FieldTerm {
            direction: dir,
            active,
            magnitude: if active { k * (measured[i] - des) } else { 0.0 },
            unit: tip_ray_direction(side, dir, tip_heading),
        };
    }
    terms
}

/// Net virtual force on a fingertip from its proximity readings.
pub fn potential_field_force(side: Side, d: &ProximityVector, cfg: &ReflexConfig, tip_heading: f64) -> PlanarVec {
    field_terms(side, d, cfg, tip_heading)
        .iter()
        .fold(PlanarVec::ZERO, |acc, t| acc + t.force())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TriggerFlags {
    pub beta_near: bool,
    pub beta_far: bool,
    pub beta_tips: bool,
    pub beta_occlude: bool,
}

impl TriggerFlags {
    /// Whether these flags start a grasp attempt during the approach.
    pub fn fires(&self) -> bool {
        self.beta_near || (self.beta_far && self.beta_tips) || self.beta_occlude
    }
}

/// Grasp trigger predicates. Tip angles follow [`crate::finger::FingerState::tip_angle`].
pub fn evaluate_triggers(
    d: &ProximityVector,
    left_tip_angle: f64,
    right_tip_angle: f64,
    cfg: &ReflexConfig,
) -> TriggerFlags {
    TriggerFlags {
        beta_near: d.d_palm < cfg.d_near,
        beta_far: d.d_palm < cfg.d_far,
        beta_tips: left_tip_angle < cfg.theta_close && right_tip_angle < cfg.theta_close,
        beta_occlude: d.d_l_forward < cfg.d_occlude || d.d_r_forward < cfg.d_occlude,
    }
}

/// Both tips still, both pressing harder than `gamma_f`, object seen by the palm.
pub fn evaluate_success(
    left: &ContactReading,
    right: &ContactReading,
    v_left: f64,
    v_right: f64,
    d: &ProximityVector,
    cfg: &ReflexConfig,
) -> bool {
    v_left < cfg.gamma_v
        && v_right < cfg.gamma_v
        && left.f_normal.abs() > cfg.gamma_f
        && right.f_normal.abs() > cfg.gamma_f
        && d.d_palm < cfg.d_far
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    Approach,
    Closing,
    Evaluate,
    RegraspPinchPull,
    RegraspAntipodal,
    RegraspPowerWrap,
    Transport,
    Succeeded,
    Failed,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Approach => "APPROACH",
            Phase::Closing => "CLOSING",
            Phase::Evaluate => "EVALUATE",
            Phase::RegraspPinchPull => "REGRASP_PINCH_PULL",
            Phase::RegraspAntipodal => "REGRASP_ANTIPODAL",
            Phase::RegraspPowerWrap => "REGRASP_POWER_WRAP",
            Phase::Transport => "TRANSPORT",
            Phase::Succeeded => "SUCCEEDED",
            Phase::Failed => "FAILED",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Succeeded | Phase::Failed)
    }

    pub fn is_regrasp(self) -> bool {
        matches!(
            self,
            Phase::RegraspPinchPull | Phase::RegraspAntipodal | Phase::RegraspPowerWrap
        )
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspPhase {
    pub phase: Phase,
    pub phase_entry_time: f64,
    /// Set when the first grasp attempt is triggered.
    pub grasp_start_time: Option<f64>,
}

impl GraspPhase {
    pub fn start(time: f64) -> Self {
        Self {
            phase: Phase::Approach,
            phase_entry_time: time,
            grasp_start_time: None,
        }
    }

    pub(crate) fn enter(self, phase: Phase, time: f64) -> Self {
        Self {
            phase,
            phase_entry_time: time,
            ..self
        }
    }

    pub fn timed_out(&self, time: f64, cfg: &ReflexConfig) -> bool {
        self.grasp_start_time.is_some_and(|start| time - start > cfg.t_fail)
    }
}
