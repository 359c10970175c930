//! The grasp state machine, ticked at the controller rate.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::estimate::{antipodal_within, contact_frame, estimate_object, ObjectEstimate};
use super::regrasp::{default_object, plan_regrasp, sensed_object, RegraspBranch, TipTarget};
use super::{evaluate_success, evaluate_triggers, potential_field_force, GraspPhase, Phase, TriggerFlags};
use crate::config::ReflexConfig;
use crate::finger::{
    inverse_kinematics_relaxed, reach_toward, tip_force_to_torques, tip_velocity_to_joints, FingerState, JointCommand,
    JointVector, Side, TipPose, JOINTS, JOINT_LIMIT,
};
use crate::geometry::{normalize_angle, PlanarVec};
use crate::sensing::{ContactReading, ProximityVector, D_MAX};

/// Hand-level settings the controllers share. Lengths in meters, times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    pub r_tip: f64,
    /// Controller period.
    pub dt: f64,
    /// Object distance from the palm at which the base stops.
    pub grasp_offset: f64,
    /// Left fingertip in the open pose; the right one is mirrored.
    pub open_tip: PlanarVec,
    pub open_heading: f64,
    /// Admittance damping turning field force into tip velocity, N s/m.
    pub admittance: f64,
    pub max_tip_speed: f64,
    pub dls_damping: f64,
    /// Rate at which the reference pose returns to the open pose, 1/s.
    pub relax_rate: f64,
    pub closing_speed: f64,
    /// How far past the palm reading the tips close when the palm sees something.
    pub close_depth: f64,
    pub waypoint_speed: f64,
    pub min_motion_time: f64,
    /// Spacing of Cartesian via-points along a tip motion.
    pub via_spacing: f64,
    /// How far behind the closing line a tip may sit before it is staged forward first.
    pub stage_margin: f64,
    pub open_margin: f64,
    /// Commanded penetration past the estimated surface in a pinch.
    pub squeeze: f64,
    /// Forward component of a contact normal above which closing stops squeezing.
    pub push_limit: f64,
    /// Squeeze kept on such a contact.
    pub preload: f64,
    /// Fraction of the contact radius the tips reach past the equator when pulling.
    pub beyond_equator: f64,
    pub palm_gap: f64,
    /// Contact bearing of the tips in a power wrap, from the object's +x axis.
    pub wrap_angle: f64,
    pub default_radius: f64,
    pub stall_time: f64,
    pub success_hold: f64,
    pub settle_timeout: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            r_tip: 0.012,
            dt: 4.0 / 1200.0,
            grasp_offset: 0.085,
            open_tip: PlanarVec::new(0.095, 0.055),
            open_heading: 0.9,
            admittance: 1.5,
            max_tip_speed: 0.3,
            dls_damping: 0.01,
            relax_rate: 2.0,
            closing_speed: 0.25,
            close_depth: 0.01,
            waypoint_speed: 0.25,
            min_motion_time: 0.05,
            via_spacing: 0.005,
            stage_margin: 0.015,
            open_margin: 0.015,
            squeeze: 0.015,
            push_limit: 0.3,
            preload: 0.002,
            beyond_equator: 0.3,
            palm_gap: 0.003,
            wrap_angle: 1.0,
            default_radius: 0.035,
            stall_time: 0.1,
            success_hold: 0.03,
            settle_timeout: 0.6,
        }
    }
}

impl ControllerParams {
    pub fn open_target(&self, side: Side) -> TipTarget {
        TipTarget {
            position: PlanarVec::new(self.open_tip.x, side.sign() * self.open_tip.y),
            heading: side.sign() * self.open_heading,
        }
    }
}

/// Joint-space state the controllers may read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub time: f64,
    pub fingers: [FingerState; 2],
    pub base_reached: bool,
}

/// Everything the reflex controller sees on one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub kinematics: Kinematics,
    pub proximity: ProximityVector,
    pub contacts: [ContactReading; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HandCommand {
    pub joints: [JointCommand; 2],
    pub advance_base: bool,
}

/// Piecewise-linear joint-space path for both fingers. Intermediate knots
/// keep the tips near a straight Cartesian line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Motion {
    pub start: [JointVector; 2],
    pub goal: [JointVector; 2],
    pub via: Vec<[JointVector; 2]>,
    pub t0: f64,
    pub duration: f64,
}

impl Motion {
    pub fn new(start: [JointVector; 2], goal: [JointVector; 2], t0: f64, duration: f64) -> Self {
        Self::through(start, Vec::new(), goal, t0, duration)
    }

    pub fn through(
        start: [JointVector; 2],
        via: Vec<[JointVector; 2]>,
        goal: [JointVector; 2],
        t0: f64,
        duration: f64,
    ) -> Self {
        Self {
            start,
            goal,
            via,
            t0,
            duration: duration.max(1e-9),
        }
    }

    pub fn done(&self, t: f64) -> bool {
        t >= self.t0 + self.duration
    }

    fn knot(&self, k: usize) -> &[JointVector; 2] {
        if k == 0 {
            &self.start
        } else if k <= self.via.len() {
            &self.via[k - 1]
        } else {
            &self.goal
        }
    }

    /// Position and velocity setpoints at time `t`.
    pub fn sample(&self, t: f64) -> [JointCommand; 2] {
        let segments = self.via.len() + 1;
        let seg_time = self.duration / segments as f64;
        let u = ((t - self.t0) / self.duration).clamp(0.0, 1.0) * segments as f64;
        let moving = u < segments as f64;
        let k = (u.floor() as usize).min(segments - 1);
        let s = u - k as f64;
        let (a, b) = (self.knot(k), self.knot(k + 1));
        let mut out = [JointCommand::default(); 2];
        for (i, cmd) in out.iter_mut().enumerate() {
            for j in 0..JOINTS {
                let delta = b[i][j] - a[i][j];
                cmd.q_des[j] = a[i][j] + s * delta;
                cmd.qd_des[j] = if moving { delta / seg_time } else { 0.0 };
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReflexMode {
    /// Triggers and fields only; an unsuccessful attempt fails.
    Partial,
    /// Adds contact-based re-grasping.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflexState {
    pub phase: GraspPhase,
    pub mode: ReflexMode,
    q_open: [JointVector; 2],
    q_ref: [JointVector; 2],
    motion: Option<Motion>,
    waypoints: VecDeque<[TipTarget; 2]>,
    success_since: Option<f64>,
    stall_since: Option<f64>,
    settle_start: Option<f64>,
    guarded: [bool; 2],
    /// Latest two-contact estimate seen during the current attempt.
    touched: Option<ObjectEstimate>,
    /// Latest proximity-based object guess.
    sensed: Option<ObjectEstimate>,
    confirmed_success: bool,
    pub regrasp_count: u32,
    pub last_branch: Option<RegraspBranch>,
    pub last_triggers: TriggerFlags,
    pub last_estimate: Option<ObjectEstimate>,
}

/// Pull a target back along x until it lies inside the finger's reach,
/// keeping its lateral position.
fn within_reach(f: &FingerState, target: TipTarget) -> TipTarget {
    let reach = 0.98 * f.link_lengths.iter().sum::<f64>();
    let rel = target.position - f.base_offset;
    if rel.norm() <= reach || rel.y.abs() >= reach {
        return target;
    }
    let x = f.base_offset.x + (reach * reach - rel.y * rel.y).sqrt() * rel.x.signum();
    TipTarget::new(x, target.position.y, target.heading)
}

fn clamp_joints(q: &mut JointVector) {
    for a in q.iter_mut() {
        *a = a.clamp(-JOINT_LIMIT + 0.05, JOINT_LIMIT - 0.05);
    }
}

/// Joint angles for the open pose of a finger.
pub fn open_pose(finger: &FingerState, params: &ControllerParams) -> JointVector {
    let t = params.open_target(finger.side);
    reach_toward(finger, t.position, t.heading)
}

/// Approach-phase setpoints: admittance on the proximity field, relaxing to
/// the open pose when no field term is active.
///
/// Returns the updated reference pose and the commands for both fingers.
pub fn approach_command(
    fingers: &[FingerState; 2],
    q_ref: &[JointVector; 2],
    q_open: &[JointVector; 2],
    d: &ProximityVector,
    cfg: &ReflexConfig,
    params: &ControllerParams,
) -> ([JointVector; 2], [JointCommand; 2]) {
    let mut next = *q_ref;
    let mut cmds = [JointCommand::default(); 2];
    for side in Side::BOTH {
        let i = side.index();
        let actual = &fingers[i];
        let force = potential_field_force(side, d, cfg, actual.tip_pose().heading);
        let reference = actual.clone().with_q(q_ref[i]);
        let mut qd = [0.0; JOINTS];
        if force != PlanarVec::ZERO {
            let mut v = force / params.admittance;
            let speed = v.norm();
            if speed > params.max_tip_speed {
                v = v * (params.max_tip_speed / speed);
            }
            qd = tip_velocity_to_joints(&reference, v, params.dls_damping);
        } else {
            let blend = (params.relax_rate * params.dt).min(1.0);
            for j in 0..JOINTS {
                qd[j] = (q_open[i][j] - q_ref[i][j]) * blend / params.dt;
            }
        }
        for j in 0..JOINTS {
            next[i][j] += qd[j] * params.dt;
        }
        clamp_joints(&mut next[i]);
        cmds[i] = JointCommand {
            q_des: next[i],
            qd_des: qd,
            tau_ff: tip_force_to_torques(actual, force),
        };
    }
    (next, cmds)
}

fn tip_speeds(k: &Kinematics) -> [f64; 2] {
    [k.fingers[0].tip_velocity().norm(), k.fingers[1].tip_velocity().norm()]
}

impl ReflexState {
    /// Controller at the start of an approach. `fingers` supplies the hand geometry.
    pub fn new(mode: ReflexMode, fingers: &[FingerState; 2], params: &ControllerParams, time: f64) -> Self {
        let q_open = [open_pose(&fingers[0], params), open_pose(&fingers[1], params)];
        Self {
            phase: GraspPhase::start(time),
            mode,
            q_open,
            q_ref: q_open,
            motion: None,
            waypoints: VecDeque::new(),
            success_since: None,
            stall_since: None,
            settle_start: None,
            guarded: [false; 2],
            touched: None,
            sensed: None,
            confirmed_success: false,
            regrasp_count: 0,
            last_branch: None,
            last_triggers: TriggerFlags::default(),
            last_estimate: None,
        }
    }

    pub fn open_pose(&self) -> [JointVector; 2] {
        self.q_open
    }

    /// Setpoints that hold the current grasp.
    pub fn hold_command(&self) -> [JointCommand; 2] {
        [JointCommand::hold(self.q_ref[0]), JointCommand::hold(self.q_ref[1])]
    }

    fn enter(&mut self, phase: Phase, t: f64) {
        self.phase = self.phase.enter(phase, t);
        self.success_since = None;
        self.stall_since = None;
        self.settle_start = None;
    }

    fn move_tips(
        &mut self,
        fingers: &[FingerState; 2],
        targets: &[TipTarget; 2],
        speed: f64,
        t: f64,
        params: &ControllerParams,
    ) {
        self.move_path(fingers, std::slice::from_ref(targets), speed, t, params);
    }

    /// One motion through a sequence of tip targets, each leg a straight
    /// Cartesian line sampled every `via_spacing`.
    fn move_path(
        &mut self,
        fingers: &[FingerState; 2],
        legs: &[[TipTarget; 2]],
        speed: f64,
        t: f64,
        params: &ControllerParams,
    ) {
        let start = self.q_ref;
        let mut prev = self.q_ref;
        let mut knots = Vec::new();
        let mut travel = 0.0f64;
        for targets in legs {
            let mut goal = prev;
            let mut leg = 0.0f64;
            let mut from = [fingers[0].tip_pose(); 2];
            for side in Side::BOTH {
                let i = side.index();
                let reference = fingers[i].clone().with_q(prev[i]);
                let target = &within_reach(&fingers[i], targets[i]);
                goal[i] = inverse_kinematics_relaxed(&reference, target.position, target.heading, &prev[i])
                    .unwrap_or_else(|| reach_toward(&reference, target.position, target.heading));
                clamp_joints(&mut goal[i]);
                from[i] = reference.tip_pose();
                let reached = reference.clone().with_q(goal[i]).tip_pose().position;
                leg = leg.max(from[i].position.distance(reached));
            }
            let segments = ((leg / params.via_spacing).ceil() as usize).clamp(1, 40);
            let leg_start = prev;
            for k in 1..segments {
                let s = k as f64 / segments as f64;
                let mut knot = prev;
                for i in 0..2 {
                    let end = fingers[i].clone().with_q(goal[i]).tip_pose();
                    let p = from[i].position + (end.position - from[i].position) * s;
                    let h = from[i].heading + normalize_angle(end.heading - from[i].heading) * s;
                    let reference = fingers[i].clone().with_q(prev[i]);
                    if let Some(mut q) = inverse_kinematics_relaxed(&reference, p, h, &prev[i]) {
                        clamp_joints(&mut q);
                        knot[i] = q;
                    } else {
                        for j in 0..JOINTS {
                            knot[i][j] = leg_start[i][j] + s * (goal[i][j] - leg_start[i][j]);
                        }
                    }
                }
                knots.push(knot);
                prev = knot;
            }
            knots.push(goal);
            prev = goal;
            travel += leg;
        }
        let goal = knots.pop().unwrap_or(start);
        let duration = (travel / speed).max(params.min_motion_time);
        self.motion = Some(Motion::through(start, knots, goal, t, duration));
        self.q_ref = goal;
    }

    fn setpoints(&self, t: f64) -> [JointCommand; 2] {
        match &self.motion {
            Some(m) => m.sample(t),
            None => self.hold_command(),
        }
    }

    fn motion_done(&self, t: f64) -> bool {
        self.motion.as_ref().is_none_or(|m| m.done(t))
    }

    /// Track how long a condition has held; true once it has held for `needed`.
    fn held(since: &mut Option<f64>, cond: bool, t: f64, needed: f64) -> bool {
        if !cond {
            *since = None;
            return false;
        }
        let start = *since.get_or_insert(t);
        t - start >= needed - 1e-12
    }

    fn success_now(obs: &Observation, cfg: &ReflexConfig) -> bool {
        let v = tip_speeds(&obs.kinematics);
        evaluate_success(&obs.contacts[0], &obs.contacts[1], v[0], v[1], &obs.proximity, cfg)
    }

    fn tips(obs: &Observation) -> [TipPose; 2] {
        [
            obs.kinematics.fingers[0].tip_pose(),
            obs.kinematics.fingers[1].tip_pose(),
        ]
    }

    fn pinch_is_antipodal(obs: &Observation, params: &ControllerParams, gamma: f64) -> bool {
        let tips = Self::tips(obs);
        let (_, n0) = contact_frame(&tips[0], &obs.contacts[0], params.r_tip);
        let (_, n1) = contact_frame(&tips[1], &obs.contacts[1], params.r_tip);
        antipodal_within([n0, n1], gamma)
    }

    /// Advance the state machine by one controller period.
    pub fn tick(mut self, obs: &Observation, cfg: &ReflexConfig, params: &ControllerParams) -> (HandCommand, Self) {
        let t = obs.kinematics.time;
        let d = &obs.proximity;
        let fingers = &obs.kinematics.fingers;
        self.last_triggers = evaluate_triggers(d, fingers[0].tip_angle(), fingers[1].tip_angle(), cfg);

        let attempting = self.phase.phase.is_regrasp() || matches!(self.phase.phase, Phase::Closing | Phase::Evaluate);
        if attempting && self.phase.timed_out(t, cfg) {
            self.enter(Phase::Failed, t);
            self.motion = None;
        }

        if !self.phase.phase.is_terminal() {
            let tips = Self::tips(obs);
            if let Some(e) = sensed_object(d, [&tips[0], &tips[1]], params) {
                self.sensed = Some(e);
            }
        }
        if self.phase.phase == Phase::Closing || self.phase.phase.is_regrasp() {
            let tips = Self::tips(obs);
            if let Ok(e) = estimate_object([&tips[0], &tips[1]], [&obs.contacts[0], &obs.contacts[1]], params.r_tip) {
                self.touched = Some(e);
            }
        }

        match self.phase.phase {
            Phase::Approach => {
                if self.last_triggers.fires() || obs.kinematics.base_reached {
                    self.phase.grasp_start_time = Some(t);
                    self.enter(Phase::Closing, t);
                    self.begin_closing(fingers, d.d_palm, t, params);
                } else {
                    let (next, joints) = approach_command(fingers, &self.q_ref, &self.q_open, d, cfg, params);
                    self.q_ref = next;
                    return (
                        HandCommand {
                            joints,
                            advance_base: true,
                        },
                        self,
                    );
                }
            }
            Phase::Closing => {
                self.guard_contacts(obs, t, params);
                if Self::held(
                    &mut self.success_since,
                    Self::success_now(obs, cfg),
                    t,
                    params.success_hold,
                ) {
                    self.confirmed_success = true;
                    self.enter(Phase::Evaluate, t);
                } else if self.motion_done(t) {
                    let v = tip_speeds(&obs.kinematics);
                    let still = v[0] < cfg.gamma_v && v[1] < cfg.gamma_v;
                    if Self::held(&mut self.stall_since, still, t, params.stall_time) {
                        self.enter(Phase::Evaluate, t);
                    }
                }
            }
            Phase::Evaluate => self.evaluate(obs, cfg, params),
            Phase::RegraspPinchPull | Phase::RegraspAntipodal | Phase::RegraspPowerWrap => {
                if self.motion_done(t) {
                    if let Some(targets) = self.waypoints.pop_front() {
                        self.move_tips(fingers, &targets, params.waypoint_speed, t, params);
                    } else {
                        let settle_start = *self.settle_start.get_or_insert(t);
                        let v = tip_speeds(&obs.kinematics);
                        let still = v[0] < cfg.gamma_v && v[1] < cfg.gamma_v;
                        let success = Self::held(
                            &mut self.success_since,
                            Self::success_now(obs, cfg),
                            t,
                            params.success_hold,
                        );
                        let stalled = Self::held(&mut self.stall_since, still, t, params.stall_time);
                        if success || stalled || t - settle_start >= params.settle_timeout {
                            self.confirmed_success = success;
                            self.enter(Phase::Evaluate, t);
                        }
                    }
                }
            }
            Phase::Transport | Phase::Succeeded | Phase::Failed => {}
        }
        let joints = self.setpoints(t);
        (
            HandCommand {
                joints,
                advance_base: false,
            },
            self,
        )
    }

    fn begin_closing(&mut self, fingers: &[FingerState; 2], d_palm: f64, t: f64, params: &ControllerParams) {
        self.guarded = [false; 2];
        self.touched = None;
        let seen = if d_palm < D_MAX {
            d_palm + params.close_depth
        } else {
            0.0
        };
        let mut x = seen.max(params.open_tip.x);
        for (f, q) in fingers.iter().zip(&self.q_ref) {
            x = x.max(f.clone().with_q(*q).tip_pose().position.x);
        }
        let targets = [TipTarget::new(x, 0.0, 0.0); 2];
        // A tip folded back by the approach field would sweep into the object
        // from behind, so it first returns to the open line.
        let mut staged = false;
        let stage: [TipTarget; 2] = std::array::from_fn(|i| {
            let side = Side::BOTH[i];
            let tip = fingers[i].clone().with_q(self.q_ref[i]).tip_pose();
            if tip.position.x < x - params.stage_margin {
                staged = true;
                let open = params.open_target(side);
                let y = side.sign() * (side.sign() * tip.position.y).max(open.position.y.abs());
                TipTarget::new(x, y, open.heading)
            } else {
                TipTarget::new(tip.position.x, tip.position.y, tip.heading)
            }
        });
        if staged {
            self.move_path(fingers, &[stage, targets], params.closing_speed, t, params);
        } else {
            self.move_tips(fingers, &targets, params.closing_speed, t, params);
        }
    }

    /// Stop a closing finger at first contact, leaving a bounded squeeze
    /// toward the centerline.
    fn guard_contacts(&mut self, obs: &Observation, t: f64, params: &ControllerParams) {
        let fingers = &obs.kinematics.fingers;
        let fresh: Vec<Side> = Side::BOTH
            .into_iter()
            .filter(|s| obs.contacts[s.index()].in_contact && !self.guarded[s.index()])
            .collect();
        if fresh.is_empty() {
            return;
        }
        let Some(motion) = self.motion.take() else { return };
        let now = motion.sample(t);
        let start = [now[0].q_des, now[1].q_des];
        let mut goal = motion.goal;
        for side in fresh {
            let i = side.index();
            self.guarded[i] = true;
            let tip = fingers[i].tip_pose();
            let (_, n) = contact_frame(&tip, &obs.contacts[i], params.r_tip);
            // Squeezing an object that sits ahead of the tip only pushes it away.
            let squeeze = if n.x > params.push_limit {
                params.preload
            } else {
                params.squeeze
            };
            let y = tip.position.y - side.sign() * squeeze;
            let y = if side.sign() * y < 0.0 { 0.0 } else { y };
            let reference = fingers[i].clone();
            goal[i] = inverse_kinematics_relaxed(
                &reference,
                PlanarVec::new(tip.position.x, y),
                tip.heading,
                &fingers[i].q,
            )
            .unwrap_or_else(|| reach_toward(&reference, PlanarVec::new(tip.position.x, y), tip.heading));
            clamp_joints(&mut goal[i]);
        }
        let remaining = (motion.t0 + motion.duration - t).max(params.min_motion_time);
        self.motion = Some(Motion::new(start, goal, t, remaining));
        self.q_ref = goal;
    }

    fn evaluate(&mut self, obs: &Observation, cfg: &ReflexConfig, params: &ControllerParams) {
        let t = obs.kinematics.time;
        let mut success = self.confirmed_success || Self::success_now(obs, cfg);
        self.confirmed_success = false;
        // The closing grasp is a pinch too; only the full controller can act on a rejection.
        let pinch = self
            .last_branch
            .map_or(self.mode == ReflexMode::Full, RegraspBranch::is_pinch);
        if success && cfg.antipodal_check && pinch {
            success = Self::pinch_is_antipodal(obs, params, cfg.gamma_a);
        }
        if success {
            self.motion = None;
            self.enter(Phase::Transport, t);
            return;
        }
        if self.mode == ReflexMode::Partial || self.phase.timed_out(t, cfg) {
            self.motion = None;
            self.enter(Phase::Failed, t);
            return;
        }
        let tips = Self::tips(obs);
        let estimate = estimate_object([&tips[0], &tips[1]], [&obs.contacts[0], &obs.contacts[1]], params.r_tip)
            .ok()
            .or(self.touched.take());
        let fallback = self
            .sensed
            .unwrap_or_else(|| default_object(obs.proximity.d_palm, params));
        let plan = plan_regrasp(estimate.as_ref(), [&tips[0], &tips[1]], &fallback, cfg, params);
        self.last_estimate = estimate;
        self.last_branch = Some(plan.branch);
        self.regrasp_count += 1;
        self.touched = None;
        self.waypoints = plan.waypoints.into();
        self.enter(plan.branch.phase(), t);
        if let Some(first) = self.waypoints.pop_front() {
            self.move_tips(&obs.kinematics.fingers, &first, params.waypoint_speed, t, params);
        }
    }
}
