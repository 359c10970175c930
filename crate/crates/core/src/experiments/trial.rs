//! One simulated pick-and-place: approach, grasp, and transport.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ControllerKind, Outcome};
use crate::baseline::BaselineState;
use crate::config::ReflexConfig;
use crate::finger::{command_torque, FingerState, JointCommand, JointGains, Side};
use crate::geometry::{DiskObject, GripperFrame, PlanarVec};
use crate::reflex::{ControllerParams, HandCommand, Kinematics, Observation, Phase, ReflexMode, ReflexState};
use crate::sensing::{sample_proximity, sense_contact, sensor_rays, HeldSensors, SensorNoise};
use crate::world::{
    grasped_object, transport_check, ContactResolution, HoldVerdict, PhysicsParams, SimObject, TransportParams,
    WorldState,
};

/// Simulation settings shared by every trial of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub physics: PhysicsParams,
    pub gains: JointGains,
    pub transport: TransportParams,
    pub controller: ControllerParams,
    pub noise: Option<SensorNoise>,
    /// Base speed while approaching, m/s.
    pub approach_speed: f64,
    /// Physics steps per controller tick.
    pub control_every: u32,
    /// Physics steps per sensor refresh.
    pub sense_every: u32,
    /// Simulated time after which an unfinished trial counts as failed.
    pub max_time: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            physics: PhysicsParams::default(),
            gains: JointGains::default(),
            transport: TransportParams::default(),
            controller: ControllerParams::default(),
            noise: Some(SensorNoise::default()),
            approach_speed: 0.15,
            control_every: 4,
            sense_every: 6,
            max_time: 20.0,
        }
    }
}

/// Objects on the table and the commanded grasp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub objects: Vec<DiskObject>,
    /// The object the grasp is meant for.
    pub target_object: Option<u32>,
    /// Commanded grasp location in the world.
    pub target: PlanarVec,
    /// Initial gripper position; the gripper faces the target.
    pub start: PlanarVec,
    pub place: PlanarVec,
}

impl Scene {
    /// A single object with the grasp commanded at `target` from the origin.
    pub fn single(object: Option<DiskObject>, target: PlanarVec) -> Self {
        Self {
            target_object: object.as_ref().map(|o| o.id),
            objects: object.into_iter().collect(),
            target,
            start: PlanarVec::ZERO,
            place: PlanarVec::ZERO,
        }
    }

    fn start_frame(&self) -> GripperFrame {
        let heading = (self.target - self.start).angle();
        GripperFrame::new(self.start, heading)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub controller: ControllerKind,
    pub object_id: Option<u32>,
    pub object_class: String,
    pub object_x: Option<f64>,
    pub object_y: Option<f64>,
    pub object_radius: Option<f64>,
    pub target_x: f64,
    pub target_y: f64,
    pub outcome: Outcome,
    pub pick_time: f64,
    pub place_time: f64,
    pub regrasp_count: u32,
    pub seed: u64,
    pub diverged: bool,
    pub note: String,
}

/// One row per controller tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRow {
    pub time: f64,
    pub phase: Phase,
    pub beta_near: Option<bool>,
    pub beta_far: Option<bool>,
    pub beta_tips: Option<bool>,
    pub beta_occlude: Option<bool>,
    pub branch: Option<String>,
    pub d_l_out: f64,
    pub d_l_forward: f64,
    pub d_l_in: f64,
    pub d_palm: f64,
    pub d_r_in: f64,
    pub d_r_forward: f64,
    pub d_r_out: f64,
    pub contact_l: bool,
    pub f_l: f64,
    pub contact_r: bool,
    pub f_r: f64,
    pub tip_l_x: f64,
    pub tip_l_y: f64,
    pub tip_r_x: f64,
    pub tip_r_y: f64,
    pub base_x: f64,
    pub base_y: f64,
    /// `id:x:y` joined with `;`.
    pub objects: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRun {
    pub record: TrialRecord,
    pub events: Vec<EventRow>,
    /// Objects left in the world at the end, in world coordinates.
    pub final_objects: Vec<DiskObject>,
    /// Simulated seconds, including transport.
    pub sim_time: f64,
}

enum Active {
    Reflex(ReflexState),
    Baseline(BaselineState),
}

impl Active {
    fn phase(&self) -> Phase {
        match self {
            Active::Reflex(s) => s.phase.phase,
            Active::Baseline(s) => s.phase,
        }
    }

    fn hold(&self) -> [JointCommand; 2] {
        match self {
            Active::Reflex(s) => s.hold_command(),
            Active::Baseline(s) => s.hold_command(),
        }
    }

    fn regrasps(&self) -> u32 {
        match self {
            Active::Reflex(s) => s.regrasp_count,
            Active::Baseline(_) => 0,
        }
    }
}

fn event_row(world: &WorldState, sensors: &HeldSensors, active: &Active) -> EventRow {
    let d = sensors.proximity;
    let (triggers, branch) = match active {
        Active::Reflex(s) => (Some(s.last_triggers), s.last_branch.map(|b| b.label().to_string())),
        Active::Baseline(_) => (None, None),
    };
    let tl = world.tip_world(Side::Left);
    let tr = world.tip_world(Side::Right);
    let objects = world
        .objects
        .iter()
        .map(|o| format!("{}:{:.6}:{:.6}", o.disk.id, o.disk.center.x, o.disk.center.y))
        .collect::<Vec<_>>()
        .join(";");
    EventRow {
        time: world.time,
        phase: active.phase(),
        beta_near: triggers.map(|t| t.beta_near),
        beta_far: triggers.map(|t| t.beta_far),
        beta_tips: triggers.map(|t| t.beta_tips),
        beta_occlude: triggers.map(|t| t.beta_occlude),
        branch,
        d_l_out: d.d_l_out,
        d_l_forward: d.d_l_forward,
        d_l_in: d.d_l_in,
        d_palm: d.d_palm,
        d_r_in: d.d_r_in,
        d_r_forward: d.d_r_forward,
        d_r_out: d.d_r_out,
        contact_l: sensors.contacts[0].in_contact,
        f_l: sensors.contacts[0].f_normal,
        contact_r: sensors.contacts[1].in_contact,
        f_r: sensors.contacts[1].f_normal,
        tip_l_x: tl.x,
        tip_l_y: tl.y,
        tip_r_x: tr.x,
        tip_r_y: tr.y,
        base_x: world.gripper.frame.origin.x,
        base_y: world.gripper.frame.origin.y,
        objects,
    }
}

fn refresh_sensors(
    world: &WorldState,
    contacts: &ContactResolution,
    params: &SimParams,
    rng: &mut ChaCha8Rng,
) -> HeldSensors {
    let rays = sensor_rays(world, params.physics.r_tip);
    let heading = world.gripper.frame.heading();
    let read = |side: Side, rng: &mut ChaCha8Rng| {
        let h = heading + world.finger(side).tip_pose().heading;
        match &params.noise {
            Some(n) => sense_contact(contacts, side, h, Some((n, rng))),
            None => sense_contact::<ChaCha8Rng>(contacts, side, h, None),
        }
    };
    let left = read(Side::Left, rng);
    let right = read(Side::Right, rng);
    HeldSensors {
        proximity: sample_proximity(world, &rays),
        contacts: [left, right],
        sampled_at: world.time,
    }
}

/// Run one full pick-and-place.
///
/// `object_diameter` is the width handed to the baseline controller; the
/// reflex controllers ignore it. Deterministic in all inputs.
pub fn run_trial(
    kind: ControllerKind,
    scene: &Scene,
    object_diameter: f64,
    cfg: &ReflexConfig,
    params: &SimParams,
    seed: u64,
    log_events: bool,
) -> TrialRun {
    let frame = scene.start_frame();
    let base_fingers = [FingerState::new(Side::Left), FingerState::new(Side::Right)];
    let cp = &params.controller;
    let mut active = match kind {
        ControllerKind::Baseline => Active::Baseline(BaselineState::new(&base_fingers, object_diameter, cfg, cp, 0.0)),
        ControllerKind::Partial | ControllerKind::Full => {
            let mode = if kind == ControllerKind::Full {
                ReflexMode::Full
            } else {
                ReflexMode::Partial
            };
            Active::Reflex(ReflexState::new(mode, &base_fingers, cp, 0.0))
        }
    };
    let q0 = match &active {
        Active::Reflex(s) => s.open_pose(),
        Active::Baseline(s) => s.open_pose(),
    };
    let fingers = [
        base_fingers[0].clone().with_q(q0[0]),
        base_fingers[1].clone().with_q(q0[1]),
    ];
    let mut world = WorldState::new(frame, fingers, seed);
    world.objects = scene.objects.iter().cloned().map(SimObject::at_rest).collect();

    let target_obj = scene
        .target_object
        .and_then(|id| scene.objects.iter().find(|o| o.id == id));
    let mut record = TrialRecord {
        controller: kind,
        object_id: scene.target_object,
        object_class: target_obj.map(|o| o.class_label.clone()).unwrap_or_default(),
        object_x: target_obj.map(|o| o.center.x),
        object_y: target_obj.map(|o| o.center.y),
        object_radius: target_obj.map(|o| o.radius),
        target_x: scene.target.x,
        target_y: scene.target.y,
        outcome: Outcome::Failed,
        pick_time: 0.0,
        place_time: 0.0,
        regrasp_count: 0,
        seed,
        diverged: false,
        note: String::new(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forward = frame.forward();
    let base_goal = scene.target - forward * cp.grasp_offset;
    let dt = params.physics.dt;
    let mut events = Vec::new();
    let mut contacts = world.resolve_contacts(&params.physics);
    let mut sensors = HeldSensors::default();
    let mut command = HandCommand::default();
    let mut command_time = 0.0;
    let mut step: u64 = 0;

    loop {
        if step.is_multiple_of(params.sense_every as u64) {
            sensors = refresh_sensors(&world, &contacts, params, &mut rng);
        }
        if step.is_multiple_of(params.control_every as u64) {
            let remaining = (base_goal - world.gripper.frame.origin).dot(forward);
            let kin = Kinematics {
                time: world.time,
                fingers: world.fingers.clone(),
                base_reached: remaining <= 1e-9,
            };
            let (cmd, next) = match active {
                Active::Reflex(s) => {
                    let obs = Observation {
                        kinematics: kin,
                        proximity: sensors.proximity,
                        contacts: sensors.contacts,
                    };
                    let (c, n) = s.tick(&obs, cfg, cp);
                    (c, Active::Reflex(n))
                }
                Active::Baseline(s) => {
                    let (c, n) = s.tick(&kin);
                    (c, Active::Baseline(n))
                }
            };
            active = next;
            command = cmd;
            command_time = world.time;
            if log_events {
                events.push(event_row(&world, &sensors, &active));
            }
            match active.phase() {
                Phase::Transport => {
                    record.pick_time = world.time;
                    let in_hand = grasped_object(&world.resolve_contacts(&params.physics));
                    match transport_check(
                        &mut world,
                        &active.hold(),
                        &params.gains,
                        scene.place,
                        &params.physics,
                        &params.transport,
                    ) {
                        Ok(report) => {
                            record.place_time = report.duration;
                            record.outcome = match (in_hand, report.verdict) {
                                (None, _) => Outcome::Failed,
                                (Some(id), HoldVerdict::Held) if Some(id) == scene.target_object => Outcome::Succeeded,
                                (Some(id), HoldVerdict::Held) => {
                                    record.note = format!("held object {id} instead of target");
                                    Outcome::Dropped
                                }
                                (Some(_), HoldVerdict::Dropped) => Outcome::Dropped,
                            };
                        }
                        Err(e) => {
                            record.diverged = true;
                            record.note = e.to_string();
                            record.outcome = Outcome::Failed;
                        }
                    }
                    if log_events {
                        let mut row = event_row(&world, &sensors, &active);
                        row.phase = if record.outcome.is_success() {
                            Phase::Succeeded
                        } else {
                            Phase::Failed
                        };
                        events.push(row);
                    }
                    break;
                }
                Phase::Failed => {
                    record.pick_time = world.time;
                    break;
                }
                _ => {}
            }
            if world.time > params.max_time {
                record.pick_time = world.time;
                record.note = "time limit".into();
                break;
            }
        }

        world.gripper.velocity = if command.advance_base {
            let remaining = (base_goal - world.gripper.frame.origin).dot(forward).max(0.0);
            forward * params.approach_speed.min(remaining / dt)
        } else {
            PlanarVec::ZERO
        };
        let lead = world.time - command_time;
        let torques = [0, 1].map(|i| {
            let c = &command.joints[i];
            let mut shifted = *c;
            for j in 0..c.q_des.len() {
                shifted.q_des[j] += c.qd_des[j] * lead;
            }
            command_torque(&shifted, &world.fingers[i], &params.gains)
        });
        match world.step(&torques, &params.physics) {
            Ok(c) => contacts = c,
            Err(e) => {
                record.pick_time = world.time;
                record.diverged = true;
                record.note = e.to_string();
                break;
            }
        }
        step += 1;
    }
    record.regrasp_count = active.regrasps();
    TrialRun {
        sim_time: world.time,
        final_objects: world.objects.into_iter().map(|o| o.disk).collect(),
        record,
        events,
    }
}

/// Simulated seconds per wall-clock second for a single-object trial run on
/// the calling thread.
pub fn measure_realtime_factor(cfg: &ReflexConfig, params: &SimParams) -> f64 {
    let cup = DiskObject::new(0, PlanarVec::new(0.30, 0.0), 0.0325, 0.2, "cup").expect("valid disk");
    let scene = Scene::single(Some(cup), PlanarVec::new(0.30, 0.0));
    let started = Instant::now();
    let mut simulated = 0.0;
    while started.elapsed().as_secs_f64() < 0.5 {
        simulated += run_trial(ControllerKind::Full, &scene, 0.065, cfg, params, 1, false).sim_time;
    }
    simulated / started.elapsed().as_secs_f64()
}
