//! Fixed-timestep planar physics for disks, fingertips, and the gripper base.
//!
//! Objects are disks sliding on a table with Coulomb ground friction.
//! Fingertips are disks at the end of two torque-driven three-joint fingers.
//! The gripper base (palm) moves kinematically. Contacts are penalty springs
//! with damping and regularized Coulomb friction.

use serde::{Deserialize, Serialize};

use crate::finger::{
    command_torque, tip_force_to_torques, FingerState, JointCommand, JointGains, JointVector, Side, JOINTS, JOINT_LIMIT,
};
use crate::geometry::{gripper_to_world, world_to_gripper, DiskObject, GripperFrame, PlanarVec};
use crate::Error;

/// Physics rate in Hz.
pub const PHYSICS_HZ: u32 = 1200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    pub dt: f64,
    pub r_tip: f64,
    pub k_contact: f64,
    pub b_contact: f64,
    /// Penetration over which contact damping ramps in, so that force
    /// vanishes at zero penetration.
    pub damping_ramp: f64,
    pub mu: f64,
    /// Slope of the regularized friction law below the Coulomb bound (N s/m).
    pub friction_viscosity: f64,
    /// Tangential stiffness of a sticking fingertip contact (N/m).
    pub stick_stiffness: f64,
    /// Tangential damping of a sticking fingertip contact (N s/m).
    pub stick_damping: f64,
    pub ground_decel: f64,
    pub v_max: f64,
    /// Reflected actuator inertia per joint (kg m^2).
    pub joint_inertia: JointVector,
    /// Viscous joint friction (N m s/rad).
    pub joint_damping: JointVector,
    pub stop_stiffness: f64,
    pub palm_half_width: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            dt: 1.0 / PHYSICS_HZ as f64,
            r_tip: 0.012,
            k_contact: 2000.0,
            b_contact: 20.0,
            damping_ramp: 1e-4,
            mu: 0.6,
            friction_viscosity: 30.0,
            stick_stiffness: 1000.0,
            stick_damping: 2.0,
            ground_decel: 0.5,
            v_max: 2.0,
            joint_inertia: [0.002, 0.0012, 0.0006],
            joint_damping: [0.04, 0.03, 0.02],
            stop_stiffness: 10.0,
            palm_half_width: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimObject {
    pub disk: DiskObject,
    pub velocity: PlanarVec,
}

impl SimObject {
    pub fn at_rest(disk: DiskObject) -> Self {
        Self {
            disk,
            velocity: PlanarVec::ZERO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripperBody {
    pub frame: GripperFrame,
    /// Commanded base velocity in the world frame.
    pub velocity: PlanarVec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub time: f64,
    pub objects: Vec<SimObject>,
    pub gripper: GripperBody,
    pub fingers: [FingerState; 2],
    pub rng_seed: u64,
    /// Tangential spring stretch of each sticking fingertip contact.
    pub sticks: Vec<Stick>,
}

/// Elastic tangential state of one fingertip-object contact. The spring
/// slips whenever its force would leave the friction cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stick {
    pub tip: Side,
    pub object_id: u32,
    pub stretch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactPair {
    pub tip: Side,
    pub object_id: u32,
    pub object_index: usize,
    /// Contact point in the world, on the fingertip surface.
    pub point: PlanarVec,
    /// Unit normal in the world, pointing from the fingertip into the object.
    pub normal: PlanarVec,
    pub penetration: f64,
    pub normal_force: f64,
    /// Friction force on the object along `normal.perp()`.
    pub tangential_force: f64,
    /// Object velocity relative to the tip along `normal.perp()`.
    pub slip: f64,
}

impl ContactPair {
    /// Total force the fingertip applies to the object, world frame.
    pub fn force_on_object(&self) -> PlanarVec {
        self.normal * self.normal_force + self.normal.perp() * self.tangential_force
    }
}

/// Contact between an object and the palm or another object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyContact {
    /// Index of the object that receives `force`.
    pub object_index: usize,
    /// Index of the other object, or `None` for the palm.
    pub other_index: Option<usize>,
    pub penetration: f64,
    /// Force on `object_index`; the other body receives the opposite.
    pub force: PlanarVec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContactResolution {
    pub pairs: Vec<ContactPair>,
    pub body_contacts: Vec<BodyContact>,
}

impl ContactResolution {
    pub fn pairs_for(&self, tip: Side) -> impl Iterator<Item = &ContactPair> {
        self.pairs.iter().filter(move |p| p.tip == tip)
    }
}

/// Normal and friction forces for two touching bodies.
///
/// `normal` points from body A into body B; `rel_velocity` is v_B - v_A.
/// With `stretch` the friction comes from a tangential spring, otherwise
/// from a steep viscous law. Either way it is clamped to the friction cone.
/// Returns (normal force, tangential force on B along normal.perp()).
fn contact_forces(
    penetration: f64,
    normal: PlanarVec,
    rel_velocity: PlanarVec,
    stretch: Option<f64>,
    p: &PhysicsParams,
) -> (f64, f64) {
    if penetration <= 0.0 {
        return (0.0, 0.0);
    }
    let closing = -rel_velocity.dot(normal);
    let ramp = (penetration / p.damping_ramp).min(1.0);
    let fn_ = (p.k_contact * penetration + p.b_contact * closing * ramp).max(0.0);
    let slip = rel_velocity.dot(normal.perp());
    let bound = p.mu * fn_;
    let raw = match stretch {
        Some(s) => -p.stick_stiffness * s - p.stick_damping * slip,
        None => -p.friction_viscosity * slip,
    };
    (fn_, raw.clamp(-bound, bound))
}

impl WorldState {
    pub fn new(gripper: GripperFrame, fingers: [FingerState; 2], rng_seed: u64) -> Self {
        Self {
            time: 0.0,
            objects: Vec::new(),
            gripper: GripperBody {
                frame: gripper,
                velocity: PlanarVec::ZERO,
            },
            fingers,
            rng_seed,
            sticks: Vec::new(),
        }
    }

    pub fn finger(&self, side: Side) -> &FingerState {
        &self.fingers[side.index()]
    }

    pub fn object(&self, id: u32) -> Option<&SimObject> {
        self.objects.iter().find(|o| o.disk.id == id)
    }

    pub fn remove_object(&mut self, id: u32) -> Option<SimObject> {
        let idx = self.objects.iter().position(|o| o.disk.id == id)?;
        Some(self.objects.remove(idx))
    }

    /// Fingertip center in the world.
    pub fn tip_world(&self, side: Side) -> PlanarVec {
        gripper_to_world(self.finger(side).tip_pose().position, &self.gripper.frame)
    }

    /// Fingertip velocity in the world.
    pub fn tip_world_velocity(&self, side: Side) -> PlanarVec {
        self.gripper.velocity + self.gripper.frame.vector_to_world(self.finger(side).tip_velocity())
    }

    /// Find all contacts and their forces at the current state.
    pub fn resolve_contacts(&self, p: &PhysicsParams) -> ContactResolution {
        let mut out = ContactResolution::default();
        for side in Side::BOTH {
            let tip = self.tip_world(side);
            let tip_v = self.tip_world_velocity(side);
            for (idx, obj) in self.objects.iter().enumerate() {
                let delta = obj.disk.center - tip;
                let dist = delta.norm();
                let reach = obj.disk.radius + p.r_tip;
                if dist > reach + 1e-12 {
                    continue;
                }
                let normal = delta.normalized().unwrap_or_else(|| self.gripper.frame.forward());
                let penetration = (reach - dist).max(0.0);
                let stretch = self
                    .sticks
                    .iter()
                    .find(|s| s.tip == side && s.object_id == obj.disk.id)
                    .map_or(0.0, |s| s.stretch);
                let rel = obj.velocity - tip_v;
                let (fn_, ft) = contact_forces(penetration, normal, rel, Some(stretch), p);
                out.pairs.push(ContactPair {
                    tip: side,
                    object_id: obj.disk.id,
                    object_index: idx,
                    point: tip + normal * p.r_tip,
                    normal,
                    penetration,
                    normal_force: fn_,
                    tangential_force: ft,
                    slip: rel.dot(normal.perp()),
                });
            }
        }

        // Palm: a segment along the gripper y axis through the origin.
        let frame = &self.gripper.frame;
        for (idx, obj) in self.objects.iter().enumerate() {
            let local = world_to_gripper(obj.disk.center, frame);
            let closest = PlanarVec::new(0.0, local.y.clamp(-p.palm_half_width, p.palm_half_width));
            let delta = local - closest;
            let dist = delta.norm();
            if dist > obj.disk.radius {
                continue;
            }
            let normal_local = delta.normalized().unwrap_or(PlanarVec::new(1.0, 0.0));
            let normal = frame.vector_to_world(normal_local);
            let penetration = obj.disk.radius - dist;
            let (fn_, ft) = contact_forces(penetration, normal, obj.velocity - self.gripper.velocity, None, p);
            out.body_contacts.push(BodyContact {
                object_index: idx,
                other_index: None,
                penetration,
                force: normal * fn_ + normal.perp() * ft,
            });
        }

        for i in 0..self.objects.len() {
            for j in (i + 1)..self.objects.len() {
                let (a, b) = (&self.objects[i], &self.objects[j]);
                let delta = b.disk.center - a.disk.center;
                let dist = delta.norm();
                let reach = a.disk.radius + b.disk.radius;
                if dist > reach {
                    continue;
                }
                let normal = delta.normalized().unwrap_or(PlanarVec::new(1.0, 0.0));
                let penetration = reach - dist;
                let (fn_, ft) = contact_forces(penetration, normal, b.velocity - a.velocity, None, p);
                out.body_contacts.push(BodyContact {
                    object_index: j,
                    other_index: Some(i),
                    penetration,
                    force: normal * fn_ + normal.perp() * ft,
                });
            }
        }
        out
    }

    /// Advance one fixed timestep with the given joint torques.
    ///
    /// Returns the contact resolution computed at the start of the step.
    pub fn step(&mut self, torques: &[JointVector; 2], p: &PhysicsParams) -> Result<ContactResolution, Error> {
        for (side, tau) in Side::BOTH.iter().zip(torques) {
            if tau.iter().any(|t| !t.is_finite()) {
                return Err(Error::Diverged {
                    component: format!("{} finger torque command", side.label()),
                });
            }
        }
        let contacts = self.resolve_contacts(p);
        let dt = p.dt;

        let mut object_force = vec![PlanarVec::ZERO; self.objects.len()];
        let mut tip_force = [PlanarVec::ZERO; 2];
        for pair in &contacts.pairs {
            let f = pair.force_on_object();
            object_force[pair.object_index] += f;
            tip_force[pair.tip.index()] -= f;
        }
        for c in &contacts.body_contacts {
            object_force[c.object_index] += c.force;
            if let Some(other) = c.other_index {
                object_force[other] -= c.force;
            }
        }

        for side in Side::BOTH {
            let i = side.index();
            let local_force = self.gripper.frame.vector_to_gripper(tip_force[i]);
            let finger = &mut self.fingers[i];
            let contact_tau = tip_force_to_torques(finger, local_force);
            for j in 0..JOINTS {
                let mut tau = torques[i][j] + contact_tau[j] - p.joint_damping[j] * finger.qd[j];
                let q = finger.q[j];
                if q > JOINT_LIMIT {
                    tau -= p.stop_stiffness * (q - JOINT_LIMIT);
                } else if q < -JOINT_LIMIT {
                    tau -= p.stop_stiffness * (q + JOINT_LIMIT);
                }
                finger.qd[j] += tau / p.joint_inertia[j] * dt;
                finger.q[j] += finger.qd[j] * dt;
            }
        }

        let decel = p.ground_decel * dt;
        for (obj, force) in self.objects.iter_mut().zip(&object_force) {
            let mut v = obj.velocity + *force * (dt / obj.disk.mass);
            let speed = v.norm();
            if speed <= decel {
                v = PlanarVec::ZERO;
            } else {
                let capped = (speed - decel).min(p.v_max);
                v = v * (capped / speed);
            }
            obj.velocity = v;
            obj.disk.center += v * dt;
        }

        self.gripper.frame.origin += self.gripper.velocity * dt;
        self.sticks = contacts
            .pairs
            .iter()
            .filter(|c| c.normal_force > 0.0)
            .map(|c| {
                let old = self
                    .sticks
                    .iter()
                    .find(|s| s.tip == c.tip && s.object_id == c.object_id)
                    .map_or(0.0, |s| s.stretch);
                let limit = p.mu * c.normal_force / p.stick_stiffness;
                Stick {
                    tip: c.tip,
                    object_id: c.object_id,
                    stretch: (old + c.slip * dt).clamp(-limit, limit),
                }
            })
            .collect();
        self.time += dt;
        self.check_finite()?;
        Ok(contacts)
    }

    fn check_finite(&self) -> Result<(), Error> {
        for f in &self.fingers {
            if f.q.iter().chain(&f.qd).any(|v| !v.is_finite()) {
                return Err(Error::Diverged {
                    component: format!("{} finger joint state", f.side.label()),
                });
            }
        }
        for o in &self.objects {
            if !(o.disk.center.is_finite() && o.velocity.is_finite()) {
                return Err(Error::Diverged {
                    component: format!("object {}", o.disk.id),
                });
            }
        }
        if !self.gripper.frame.origin.is_finite() {
            return Err(Error::Diverged {
                component: "gripper base".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportParams {
    pub speed: f64,
    pub accel: f64,
    /// Maximum drift of the object in the gripper frame.
    pub max_shift: f64,
    /// Minimum normal force on each fingertip.
    pub gamma_f: f64,
}

impl Default for TransportParams {
    fn default() -> Self {
        Self {
            speed: 0.2,
            accel: 1.0,
            max_shift: 0.02,
            gamma_f: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HoldVerdict {
    Held,
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    pub verdict: HoldVerdict,
    pub object_id: Option<u32>,
    /// Base travel before the verdict was reached.
    pub traveled: f64,
    /// Simulated duration of the transport.
    pub duration: f64,
}

/// Id of the object both fingertips currently touch, if any.
pub fn grasped_object(contacts: &ContactResolution) -> Option<u32> {
    contacts.pairs_for(Side::Left).find_map(|l| {
        contacts
            .pairs_for(Side::Right)
            .any(|r| r.object_id == l.object_id)
            .then_some(l.object_id)
    })
}

/// Carry the grasped object to `place_target` and judge whether it stayed held.
///
/// The base moves in a straight line with a trapezoidal speed profile while
/// the fingers hold `hold`. The verdict is `Held` iff both fingertips keep
/// touching the object with more than `gamma_f` normal force at every step and
/// the object stays within `max_shift` of where it started in the gripper frame.
pub fn transport_check(
    world: &mut WorldState,
    hold: &[JointCommand; 2],
    gains: &JointGains,
    place_target: PlanarVec,
    physics: &PhysicsParams,
    params: &TransportParams,
) -> Result<TransportReport, Error> {
    let start_time = world.time;
    let start = world.gripper.frame.origin;
    let total = (place_target - start).norm();
    let report = |world: &WorldState, verdict, object_id, traveled| TransportReport {
        verdict,
        object_id,
        traveled,
        duration: world.time - start_time,
    };
    if total <= 1e-12 {
        return Ok(report(world, HoldVerdict::Held, None, 0.0));
    }
    let dir = (place_target - start) / total;

    let initial = world.resolve_contacts(physics);
    let Some(object_id) = grasped_object(&initial) else {
        return Ok(report(world, HoldVerdict::Dropped, None, 0.0));
    };
    let local_start = world_to_gripper(
        world.object(object_id).expect("contact object exists").disk.center,
        &world.gripper.frame,
    );

    let mut speed = 0.0_f64;
    let mut traveled = 0.0_f64;
    loop {
        let remaining = total - traveled;
        if remaining <= 1e-9 {
            world.gripper.velocity = PlanarVec::ZERO;
            return Ok(report(world, HoldVerdict::Held, Some(object_id), traveled));
        }
        speed = (speed + params.accel * physics.dt)
            .min(params.speed)
            .min((2.0 * params.accel * remaining).sqrt())
            .min(remaining / physics.dt);
        world.gripper.velocity = dir * speed;
        let torques = [
            command_torque(&hold[0], &world.fingers[0], gains),
            command_torque(&hold[1], &world.fingers[1], gains),
        ];
        let contacts = world.step(&torques, physics)?;
        traveled += speed * physics.dt;

        let gripping = Side::BOTH.iter().all(|&s| {
            contacts
                .pairs_for(s)
                .any(|p| p.object_id == object_id && p.normal_force > params.gamma_f)
        });
        let shift = world
            .object(object_id)
            .map(|o| (world_to_gripper(o.disk.center, &world.gripper.frame) - local_start).norm())
            .unwrap_or(f64::INFINITY);
        if !gripping || shift > params.max_shift {
            world.gripper.velocity = PlanarVec::ZERO;
            return Ok(report(world, HoldVerdict::Dropped, Some(object_id), traveled));
        }
    }
}
