//! Planar three-joint finger: kinematics, Jacobian, and the joint torque law.

use serde::{Deserialize, Serialize};

use crate::geometry::{normalize_angle, PlanarVec};

pub const JOINTS: usize = 3;

/// Joint angles are limited to this magnitude by hard stops.
pub const JOINT_LIMIT: f64 = 2.2;

pub type JointVector = [f64; JOINTS];

/// A 2x3 matrix, row-major: `m[row][joint]`.
pub type TipJacobian = [[f64; JOINTS]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    /// +1 for the left finger (+y side of the gripper), -1 for the right.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipPose {
    /// Fingertip center in the gripper frame.
    pub position: PlanarVec,
    /// Distal link direction in the gripper frame, counter-clockwise from +x.
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerState {
    pub q: JointVector,
    pub qd: JointVector,
    pub side: Side,
    /// Base joint location in the gripper frame.
    pub base_offset: PlanarVec,
    /// Direction of the first link at q = 0, in the gripper frame.
    pub base_heading: f64,
    pub link_lengths: [f64; JOINTS],
}

impl FingerState {
    /// Finger with default geometry: links (60, 50, 40) mm, base at (0, +-70) mm.
    pub fn new(side: Side) -> Self {
        Self {
            q: [0.0; JOINTS],
            qd: [0.0; JOINTS],
            side,
            base_offset: PlanarVec::new(0.0, 0.07 * side.sign()),
            base_heading: 0.0,
            link_lengths: [0.06, 0.05, 0.04],
        }
    }

    pub fn with_q(mut self, q: JointVector) -> Self {
        self.q = q;
        self
    }

    /// Base, the two intermediate joints, and the tip, in order.
    pub fn joint_positions(&self) -> [PlanarVec; JOINTS + 1] {
        let mut out = [self.base_offset; JOINTS + 1];
        let mut angle = self.base_heading;
        for i in 0..JOINTS {
            angle += self.q[i];
            out[i + 1] = out[i] + PlanarVec::from_angle(angle) * self.link_lengths[i];
        }
        out
    }

    pub fn tip_pose(&self) -> TipPose {
        forward_kinematics(self)
    }

    /// The fingertip angle used by the wrap trigger: the distal heading,
    /// mirrored for the right finger so that both fingers read positive when
    /// splayed outward and negative once curled past parallel.
    pub fn tip_angle(&self) -> f64 {
        self.side.sign() * self.tip_pose().heading
    }

    /// Fingertip velocity relative to the palm.
    pub fn tip_velocity(&self) -> PlanarVec {
        mat_vec(&tip_jacobian(self), &self.qd)
    }
}

/// Tip position and heading from the joint angles.
pub fn forward_kinematics(f: &FingerState) -> TipPose {
    let pts = f.joint_positions();
    TipPose {
        position: pts[JOINTS],
        heading: normalize_angle(f.base_heading + f.q.iter().sum::<f64>()),
    }
}

/// Partial derivatives of the tip position with respect to each joint angle.
pub fn tip_jacobian(f: &FingerState) -> TipJacobian {
    let pts = f.joint_positions();
    let tip = pts[JOINTS];
    let mut j = [[0.0; JOINTS]; 2];
    for i in 0..JOINTS {
        let lever = (tip - pts[i]).perp();
        j[0][i] = lever.x;
        j[1][i] = lever.y;
    }
    j
}

pub fn mat_vec(j: &TipJacobian, v: &JointVector) -> PlanarVec {
    let mut out = PlanarVec::ZERO;
    for i in 0..JOINTS {
        out.x += j[0][i] * v[i];
        out.y += j[1][i] * v[i];
    }
    out
}

/// Map a force applied at the fingertip to joint torques (J^T F).
pub fn tip_force_to_torques(f: &FingerState, force: PlanarVec) -> JointVector {
    let j = tip_jacobian(f);
    let mut tau = [0.0; JOINTS];
    for i in 0..JOINTS {
        tau[i] = j[0][i] * force.x + j[1][i] * force.y;
    }
    tau
}

/// Joint velocity that realizes a tip velocity, via damped least squares.
pub fn tip_velocity_to_joints(f: &FingerState, v: PlanarVec, damping: f64) -> JointVector {
    let j = tip_jacobian(f);
    // (J J^T + lambda^2 I) w = v, then qd = J^T w
    let mut a = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            a[r][c] = (0..JOINTS).map(|i| j[r][i] * j[c][i]).sum::<f64>();
        }
        a[r][r] += damping * damping;
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < 1e-18 {
        return [0.0; JOINTS];
    }
    let w = PlanarVec::new(
        (a[1][1] * v.x - a[0][1] * v.y) / det,
        (-a[1][0] * v.x + a[0][0] * v.y) / det,
    );
    tip_force_to_torques(f, w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointGains {
    pub kp: JointVector,
    pub kd: JointVector,
    pub tau_max: f64,
}

impl Default for JointGains {
    fn default() -> Self {
        Self {
            kp: [2.0, 1.5, 1.0],
            kd: [0.02; JOINTS],
            tau_max: 1.5,
        }
    }
}

/// Joint-space setpoints sent to one finger.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointCommand {
    pub q_des: JointVector,
    pub qd_des: JointVector,
    pub tau_ff: JointVector,
}

impl JointCommand {
    pub fn hold(q: JointVector) -> Self {
        Self {
            q_des: q,
            ..Self::default()
        }
    }
}

/// PD law with feedforward, saturated at `tau_max`.
pub fn pd_torque(
    q_des: &JointVector,
    qd_des: &JointVector,
    q: &JointVector,
    qd: &JointVector,
    tau_ff: &JointVector,
    gains: &JointGains,
) -> JointVector {
    let mut tau = [0.0; JOINTS];
    for i in 0..JOINTS {
        let raw = gains.kp[i] * (q_des[i] - q[i]) + gains.kd[i] * (qd_des[i] - qd[i]) + tau_ff[i];
        tau[i] = raw.clamp(-gains.tau_max, gains.tau_max);
    }
    tau
}

pub fn command_torque(cmd: &JointCommand, f: &FingerState, gains: &JointGains) -> JointVector {
    pd_torque(&cmd.q_des, &cmd.qd_des, &f.q, &f.qd, &cmd.tau_ff, gains)
}

/// Closed-form inverse kinematics for a tip position and distal heading.
///
/// Among the (up to two) elbow solutions inside the joint limits, returns the
/// one closest to `reference`.
pub fn inverse_kinematics(
    f: &FingerState,
    position: PlanarVec,
    heading: f64,
    reference: &JointVector,
) -> Option<JointVector> {
    let [l1, l2, l3] = f.link_lengths;
    let wrist = (position - PlanarVec::from_angle(heading) * l3 - f.base_offset).rotated(-f.base_heading);
    let d2 = wrist.norm_squared();
    let c2 = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&c2) {
        return None;
    }
    let q2_mag = c2.clamp(-1.0, 1.0).acos();
    let mut best: Option<(f64, JointVector)> = None;
    for q2 in [q2_mag, -q2_mag] {
        let q1 = wrist.angle() - (l2 * q2.sin()).atan2(l1 + l2 * q2.cos());
        let q1 = normalize_angle(q1);
        let q3 = normalize_angle(heading - f.base_heading - q1 - q2);
        let q = [q1, q2, q3];
        if q.iter().any(|a| a.abs() > JOINT_LIMIT) {
            continue;
        }
        let cost: f64 = q.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, q));
        }
    }
    best.map(|(_, q)| q)
}

/// Inverse kinematics that relaxes the heading when the exact pose is out of
/// reach, trying headings progressively further from the requested one.
pub fn inverse_kinematics_relaxed(
    f: &FingerState,
    position: PlanarVec,
    heading: f64,
    reference: &JointVector,
) -> Option<JointVector> {
    const STEP: f64 = 0.05;
    for k in 0..=30 {
        let offsets: &[f64] = if k == 0 { &[0.0] } else { &[1.0, -1.0] };
        for s in offsets {
            let h = heading + s * STEP * k as f64;
            if let Some(q) = inverse_kinematics(f, position, h, reference) {
                return Some(q);
            }
        }
    }
    None
}

/// Joint angles reaching as far as possible along the straight line from the
/// finger's current tip toward `position`.
pub fn reach_toward(f: &FingerState, position: PlanarVec, heading: f64) -> JointVector {
    if let Some(q) = inverse_kinematics_relaxed(f, position, heading, &f.q) {
        return q;
    }
    let start = f.tip_pose();
    let mut best = f.q;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        let p = start.position + (position - start.position) * mid;
        let h = start.heading + normalize_angle(heading - start.heading) * mid;
        match inverse_kinematics_relaxed(f, p, h, &f.q) {
            Some(q) => {
                best = q;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    best
}
