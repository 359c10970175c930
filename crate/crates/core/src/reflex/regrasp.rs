//! Re-grasp selection and fingertip waypoints.

use serde::{Deserialize, Serialize};

use super::controller::ControllerParams;
use super::estimate::ObjectEstimate;
use super::Phase;
use crate::config::ReflexConfig;
use crate::finger::{Side, TipPose};
use crate::geometry::PlanarVec;
use crate::sensing::{tip_ray_direction, ProximityVector, TipDirection, D_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegraspBranch {
    PinchPull,
    Antipodal,
    PowerWrap,
}

impl RegraspBranch {
    pub fn label(self) -> &'static str {
        match self {
            RegraspBranch::PinchPull => "PINCH_PULL",
            RegraspBranch::Antipodal => "ANTIPODAL",
            RegraspBranch::PowerWrap => "POWER_WRAP",
        }
    }

    pub fn phase(self) -> Phase {
        match self {
            RegraspBranch::PinchPull => Phase::RegraspPinchPull,
            RegraspBranch::Antipodal => Phase::RegraspAntipodal,
            RegraspBranch::PowerWrap => Phase::RegraspPowerWrap,
        }
    }

    /// Branches that finish in a two-tip pinch.
    pub fn is_pinch(self) -> bool {
        !matches!(self, RegraspBranch::PowerWrap)
    }
}

impl std::fmt::Display for RegraspBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.label())
    }
}

/// Choose a re-grasp from the estimated object position relative to the tips.
pub fn select_branch(x_obj: f64, x_left: f64, x_right: f64, r_obj: f64, r_power: f64) -> RegraspBranch {
    if x_obj > x_left && x_obj > x_right {
        RegraspBranch::PinchPull
    } else if x_obj < x_left && x_obj < x_right && r_obj < r_power {
        RegraspBranch::Antipodal
    } else {
        RegraspBranch::PowerWrap
    }
}

/// Target pose for one fingertip, in the gripper frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipTarget {
    pub position: PlanarVec,
    pub heading: f64,
}

impl TipTarget {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            position: PlanarVec::new(x, y),
            heading,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegraspPlan {
    pub branch: RegraspBranch,
    /// Object used for planning: the estimate, or a default guess.
    pub object: ObjectEstimate,
    pub estimated: bool,
    /// [left, right] targets visited in order.
    pub waypoints: Vec<[TipTarget; 2]>,
}

/// Object guess when nothing but the palm reading is available.
pub fn default_object(d_palm: f64, params: &ControllerParams) -> ObjectEstimate {
    let radius = params.default_radius;
    let x = if d_palm < D_MAX {
        d_palm + radius
    } else {
        params.grasp_offset
    };
    ObjectEstimate {
        center: PlanarVec::new(x, 0.0),
        radius,
    }
}

/// Object guess from the rays that look between the fingers: each hit is
/// pushed one default radius further along its ray and the results averaged.
pub fn sensed_object(d: &ProximityVector, tips: [&TipPose; 2], params: &ControllerParams) -> Option<ObjectEstimate> {
    let radius = params.default_radius;
    let mut sum = PlanarVec::ZERO;
    let mut n = 0;
    if d.d_palm < D_MAX {
        sum += PlanarVec::new(d.d_palm + radius, 0.0);
        n += 1;
    }
    for (side, tip) in Side::BOTH.into_iter().zip(tips) {
        let range = d.tip(side)[2];
        if range < D_MAX {
            let dir = tip_ray_direction(side, TipDirection::In, tip.heading);
            sum += tip.position + dir * (params.r_tip + range + radius);
            n += 1;
        }
    }
    (n > 0).then(|| ObjectEstimate {
        center: sum / n as f64,
        radius,
    })
}

/// Plan a re-grasp. Without a contact estimate the plan is a power wrap
/// around `fallback`.
pub fn plan_regrasp(
    estimate: Option<&ObjectEstimate>,
    tips: [&TipPose; 2],
    fallback: &ObjectEstimate,
    cfg: &ReflexConfig,
    params: &ControllerParams,
) -> RegraspPlan {
    let object = estimate.copied().unwrap_or(*fallback);
    let branch = match estimate {
        Some(e) => select_branch(
            e.center.x,
            tips[0].position.x,
            tips[1].position.x,
            e.radius,
            cfg.r_power,
        ),
        None => RegraspBranch::PowerWrap,
    };
    let c = object.center;
    let reach = object.radius + params.r_tip;
    let open = reach + params.open_margin;
    let pinch = reach - params.squeeze;
    let pair = |x: f64, half: f64, heading: f64| {
        [
            TipTarget::new(x, c.y + half, -heading),
            TipTarget::new(x, c.y - half, heading),
        ]
    };
    let spread = |x_l: f64, x_r: f64, half: f64| {
        [
            TipTarget::new(x_l, c.y + half, 0.0),
            TipTarget::new(x_r, c.y - half, 0.0),
        ]
    };
    let (xl, xr) = (tips[0].position.x, tips[1].position.x);
    let mut waypoints = vec![spread(xl, xr, open)];
    match branch {
        RegraspBranch::PinchPull => {
            let beyond = c.x + params.beyond_equator * reach;
            let x_pulled = cfg.d_des_in.max(object.radius + params.palm_gap);
            let x_tip_pulled = x_pulled + params.beyond_equator * reach;
            waypoints.push(pair(beyond, open, 0.0));
            waypoints.push(pair(beyond, pinch, 0.0));
            waypoints.push(pair(x_tip_pulled, pinch, 0.0));
            waypoints.push(pair(x_pulled, reach + 0.5 * params.open_margin, 0.0));
            waypoints.push(pair(x_pulled, pinch, 0.0));
        }
        RegraspBranch::Antipodal => {
            waypoints.push(pair(c.x, open, 0.0));
            waypoints.push(pair(c.x, pinch, 0.0));
        }
        RegraspBranch::PowerWrap => {
            let (s, co) = params.wrap_angle.sin_cos();
            let x_palm = object.radius + params.palm_gap;
            let ahead = c.x + co * reach;
            waypoints.push(pair(ahead, open, 0.0));
            waypoints.push([
                TipTarget::new(c.x + co * pinch, c.y + s * pinch, -params.wrap_angle),
                TipTarget::new(c.x + co * pinch, c.y - s * pinch, params.wrap_angle),
            ]);
            let x_wrap = x_palm.min(c.x) + co * pinch;
            waypoints.push([
                TipTarget::new(x_wrap, c.y + s * pinch, -params.wrap_angle),
                TipTarget::new(x_wrap, c.y - s * pinch, params.wrap_angle),
            ]);
        }
    }
    RegraspPlan {
        branch,
        object,
        estimated: estimate.is_some(),
        waypoints,
    }
}
