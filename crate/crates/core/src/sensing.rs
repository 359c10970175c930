//! Time-of-flight proximity rays and fingertip contact sensing.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::finger::Side;
use crate::geometry::{normalize_angle, DiskObject, PlanarVec};
use crate::world::{ContactResolution, WorldState};

/// Sensor range; also the reading when nothing is hit.
pub const D_MAX: f64 = 0.20;

/// Smallest distance a proximity sensor reports.
pub const D_MIN: f64 = 1e-4;

/// Distance along a ray to the first point of a disk.
///
/// Returns `Some(0.0)` when the origin is inside the disk and `None` when the
/// disk is missed or lies beyond `d_max`.
pub fn raycast_disk(origin: PlanarVec, dir: PlanarVec, disk: &DiskObject, d_max: f64) -> Option<f64> {
    let to_center = disk.center - origin;
    let along = to_center.dot(dir);
    let offset_sq = to_center.norm_squared() - along * along;
    let r_sq = disk.radius * disk.radius;
    if offset_sq > r_sq {
        return None;
    }
    let half_chord = (r_sq - offset_sq).sqrt();
    let (near, far) = (along - half_chord, along + half_chord);
    if far < 0.0 {
        return None;
    }
    let t = near.max(0.0);
    (t <= d_max).then_some(t)
}

/// The seven distances, ordered left to right across the hand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityVector {
    pub d_l_out: f64,
    pub d_l_forward: f64,
    pub d_l_in: f64,
    pub d_palm: f64,
    pub d_r_in: f64,
    pub d_r_forward: f64,
    pub d_r_out: f64,
}

impl Default for ProximityVector {
    fn default() -> Self {
        Self::from_array([D_MAX; 7])
    }
}

impl ProximityVector {
    pub fn from_array(d: [f64; 7]) -> Self {
        Self {
            d_l_out: d[0],
            d_l_forward: d[1],
            d_l_in: d[2],
            d_palm: d[3],
            d_r_in: d[4],
            d_r_forward: d[5],
            d_r_out: d[6],
        }
    }

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.d_l_out,
            self.d_l_forward,
            self.d_l_in,
            self.d_palm,
            self.d_r_in,
            self.d_r_forward,
            self.d_r_out,
        ]
    }

    /// (out, forward, in) for one fingertip.
    pub fn tip(&self, side: Side) -> [f64; 3] {
        match side {
            Side::Left => [self.d_l_out, self.d_l_forward, self.d_l_in],
            Side::Right => [self.d_r_out, self.d_r_forward, self.d_r_in],
        }
    }
}

/// Sensing direction on a fingertip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TipDirection {
    Out,
    Forward,
    In,
}

impl TipDirection {
    pub const ALL: [TipDirection; 3] = [TipDirection::Out, TipDirection::Forward, TipDirection::In];

    /// Direction angle relative to the distal link heading. Outward points
    /// away from the grasp centerline.
    pub fn offset(self, side: Side) -> f64 {
        let half = std::f64::consts::FRAC_PI_2 * side.sign();
        match self {
            TipDirection::Out => half,
            TipDirection::Forward => 0.0,
            TipDirection::In => -half,
        }
    }
}

/// Unit sensing direction of a fingertip ray, in the frame of `tip_heading`.
pub fn tip_ray_direction(side: Side, dir: TipDirection, tip_heading: f64) -> PlanarVec {
    PlanarVec::from_angle(tip_heading + dir.offset(side))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: PlanarVec,
    pub dir: PlanarVec,
}

/// World-frame rays in `ProximityVector` order. Tip rays start on the tip
/// surface; the palm ray starts at the palm center.
pub fn sensor_rays(world: &WorldState, r_tip: f64) -> [Ray; 7] {
    let frame = &world.gripper.frame;
    let tip_ray = |side: Side, dir: TipDirection| {
        let pose = world.finger(side).tip_pose();
        let d = frame.vector_to_world(tip_ray_direction(side, dir, pose.heading));
        Ray {
            origin: world.tip_world(side) + d * r_tip,
            dir: d,
        }
    };
    [
        tip_ray(Side::Left, TipDirection::Out),
        tip_ray(Side::Left, TipDirection::Forward),
        tip_ray(Side::Left, TipDirection::In),
        Ray {
            origin: frame.origin,
            dir: frame.forward(),
        },
        tip_ray(Side::Right, TipDirection::In),
        tip_ray(Side::Right, TipDirection::Forward),
        tip_ray(Side::Right, TipDirection::Out),
    ]
}

/// Nearest hit along each ray over all objects in the world.
pub fn sample_proximity(world: &WorldState, rays: &[Ray; 7]) -> ProximityVector {
    let disks: Vec<&DiskObject> = world.objects.iter().map(|o| &o.disk).collect();
    proximity_from_disks(&disks, rays)
}

pub fn proximity_from_disks(disks: &[&DiskObject], rays: &[Ray; 7]) -> ProximityVector {
    let mut d = [D_MAX; 7];
    for (slot, ray) in d.iter_mut().zip(rays) {
        for disk in disks {
            if let Some(t) = raycast_disk(ray.origin, ray.dir, disk, D_MAX) {
                *slot = slot.min(t.max(D_MIN));
            }
        }
    }
    ProximityVector::from_array(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ContactReading {
    pub in_contact: bool,
    /// Bearing of the contact point on the tip, relative to the distal heading.
    pub theta: f64,
    pub f_normal: f64,
    pub f_shear: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorNoise {
    pub sigma_force: f64,
    pub sigma_theta: f64,
}

impl Default for SensorNoise {
    fn default() -> Self {
        Self {
            sigma_force: 0.02,
            sigma_theta: 0.01,
        }
    }
}

/// Read the contact sensor of one fingertip.
///
/// With several touching objects the one pressing hardest is reported.
/// `noise` adds zero-mean Gaussian perturbations drawn from `rng`.
pub fn sense_contact<R: Rng + ?Sized>(
    resolution: &ContactResolution,
    tip: Side,
    world_tip_heading: f64,
    noise: Option<(&SensorNoise, &mut R)>,
) -> ContactReading {
    let Some(pair) = resolution
        .pairs_for(tip)
        .max_by(|a, b| a.normal_force.total_cmp(&b.normal_force))
    else {
        return ContactReading::default();
    };
    let mut reading = ContactReading {
        in_contact: true,
        theta: normalize_angle(pair.normal.angle() - world_tip_heading),
        f_normal: pair.normal_force,
        f_shear: pair.tangential_force,
    };
    if let Some((n, rng)) = noise {
        let force = Normal::new(0.0, n.sigma_force).expect("finite sigma");
        let angle = Normal::new(0.0, n.sigma_theta).expect("finite sigma");
        reading.f_normal = (reading.f_normal + force.sample(rng)).max(0.0);
        reading.f_shear += force.sample(rng);
        reading.theta = normalize_angle(reading.theta + angle.sample(rng));
    }
    reading
}

/// Sensor values sampled at a lower rate and held between refreshes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HeldSensors {
    pub proximity: ProximityVector,
    pub contacts: [ContactReading; 2],
    pub sampled_at: f64,
}
