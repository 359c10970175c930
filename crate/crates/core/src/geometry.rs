//! Planar vectors, the gripper frame, and disk-shaped objects.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A point or free vector in the plane, in meters (or newtons, m/s, ...).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarVec {
    pub x: f64,
    pub y: f64,
}

impl PlanarVec {
    pub const ZERO: PlanarVec = PlanarVec { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at `angle` radians from +x.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: PlanarVec) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: PlanarVec) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: PlanarVec) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<PlanarVec> {
        let n = self.norm();
        (n > 1e-15).then(|| self / n)
    }

    /// Rotate counter-clockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> PlanarVec {
        let (s, c) = angle.sin_cos();
        PlanarVec::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// The vector rotated by +90 degrees.
    pub fn perp(self) -> PlanarVec {
        PlanarVec::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for PlanarVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for PlanarVec {
    type Output = PlanarVec;
    fn add(self, o: PlanarVec) -> PlanarVec {
        PlanarVec::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for PlanarVec {
    fn add_assign(&mut self, o: PlanarVec) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for PlanarVec {
    type Output = PlanarVec;
    fn sub(self, o: PlanarVec) -> PlanarVec {
        PlanarVec::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for PlanarVec {
    fn sub_assign(&mut self, o: PlanarVec) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for PlanarVec {
    type Output = PlanarVec;
    fn mul(self, k: f64) -> PlanarVec {
        PlanarVec::new(self.x * k, self.y * k)
    }
}

impl Mul<PlanarVec> for f64 {
    type Output = PlanarVec;
    fn mul(self, v: PlanarVec) -> PlanarVec {
        v * self
    }
}

impl Div<f64> for PlanarVec {
    type Output = PlanarVec;
    fn div(self, k: f64) -> PlanarVec {
        PlanarVec::new(self.x / k, self.y / k)
    }
}

impl Neg for PlanarVec {
    type Output = PlanarVec;
    fn neg(self) -> PlanarVec {
        PlanarVec::new(-self.x, -self.y)
    }
}

/// Wrap an angle into (-pi, pi].
pub fn normalize_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    // rem_euclid maps -pi to +pi already; guard the -0.0 / exact -pi corner.
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Pose of the gripper in the world.
///
/// Origin at the palm center, +x forward along the approach direction,
/// +y toward the left finger.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GripperFrame {
    pub origin: PlanarVec,
    heading: f64,
}

impl GripperFrame {
    pub fn new(origin: PlanarVec, heading: f64) -> Self {
        Self {
            origin,
            heading: normalize_angle(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn set_heading(&mut self, heading: f64) {
        self.heading = normalize_angle(heading);
    }

    /// Express a world direction in the gripper frame.
    pub fn vector_to_gripper(&self, v: PlanarVec) -> PlanarVec {
        v.rotated(-self.heading)
    }

    /// Express a gripper-frame direction in the world.
    pub fn vector_to_world(&self, v: PlanarVec) -> PlanarVec {
        v.rotated(self.heading)
    }

    /// Forward direction (+x of the gripper) in world coordinates.
    pub fn forward(&self) -> PlanarVec {
        PlanarVec::from_angle(self.heading)
    }
}

/// Map a world point into the gripper frame.
pub fn world_to_gripper(p: PlanarVec, frame: &GripperFrame) -> PlanarVec {
    frame.vector_to_gripper(p - frame.origin)
}

/// Map a gripper-frame point into the world.
pub fn gripper_to_world(p: PlanarVec, frame: &GripperFrame) -> PlanarVec {
    frame.origin + frame.vector_to_world(p)
}

/// A cylindrical object seen from above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskObject {
    pub id: u32,
    pub center: PlanarVec,
    pub radius: f64,
    pub mass: f64,
    pub class_label: String,
}

impl DiskObject {
    /// Build a disk, rejecting non-positive radius or mass.
    pub fn new(
        id: u32,
        center: PlanarVec,
        radius: f64,
        mass: f64,
        class_label: impl Into<String>,
    ) -> Result<Self, crate::Error> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(crate::Error::InvalidObject(format!(
                "object {id}: radius must be positive, got {radius}"
            )));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(crate::Error::InvalidObject(format!(
                "object {id}: mass must be positive, got {mass}"
            )));
        }
        if !center.is_finite() {
            return Err(crate::Error::InvalidObject(format!(
                "object {id}: center is not finite"
            )));
        }
        Ok(Self {
            id,
            center,
            radius,
            mass,
            class_label: class_label.into(),
        })
    }
}
