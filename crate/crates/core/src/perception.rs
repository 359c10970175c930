//! Synthetic depth scans of disks and the trimmed-centroid grasp target.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{DiskObject, GripperFrame, PlanarVec};

pub const MIN_SCAN_POINTS: usize = 20;
pub const MIN_TARGET_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// World position.
    pub position: PlanarVec,
    /// Distance along the camera axis.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScan {
    pub points: Vec<ScanPoint>,
    pub source_object: u32,
}

/// Half-angle of the arc of `disk` visible from `eye`.
pub fn visible_half_angle(disk: &DiskObject, eye: PlanarVec) -> Option<f64> {
    let dist = disk.center.distance(eye);
    (dist > disk.radius).then(|| (disk.radius / dist).acos())
}

fn segment_hits_disk(a: PlanarVec, b: PlanarVec, disk: &DiskObject) -> bool {
    let ab = b - a;
    let len_sq = ab.norm_squared();
    let s = if len_sq > 0.0 {
        ((disk.center - a).dot(ab) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * s).distance(disk.center) < disk.radius
}

/// Sample `n` evenly spaced points on the arc of `object` visible from the
/// camera, each perturbed by isotropic Gaussian noise.
///
/// Fails with [`Error::Occluded`] when any line of sight is blocked by one of
/// `others`, unless `allow_occluded` is set.
pub fn synth_scan<R: Rng + ?Sized>(
    object: &DiskObject,
    others: &[&DiskObject],
    camera: &GripperFrame,
    n: usize,
    noise_sigma: f64,
    allow_occluded: bool,
    rng: &mut R,
) -> Result<SyntheticScan, Error> {
    if n < MIN_SCAN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_SCAN_POINTS,
            got: n,
        });
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise sigma {noise_sigma}")));
    }
    let eye = camera.origin;
    let half = visible_half_angle(object, eye)
        .ok_or_else(|| Error::InvalidArgument(format!("camera inside object {}", object.id)))?;
    let toward = (eye - object.center).angle();
    let noise = Normal::new(0.0, noise_sigma).expect("valid sigma");
    let axis = camera.forward();
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let phi = toward + half * (2.0 * (i as f64 + 0.5) / n as f64 - 1.0);
        let surface = object.center + PlanarVec::from_angle(phi) * object.radius;
        if !allow_occluded
            && others
                .iter()
                .any(|o| o.id != object.id && segment_hits_disk(eye, surface, o))
        {
            return Err(Error::Occluded { object: object.id });
        }
        let position = if noise_sigma > 0.0 {
            surface + PlanarVec::new(noise.sample(rng), noise.sample(rng))
        } else {
            surface
        };
        points.push(ScanPoint {
            position,
            depth: (position - eye).dot(axis),
        });
    }
    Ok(SyntheticScan {
        points,
        source_object: object.id,
    })
}

/// Mean position after dropping the nearest and farthest tenth of the points
/// by depth (each tail rounded up).
pub fn extract_target(scan: &SyntheticScan) -> Result<PlanarVec, Error> {
    let n = scan.points.len();
    if n < MIN_TARGET_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_TARGET_POINTS,
            got: n,
        });
    }
    let mut sorted: Vec<&ScanPoint> = scan.points.iter().collect();
    sorted.sort_by(|a, b| {
        a.depth
            .total_cmp(&b.depth)
            .then(a.position.x.total_cmp(&b.position.x))
            .then(a.position.y.total_cmp(&b.position.y))
    });
    let trim = n.div_ceil(10);
    let kept = &sorted[trim..n - trim];
    let sum = kept.iter().fold(PlanarVec::ZERO, |acc, p| acc + p.position);
    Ok(sum / kept.len() as f64)
}
