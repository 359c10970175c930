//! Object pose and size from two fingertip contacts.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::finger::TipPose;
use crate::geometry::PlanarVec;
use crate::sensing::ContactReading;

/// Estimated disk in the gripper frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectEstimate {
    pub center: PlanarVec,
    pub radius: f64,
}

/// Contact point on the object surface and the unit normal pointing from the
/// fingertip into the object, both in the gripper frame.
pub fn contact_frame(tip: &TipPose, reading: &ContactReading, r_tip: f64) -> (PlanarVec, PlanarVec) {
    let n = PlanarVec::from_angle(tip.heading + reading.theta);
    (tip.position + n * r_tip, n)
}

/// Least-squares circle through two contact points with known inward normals.
///
/// Minimizes the sum over contacts of |c - p_i - r n_i|^2.
pub fn estimate_from_contacts(points: [PlanarVec; 2], normals: [PlanarVec; 2]) -> Result<ObjectEstimate, Error> {
    let p_mean = (points[0] + points[1]) * 0.5;
    let n_sum = normals[0] + normals[1];
    let denom = 2.0 - n_sum.norm_squared() / 2.0;
    if denom.abs() < 1e-6 {
        return Err(Error::NoEstimate);
    }
    let numer: f64 = points.iter().zip(&normals).map(|(p, n)| n.dot(p_mean - *p)).sum();
    let radius = numer / denom;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::NoEstimate);
    }
    Ok(ObjectEstimate {
        center: p_mean + n_sum * 0.5 * radius,
        radius,
    })
}

/// Estimate from the two fingertip sensors. Both tips must report contact.
pub fn estimate_object(
    tips: [&TipPose; 2],
    readings: [&ContactReading; 2],
    r_tip: f64,
) -> Result<ObjectEstimate, Error> {
    if !(readings[0].in_contact && readings[1].in_contact) {
        return Err(Error::NoEstimate);
    }
    let (p0, n0) = contact_frame(tips[0], readings[0], r_tip);
    let (p1, n1) = contact_frame(tips[1], readings[1], r_tip);
    estimate_from_contacts([p0, p1], [n0, n1])
}

/// Whether the two inward contact normals oppose each other within `gamma`.
pub fn antipodal_within(normals: [PlanarVec; 2], gamma: f64) -> bool {
    let c = (-normals[0].dot(normals[1])).clamp(-1.0, 1.0);
    c.acos() <= gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finger::{FingerState, Side};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn touching(center: PlanarVec, radius: f64, bearing: f64) -> (PlanarVec, PlanarVec) {
        let outward = PlanarVec::from_angle(bearing);
        (center + outward * radius, -outward)
    }

    #[test]
    fn exact_recovery() {
        let c = PlanarVec::new(0.09, -0.01);
        let (p0, n0) = touching(c, 0.03, 1.2);
        let (p1, n1) = touching(c, 0.03, -1.9);
        let e = estimate_from_contacts([p0, p1], [n0, n1]).unwrap();
        assert!((e.center - c).norm() < 1e-12);
        assert!((e.radius - 0.03).abs() < 1e-12);
    }

    #[test]
    fn symmetric_antipodal_pair() {
        let e = estimate_from_contacts(
            [PlanarVec::new(1.0, 2.0), PlanarVec::new(1.0, -2.0)],
            [PlanarVec::new(0.0, -1.0), PlanarVec::new(0.0, 1.0)],
        )
        .unwrap();
        assert!((e.center - PlanarVec::new(1.0, 0.0)).norm() < 1e-12);
        assert!((e.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn position_noise_center_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noise = Normal::new(0.0, 0.0005).unwrap();
        let mut err = Vec::new();
        for _ in 0..1000 {
            let c = PlanarVec::new(rng.random_range(0.05..0.15), rng.random_range(-0.03..0.03));
            let r = rng.random_range(0.02..0.05);
            let b0 = std::f64::consts::FRAC_PI_2 + rng.random_range(-0.5..0.5);
            let b1 = -std::f64::consts::FRAC_PI_2 + rng.random_range(-0.5..0.5);
            let (p0, n0) = touching(c, r, b0);
            let (p1, n1) = touching(c, r, b1);
            let jitter = |p: PlanarVec, rng: &mut ChaCha8Rng| p + PlanarVec::new(noise.sample(rng), noise.sample(rng));
            let p0 = jitter(p0, &mut rng);
            let p1 = jitter(p1, &mut rng);
            let e = estimate_from_contacts([p0, p1], [n0, n1]).unwrap();
            err.push((e.center - c).norm());
        }
        err.sort_by(f64::total_cmp);
        assert!(err[950] < 0.0015, "p95 {}", err[950]);
    }

    #[test]
    fn parallel_normals_are_degenerate() {
        let n = PlanarVec::new(0.0, -1.0);
        let r = estimate_from_contacts([PlanarVec::new(0.1, 0.03), PlanarVec::new(0.1, 0.01)], [n, n]);
        assert!(matches!(r, Err(Error::NoEstimate)));
    }

    #[test]
    fn needs_two_contacts() {
        let tip = FingerState::new(Side::Left).tip_pose();
        let touch = ContactReading {
            in_contact: true,
            ..Default::default()
        };
        let none = ContactReading::default();
        assert!(estimate_object([&tip, &tip], [&touch, &none], 0.012).is_err());
    }

    #[test]
    fn readings_round_trip_through_tip_poses() {
        let c = PlanarVec::new(0.1, 0.0);
        let r = 0.035;
        let r_tip = 0.012;
        let mut tips = Vec::new();
        let mut readings = Vec::new();
        for bearing in [1.4f64, -1.5] {
            let out = PlanarVec::from_angle(bearing);
            let heading = 0.3 * bearing.signum();
            let tip = TipPose {
                position: c + out * (r + r_tip),
                heading,
            };
            let theta = (-out).angle() - heading;
            tips.push(tip);
            readings.push(ContactReading {
                in_contact: true,
                theta,
                f_normal: 1.0,
                f_shear: 0.0,
            });
        }
        let e = estimate_object([&tips[0], &tips[1]], [&readings[0], &readings[1]], r_tip).unwrap();
        assert!((e.center - c).norm() < 1e-12);
        assert!((e.radius - r).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_noise_bounds() {
        // With 0.01 rad bearing noise on two roughly opposed contacts the
        // center error stays at the millimetre level.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let mut center_err = Vec::new();
        let mut radius_err = Vec::new();
        for _ in 0..2000 {
            let c = PlanarVec::new(rng.random_range(0.05..0.15), rng.random_range(-0.03..0.03));
            let r = rng.random_range(0.02..0.05);
            let b0 = rng.random_range(0.9..2.2);
            let b1 = -rng.random_range(0.9..2.2);
            let (p0, n0) = touching(c, r, b0);
            let (p1, n1) = touching(c, r, b1);
            let n0 = n0.rotated(noise.sample(&mut rng));
            let n1 = n1.rotated(noise.sample(&mut rng));
            if let Ok(e) = estimate_from_contacts([p0, p1], [n0, n1]) {
                center_err.push((e.center - c).norm());
                radius_err.push((e.radius - r).abs());
            }
        }
        assert!(center_err.len() > 1990);
        center_err.sort_by(f64::total_cmp);
        radius_err.sort_by(f64::total_cmp);
        let p95 = |v: &Vec<f64>| v[v.len() * 95 / 100];
        assert!(p95(&center_err) < 0.003, "center p95 {}", p95(&center_err));
        assert!(p95(&radius_err) < 0.003, "radius p95 {}", p95(&radius_err));
    }

    #[test]
    fn antipodal_check() {
        let a = PlanarVec::new(0.0, -1.0);
        assert!(antipodal_within([a, -a], 0.01));
        assert!(antipodal_within([a, (-a).rotated(0.3)], 20f64.to_radians()));
        assert!(!antipodal_within([a, (-a).rotated(0.4)], 20f64.to_radians()));
    }

    proptest! {
        #[test]
        fn noiseless_fit_is_exact(
            cx in 0.0..0.2f64, cy in -0.1..0.1f64, r in 0.005..0.08f64,
            b0 in -3.1..3.1f64, gap in 0.3..5.9f64,
        ) {
            let c = PlanarVec::new(cx, cy);
            let (p0, n0) = touching(c, r, b0);
            let (p1, n1) = touching(c, r, b0 + gap);
            let e = estimate_from_contacts([p0, p1], [n0, n1]).unwrap();
            prop_assert!((e.center - c).norm() < 1e-9);
            prop_assert!((e.radius - r).abs() < 1e-9);
        }
    }
}
