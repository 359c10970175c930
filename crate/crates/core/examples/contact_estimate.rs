//! Circle fit from two fingertip contacts and the re-grasp it selects.
use reflex_grasp::reflex::{estimate_from_contacts, select_branch};
use reflex_grasp::{PlanarVec, ReflexConfig};

fn main() {
    let cfg = ReflexConfig::default();
    let center = PlanarVec::new(0.10, 0.01);
    for (label, radius, a_l, a_r, x_tips) in [
        ("tips behind", 0.0325, 2.4_f64, -2.4_f64, 0.08),
        ("tips beside", 0.0325, 1.6, -1.6, 0.10),
        ("tips ahead", 0.0325, 0.8, -0.8, 0.125),
        ("small, ahead", 0.025, 0.8, -0.8, 0.12),
    ] {
        // Contact points on the circle; normals point from the tip into the object.
        let p = [a_l, a_r].map(|a| center + PlanarVec::from_angle(a) * radius);
        let n = [a_l, a_r].map(|a| PlanarVec::from_angle(a) * -1.0);
        let est = estimate_from_contacts(p, n).unwrap();
        let branch = select_branch(est.center.x, x_tips, x_tips, est.radius, cfg.r_power);
        println!(
            "{label:<12} center ({:.4}, {:.4}) r {:.4} -> {}",
            est.center.x, est.center.y, est.radius, branch
        );
    }
}
