//! Proximity readings of the open hand as a cup slides across in front of it.
use reflex_grasp::finger::{FingerState, Side};
use reflex_grasp::reflex::{open_pose, ControllerParams};
use reflex_grasp::sensing::{sample_proximity, sensor_rays};
use reflex_grasp::world::{SimObject, WorldState};
use reflex_grasp::{DiskObject, GripperFrame, PlanarVec};

fn main() {
    let cp = ControllerParams::default();
    let fingers = Side::BOTH.map(|s| {
        let f = FingerState::new(s);
        let q = open_pose(&f, &cp);
        f.with_q(q)
    });
    let mut world = WorldState::new(GripperFrame::default(), fingers, 0);
    let rays = sensor_rays(&world, 0.012);
    for (i, r) in rays.iter().enumerate() {
        println!(
            "ray {i}: origin ({:.3}, {:.3}) dir ({:.2}, {:.2})",
            r.origin.x, r.origin.y, r.dir.x, r.dir.y
        );
    }

    println!("   y    l_out  l_fwd  l_in   palm   r_in   r_fwd  r_out");
    for k in -4..=4 {
        let y = 0.025 * k as f64;
        let cup = DiskObject::new(0, PlanarVec::new(0.16, y), 0.0325, 0.2, "cup").unwrap();
        world.objects = vec![SimObject::at_rest(cup)];
        let d = sample_proximity(&world, &rays).to_array();
        let cols: Vec<String> = d.iter().map(|v| format!("{v:.3}")).collect();
        println!("{:+.3}  {}", y, cols.join("  "));
    }
}
