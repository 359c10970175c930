//! Grasp targets from noisy synthetic scans. The trimmed centroid sits
//! toward the camera, short of the true center.
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reflex_grasp::perception::{extract_target, synth_scan};
use reflex_grasp::{DiskObject, GripperFrame, PlanarVec};

fn main() {
    let camera = GripperFrame::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (label, r) in [("coffee", 0.025), ("cup", 0.0325), ("bowl", 0.045)] {
        let disk = DiskObject::new(0, PlanarVec::new(0.45, 0.05), r, 0.2, label).unwrap();
        for sigma in [0.0, 0.005, 0.010] {
            let scan = synth_scan(&disk, &[], &camera, 60, sigma, false, &mut rng).unwrap();
            let t = extract_target(&scan).unwrap();
            let err = t - disk.center;
            println!(
                "{label:<7} sigma {:.3}  target ({:.4}, {:.4})  offset {:.4} m  (2r/pi = {:.4})",
                sigma,
                t.x,
                t.y,
                err.norm(),
                2.0 * r / std::f64::consts::PI
            );
        }
    }
}
