//! A cup placed 5 cm beyond the commanded target. The full controller pulls
//! it in with a pinch; the other two cannot.
use reflex_grasp::experiments::{run_trial, ControllerKind, Scene, SimParams};
use reflex_grasp::{DiskObject, PlanarVec, ReflexConfig};

fn main() {
    let cfg = ReflexConfig::default();
    let params = SimParams::default();
    let cup = DiskObject::new(0, PlanarVec::new(0.35, 0.0), 0.0325, 0.2, "cup").unwrap();
    let scene = Scene::single(Some(cup), PlanarVec::new(0.30, 0.0));

    for kind in ControllerKind::ALL {
        let run = run_trial(kind, &scene, 0.065, &cfg, &params, 3, true);
        let branches: Vec<String> = run
            .events
            .windows(2)
            .filter(|w| w[0].branch != w[1].branch)
            .filter_map(|w| w[1].branch.clone())
            .collect();
        println!(
            "{:<8} {:<9} re-grasps {} {:?}",
            kind, run.record.outcome, run.record.regrasp_count, branches
        );
    }
}
