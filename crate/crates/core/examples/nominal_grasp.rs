use reflex_grasp::experiments::{run_trial, ControllerKind, Scene, SimParams};
use reflex_grasp::{DiskObject, PlanarVec, ReflexConfig};

fn main() {
    let cfg = ReflexConfig::default();
    let params = SimParams::default();
    let cup = DiskObject::new(0, PlanarVec::new(0.30, 0.0), 0.0325, 0.2, "cup").unwrap();
    let scene = Scene::single(Some(cup), PlanarVec::new(0.30, 0.0));

    for kind in ControllerKind::ALL {
        let run = run_trial(kind, &scene, 0.065, &cfg, &params, 7, true);
        let r = &run.record;
        println!(
            "{:<8} {:<9} pick {:.2} s  place {:.2} s",
            kind, r.outcome, r.pick_time, r.place_time
        );
    }

    // Phase changes of the full controller.
    let run = run_trial(ControllerKind::Full, &scene, 0.065, &cfg, &params, 7, true);
    let mut last = None;
    for e in &run.events {
        if last != Some(e.phase) {
            println!("  {:6.3} s  {}  palm {:.3} m", e.time, e.phase.label(), e.d_palm);
            last = Some(e.phase);
        }
    }
}
