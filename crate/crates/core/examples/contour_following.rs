use reflex_grasp::experiments::{run_contour_following, ContourSpec, SimParams};
use reflex_grasp::ReflexConfig;

fn main() {
    let cfg = ReflexConfig::default();
    for start in [0.08, 0.04] {
        let spec = ContourSpec {
            initial_distance: start,
            ..ContourSpec::default()
        };
        let report = run_contour_following(&spec, &cfg, &SimParams::default()).unwrap();
        println!(
            "start {:.3} m -> settled at {:?} s, final {:.4} m",
            start, report.settled_at, report.final_distance
        );
        for s in report.samples.iter().step_by(30).take(8) {
            println!("  t {:.2}  d_in {:.4}", s.time, s.d_in);
        }
    }
}
