use reflex_grasp::experiments::report::clutter_summary;
use reflex_grasp::experiments::{run_clutter, ClutterSpec, SimParams};
use reflex_grasp::ReflexConfig;

fn main() {
    let episodes = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let spec = ClutterSpec {
        episodes,
        ..ClutterSpec::default()
    };
    let result = run_clutter(&spec, &ReflexConfig::default(), &SimParams::default()).unwrap();
    print!("{}", clutter_summary(&result));
}
