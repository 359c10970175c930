use reflex_grasp::experiments::report::grid_summary;
use reflex_grasp::experiments::{run_grid_sweep, ControllerKind, GridSpec, SimParams};
use reflex_grasp::ReflexConfig;

fn main() {
    let pitch = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.025);
    let spec = GridSpec {
        pitch,
        ..GridSpec::default()
    };
    let result = run_grid_sweep(&spec, &ReflexConfig::default(), &SimParams::default()).unwrap();
    print!("{}", grid_summary(&result, None));

    // ASCII maps: rows are object x (far at the top), columns object y.
    let xs: Vec<i64> = {
        let mut v: Vec<i64> = result.cells.iter().map(|c| c.ix).collect();
        v.sort();
        v.dedup();
        v
    };
    let ys: Vec<i64> = {
        let mut v: Vec<i64> = result.cells.iter().map(|c| c.iy).collect();
        v.sort();
        v.dedup();
        v
    };
    for kind in ControllerKind::ALL {
        println!("\n{kind}");
        for ix in xs.iter().rev() {
            let row: String = ys
                .iter()
                .rev()
                .map(|iy| {
                    let i = result.cells.iter().position(|c| c.ix == *ix && c.iy == *iy).unwrap();
                    match (
                        result.outcome(i, kind).is_some_and(|o| o.is_success()),
                        *ix == 0 && *iy == 0,
                    ) {
                        (true, true) => 'O',
                        (true, false) => '#',
                        (false, true) => 'o',
                        (false, false) => '.',
                    }
                })
                .collect();
            println!("  {row}");
        }
    }
}
