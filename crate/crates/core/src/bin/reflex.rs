use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use reflex_grasp::experiments::report::{
    clutter_summary, grid_summary, grid_svg, write_area_csv, write_clutter_table_csv, write_clutter_trials_csv,
    write_events_csv, write_grid_csv, write_trials_csv,
};
use reflex_grasp::experiments::{
    measure_realtime_factor, run_clutter, run_grid_sweep, run_trial, ClutterSpec, ControllerKind, GridSpec, Scene,
    SimParams,
};
use reflex_grasp::{load_config, DiskObject, Error, PlanarVec, ReflexConfig};

#[derive(Parser)]
#[command(name = "reflex", version, about = "Reflexive grasping simulator and experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Controller parameters as TOML; defaults to the built-in table.
    #[arg(long, global = true, env = "REFLEX_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one pick-and-place trial.
    Grasp(GraspArgs),
    /// Sweep the object over a grid around a fixed grasp target.
    Sweep(SweepArgs),
    /// Clear randomly cluttered shelves using synthetic perception.
    Clutter(ClutterArgs),
}

#[derive(Args)]
struct GraspArgs {
    #[arg(long, default_value = "full")]
    controller: ControllerKind,
    /// Object as x,y,radius in meters. Omit for an empty scene.
    #[arg(long, value_parser = parse_triple)]
    object: Option<(f64, f64, f64)>,
    #[arg(long, default_value_t = 0.2)]
    mass: f64,
    /// Commanded grasp location as x,y.
    #[arg(long, value_parser = parse_pair, default_value = "0.30,0")]
    target: (f64, f64),
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Event log CSV, one row per controller tick.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Trial record CSV.
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.025)]
    pitch: f64,
    /// Object displacement range along x, relative to the target.
    #[arg(long, value_parser = parse_pair, default_value = "-0.1,0.1", allow_hyphen_values = true)]
    x_range: (f64, f64),
    #[arg(long, value_parser = parse_pair, default_value = "-0.0875,0.0875", allow_hyphen_values = true)]
    y_range: (f64, f64),
    #[arg(long, value_parser = parse_pair, default_value = "0.30,0")]
    target: (f64, f64),
    #[arg(long, value_delimiter = ',', default_value = "baseline,partial,full")]
    controllers: Vec<ControllerKind>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "sweep-out")]
    out_dir: PathBuf,
    /// Also write success_map.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct ClutterArgs {
    #[arg(long, default_value_t = 20)]
    episodes: usize,
    #[arg(long, default_value_t = 5)]
    objects: usize,
    /// Perception noise standard deviation in meters.
    #[arg(long, default_value_t = 0.010)]
    noise: f64,
    #[arg(long, default_value_t = 3)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "full,baseline")]
    controllers: Vec<ControllerKind>,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value = "clutter-out")]
    out_dir: PathBuf,
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    parse_floats(s, 2).map(|v| (v[0], v[1]))
}

fn parse_triple(s: &str) -> Result<(f64, f64, f64), String> {
    parse_floats(s, 3).map(|v| (v[0], v[1], v[2]))
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn make_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))
}

fn grasp(args: GraspArgs, cfg: &ReflexConfig) -> Result<ExitCode, Error> {
    let object = match args.object {
        Some((x, y, r)) => Some(DiskObject::new(0, PlanarVec::new(x, y), r, args.mass, "object")?),
        None => None,
    };
    let diameter = object.as_ref().map_or(0.0, |o| 2.0 * o.radius);
    let scene = Scene::single(object, PlanarVec::new(args.target.0, args.target.1));
    let params = SimParams::default();
    let run = run_trial(
        args.controller,
        &scene,
        diameter,
        cfg,
        &params,
        args.seed,
        args.log.is_some(),
    );
    if let Some(path) = &args.log {
        write_events_csv(create(path)?, &run.events)?;
    }
    if let Some(path) = &args.record {
        write_trials_csv(create(path)?, std::slice::from_ref(&run.record))?;
    }
    let r = &run.record;
    println!(
        "{} {}: pick {:.2} s, place {:.2} s, re-grasps {}{}",
        r.controller,
        r.outcome,
        r.pick_time,
        r.place_time,
        r.regrasp_count,
        if r.note.is_empty() {
            String::new()
        } else {
            format!(" ({})", r.note)
        }
    );
    Ok(if r.outcome.is_success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn sweep(args: SweepArgs, cfg: &ReflexConfig) -> Result<ExitCode, Error> {
    let spec = GridSpec {
        pitch: args.pitch,
        x_range: args.x_range,
        y_range: args.y_range,
        nominal: PlanarVec::new(args.target.0, args.target.1),
        controllers: args.controllers,
        seed: args.seed,
        jobs: args.jobs,
    };
    spec.validate()?;
    let params = SimParams::default();
    make_dir(&args.out_dir)?;
    let started = Instant::now();
    let result = run_grid_sweep(&spec, cfg, &params)?;
    let wall = started.elapsed().as_secs_f64();
    let realtime = measure_realtime_factor(cfg, &params);

    let dir = &args.out_dir;
    write_trials_csv(create(&dir.join("trials.csv"))?, &result.records)?;
    write_grid_csv(create(&dir.join("grid.csv"))?, &result)?;
    write_area_csv(create(&dir.join("areas.csv"))?, &result)?;
    let summary = grid_summary(&result, None);
    write_text(&dir.join("summary.txt"), &summary)?;
    // Wall-clock numbers live apart from the reproducible outputs.
    let timing =
        format!("sweep wall time: {wall:.2} s\nreal-time factor: {realtime:.1}x (single object, one thread)\n");
    write_text(&dir.join("timing.txt"), &timing)?;
    if args.svg {
        write_text(&dir.join("success_map.svg"), &grid_svg(&result))?;
    }
    print!("{summary}{timing}");
    Ok(ExitCode::SUCCESS)
}

fn clutter(args: ClutterArgs, cfg: &ReflexConfig) -> Result<ExitCode, Error> {
    let spec = ClutterSpec {
        episodes: args.episodes,
        objects: args.objects,
        noise_sigma: args.noise,
        seed: args.seed,
        controllers: args.controllers,
        jobs: args.jobs,
        ..ClutterSpec::default()
    };
    spec.validate()?;
    make_dir(&args.out_dir)?;
    let result = run_clutter(&spec, cfg, &SimParams::default())?;
    let dir = &args.out_dir;
    write_clutter_trials_csv(create(&dir.join("trials.csv"))?, &result)?;
    write_clutter_table_csv(create(&dir.join("table.csv"))?, &result)?;
    let summary = clutter_summary(&result);
    write_text(&dir.join("summary.txt"), &summary)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    print!("{summary}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.common.config {
        Some(path) => load_config(path),
        None => Ok(ReflexConfig::default()),
    };
    let outcome = cfg.and_then(|cfg| match cli.command {
        Command::Grasp(a) => grasp(a, &cfg),
        Command::Sweep(a) => sweep(a, &cfg),
        Command::Clutter(a) => clutter(a, &cfg),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
