//! Clearing a shelf of randomly placed objects, one perception-guided grasp
//! per object.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, run_trial, ControllerKind, Scene, SimParams, TrialRecord};
use crate::config::ReflexConfig;
use crate::error::Error;
use crate::geometry::{DiskObject, GripperFrame, PlanarVec};
use crate::perception::{extract_target, synth_scan};

/// Object classes on the shelf: (label, radius m, mass kg).
pub const CLUTTER_CLASSES: [(&str, f64, f64); 5] = [
    ("cup", 0.0325, 0.2),
    ("apple", 0.035, 0.15),
    ("can", 0.030, 0.35),
    ("coffee", 0.025, 0.1),
    ("bowl", 0.045, 0.4),
];

pub const MAX_PLACEMENT_TRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClutterSpec {
    pub episodes: usize,
    pub objects: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    pub controllers: Vec<ControllerKind>,
    /// Shelf region in the world, x then y.
    pub shelf_x: (f64, f64),
    pub shelf_y: (f64, f64),
    /// Minimum free space between placed objects.
    pub gap: f64,
    pub scan_points: usize,
    pub jobs: usize,
}

impl Default for ClutterSpec {
    fn default() -> Self {
        Self {
            episodes: 20,
            objects: 5,
            noise_sigma: 0.010,
            seed: 3,
            controllers: vec![ControllerKind::Full, ControllerKind::Baseline],
            shelf_x: (0.33, 0.58),
            shelf_y: (-0.2, 0.2),
            gap: 0.01,
            scan_points: 60,
            jobs: 0,
        }
    }
}

impl ClutterSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if self.shelf_x.0 >= self.shelf_x.1 || self.shelf_y.0 >= self.shelf_y.1 {
            return Err(Error::InvalidArgument("empty shelf region".into()));
        }
        if self.controllers.is_empty() {
            return Err(Error::InvalidArgument("no controllers selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClutterAttempt {
    pub episode: usize,
    /// Order of the attempt within the episode.
    pub attempt: usize,
    /// The scan had to look through another object.
    pub occluded: bool,
    pub record: TrialRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub class: String,
    pub trials: usize,
    pub successes: usize,
}

impl ClassStats {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClutterResult {
    pub controllers: Vec<ControllerKind>,
    pub attempts: Vec<ClutterAttempt>,
    pub skipped_episodes: Vec<usize>,
    pub warnings: Vec<String>,
}

impl ClutterResult {
    pub fn records(&self, kind: ControllerKind) -> impl Iterator<Item = &TrialRecord> {
        self.attempts
            .iter()
            .map(|a| &a.record)
            .filter(move |r| r.controller == kind)
    }

    pub fn trials(&self, kind: ControllerKind) -> usize {
        self.records(kind).count()
    }

    pub fn successes(&self, kind: ControllerKind) -> usize {
        self.records(kind).filter(|r| r.outcome.is_success()).count()
    }

    pub fn success_rate(&self, kind: ControllerKind) -> f64 {
        let n = self.trials(kind);
        if n == 0 {
            0.0
        } else {
            self.successes(kind) as f64 / n as f64
        }
    }

    /// Per-class counts in the order of [`CLUTTER_CLASSES`].
    pub fn class_stats(&self, kind: ControllerKind) -> Vec<ClassStats> {
        CLUTTER_CLASSES
            .iter()
            .map(|(class, _, _)| {
                let rs: Vec<&TrialRecord> = self.records(kind).filter(|r| r.object_class == *class).collect();
                ClassStats {
                    class: class.to_string(),
                    trials: rs.len(),
                    successes: rs.iter().filter(|r| r.outcome.is_success()).count(),
                }
            })
            .collect()
    }

    /// Mean simulated pick time over all attempts.
    pub fn mean_pick_time(&self, kind: ControllerKind) -> f64 {
        mean(self.records(kind).map(|r| r.pick_time))
    }

    /// Mean simulated place time over successful attempts.
    pub fn mean_place_time(&self, kind: ControllerKind) -> f64 {
        mean(
            self.records(kind)
                .filter(|r| r.outcome.is_success())
                .map(|r| r.place_time),
        )
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Random non-overlapping objects on the shelf, or `None` after
/// [`MAX_PLACEMENT_TRIES`] rejected samples.
pub fn place_objects<R: Rng + ?Sized>(spec: &ClutterSpec, rng: &mut R) -> Option<Vec<DiskObject>> {
    let mut placed: Vec<DiskObject> = Vec::with_capacity(spec.objects);
    let mut tries = 0;
    while placed.len() < spec.objects {
        let (class, radius, mass) = CLUTTER_CLASSES[rng.random_range(0..CLUTTER_CLASSES.len())];
        loop {
            tries += 1;
            if tries > MAX_PLACEMENT_TRIES {
                return None;
            }
            let (x0, x1) = (spec.shelf_x.0 + radius, spec.shelf_x.1 - radius);
            let (y0, y1) = (spec.shelf_y.0 + radius, spec.shelf_y.1 - radius);
            if x0 > x1 || y0 > y1 {
                continue;
            }
            let center = PlanarVec::new(rng.random_range(x0..=x1), rng.random_range(y0..=y1));
            let free = placed
                .iter()
                .all(|o| o.center.distance(center) >= o.radius + radius + spec.gap);
            if free {
                let id = placed.len() as u32;
                placed.push(DiskObject::new(id, center, radius, mass, class).expect("valid class"));
                break;
            }
        }
    }
    Some(placed)
}

/// Closest object the camera sees without occlusion, else the closest one.
fn choose_target(objects: &[DiskObject], camera: &GripperFrame) -> Option<(usize, bool)> {
    let mut order: Vec<usize> = (0..objects.len()).collect();
    order.sort_by(|&a, &b| {
        let da = objects[a].center.distance(camera.origin) - objects[a].radius;
        let db = objects[b].center.distance(camera.origin) - objects[b].radius;
        da.total_cmp(&db).then(objects[a].id.cmp(&objects[b].id))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for &i in &order {
        let others: Vec<&DiskObject> = objects.iter().filter(|o| o.id != objects[i].id).collect();
        if synth_scan(
            &objects[i],
            &others,
            camera,
            crate::perception::MIN_SCAN_POINTS,
            0.0,
            false,
            &mut rng,
        )
        .is_ok()
        {
            return Some((i, false));
        }
    }
    order.first().map(|&i| (i, true))
}

fn run_episode(
    episode: usize,
    kind: ControllerKind,
    initial: &[DiskObject],
    spec: &ClutterSpec,
    cfg: &ReflexConfig,
    params: &SimParams,
) -> Vec<ClutterAttempt> {
    let camera = GripperFrame::default();
    let mut objects = initial.to_vec();
    let mut out = Vec::new();
    let mut attempt = 0;
    while let Some((i, occluded)) = choose_target(&objects, &camera) {
        let seed = derive_seed(derive_seed(spec.seed, episode as u64), attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target_obj = objects[i].clone();
        let others: Vec<&DiskObject> = objects.iter().filter(|o| o.id != target_obj.id).collect();
        let target = synth_scan(
            &target_obj,
            &others,
            &camera,
            spec.scan_points,
            spec.noise_sigma,
            true,
            &mut rng,
        )
        .and_then(|scan| extract_target(&scan))
        .unwrap_or(target_obj.center);
        let scene = Scene {
            objects: objects.clone(),
            target_object: Some(target_obj.id),
            target,
            start: camera.origin,
            place: camera.origin,
        };
        let run = run_trial(kind, &scene, 2.0 * target_obj.radius, cfg, params, seed, false);
        objects = run.final_objects;
        objects.retain(|o| o.id != target_obj.id);
        out.push(ClutterAttempt {
            episode,
            attempt,
            occluded,
            record: run.record,
        });
        attempt += 1;
    }
    out
}

/// Run every episode for every controller on identical initial scenes and
/// seeds. Each object gets exactly one attempt and is then taken off the
/// shelf; objects disturbed by an attempt stay where they ended up.
pub fn run_clutter(spec: &ClutterSpec, cfg: &ReflexConfig, params: &SimParams) -> Result<ClutterResult, Error> {
    spec.validate()?;
    let mut scenes = Vec::with_capacity(spec.episodes);
    let mut skipped = Vec::new();
    let mut warnings = Vec::new();
    for ep in 0..spec.episodes {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed ^ 0x5EED, ep as u64));
        match place_objects(spec, &mut rng) {
            Some(objs) => scenes.push((ep, objs)),
            None => {
                skipped.push(ep);
                warnings.push(format!(
                    "episode {ep}: no placement for {} objects after {MAX_PLACEMENT_TRIES} samples, skipped",
                    spec.objects
                ));
            }
        }
    }
    let jobs: Vec<(usize, ControllerKind)> = scenes
        .iter()
        .enumerate()
        .flat_map(|(s, _)| spec.controllers.iter().map(move |&k| (s, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let per_job: Vec<Vec<ClutterAttempt>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, kind)| run_episode(scenes[s].0, kind, &scenes[s].1, spec, cfg, params))
            .collect()
    });
    Ok(ClutterResult {
        controllers: spec.controllers.clone(),
        attempts: per_job.into_iter().flatten().collect(),
        skipped_episodes: skipped,
        warnings,
    })
}
