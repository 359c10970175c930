//! Success sets over a grid of object displacements with a fixed commanded target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, run_trial, ControllerKind, Outcome, Scene, SimParams, TrialRecord};
use crate::config::ReflexConfig;
use crate::error::Error;
use crate::geometry::{DiskObject, PlanarVec};

pub const CUP_RADIUS: f64 = 0.0325;
pub const CUP_MASS: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub pitch: f64,
    /// Displacement range along world x, relative to the nominal target.
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nominal: PlanarVec,
    pub controllers: Vec<ControllerKind>,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            pitch: 0.025,
            x_range: (-0.1, 0.1),
            y_range: (-0.0875, 0.0875),
            nominal: PlanarVec::new(0.30, 0.0),
            controllers: ControllerKind::ALL.to_vec(),
            seed: 1,
            jobs: 0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.pitch > 0.0 && self.pitch.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "pitch must be positive, got {}",
                self.pitch
            )));
        }
        for (name, (lo, hi)) in [("x", self.x_range), ("y", self.y_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidArgument(format!("{name} range {lo}..{hi}")));
            }
        }
        if self.controllers.is_empty() {
            return Err(Error::InvalidArgument("no controllers selected".into()));
        }
        Ok(())
    }

    fn indices(lo: f64, hi: f64, pitch: f64) -> std::ops::RangeInclusive<i64> {
        let eps = 1e-9;
        ((lo / pitch - eps).ceil() as i64)..=((hi / pitch + eps).floor() as i64)
    }

    /// Cells at integer multiples of the pitch inside the extent, row-major in y then x.
    pub fn cells(&self) -> Vec<GridCell> {
        let mut out = Vec::new();
        for iy in Self::indices(self.y_range.0, self.y_range.1, self.pitch) {
            for ix in Self::indices(self.x_range.0, self.x_range.1, self.pitch) {
                out.push(GridCell {
                    ix,
                    iy,
                    dx: ix as f64 * self.pitch,
                    dy: iy as f64 * self.pitch,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub ix: i64,
    pub iy: i64,
    /// Object displacement from the nominal target.
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub pitch: f64,
    pub nominal: PlanarVec,
    pub controllers: Vec<ControllerKind>,
    pub cells: Vec<GridCell>,
    /// One record per cell and controller, cell-major.
    pub records: Vec<TrialRecord>,
}

impl GridResult {
    pub fn record(&self, cell: usize, kind: ControllerKind) -> Option<&TrialRecord> {
        let k = self.controllers.iter().position(|&c| c == kind)?;
        self.records.get(cell * self.controllers.len() + k)
    }

    pub fn outcome(&self, cell: usize, kind: ControllerKind) -> Option<Outcome> {
        self.record(cell, kind).map(|r| r.outcome)
    }

    pub fn success_count(&self, kind: ControllerKind) -> usize {
        (0..self.cells.len())
            .filter(|&i| self.outcome(i, kind).is_some_and(Outcome::is_success))
            .count()
    }

    /// Success-set area in mm².
    pub fn area_mm2(&self, kind: ControllerKind) -> f64 {
        let pitch_mm = self.pitch * 1000.0;
        self.success_count(kind) as f64 * pitch_mm * pitch_mm
    }

    pub fn nominal_cell(&self) -> Option<usize> {
        self.cells.iter().position(|c| c.ix == 0 && c.iy == 0)
    }
}

/// Place the cup at every cell, keep the grasp commanded at the nominal
/// target, and run each controller once. Results do not depend on `jobs`.
pub fn run_grid_sweep(spec: &GridSpec, cfg: &ReflexConfig, params: &SimParams) -> Result<GridResult, Error> {
    spec.validate()?;
    let cells = spec.cells();
    let jobs: Vec<(usize, ControllerKind)> = (0..cells.len())
        .flat_map(|i| spec.controllers.iter().map(move |&k| (i, k)))
        .collect();
    let run = |&(i, kind): &(usize, ControllerKind)| {
        let c = &cells[i];
        let center = spec.nominal + PlanarVec::new(c.dx, c.dy);
        let cup = DiskObject::new(0, center, CUP_RADIUS, CUP_MASS, "cup").expect("valid cup");
        let scene = Scene::single(Some(cup), spec.nominal);
        run_trial(
            kind,
            &scene,
            2.0 * CUP_RADIUS,
            cfg,
            params,
            derive_seed(spec.seed, i as u64),
            false,
        )
        .record
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let records = pool.install(|| jobs.par_iter().map(run).collect());
    Ok(GridResult {
        pitch: spec.pitch,
        nominal: spec.nominal,
        controllers: spec.controllers.clone(),
        cells,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_extent_cell_count() {
        let spec = GridSpec::default();
        let cells = spec.cells();
        // 9 columns by 7 rows at 25 mm.
        assert_eq!(cells.len(), 63);
        assert!(cells.iter().any(|c| c.ix == 0 && c.iy == 0));
        let half = GridSpec { pitch: 0.0125, ..spec };
        assert_eq!(half.cells().len(), 17 * 15);
    }

    #[test]
    fn zero_pitch_rejected() {
        let spec = GridSpec {
            pitch: 0.0,
            ..GridSpec::default()
        };
        assert!(spec.validate().is_err());
        let spec = GridSpec {
            pitch: f64::NAN,
            ..GridSpec::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn single_nominal_cell_area() {
        let spec = GridSpec {
            x_range: (0.0, 0.0),
            y_range: (0.0, 0.0),
            controllers: vec![ControllerKind::Full],
            jobs: 1,
            ..GridSpec::default()
        };
        let r = run_grid_sweep(&spec, &ReflexConfig::default(), &SimParams::default()).unwrap();
        assert_eq!(r.cells.len(), 1);
        let ok = r.outcome(0, ControllerKind::Full) == Some(Outcome::Succeeded);
        assert_eq!(r.area_mm2(ControllerKind::Full), if ok { 625.0 } else { 0.0 });
        assert!(ok);
    }
}
