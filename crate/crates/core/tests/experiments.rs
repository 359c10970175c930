use std::collections::{BTreeMap, HashMap};

use reflex_grasp::experiments::report::{write_clutter_table_csv, write_clutter_trials_csv, write_grid_csv};
use reflex_grasp::experiments::{
    run_clutter, run_grid_sweep, ClutterSpec, ControllerKind, GridResult, GridSpec, Outcome, SimParams,
};
use reflex_grasp::ReflexConfig;

fn sweep(pitch: f64, jobs: usize) -> GridResult {
    let spec = GridSpec {
        pitch,
        jobs,
        ..GridSpec::default()
    };
    run_grid_sweep(&spec, &ReflexConfig::default(), &SimParams::default()).unwrap()
}

fn csv_rows(bytes: &[u8]) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            header
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

/// Area of the coarse cells whose outcome differs from a 4-neighbour.
fn boundary_band_mm2(result: &GridResult, kind: ControllerKind) -> f64 {
    let ok: HashMap<(i64, i64), bool> = result
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| ((c.ix, c.iy), result.outcome(i, kind) == Some(Outcome::Succeeded)))
        .collect();
    let band = ok
        .iter()
        .filter(|(&(x, y), &s)| {
            [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|(dx, dy)| ok.get(&(x + dx, y + dy)).is_some_and(|&n| n != s))
        })
        .count();
    let pitch_mm = result.pitch * 1e3;
    band.max(1) as f64 * pitch_mm * pitch_mm
}

#[test]
fn halving_the_pitch_stays_within_the_boundary_band() {
    let coarse = sweep(0.025, 0);
    let fine = sweep(0.0125, 0);
    for k in ControllerKind::ALL {
        let (a, b) = (coarse.area_mm2(k), fine.area_mm2(k));
        let band = boundary_band_mm2(&coarse, k);
        assert!((a - b).abs() < band, "{k}: coarse {a} fine {b} band {band}");
    }
}

#[test]
fn serial_and_parallel_sweeps_agree() {
    assert_eq!(sweep(0.05, 1), sweep(0.05, 8));
}

#[test]
fn success_cells_match_raw_records() {
    let result = sweep(0.025, 0);
    let mut buf = Vec::new();
    write_grid_csv(&mut buf, &result).unwrap();
    let rows = csv_rows(&buf);
    assert_eq!(rows.len(), result.cells.len() * result.controllers.len());
    let mut succeeded: BTreeMap<String, usize> = BTreeMap::new();
    for row in &rows {
        let (ix, iy): (i64, i64) = (row["ix"].parse().unwrap(), row["iy"].parse().unwrap());
        let kind: ControllerKind = row["controller"].parse().unwrap();
        let cell = result.cells.iter().position(|c| c.ix == ix && c.iy == iy).unwrap();
        let record = result.record(cell, kind).unwrap();
        assert_eq!(row["outcome"], record.outcome.label());
        if row["outcome"] == "SUCCEEDED" {
            *succeeded.entry(row["controller"].clone()).or_default() += 1;
        }
    }
    for k in ControllerKind::ALL {
        let n = succeeded.get(k.label()).copied().unwrap_or(0);
        assert_eq!(n, result.success_count(k));
        assert_eq!(result.area_mm2(k), n as f64 * 625.0);
    }
}

#[test]
fn clutter_table_recomputes_from_raw_trials() {
    let spec = ClutterSpec {
        episodes: 6,
        ..ClutterSpec::default()
    };
    let result = run_clutter(&spec, &ReflexConfig::default(), &SimParams::default()).unwrap();
    let (mut trials, mut table) = (Vec::new(), Vec::new());
    write_clutter_trials_csv(&mut trials, &result).unwrap();
    write_clutter_table_csv(&mut table, &result).unwrap();

    let mut counts: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
    for row in csv_rows(&trials) {
        let ok = usize::from(row["outcome"] == "SUCCEEDED");
        for class in [row["object_class"].clone(), "all".to_string()] {
            let e = counts.entry((row["controller"].clone(), class)).or_default();
            e.0 += 1;
            e.1 += ok;
        }
    }
    let table = csv_rows(&table);
    assert_eq!(table.len(), counts.len());
    for row in table {
        let (n, s) = counts[&(row["controller"].clone(), row["class"].clone())];
        assert_eq!(row["trials"].parse::<usize>().unwrap(), n);
        assert_eq!(row["successes"].parse::<usize>().unwrap(), s);
        assert_eq!(row["rate"].parse::<f64>().unwrap(), s as f64 / n as f64);
    }
}

#[test]
fn clutter_is_reproducible_and_job_count_independent() {
    let spec = |jobs| ClutterSpec {
        episodes: 3,
        jobs,
        ..ClutterSpec::default()
    };
    let cfg = ReflexConfig::default();
    let a = run_clutter(&spec(1), &cfg, &SimParams::default()).unwrap();
    let b = run_clutter(&spec(8), &cfg, &SimParams::default()).unwrap();
    assert_eq!(a, b);
    assert!(a
        .records(ControllerKind::Full)
        .all(|r| r.pick_time >= 0.0 && r.place_time >= 0.0));
}
