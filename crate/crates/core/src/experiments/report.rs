//! CSV tables, text summaries and the optional SVG success map.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::{ClutterResult, ControllerKind, EventRow, GridResult, TrialRecord};
use crate::error::Error;

/// Published success-set areas (mm²) for the three controllers.
pub const REFERENCE_AREAS_MM2: [(ControllerKind, f64); 3] = [
    (ControllerKind::Baseline, 11250.0),
    (ControllerKind::Partial, 14530.0),
    (ControllerKind::Full, 17500.0),
];

pub fn reference_area(kind: ControllerKind) -> f64 {
    REFERENCE_AREAS_MM2
        .iter()
        .find(|(k, _)| *k == kind)
        .map_or(f64::NAN, |(_, a)| *a)
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: impl IntoIterator<Item = T>) -> Result<(), Error> {
    write_rows_or_header(w, rows, &[])
}

/// Like `write_rows`, but an empty table still gets `header`.
fn write_rows_or_header<W: Write, T: Serialize>(
    w: W,
    rows: impl IntoIterator<Item = T>,
    header: &[&str],
) -> Result<(), Error> {
    let mut out = csv::Writer::from_writer(w);
    let mut empty = true;
    for row in rows {
        out.serialize(row)?;
        empty = false;
    }
    if empty && !header.is_empty() {
        out.write_record(header)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_trials_csv<W: Write>(w: W, records: &[TrialRecord]) -> Result<(), Error> {
    write_rows(w, records)
}

pub fn write_events_csv<W: Write>(w: W, events: &[EventRow]) -> Result<(), Error> {
    write_rows(w, events)
}

#[derive(Serialize)]
struct GridRow<'a> {
    ix: i64,
    iy: i64,
    dx: f64,
    dy: f64,
    x: f64,
    y: f64,
    controller: ControllerKind,
    outcome: &'a str,
    regrasp_count: u32,
    pick_time: f64,
}

/// One row per cell and controller.
pub fn write_grid_csv<W: Write>(w: W, result: &GridResult) -> Result<(), Error> {
    let mut rows = Vec::with_capacity(result.records.len());
    for (i, c) in result.cells.iter().enumerate() {
        for &kind in &result.controllers {
            let Some(r) = result.record(i, kind) else { continue };
            rows.push(GridRow {
                ix: c.ix,
                iy: c.iy,
                dx: c.dx,
                dy: c.dy,
                x: result.nominal.x + c.dx,
                y: result.nominal.y + c.dy,
                controller: kind,
                outcome: r.outcome.label(),
                regrasp_count: r.regrasp_count,
                pick_time: r.pick_time,
            });
        }
    }
    write_rows(w, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaRow {
    pub controller: ControllerKind,
    pub cells: usize,
    pub area_mm2: f64,
    /// Area relative to the baseline, when the baseline was swept.
    pub ratio_to_baseline: Option<f64>,
    pub reference_area_mm2: f64,
    pub reference_ratio: f64,
}

pub fn area_rows(result: &GridResult) -> Vec<AreaRow> {
    let base = result
        .controllers
        .contains(&ControllerKind::Baseline)
        .then(|| result.area_mm2(ControllerKind::Baseline))
        .filter(|a| *a > 0.0);
    let ref_base = reference_area(ControllerKind::Baseline);
    result
        .controllers
        .iter()
        .map(|&k| {
            let area = result.area_mm2(k);
            AreaRow {
                controller: k,
                cells: result.success_count(k),
                area_mm2: area,
                ratio_to_baseline: base.map(|b| area / b),
                reference_area_mm2: reference_area(k),
                reference_ratio: reference_area(k) / ref_base,
            }
        })
        .collect()
}

pub fn write_area_csv<W: Write>(w: W, result: &GridResult) -> Result<(), Error> {
    write_rows(w, area_rows(result))
}

/// Human-readable sweep summary. `realtime` is the measured simulated-to-wall
/// time ratio for a single-object trial.
pub fn grid_summary(result: &GridResult, realtime: Option<f64>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "grid sweep: pitch {:.1} mm, {} cells, nominal ({:.3}, {:.3}) m",
        result.pitch * 1000.0,
        result.cells.len(),
        result.nominal.x,
        result.nominal.y
    );
    let _ = writeln!(
        s,
        "{:<10} {:>6} {:>10} {:>8}   {:>10} {:>8}",
        "controller", "cells", "area mm2", "ratio", "reference", "ratio"
    );
    for row in area_rows(result) {
        let ratio = row.ratio_to_baseline.map_or("-".to_string(), |r| format!("{r:.3}"));
        let _ = writeln!(
            s,
            "{:<10} {:>6} {:>10.1} {:>8}   {:>10.0} {:>8.3}",
            row.controller.label(),
            row.cells,
            row.area_mm2,
            ratio,
            row.reference_area_mm2,
            row.reference_ratio
        );
    }
    if let Some(nominal) = result.nominal_cell() {
        let at: Vec<String> = result
            .controllers
            .iter()
            .map(|&k| {
                format!(
                    "{}={}",
                    k.label(),
                    result.outcome(nominal, k).map_or("-", |o| o.label())
                )
            })
            .collect();
        let _ = writeln!(s, "nominal cell: {}", at.join(" "));
    }
    let _ = writeln!(
        s,
        "reference areas are from hardware trials and are not expected to match"
    );
    if let Some(rt) = realtime {
        let _ = writeln!(s, "real-time factor: {rt:.1}x (single object, one thread)");
    }
    s
}

#[derive(Serialize)]
struct AttemptRow<'a> {
    episode: usize,
    attempt: usize,
    occluded: bool,
    controller: ControllerKind,
    object_id: Option<u32>,
    object_class: &'a str,
    object_x: Option<f64>,
    object_y: Option<f64>,
    target_x: f64,
    target_y: f64,
    outcome: &'a str,
    pick_time: f64,
    place_time: f64,
    regrasp_count: u32,
    seed: u64,
    diverged: bool,
}

const ATTEMPT_HEADER: [&str; 16] = [
    "episode",
    "attempt",
    "occluded",
    "controller",
    "object_id",
    "object_class",
    "object_x",
    "object_y",
    "target_x",
    "target_y",
    "outcome",
    "pick_time",
    "place_time",
    "regrasp_count",
    "seed",
    "diverged",
];

pub fn write_clutter_trials_csv<W: Write>(w: W, result: &ClutterResult) -> Result<(), Error> {
    write_rows_or_header(
        w,
        result.attempts.iter().map(|a| AttemptRow {
            episode: a.episode,
            attempt: a.attempt,
            occluded: a.occluded,
            controller: a.record.controller,
            object_id: a.record.object_id,
            object_class: &a.record.object_class,
            object_x: a.record.object_x,
            object_y: a.record.object_y,
            target_x: a.record.target_x,
            target_y: a.record.target_y,
            outcome: a.record.outcome.label(),
            pick_time: a.record.pick_time,
            place_time: a.record.place_time,
            regrasp_count: a.record.regrasp_count,
            seed: a.record.seed,
            diverged: a.record.diverged,
        }),
        &ATTEMPT_HEADER,
    )
}

#[derive(Serialize)]
struct ClassRow<'a> {
    controller: ControllerKind,
    class: &'a str,
    trials: usize,
    successes: usize,
    rate: f64,
}

/// Per-class rows followed by an `all` row for each controller. Classes
/// and controllers without trials are left out.
pub fn write_clutter_table_csv<W: Write>(w: W, result: &ClutterResult) -> Result<(), Error> {
    let mut stats = Vec::new();
    for &k in &result.controllers {
        for c in result.class_stats(k).into_iter().filter(|c| c.trials > 0) {
            stats.push((k, c));
        }
    }
    let mut rows: Vec<ClassRow> = stats
        .iter()
        .map(|(k, c)| ClassRow {
            controller: *k,
            class: &c.class,
            trials: c.trials,
            successes: c.successes,
            rate: c.rate(),
        })
        .collect();
    for &k in result.controllers.iter().filter(|&&k| result.trials(k) > 0) {
        rows.push(ClassRow {
            controller: k,
            class: "all",
            trials: result.trials(k),
            successes: result.successes(k),
            rate: result.success_rate(k),
        });
    }
    write_rows_or_header(w, rows, &["controller", "class", "trials", "successes", "rate"])
}

pub fn clutter_summary(result: &ClutterResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "clutter clearing: {} trials", result.attempts.len());
    for &k in &result.controllers {
        let _ = writeln!(
            s,
            "{:<10} {:>4}/{:<4} {:>6.1}%  mean pick {:.2} s  mean place {:.2} s",
            k.label(),
            result.successes(k),
            result.trials(k),
            100.0 * result.success_rate(k),
            result.mean_pick_time(k),
            result.mean_place_time(k)
        );
        for c in result.class_stats(k).into_iter().filter(|c| c.trials > 0) {
            let _ = writeln!(
                s,
                "    {:<8} {:>3}/{:<3} {:>6.1}%",
                c.class,
                c.successes,
                c.trials,
                100.0 * c.rate()
            );
        }
    }
    for w in &result.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

/// Side-by-side success maps, one panel per controller. Filled cells
/// succeeded; the nominal cell is outlined.
pub fn grid_svg(result: &GridResult) -> String {
    const CELL: f64 = 14.0;
    const GAP: f64 = 30.0;
    const TOP: f64 = 30.0;
    let (Some(x0), Some(x1)) = (
        result.cells.iter().map(|c| c.ix).min(),
        result.cells.iter().map(|c| c.ix).max(),
    ) else {
        return String::from("<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n");
    };
    let y0 = result.cells.iter().map(|c| c.iy).min().unwrap_or(0);
    let y1 = result.cells.iter().map(|c| c.iy).max().unwrap_or(0);
    // World x runs up the page and world y to the left, as seen from above
    // behind the gripper.
    let cols = (y1 - y0 + 1) as f64;
    let rows = (x1 - x0 + 1) as f64;
    let panel_w = cols * CELL;
    let width = result.controllers.len() as f64 * (panel_w + GAP) + GAP;
    let height = rows * CELL + TOP + GAP;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    for (p, &kind) in result.controllers.iter().enumerate() {
        let left = GAP + p as f64 * (panel_w + GAP);
        let _ = writeln!(
            s,
            "<text x=\"{left}\" y=\"18\">{} {:.0} mm2</text>",
            kind.label(),
            result.area_mm2(kind)
        );
        for (i, c) in result.cells.iter().enumerate() {
            let ok = result.outcome(i, kind).is_some_and(|o| o.is_success());
            let x = left + (y1 - c.iy) as f64 * CELL;
            let y = TOP + (x1 - c.ix) as f64 * CELL;
            let fill = if ok { "#2b6cb0" } else { "#edf2f7" };
            let stroke = if c.ix == 0 && c.iy == 0 { "#c53030" } else { "#a0aec0" };
            let _ = writeln!(
                s,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"{stroke}\"/>"
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
