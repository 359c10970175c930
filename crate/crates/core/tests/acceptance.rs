//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one PASS or FAIL line, then exits non-zero if any failed.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use reflex_grasp::experiments::{
    run_clutter, run_contour_following, run_grid_sweep, ClutterSpec, ContourSpec, ControllerKind, GridSpec, SimParams,
};
use reflex_grasp::finger::{pd_torque, tip_jacobian, FingerState, JointGains, Side, TipPose, JOINT_LIMIT};
use reflex_grasp::reflex::{
    estimate_from_contacts, estimate_object, evaluate_success, evaluate_triggers, potential_field_force, select_branch,
    RegraspBranch,
};
use reflex_grasp::sensing::{raycast_disk, ContactReading, ProximityVector};
use reflex_grasp::{DiskObject, PlanarVec, ReflexConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------- criterion 1

fn prox(d: [f64; 7]) -> ProximityVector {
    ProximityVector::from_array(d)
}

/// Field force for one tip written out per side, without the library's
/// direction tables.
fn field_oracle(side: Side, d: &ProximityVector, heading: f64) -> PlanarVec {
    let (c, s) = (heading.cos(), heading.sin());
    let forward = PlanarVec::new(c, s);
    // Left tip: out is +90 degrees from the heading, in is -90. Right mirrors.
    let left_of_heading = PlanarVec::new(-s, c);
    let (out_dir, in_dir, d_out, d_fwd, d_in) = match side {
        Side::Left => (left_of_heading, -left_of_heading, d.d_l_out, d.d_l_forward, d.d_l_in),
        Side::Right => (-left_of_heading, left_of_heading, d.d_r_out, d.d_r_forward, d.d_r_in),
    };
    let mut f = PlanarVec::ZERO;
    if d_out < 0.09 {
        f += out_dir * (20.0 * (d_out - 0.09));
    }
    if d_fwd < 0.09 {
        f += forward * (30.0 * (d_fwd - 0.09));
    }
    if d_in < 0.09 {
        f += in_dir * (12.0 * (d_in - 0.06));
    }
    f
}

fn criterion_1() -> Check {
    let started = Instant::now();
    let cfg = ReflexConfig::default();
    let far = [0.2; 7];

    // Listed cases.
    ensure(
        potential_field_force(Side::Left, &prox(far), &cfg, 0.3).norm() == 0.0,
        || "field not zero beyond thresholds".into(),
    )?;
    let mut d = far;
    d[0] = 0.05;
    let f = potential_field_force(Side::Left, &prox(d), &cfg, 0.0);
    ensure(close(f.x, 0.0, 1e-12) && close(f.y, -0.8, 1e-9), || {
        format!("out term {f:?}, expected (0, -0.8)")
    })?;
    for (d_in, expect) in [(0.08, 0.24), (0.04, -0.24)] {
        let mut d = far;
        d[2] = d_in;
        let f = potential_field_force(Side::Left, &prox(d), &cfg, 0.0);
        // Left in-direction at heading 0 is -y.
        ensure(close(f.y, -expect, 1e-9) && close(f.x, 0.0, 1e-12), || {
            format!("in term at {d_in}: {f:?}")
        })?;
    }
    let flags = |palm: f64, lf: f64| {
        let mut d = far;
        d[3] = palm;
        d[1] = lf;
        evaluate_triggers(&prox(d), 1.0, 1.0, &cfg)
    };
    let t = flags(0.04, 0.2);
    ensure(t.beta_near && t.beta_far, || format!("d_palm 0.04: {t:?}"))?;
    let t = flags(0.07, 0.2);
    ensure(!t.beta_near && t.beta_far, || format!("d_palm 0.07: {t:?}"))?;
    let t = flags(0.2, 0.03);
    ensure(t.beta_occlude, || format!("d_l_forward 0.03: {t:?}"))?;
    let contact = |f: f64| ContactReading {
        in_contact: true,
        theta: 0.0,
        f_normal: f,
        f_shear: 0.0,
    };
    let mut d = far;
    d[3] = 0.05;
    ensure(
        evaluate_success(&contact(0.6), &contact(0.7), 0.1, 0.1, &prox(d), &cfg),
        || "all clauses pass but success false".into(),
    )?;
    ensure(
        !evaluate_success(&contact(0.6), &contact(0.4), 0.1, 0.1, &prox(d), &cfg),
        || "weak right contact accepted".into(),
    )?;
    d[3] = 0.10;
    ensure(
        !evaluate_success(&contact(0.6), &contact(0.7), 0.1, 0.1, &prox(d), &cfg),
        || "palm beyond d_far accepted".into(),
    )?;
    let gains = JointGains {
        kp: [2.0; 3],
        kd: [0.02; 3],
        tau_max: 1.5,
    };
    let tau = pd_torque(
        &[0.5, 0.0, 0.0],
        &[0.0; 3],
        &[0.0; 3],
        &[0.0; 3],
        &[0.1, 0.0, 0.0],
        &gains,
    );
    ensure(close(tau[0], 1.1, 1e-12), || format!("pd torque {tau:?}, expected 1.1"))?;
    let tau = pd_torque(&[0.3; 3], &[0.2; 3], &[0.3; 3], &[0.2; 3], &[0.0; 3], &gains);
    ensure(tau == [0.0; 3], || format!("identity pd torque {tau:?}"))?;
    let tau = pd_torque(&[100.0; 3], &[0.0; 3], &[0.0; 3], &[0.0; 3], &[0.0; 3], &gains);
    ensure(tau == [1.5; 3], || format!("clamped pd torque {tau:?}"))?;

    // Randomized direct evaluation.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 20_000;
    for _ in 0..n {
        let d: [f64; 7] = std::array::from_fn(|_| rng.random_range(0.0..0.2));
        let p = prox(d);
        let heading = rng.random_range(-3.0..3.0);
        for side in Side::BOTH {
            let got = potential_field_force(side, &p, &cfg, heading);
            let want = field_oracle(side, &p, heading);
            ensure(got.distance(want) <= 1e-9, || {
                format!("field {side:?} {d:?}: {got:?} vs {want:?}")
            })?;
        }
        let (al, ar) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let t = evaluate_triggers(&p, al, ar, &cfg);
        let fires = d[3] < 0.05 || (d[3] < 0.09 && al < 0.0 && ar < 0.0) || d[1] < 0.04 || d[5] < 0.04;
        ensure(t.fires() == fires, || format!("triggers {d:?} {al} {ar}: {t:?}"))?;

        let (fl, fr) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let (vl, vr) = (rng.random_range(0.0..0.4), rng.random_range(0.0..0.4));
        let want = vl < 0.2 && vr < 0.2 && fl > 0.5 && fr > 0.5 && d[3] < 0.09;
        ensure(
            evaluate_success(&contact(fl), &contact(fr), vl, vr, &p, &cfg) == want,
            || format!("success {fl} {fr} {vl} {vr} {}", d[3]),
        )?;

        let q: [f64; 3] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let qd: [f64; 3] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let qdes: [f64; 3] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let qddes: [f64; 3] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let ff: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
        let tau = pd_torque(&qdes, &qddes, &q, &qd, &ff, &gains);
        for i in 0..3 {
            let raw = 2.0 * (qdes[i] - q[i]) + 0.02 * (qddes[i] - qd[i]) + ff[i];
            let want = if raw > 1.5 {
                1.5
            } else if raw < -1.5 {
                -1.5
            } else {
                raw
            };
            ensure(close(tau[i], want, 1e-9), || {
                format!("pd joint {i}: {} vs {want}", tau[i])
            })?;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "listed cases plus {n} random evaluations, {:.0} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 100_000;
    let mut counts = [0usize; 4];
    for i in 0..n {
        // Draw tip x from a small set now and then so that ties are exercised.
        let pick = |rng: &mut ChaCha8Rng| -> f64 {
            if rng.random_bool(0.05) {
                [0.05, 0.07, 0.09][rng.random_range(0..3)]
            } else {
                rng.random_range(0.0..0.15)
            }
        };
        let (x_obj, x_l, x_r) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let r_obj = rng.random_range(0.01..0.05);
        let (sl, sr) = ((x_obj - x_l).signum(), (x_obj - x_r).signum());
        let beyond_both = x_obj != x_l && x_obj != x_r && sl > 0.0 && sr > 0.0;
        let behind_both = x_obj != x_l && x_obj != x_r && sl < 0.0 && sr < 0.0;
        let want = if beyond_both {
            RegraspBranch::PinchPull
        } else if behind_both && r_obj < 0.03 {
            RegraspBranch::Antipodal
        } else {
            RegraspBranch::PowerWrap
        };
        let got = select_branch(x_obj, x_l, x_r, r_obj, 0.03);
        ensure(got == want, || {
            format!("sample {i}: x_obj {x_obj} tips ({x_l}, {x_r}) r {r_obj}: {got} vs {want}")
        })?;
        let class = match want {
            RegraspBranch::PinchPull => 0,
            RegraspBranch::Antipodal => 1,
            RegraspBranch::PowerWrap if sl * sr < 0.0 => 3,
            RegraspBranch::PowerWrap => 2,
        };
        counts[class] += 1;
    }
    for (x_obj, tips, r) in [(0.05, (0.07, 0.068), 0.04), (0.07, (0.06, 0.08), 0.02)] {
        let got = select_branch(x_obj, tips.0, tips.1, r, 0.03);
        ensure(got == RegraspBranch::PowerWrap, || {
            format!("listed case {x_obj} {tips:?}: {got}")
        })?;
    }
    ensure(counts.iter().all(|&c| c > 1000), || {
        format!("partition underpopulated: {counts:?}")
    })?;
    Ok(format!(
        "{n} samples, 0 misclassified (pinch-pull {}, antipodal {}, wrap {}, sign mismatch {})",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

// ---------------------------------------------------------------- criterion 3

/// First sample inside the disk when stepping along the ray.
fn march(origin: PlanarVec, dir: PlanarVec, disk: &DiskObject, d_max: f64, step: f64) -> Option<f64> {
    let steps = (d_max / step).floor() as usize;
    (0..=steps)
        .map(|k| k as f64 * step)
        .find(|&t| (origin + dir * t).distance(disk.center) <= disk.radius)
}

fn check_raycast(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let step = 1e-5;
    let d_max = 0.2;
    let mut hits = 0;
    for i in 0..1000 {
        let origin = PlanarVec::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
        let dir = PlanarVec::from_angle(rng.random_range(-3.2..3.2));
        let center = PlanarVec::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
        let disk = DiskObject::new(0, center, rng.random_range(0.01..0.05), 1.0, "d").unwrap();
        let got = raycast_disk(origin, dir, &disk, d_max);
        let want = march(origin, dir, &disk, d_max, step);
        match (got, want) {
            (Some(a), Some(b)) => {
                hits += 1;
                ensure((a - b).abs() <= 2e-5, || format!("case {i}: {a} vs oracle {b}"))?;
            }
            (None, None) => {}
            (a, b) => {
                // The marcher can only miss a chord shorter than its step, or
                // a surface within one step of the range limit.
                let along = (center - origin).dot(dir);
                let offset = ((center - origin).norm_squared() - along * along).max(0.0).sqrt();
                let chord = 2.0 * (disk.radius * disk.radius - offset * offset).max(0.0).sqrt();
                let near_limit = a.or(b).is_some_and(|t| t > d_max - step);
                ensure(chord < step || near_limit, || {
                    format!("case {i}: {a:?} vs oracle {b:?}")
                })?;
            }
        }
    }
    Ok(hits)
}

fn check_jacobian(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let h = 1e-6;
    for i in 0..1000 {
        let side = if rng.random_bool(0.5) { Side::Left } else { Side::Right };
        let q: [f64; 3] = std::array::from_fn(|_| rng.random_range(-JOINT_LIMIT..JOINT_LIMIT));
        let f = FingerState::new(side).with_q(q);
        let j = tip_jacobian(&f);
        for k in 0..3 {
            let (mut qp, mut qm) = (q, q);
            qp[k] += h;
            qm[k] -= h;
            let (p, m) = (
                f.clone().with_q(qp).tip_pose().position,
                f.clone().with_q(qm).tip_pose().position,
            );
            let fd = (p - m) * (0.5 / h);
            ensure(close(j[0][k], fd.x, 1e-6) && close(j[1][k], fd.y, 1e-6), || {
                format!("config {i} joint {k}: ({}, {}) vs fd {fd:?}", j[0][k], j[1][k])
            })?;
        }
    }
    Ok(())
}

/// Contacts on a known disk: left tip near +y looking in, right near -y.
fn synth_contacts(rng: &mut ChaCha8Rng) -> (PlanarVec, f64, [PlanarVec; 2], [PlanarVec; 2]) {
    let center = PlanarVec::new(rng.random_range(0.05..0.15), rng.random_range(-0.03..0.03));
    let r = rng.random_range(0.015..0.05);
    let spread = 20f64.to_radians();
    let a_l = -std::f64::consts::FRAC_PI_2 + rng.random_range(-spread..spread);
    let a_r = std::f64::consts::FRAC_PI_2 + rng.random_range(-spread..spread);
    // Inward normals point from the tip into the object.
    let normals = [PlanarVec::from_angle(a_l), PlanarVec::from_angle(a_r)];
    let points = normals.map(|n| center - n * r);
    (center, r, points, normals)
}

fn check_estimate(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let r_tip = 0.012;
    for i in 0..1000 {
        let (center, r, points, normals) = synth_contacts(rng);
        let heading = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let tips: [TipPose; 2] = std::array::from_fn(|k| TipPose {
            position: points[k] - normals[k] * r_tip,
            heading: heading[k],
        });
        let readings: [ContactReading; 2] = std::array::from_fn(|k| ContactReading {
            in_contact: true,
            theta: normals[k].angle() - heading[k],
            f_normal: 1.0,
            f_shear: 0.0,
        });
        let est = estimate_object([&tips[0], &tips[1]], [&readings[0], &readings[1]], r_tip)
            .map_err(|e| format!("case {i}: {e}"))?;
        ensure(est.center.distance(center) < 1e-9 && close(est.radius, r, 1e-9), || {
            format!("case {i}: {est:?} vs center {center:?} r {r}")
        })?;
    }
    let noise = Normal::new(0.0, 0.0005).unwrap();
    let mut errors: Vec<f64> = (0..1000)
        .map(|_| {
            let (center, _, points, normals) = synth_contacts(rng);
            let noisy = points.map(|p| p + PlanarVec::new(noise.sample(rng), noise.sample(rng)));
            estimate_from_contacts(noisy, normals).map_or(f64::INFINITY, |e| e.center.distance(center))
        })
        .collect();
    errors.sort_by(f64::total_cmp);
    let p95 = errors[949];
    ensure(p95 < 0.0015, || {
        format!("95th percentile center error {:.3} mm", p95 * 1e3)
    })?;
    Ok(p95)
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let hits = check_raycast(&mut rng)?;
    check_jacobian(&mut rng)?;
    let p95 = check_estimate(&mut rng)?;
    Ok(format!(
        "raycast 1000 cases ({hits} hits), jacobian 1000 configs, estimate p95 {:.3} mm at 0.5 mm noise",
        p95 * 1e3
    ))
}

// ---------------------------------------------------------------- criterion 4

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_reflex"))
        .args(args)
        .env_remove("REFLEX_CONFIG")
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    Ok(out)
}

fn same_files(a: &Path, b: &Path, names: &[&str]) -> Result<(), String> {
    for name in names {
        let (x, y) = (std::fs::read(a.join(name)), std::fs::read(b.join(name)));
        let (x, y) = (
            x.map_err(|e| format!("{name}: {e}"))?,
            y.map_err(|e| format!("{name}: {e}"))?,
        );
        ensure(!x.is_empty() && x == y, || format!("{name} differs between runs"))?;
    }
    Ok(())
}

fn criterion_4() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = |name: &str| tmp.path().join(name).to_string_lossy().into_owned();

    for run in ["g1", "g2"] {
        std::fs::create_dir_all(dir(run)).map_err(|e| e.to_string())?;
        let log = format!("{}/log.csv", dir(run));
        let rec = format!("{}/record.csv", dir(run));
        let out = run_cli(&["grasp", "--object", "0.33,0.02,0.0325", "--log", &log, "--record", &rec])?;
        ensure(out.status.code() == Some(0), || {
            format!("grasp exit {:?}", out.status.code())
        })?;
    }
    same_files(
        &tmp.path().join("g1"),
        &tmp.path().join("g2"),
        &["log.csv", "record.csv"],
    )?;

    for (run, jobs) in [("s1", "1"), ("s8", "8")] {
        let out = run_cli(&["sweep", "--pitch", "0.05", "--jobs", jobs, "--out-dir", &dir(run)])?;
        ensure(out.status.success(), || format!("sweep exit {:?}", out.status.code()))?;
    }
    same_files(
        &tmp.path().join("s1"),
        &tmp.path().join("s8"),
        &["trials.csv", "grid.csv", "areas.csv", "summary.txt"],
    )?;

    for (run, jobs) in [("c1", "1"), ("c8", "8")] {
        let out = run_cli(&["clutter", "--episodes", "3", "--jobs", jobs, "--out-dir", &dir(run)])?;
        ensure(out.status.success(), || format!("clutter exit {:?}", out.status.code()))?;
    }
    same_files(
        &tmp.path().join("c1"),
        &tmp.path().join("c8"),
        &["trials.csv", "table.csv", "summary.txt"],
    )?;
    Ok("grasp rerun, sweep and clutter under --jobs 1 and --jobs 8 are byte-identical".into())
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Check {
    let started = Instant::now();
    let spec = GridSpec::default();
    let result = run_grid_sweep(&spec, &ReflexConfig::default(), &SimParams::default()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let area = |k| result.area_mm2(k);
    let (b, p, f) = (
        area(ControllerKind::Baseline),
        area(ControllerKind::Partial),
        area(ControllerKind::Full),
    );
    let summary = format!(
        "areas {b:.0} / {p:.0} / {f:.0} mm2 (reference 11250 / 14530 / 17500), full/baseline {:.2}, {:.1} s",
        f / b,
        elapsed.as_secs_f64()
    );
    ensure(b < p && p < f, || format!("ordering violated: {summary}"))?;
    ensure(f >= 1.3 * b, || format!("ratio below 1.3: {summary}"))?;
    let nominal = result.nominal_cell().ok_or("no nominal cell")?;
    for k in ControllerKind::ALL {
        let o = result.outcome(nominal, k);
        ensure(o.is_some_and(|o| o.is_success()), || format!("{k} at nominal: {o:?}"))?;
    }
    ensure(elapsed < Duration::from_secs(300), || format!("too slow: {summary}"))?;
    Ok(summary)
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Check {
    let started = Instant::now();
    let spec = ClutterSpec::default();
    let result = run_clutter(&spec, &ReflexConfig::default(), &SimParams::default()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let (full, base) = (ControllerKind::Full, ControllerKind::Baseline);
    let (rf, rb) = (result.success_rate(full), result.success_rate(base));
    let pick = result.mean_pick_time(full);
    let summary = format!(
        "full {}/{} ({:.1}%), baseline {}/{} ({:.1}%), mean pick {pick:.2} s, {:.1} s",
        result.successes(full),
        result.trials(full),
        rf * 100.0,
        result.successes(base),
        result.trials(base),
        rb * 100.0,
        elapsed.as_secs_f64()
    );
    ensure(result.trials(full) >= 100 && result.trials(base) >= 100, || {
        format!("too few trials: {summary}")
    })?;
    ensure(rf >= 0.90, || format!("full rate below 90%: {summary}"))?;
    ensure(rf - rb >= 0.15, || format!("margin below 15 points: {summary}"))?;
    ensure(pick <= 10.0, || format!("pick time above 10 s: {summary}"))?;
    ensure(elapsed < Duration::from_secs(120), || format!("too slow: {summary}"))?;
    Ok(summary)
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Check {
    let cfg = ReflexConfig::default();
    let report =
        run_contour_following(&ContourSpec::default(), &cfg, &SimParams::default()).map_err(|e| e.to_string())?;
    let summary = format!(
        "start {:.3} m, settled at {} s, final {:.4} m",
        report.samples.first().map_or(f64::NAN, |s| s.d_in),
        report.settled_at.map_or("never".into(), |t| format!("{t:.2}")),
        report.final_distance
    );
    ensure(report.settled_within(1.0), || {
        format!("not settled within 1 s: {summary}")
    })?;
    ensure(close(report.final_distance, 0.06, 0.005), || {
        format!("final distance off: {summary}")
    })?;
    Ok(summary)
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out_dir = tmp.path().join("s").to_string_lossy().into_owned();
    let out = run_cli(&["sweep", "--pitch", "0.1", "--jobs", "1", "--out-dir", &out_dir])?;
    ensure(out.status.success(), || format!("sweep exit {:?}", out.status.code()))?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let line = stdout
        .lines()
        .find(|l| l.starts_with("real-time factor:"))
        .ok_or("sweep summary has no real-time factor line")?;
    let factor: f64 = line
        .trim_start_matches("real-time factor:")
        .split('x')
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| format!("unparsable line `{line}`"))?;
    let timing = std::fs::read_to_string(tmp.path().join("s/timing.txt")).map_err(|e| e.to_string())?;
    ensure(timing.contains(line), || "timing.txt disagrees with stdout".into())?;
    ensure(factor >= 50.0, || format!("real-time factor {factor:.1}x"))?;
    Ok(format!(
        "{factor:.0}x real time single-threaded, as reported by the sweep"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("equation fidelity", criterion_1),
        ("re-grasp branch table", criterion_2),
        ("oracle equivalence", criterion_3),
        ("determinism", criterion_4),
        ("grid characterization", criterion_5),
        ("clutter clearing", criterion_6),
        ("contour following", criterion_7),
        ("performance", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
