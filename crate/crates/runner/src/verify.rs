//! Re-checks a run directory: file checksums against the manifest, then the
//! acceptance assertions recomputed from the emitted CSV files.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;

use crate::analysis::{
    dominant_frequency, half_range, strictly_decreasing, strictly_increasing, turn_in_trap_sense, window_mean,
};
use crate::config::{Kind, ScenarioConfig};
use crate::error::RunError;
use crate::manifest::{sha256_hex, RunManifest, Status};
use crate::output::{column, read_csv};
use crate::scenario::sweep_cells;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

/// Parameters for which the rotating-trap bounds are asserted.
fn is_reference_rotation(c: &ScenarioConfig) -> bool {
    c.trap.epsilon == 1.5
        && c.schedule.rate_end == 0.4
        && c.trap.g_n == 100.0
        && c.schedule.t_end == 15.0
        && c.grid.n == 128
}

pub fn verify_dir(dir: &Path) -> Result<Vec<Check>, RunError> {
    let m = RunManifest::read(dir)?;
    let mut out = vec![check(
        "run complete",
        m.status == Status::Complete,
        m.error.clone().unwrap_or_else(|| format!("{:?}", m.status)),
    )];
    let mut bad = Vec::new();
    for f in &m.files {
        match fs::read(dir.join(&f.path)) {
            Ok(b) if b.len() as u64 == f.bytes && sha256_hex(&b) == f.sha256 => {}
            Ok(_) => bad.push(format!("{} (checksum)", f.path)),
            Err(e) => bad.push(format!("{} ({e})", f.path)),
        }
    }
    out.push(check("checksums", bad.is_empty(), format!("{} files, mismatched: {:?}", m.files.len(), bad)));
    // content checks would only re-read files that are incomplete or altered
    if m.status != Status::Complete || !bad.is_empty() {
        return Ok(out);
    }
    let c = &m.config;
    match c.kind {
        Kind::GroundState => out.extend(ground_checks(dir, c)?),
        Kind::Rotate | Kind::RotateRelease => {
            out.extend(ground_checks(dir, c)?);
            out.extend(dynamic_checks(dir, c)?);
        }
        Kind::FreeExpansionAnalytic => out.extend(analytic_checks(dir, c)?),
        Kind::Sweep => out.extend(sweep_checks(dir, c)?),
    }
    Ok(out)
}

fn ground_checks(dir: &Path, c: &ScenarioConfig) -> Result<Vec<Check>, RunError> {
    let (h, rows) = read_csv(&dir.join("ground.csv"))?;
    let mut out = Vec::new();
    if c.trap.g_n == 100.0 && c.trap.epsilon == 1.5 {
        let e = column(&h, &rows, "mu_rel_err")?[0];
        out.push(check("mu within 3% of mu_TF", e.abs() < 0.03, format!("{:.4}%", 100.0 * e)));
        let et = column(&h, &rows, "e_total")?[0];
        let etf = column(&h, &rows, "e_tf")?[0];
        let rel = (et - etf) / etf;
        out.push(check("energy within 5% of (d+2)/(d+4) mu_TF", rel.abs() < 0.05, format!("{:.4}%", 100.0 * rel)));
    }
    Ok(out)
}

fn dynamic_checks(dir: &Path, c: &ScenarioConfig) -> Result<Vec<Check>, RunError> {
    let mut out = Vec::new();
    let (h, rows) = read_csv(&dir.join("bures.csv"))?;
    let t = column(&h, &rows, "t")?;
    let b = column(&h, &rows, "bures")?;
    let norm = column(&h, &rows, "norm")?;
    let angle = column(&h, &rows, "angle")?;
    let n0 = norm[0];
    let drift = norm.iter().map(|n| (n - n0).abs() / n0).fold(0.0, f64::max);
    out.push(check("norm drift < 1e-6", drift < 1e-6, format!("{drift:.3e}")));
    let (hl, rl) = read_csv(&dir.join("lambda.csv"))?;
    let irr = column(&hl, &rl, "irrot")?.into_iter().fold(0.0, f64::max);
    out.push(check("irrotationality < 1e-8", irr < 1e-8, format!("{irr:.3e}")));

    let sched = c.rotation_schedule();
    let t_rot_end = sched.t_off.unwrap_or(f64::INFINITY);
    let b_rot = t.iter().zip(&b).filter(|(x, _)| **x <= t_rot_end).map(|(_, v)| *v).fold(0.0, f64::max);
    if !is_reference_rotation(c) {
        return Ok(out);
    }
    out.push(check("B_rot in (0.005, 0.07]", b_rot > 0.005 && b_rot <= 0.07, format!("{b_rot:.5}")));
    if c.kind == Kind::Rotate {
        let (tt, bb): (Vec<f64>, Vec<f64>) =
            t.iter().zip(&b).filter(|(x, _)| **x >= sched.t_end).map(|(x, v)| (*x, *v)).unzip();
        let target = 1.8 * c.schedule.rate_end;
        match dominant_frequency(&tt, &bb) {
            Some(w) => out.push(check(
                "Bures frequency 1.8 rate_end +-10%",
                (w / target - 1.0).abs() <= 0.1,
                format!("{w:.4} vs {target:.4}"),
            )),
            None => out.push(check("Bures frequency 1.8 rate_end +-10%", false, "too few samples".into())),
        }
    }
    if c.kind == Kind::RotateRelease && c.schedule.t_off == Some(16.0) {
        let t_off = sched.t_off.unwrap();
        let t_last = *t.last().unwrap();
        let late = 0.5 * (t_off + t_last);
        let b_free = window_mean(&t, &b, late, t_last).unwrap_or(f64::NAN);
        out.push(check(
            "B_free <= 1.5 B_rot + 0.01",
            b_free <= 1.5 * b_rot + 0.01,
            format!("B_free {b_free:.5}, B_rot {b_rot:.5}"),
        ));
        let swing_rot = half_range(&t, &b, sched.t_end, t_off).unwrap_or(f64::NAN);
        let swing_free = half_range(&t, &b, late, t_last).unwrap_or(f64::NAN);
        out.push(check(
            "Bures oscillation ceases after release",
            swing_free < 0.1 * swing_rot,
            format!("late half-range {swing_free:.2e} vs rotating {swing_rot:.2e}"),
        ));
        let name = "axis turns pi/2 +- 0.15 after release";
        match turn_in_trap_sense(&t, &angle, t_off, t_off + 30.0) {
            Some(turn) => out.push(check(name, (turn - FRAC_PI_2).abs() <= 0.15, format!("{turn:.4} rad"))),
            None => out.push(check(name, false, "run ends before t_off + 30".into())),
        }
    }
    Ok(out)
}

fn analytic_checks(dir: &Path, c: &ScenarioConfig) -> Result<Vec<Check>, RunError> {
    let a = c.analytic.clone().unwrap_or_default();
    let (h, rows) = read_csv(&dir.join("lambda.csv"))?;
    let err = column(&h, &rows, "abs_err")?.into_iter().fold(0.0, f64::max);
    let tol = if a.d == 2 { 1e-8 } else { 1e-6 };
    Ok(vec![check(&format!("ODE vs exact lambda < {tol:e}"), err < tol, format!("{err:.3e}"))])
}

fn sweep_checks(dir: &Path, c: &ScenarioConfig) -> Result<Vec<Check>, RunError> {
    let (h, rows) = read_csv(&dir.join("sweep.csv"))?;
    let g = column(&h, &rows, "g_n")?;
    let e = column(&h, &rows, "epsilon")?;
    let r = column(&h, &rows, "rate_end")?;
    let b = column(&h, &rows, "b_rot")?;
    let cells = sweep_cells(c);
    let mut out =
        vec![check("sweep table complete", cells.len() == rows.len(), format!("{} of {}", rows.len(), cells.len()))];
    let base = (c.trap.g_n, c.trap.epsilon, c.schedule.rate_end);
    let sw = c.sweep.clone().unwrap_or_default();
    let pick = |axis: &[f64], sel: &dyn Fn(usize) -> bool, key: &[f64]| -> Vec<f64> {
        let mut v: Vec<(f64, f64)> = (0..key.len()).filter(|&i| sel(i)).map(|i| (key[i], b[i])).collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        v.retain(|(k, _)| axis.contains(k));
        v.into_iter().map(|(_, x)| x).collect()
    };
    let along_g = pick(&sw.g_n, &|i| e[i] == base.1 && r[i] == base.2, &g);
    let along_e = pick(&sw.epsilon, &|i| g[i] == base.0 && r[i] == base.2, &e);
    let along_r = pick(&sw.rate_end, &|i| g[i] == base.0 && e[i] == base.1, &r);
    if along_g.len() >= 2 {
        out.push(check("B_rot decreasing in gN", strictly_decreasing(&along_g), format!("{along_g:.5?}")));
    }
    if along_e.len() >= 2 {
        out.push(check("B_rot increasing in epsilon", strictly_increasing(&along_e), format!("{along_e:.5?}")));
    }
    if along_r.len() >= 2 {
        out.push(check("B_rot increasing in rate_end", strictly_increasing(&along_r), format!("{along_r:.5?}")));
    }
    Ok(out)
}
