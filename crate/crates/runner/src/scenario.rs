//! Scenario orchestration: ground state, Λ and (R, P) integration, real-time
//! propagation, diagnostics and file emission.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use bec_core::affine::{
    analytic_lambda_isotropic, angmom_lambda, energy_lambda, integrate_lambda_observed, longtime_coefficients,
};
use bec_core::com::integrate_com;
use bec_core::gpe::{
    grid_observables, ground_state_imaginary_time, principal_angle_of_moment, propagate_real_observed, residual_metric,
    to_lab_frame, unwrap_angles, Fft2, FieldState, GpeParams, Grid2D, GroundState, LogOptions, Propagator,
};
use bec_core::linalg::{Matrix, Vector};
use bec_core::thomas_fermi::chemical_potential_tf;
use bec_core::trap::{HarmonicTrap, RotatingTrap, Trap};
use bec_core::{AdaptiveState, ComState};

use crate::analysis::{dominant_frequency, half_range, turn_in_trap_sense, window_mean};
use crate::config::{FieldKind, Kind, Parsed, ScenarioConfig, SweepMode};
use crate::error::{RunError, Stage};
use crate::manifest::{RunManifest, Status};
use crate::output::{write_grid, Csv};

/// Where files go and what has been written so far.
struct Sink<'a> {
    root: &'a Path,
    /// Subdirectory of `root` for this run (empty for single runs).
    sub: PathBuf,
    manifest: &'a mut RunManifest,
}

impl Sink<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.root.join(&self.sub).join(name)
    }

    fn csv(&mut self, name: &str, csv: &Csv) -> Result<(), RunError> {
        let p = self.path(name);
        csv.write(&p)?;
        self.manifest.add_file(self.root, &p)?;
        Ok(())
    }

    fn grid(&mut self, name: &str, f: &FieldState<f64>) -> Result<(), RunError> {
        let p = self.path(name);
        write_grid(f, &p)?;
        self.manifest.add_file(self.root, &p)?;
        Ok(())
    }

    fn result(&mut self, key: &str, v: f64) {
        if v.is_finite() {
            self.manifest.results.insert(key.to_string(), v);
        }
    }

    fn timing(&mut self, key: &str, start: Instant) {
        self.manifest.timings.insert(key.to_string(), start.elapsed().as_secs_f64());
    }
}

/// Runs the configured scenario into `out`, always leaving a manifest behind.
pub fn run_scenario(parsed: &Parsed, out: &Path) -> Result<RunManifest, RunError> {
    run_with_jobs(parsed, out, 1)
}

/// As [`run_scenario`], with sweep cells spread over `jobs` worker threads.
pub fn run_with_jobs(parsed: &Parsed, out: &Path, jobs: usize) -> Result<RunManifest, RunError> {
    fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new(parsed.config.clone(), parsed.warnings.clone());
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    let start = Instant::now();
    let res = {
        let mut sink = Sink { root: out, sub: PathBuf::new(), manifest: &mut manifest };
        match parsed.config.kind {
            Kind::GroundState => run_ground(&parsed.config, &mut sink).map(|_| ()),
            Kind::Rotate | Kind::RotateRelease => run_dynamic(&parsed.config, &mut sink),
            Kind::FreeExpansionAnalytic => run_analytic(&parsed.config, &mut sink),
            Kind::Sweep => run_sweep(&parsed.config, &mut sink, jobs),
        }
    };
    manifest.timings.insert("total".into(), start.elapsed().as_secs_f64());
    match res {
        Ok(()) => {
            manifest.status = Status::Complete;
            manifest.write(out)?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.status = Status::Partial;
            manifest.error = Some(e.to_string());
            manifest.write(out)?;
            Err(e)
        }
    }
}

fn gpe_params(cfg: &ScenarioConfig, mu: f64) -> GpeParams<f64> {
    let tc = cfg.trap_config();
    GpeParams { omega_sq_0: tc.omega_sq_0(), g: tc.g, mass: tc.mass, mu }
}

fn run_ground(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<GroundState<f64>, RunError> {
    let start = Instant::now();
    let tc = cfg.trap_config();
    let gs = ground_state_imaginary_time(cfg.grid(), &gpe_params(cfg, 0.0), tc.n_atoms, &cfg.imag_options())
        .stage("ground state")?;
    sink.timing("ground_state", start);
    let mu_tf = if tc.g_n() > 0.0 { chemical_potential_tf(&tc).stage("ground state")? } else { f64::NAN };
    // ((d + 2)/(d + 4)) μ_TF with d = 2
    let e_tf = 2.0 / 3.0 * mu_tf;
    let e = &gs.energy;
    let mut csv = Csv::new(&["mu", "mu_tf", "mu_rel_err", "e_kin", "e_pot", "e_int", "e_total", "e_tf", "steps"]);
    let mu_err = (gs.mu - mu_tf) / mu_tf;
    csv.row(&[gs.mu, mu_tf, mu_err, e.kinetic, e.potential, e.interaction, e.total(), e_tf, gs.steps as f64]);
    sink.csv("ground.csv", &csv)?;
    if cfg.wants(FieldKind::Ground) {
        sink.grid("ground.becgrid", &gs.field)?;
    }
    sink.result("mu", gs.mu);
    sink.result("mu_tf", mu_tf);
    sink.result("mu_rel_err", mu_err);
    sink.result("energy_per_particle", e.total());
    sink.result("energy_rel_err", (e.total() - e_tf) / e_tf);
    Ok(gs)
}

/// Lab-frame moment Λ M Λᵀ from the adapted-frame moment M.
fn lab_angle(adapted_moment: &Matrix<f64>, lam: &Matrix<f64>) -> bec_core::Result<f64> {
    principal_angle_of_moment(&(*lam * *adapted_moment * lam.transpose()))
}

fn run_dynamic(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<(), RunError> {
    let gs = run_ground(cfg, sink)?;
    let start = Instant::now();
    let tc = cfg.trap_config();
    let sched = cfg.rotation_schedule();
    let trap = RotatingTrap::new(tc.clone(), sched.clone()).stage("trap")?;
    let grid = cfg.grid();
    let mut prop = Propagator::new(grid, gpe_params(cfg, gs.mu)).stage("propagator")?;
    let n_steps = cfg.real_steps();
    let dt = cfg.numerics.dt;
    let stride = cfg.outputs.log_stride;
    let snap_every = cfg.outputs.snapshot_stride;
    let log = LogOptions { stride, reference: Some(&gs.field), energies: false };

    let density0 = gs.field.density();
    let peak = density0.iter().cloned().fold(0.0, f64::max);
    let mut fft = Fft2::new(&grid);
    let mut extra: Vec<[f64; 3]> = Vec::new();
    let mut snaps: Vec<(usize, FieldState<f64>)> = Vec::new();
    let mut sample = 0usize;
    let observe = |f: &FieldState<f64>, lam: &AdaptiveState| -> bec_core::Result<()> {
        let obs = grid_observables(f, &mut fft)?;
        let angle = lab_angle(&obs.r_second, &lam.lam)?;
        let r = residual_metric(f, &gs.field)?;
        extra.push([angle, r.max_value, density0[r.max_index] / peak]);
        if snap_every > 0 && (sample * stride) % snap_every == 0 && cfg.wants(FieldKind::Snapshots) {
            snaps.push((sample * stride, f.clone()));
        }
        sample += 1;
        Ok(())
    };
    let (last, lam_end, plog) =
        propagate_real_observed(&mut prop, &gs.field, &AdaptiveState::initial(2), &trap, dt, n_steps, &log, observe)
            .stage("real-time propagation")?;
    sink.timing("propagation", start);

    let mut angles: Vec<f64> = extra.iter().map(|e| e[0]).collect();
    unwrap_angles(&mut angles);
    let n0 = gs.field.norm();
    let mut bures = Csv::new(&["t", "bures", "residual_l2", "residual_max", "residual_max_density", "norm", "angle"]);
    for (k, &t) in plog.times.iter().enumerate() {
        bures.row(&[t, plog.bures[k], plog.residual_l2[k], extra[k][1], extra[k][2], plog.norms[k], angles[k]]);
    }
    sink.csv("bures.csv", &bures)?;

    let w0 = tc.omega_sq_0();
    let mut lam_csv = Csv::new(&[
        "t", "l11", "l12", "l21", "l22", "ld11", "ld12", "ld21", "ld22", "det", "beta", "e_lambda", "l_z", "irrot",
    ]);
    let mut irrot_max: f64 = 0.0;
    for s in &plog.lambdas {
        let (l, ld) = (s.lam, s.lam_dot);
        let e = energy_lambda(s, &trap.omega_sq(s.t), &w0).stage("diagnostics")?;
        let lz = angmom_lambda(s, &w0).stage("diagnostics")?[(0, 1)];
        let irr = s.irrotationality_residual();
        irrot_max = irrot_max.max(irr);
        lam_csv.row(&[
            s.t,
            l[(0, 0)],
            l[(0, 1)],
            l[(1, 0)],
            l[(1, 1)],
            ld[(0, 0)],
            ld[(0, 1)],
            ld[(1, 0)],
            ld[(1, 1)],
            s.det(),
            s.beta,
            e,
            lz,
            irr,
        ]);
    }
    sink.csv("lambda.csv", &lam_csv)?;

    // the condensate starts at rest in the trap minimum; integrated anyway so
    // the (R, P, S) record is produced by the same code path as other runs
    let mut com = ComState::at_rest(2);
    let mut com_csv = Csv::new(&["t", "rx", "ry", "px", "py", "s1", "s2"]);
    for &t in &plog.times {
        let steps = ((t - com.t) / dt).round() as usize;
        com = integrate_com(&com, &trap, tc.mass, dt, steps).stage("center of mass")?;
        com_csv.row(&[com.t, com.r_com[0], com.r_com[1], com.p_com[0], com.p_com[1], com.s1(), com.s2()]);
    }
    sink.csv("com.csv", &com_csv)?;

    for (step, f) in &snaps {
        sink.grid(&format!("snap_{step:07}.becgrid"), f)?;
    }
    if cfg.wants(FieldKind::Final) {
        sink.grid("final.becgrid", &last)?;
    }
    if cfg.wants(FieldKind::FinalLab) {
        let stretch = (lam_end.lam * lam_end.lam.transpose()).max_eigenvalue().sqrt().max(1.0);
        let lab = Grid2D::new(grid.nx, grid.lx * 1.25 * stretch).stage("lab grid")?;
        let f = to_lab_frame(&last, &lam_end, &com, &lab, tc.mass).stage("lab frame")?;
        sink.grid("final_lab.becgrid", &f)?;
    }

    let t = &plog.times;
    let b = &plog.bures;
    let t_rot_end = sched.t_off.unwrap_or(f64::INFINITY);
    let b_rot = t.iter().zip(b).filter(|(x, _)| **x <= t_rot_end).map(|(_, v)| *v).fold(0.0, f64::max);
    let norm_drift = plog.norms.iter().map(|n| (n - n0).abs() / n0).fold(0.0, f64::max);
    sink.result("b_rot", b_rot);
    sink.result("norm_drift", norm_drift);
    sink.result("irrot_max", irrot_max);
    let (tt, bb): (Vec<f64>, Vec<f64>) =
        t.iter().zip(b).filter(|(x, _)| **x >= sched.t_end && **x <= t_rot_end).map(|(x, v)| (*x, *v)).unzip();
    if let Some(w) = dominant_frequency(&tt, &bb) {
        sink.result("bures_frequency", w);
    }
    if let Some(t_off) = sched.t_off {
        let t_last = *t.last().unwrap_or(&t_off);
        let late = 0.5 * (t_off + t_last);
        if let Some(v) = window_mean(t, b, late, t_last) {
            sink.result("b_free", v);
        }
        if let Some(v) = half_range(t, b, sched.t_end, t_off) {
            sink.result("bures_swing_rotating", v);
        }
        if let Some(v) = half_range(t, b, late, t_last) {
            sink.result("bures_swing_free", v);
        }
        if let Some(turn) = turn_in_trap_sense(t, &angles, t_off, t_off + 30.0) {
            sink.result("turn_after_release", turn);
        }
    }
    Ok(())
}

fn run_analytic(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<(), RunError> {
    let start = Instant::now();
    let a = cfg.analytic.clone().unwrap_or_default();
    let w0 = Matrix::identity(a.d) * (a.omega0 * a.omega0);
    let trap = HarmonicTrap::new(w0).released_at(0.0);
    let n = (a.t_max / a.dt).round() as usize;
    let mut csv = Csv::new(&["t", "lambda", "lambda_exact", "abs_err", "sigma", "c", "e_lambda"]);
    let mut samples = Vec::new();
    let mut max_err: f64 = 0.0;
    let mut err = None;
    let mut k = 0usize;
    let mut row = |s: &AdaptiveState, csv: &mut Csv| {
        let lam = s.lam[(0, 0)];
        let exact = match analytic_lambda_isotropic(a.d, a.omega0, s.t) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        };
        let e = energy_lambda(s, &Matrix::zeros(a.d), &w0).unwrap_or(f64::NAN);
        max_err = max_err.max((lam - exact).abs());
        csv.row(&[s.t, lam, exact, (lam - exact).abs(), lam * lam / (a.omega0 * a.omega0), s.lam_dot[(0, 0)] / lam, e]);
        samples.push((s.t, Vector::from_slice(&[lam])));
    };
    let s0 = AdaptiveState::initial(a.d);
    row(&s0, &mut csv);
    integrate_lambda_observed(&s0, &trap, &w0, a.dt, n, 0.0, |s| {
        k += 1;
        if k % a.stride == 0 || k == n {
            row(s, &mut csv);
        }
    })
    .stage("lambda integration")?;
    if let Some(e) = err {
        return Err(RunError::Core { stage: "closed form", source: e });
    }
    sink.timing("lambda", start);
    sink.csv("lambda.csv", &csv)?;
    sink.result("max_abs_err", max_err);
    if a.omega0 * a.t_max >= 50.0 {
        let fit = longtime_coefficients(&samples, a.omega0).stage("long-time fit")?;
        sink.result("slope", fit.b[0]);
        sink.result("intercept", fit.a[0]);
        sink.result("slope_expected", (2.0 / a.d as f64).sqrt() * a.omega0);
    }
    Ok(())
}

/// One sweep cell: (ḡN, ε, φ̇_end).
pub type Cell = (f64, f64, f64);

pub fn sweep_cells(cfg: &ScenarioConfig) -> Vec<Cell> {
    let sw = cfg.sweep.clone().unwrap_or_default();
    let base = (cfg.trap.g_n, cfg.trap.epsilon, cfg.schedule.rate_end);
    let mut cells: Vec<Cell> = Vec::new();
    let mut push = |c: Cell| {
        if !cells.contains(&c) {
            cells.push(c);
        }
    };
    match sw.mode {
        SweepMode::Axes => {
            for &g in &sw.g_n {
                push((g, base.1, base.2));
            }
            for &e in &sw.epsilon {
                push((base.0, e, base.2));
            }
            for &r in &sw.rate_end {
                push((base.0, base.1, r));
            }
        }
        SweepMode::Grid => {
            for &g in &sw.g_n {
                for &e in &sw.epsilon {
                    for &r in &sw.rate_end {
                        push((g, e, r));
                    }
                }
            }
        }
    }
    cells
}

fn cell_config(cfg: &ScenarioConfig, c: Cell) -> ScenarioConfig {
    let mut cc = cfg.clone();
    let release = cfg.sweep.as_ref().is_some_and(|s| s.release);
    cc.kind = if release { Kind::RotateRelease } else { Kind::Rotate };
    cc.sweep = None;
    cc.trap.g_n = c.0;
    cc.trap.epsilon = c.1;
    cc.schedule.rate_end = c.2;
    cc
}

fn run_sweep(cfg: &ScenarioConfig, sink: &mut Sink, jobs: usize) -> Result<(), RunError> {
    let start = Instant::now();
    let cells = sweep_cells(cfg);
    let root = sink.root.to_path_buf();
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| RunError::Other(e.to_string()))?;
    let outcomes: Vec<(RunManifest, Result<(), RunError>)> = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, &c)| {
                let cc = cell_config(cfg, c);
                let mut m = RunManifest::new(cc.clone(), Vec::new());
                let sub = PathBuf::from(format!("cell_{i:02}"));
                let res = fs::create_dir_all(root.join(&sub)).map_err(RunError::from).and_then(|_| {
                    let mut s = Sink { root: &root, sub, manifest: &mut m };
                    run_dynamic(&cc, &mut s)
                });
                (m, res)
            })
            .collect()
    });
    let mut table = Csv::new(&["cell", "g_n", "epsilon", "rate_end", "b_rot", "b_free", "bures_frequency"]);
    let mut first_err = None;
    for (i, ((m, res), c)) in outcomes.into_iter().zip(&cells).enumerate() {
        let get = |k: &str| m.results.get(k).copied().unwrap_or(f64::NAN);
        table.row(&[i as f64, c.0, c.1, c.2, get("b_rot"), get("b_free"), get("bures_frequency")]);
        sink.manifest.files.extend(m.files.iter().cloned());
        let tag = format!("cell_{i:02}.");
        sink.manifest.results.extend(m.results.iter().map(|(k, v)| (format!("{tag}{k}"), *v)));
        sink.manifest.timings.extend(m.timings.iter().map(|(k, v)| (format!("{tag}{k}"), *v)));
        if let Err(e) = res {
            first_err.get_or_insert(RunError::Other(format!("cell {i}: {e}")));
        }
    }
    sink.csv("sweep.csv", &table)?;
    sink.timing("sweep", start);
    match first_err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
