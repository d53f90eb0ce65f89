//! Scenario configuration: JSON in, validated and fully defaulted struct out.
//!
//! Times `schedule.t_end` and `schedule.t_off` are in trap periods 2π/ω_x;
//! every other time is in 1/ω_x.

use std::fmt;

use serde::{Deserialize, Serialize};

use bec_core::gpe::{Grid2D, ImagTimeOptions};
use bec_core::trap::{Ramp, RotationSchedule, TrapConfig};

/// Rotation rates at or above this (in ω_x) approach vortex nucleation.
pub const CRITICAL_RATE: f64 = 0.71;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// Dotted path of the offending field, `.` for the document root.
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { path: path.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    GroundState,
    Rotate,
    RotateRelease,
    FreeExpansionAnalytic,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    /// ω_y / ω_x.
    pub epsilon: f64,
    /// Dimensionless interaction ḡN.
    pub g_n: f64,
    pub n_atoms: f64,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self { epsilon: 1.5, g_n: 100.0, n_atoms: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RampKind {
    Smoothstep,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    /// Final rotation rate in ω_x.
    pub rate_end: f64,
    /// End of the ramp, in trap periods.
    pub t_end: f64,
    /// Trap switch-off, in trap periods.
    pub t_off: Option<f64>,
    pub ramp: RampKind,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self { rate_end: 0.4, t_end: 15.0, t_off: None, ramp: RampKind::Smoothstep }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub length: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 128, length: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub dt: f64,
    /// Real-time steps; overrides `t_hold` when set.
    pub n_steps: Option<usize>,
    /// Time propagated after the ramp (rotate) or after switch-off
    /// (rotate-release). Defaults to 80 and 40.
    pub t_hold: Option<f64>,
    pub im_dt: f64,
    pub im_refinements: usize,
    /// Imaginary-time stopping tolerance on ‖Δψ‖/(‖ψ‖Δτ).
    pub tol: f64,
    pub im_max_steps: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let im = ImagTimeOptions::<f64>::default();
        Self {
            dt: 1e-3,
            n_steps: None,
            t_hold: None,
            im_dt: im.dt,
            im_refinements: im.refinements,
            tol: im.tol,
            im_max_steps: im.max_steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Ground,
    Final,
    FinalLab,
    Snapshots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Steps between logged samples.
    pub log_stride: usize,
    /// Steps between grid snapshots; must be a multiple of `log_stride`.
    pub snapshot_stride: usize,
    pub fields: Vec<FieldKind>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { log_stride: 100, snapshot_stride: 0, fields: vec![FieldKind::Ground, FieldKind::Final] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyticSection {
    pub d: usize,
    pub omega0: f64,
    pub t_max: f64,
    pub dt: f64,
    /// Rows written every `stride` integrator steps.
    pub stride: usize,
}

impl Default for AnalyticSection {
    fn default() -> Self {
        Self { d: 2, omega0: 1.0, t_max: 10.0, dt: 1e-3, stride: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Vary one axis at a time around the base point.
    Axes,
    /// Full Cartesian product.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub g_n: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub rate_end: Vec<f64>,
    pub mode: SweepMode,
    /// Run each cell as rotate-release (needs `schedule.t_off`).
    pub release: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            g_n: vec![50.0, 100.0, 400.0],
            epsilon: vec![1.1, 1.5, 2.0],
            rate_end: vec![0.2, 0.4, 0.6],
            mode: SweepMode::Axes,
            release: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default)]
    pub trap: TrapSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub outputs: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

/// A validated config plus the non-fatal findings made while checking it.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub config: ScenarioConfig,
    pub warnings: Vec<String>,
}

pub fn parse_config(text: &str) -> Result<Parsed, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        err(&path, e.into_inner().to_string())
    })?;
    let warnings = config.validate()?;
    Ok(Parsed { config, warnings })
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(err(path, format!("must be finite and > 0, got {v}")))
    }
}

impl ScenarioConfig {
    /// Checks every module precondition up front. Returns warnings.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        let mut warnings = Vec::new();
        if self.kind == Kind::FreeExpansionAnalytic {
            let a = self.analytic.clone().unwrap_or_default();
            if !(1..=3).contains(&a.d) {
                return Err(err("analytic.d", format!("must be 1, 2 or 3, got {}", a.d)));
            }
            positive("analytic.omega0", a.omega0)?;
            positive("analytic.t_max", a.t_max)?;
            positive("analytic.dt", a.dt)?;
            if a.stride == 0 {
                return Err(err("analytic.stride", "must be >= 1"));
            }
            return Ok(warnings);
        }
        if self.analytic.is_some() {
            return Err(err("analytic", "only used by kind free-expansion-analytic"));
        }

        positive("trap.epsilon", self.trap.epsilon)?;
        positive("trap.n_atoms", self.trap.n_atoms)?;
        if !(self.trap.g_n >= 0.0) || !self.trap.g_n.is_finite() {
            return Err(err("trap.g_n", "must be finite and >= 0"));
        }
        Grid2D::new(self.grid.n, self.grid.length).map_err(|e| err("grid.n", e.to_string()))?;
        positive("grid.length", self.grid.length)?;
        positive("numerics.dt", self.numerics.dt)?;
        positive("numerics.im_dt", self.numerics.im_dt)?;
        positive("numerics.tol", self.numerics.tol)?;
        if self.numerics.im_max_steps == 0 {
            return Err(err("numerics.im_max_steps", "must be >= 1"));
        }
        if let Some(h) = self.numerics.t_hold {
            if !(h >= 0.0) || !h.is_finite() {
                return Err(err("numerics.t_hold", "must be finite and >= 0"));
            }
        }
        if self.outputs.log_stride == 0 {
            return Err(err("outputs.log_stride", "must be >= 1"));
        }
        if self.outputs.snapshot_stride % self.outputs.log_stride != 0 {
            return Err(err("outputs.snapshot_stride", "must be a multiple of outputs.log_stride"));
        }

        let s = &self.schedule;
        let rates: Vec<f64> = match (&self.kind, &self.sweep) {
            (Kind::Sweep, Some(sw)) => sw.rate_end.clone(),
            _ => vec![s.rate_end],
        };
        for (i, &r) in rates.iter().enumerate() {
            let path =
                if self.kind == Kind::Sweep { format!("sweep.rate_end[{i}]") } else { "schedule.rate_end".into() };
            if !(r >= 0.0) || !r.is_finite() {
                return Err(err(&path, "must be finite and >= 0"));
            }
            if r >= CRITICAL_RATE {
                warnings.push(format!(
                    "{path} = {r} is at or above the critical rotation rate {CRITICAL_RATE} omega_x; \
                     vortex nucleation is expected and the run is outside the acceptance regime"
                ));
            }
        }
        if !(s.t_end >= 0.0) || !s.t_end.is_finite() {
            return Err(err("schedule.t_end", "must be finite and >= 0"));
        }
        if let Some(t_off) = s.t_off {
            if !(t_off > s.t_end) {
                return Err(err("schedule.t_off", format!("must exceed schedule.t_end = {}, got {t_off}", s.t_end)));
            }
        }

        let release = match self.kind {
            Kind::RotateRelease => true,
            Kind::Sweep => self.sweep.as_ref().is_some_and(|w| w.release),
            _ => false,
        };
        if release && s.t_off.is_none() {
            return Err(err("schedule.t_off", "required when the trap is switched off"));
        }
        if !release && s.t_off.is_some() && self.kind != Kind::GroundState {
            return Err(err("schedule.t_off", "only used by rotate-release runs"));
        }

        match (&self.kind, &self.sweep) {
            (Kind::Sweep, None) => return Err(err("sweep", "required for kind sweep")),
            (Kind::Sweep, Some(sw)) => {
                for (name, v) in [("g_n", &sw.g_n), ("epsilon", &sw.epsilon), ("rate_end", &sw.rate_end)] {
                    if v.is_empty() {
                        return Err(err(&format!("sweep.{name}"), "must not be empty"));
                    }
                }
                for (i, &g) in sw.g_n.iter().enumerate() {
                    if !(g >= 0.0) || !g.is_finite() {
                        return Err(err(&format!("sweep.g_n[{i}]"), "must be finite and >= 0"));
                    }
                }
                for (i, &e) in sw.epsilon.iter().enumerate() {
                    positive(&format!("sweep.epsilon[{i}]"), e)?;
                }
            }
            (_, Some(_)) => return Err(err("sweep", "only used by kind sweep")),
            _ => {}
        }
        Ok(warnings)
    }

    pub fn trap_config(&self) -> TrapConfig<f64> {
        let n = self.trap.n_atoms;
        TrapConfig::anisotropic_2d(self.trap.epsilon, self.trap.g_n / n, n).expect("validated")
    }

    /// Rotation schedule in 1/ω_x time units.
    pub fn rotation_schedule(&self) -> RotationSchedule<f64> {
        let period = 2.0 * std::f64::consts::PI;
        let s = &self.schedule;
        let ramp = match s.ramp {
            RampKind::Smoothstep => Ramp::Smoothstep,
            RampKind::Linear => Ramp::Linear,
        };
        let t_end = if s.rate_end > 0.0 { s.t_end * period } else { 0.0 };
        RotationSchedule { rate_end: s.rate_end, t_end, t_off: s.t_off.map(|t| t * period), ramp }
    }

    pub fn grid(&self) -> Grid2D<f64> {
        Grid2D::new(self.grid.n, self.grid.length).expect("validated")
    }

    pub fn imag_options(&self) -> ImagTimeOptions<f64> {
        ImagTimeOptions {
            dt: self.numerics.im_dt,
            refinements: self.numerics.im_refinements,
            tol: self.numerics.tol,
            max_steps: self.numerics.im_max_steps,
            ..ImagTimeOptions::default()
        }
    }

    /// Total real-time steps for rotate and rotate-release runs.
    pub fn real_steps(&self) -> usize {
        if let Some(n) = self.numerics.n_steps {
            return n;
        }
        let sched = self.rotation_schedule();
        let (start, hold) = match sched.t_off {
            Some(t_off) => (t_off, self.numerics.t_hold.unwrap_or(40.0)),
            None => (sched.t_end, self.numerics.t_hold.unwrap_or(80.0)),
        };
        ((start + hold) / self.numerics.dt).round() as usize
    }

    pub fn wants(&self, f: FieldKind) -> bool {
        self.outputs.fields.contains(&f)
    }
}
