//! Quadratic external potentials, rotation schedules and reference trajectories.
//!
//! Every trap is described by its local expansion around a reference point ρ(t):
//! `V(t, r) = v₀(t) − F(t)·(r − ρ) + (m/2)(r − ρ)ᵀ Ω²(t) (r − ρ)`.

use crate::error::{invalid, BecError, Result};
use crate::linalg::{Matrix, Vector};
use crate::ode::rk4_step;
use crate::scalar::Real;

/// Static physical parameters of a condensate in a harmonic trap.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapConfig<T> {
    pub d: usize,
    /// Initial principal trap frequencies.
    pub omega0: Vector<T>,
    pub g: T,
    pub n_atoms: T,
    pub mass: T,
}

impl<T: Real> TrapConfig<T> {
    pub fn new(omega0: &[T], g: T, n_atoms: T, mass: T) -> Result<Self> {
        if omega0.is_empty() || omega0.len() > 3 {
            return Err(invalid("d", format!("must be 1, 2 or 3, got {}", omega0.len())));
        }
        let cfg = Self { d: omega0.len(), omega0: Vector::from_slice(omega0), g, n_atoms, mass };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 2D trap with `ω_x = 1`, `ω_y = ε` in working units (ħ = m = ω_x = 1).
    pub fn anisotropic_2d(epsilon: T, g: T, n_atoms: T) -> Result<Self> {
        Self::new(&[T::one(), epsilon], g, n_atoms, T::one())
    }

    pub fn isotropic(d: usize, omega0: T, g: T, n_atoms: T) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(invalid("d", format!("must be 1, 2 or 3, got {d}")));
        }
        Self::new(&vec![omega0; d], g, n_atoms, T::one())
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega0.iter().any(|w| !(w >= T::zero()) || !w.is_finite()) {
            return Err(invalid("omega0", "components must be finite and >= 0"));
        }
        if !(self.n_atoms > T::zero()) {
            return Err(invalid("n_atoms", "must be > 0"));
        }
        if !(self.g >= T::zero()) || !self.g.is_finite() {
            return Err(invalid("g", "must be finite and >= 0"));
        }
        if !(self.mass > T::zero()) {
            return Err(invalid("mass", "must be > 0"));
        }
        Ok(())
    }

    /// ω_y/ω_x for d ≥ 2.
    pub fn epsilon(&self) -> T {
        if self.d < 2 {
            T::one()
        } else {
            self.omega0[1] / self.omega0[0]
        }
    }

    /// Ω²(0) = diag(ω_i²).
    pub fn omega_sq_0(&self) -> Matrix<T> {
        let w2: Vec<T> = self.omega0.iter().map(|w| w * w).collect();
        Matrix::from_diag(&w2)
    }

    pub fn g_n(&self) -> T {
        self.g * self.n_atoms
    }

    pub fn is_trapped(&self) -> bool {
        self.omega0.iter().all(|w| w > T::zero())
    }
}

/// How the rotation rate rises from 0 to `rate_end` over `[0, t_end]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Ramp<T> {
    /// `rate_end · (3u² − 2u³)`, `u = τ/t_end`.
    Smoothstep,
    Linear,
    /// Piecewise-linear `(time, rate)` samples from `(0, 0)` to `(t_end, rate_end)`.
    Custom(Vec<(T, T)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationSchedule<T> {
    pub rate_end: T,
    pub t_end: T,
    /// Instant trap switch-off time.
    pub t_off: Option<T>,
    pub ramp: Ramp<T>,
}

impl<T: Real> RotationSchedule<T> {
    pub fn smoothstep(rate_end: T, t_end: T) -> Self {
        Self { rate_end, t_end, t_off: None, ramp: Ramp::Smoothstep }
    }

    /// Static trap, optionally switched off at `t_off`.
    pub fn none(t_off: Option<T>) -> Self {
        Self { rate_end: T::zero(), t_end: T::zero(), t_off, ramp: Ramp::Smoothstep }
    }

    pub fn with_release(mut self, t_off: T) -> Self {
        self.t_off = Some(t_off);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rate_end.is_finite() || self.rate_end < T::zero() {
            return Err(invalid("rate_end", "must be finite and >= 0"));
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return Err(invalid("t_end", "must be finite and >= 0"));
        }
        if self.rate_end > T::zero() && self.t_end == T::zero() {
            return Err(invalid("t_end", "must be > 0 when rate_end > 0"));
        }
        if let Some(t_off) = self.t_off {
            if !(t_off > self.t_end) {
                return Err(invalid("t_off", format!("must exceed t_end = {}", self.t_end)));
            }
        }
        if let Ramp::Custom(s) = &self.ramp {
            if s.len() < 2 {
                return Err(invalid("ramp", "custom ramp needs at least two samples"));
            }
            let (t0, r0) = s[0];
            let (t1, r1) = s[s.len() - 1];
            if t0 != T::zero() || r0 != T::zero() {
                return Err(invalid("ramp", "custom ramp must start at (0, 0)"));
            }
            let tol = T::lit(1e-12) * (T::one() + self.t_end.abs() + self.rate_end.abs());
            if (t1 - self.t_end).abs() > tol || (r1 - self.rate_end).abs() > tol {
                return Err(invalid("ramp", "custom ramp must end at (t_end, rate_end)"));
            }
            for w in s.windows(2) {
                if !(w[1].0 > w[0].0) {
                    return Err(invalid("ramp", "custom sample times must increase"));
                }
                if w[1].1 < w[0].1 {
                    return Err(invalid("ramp", "custom rates must be nondecreasing"));
                }
            }
        }
        Ok(())
    }

    pub fn is_released(&self, tau: T) -> bool {
        self.t_off.is_some_and(|t| tau >= t)
    }
}

/// Rotation angle φ(τ) and rate φ̇(τ).
pub fn rotation_angle_and_rate<T: Real>(sched: &RotationSchedule<T>, tau: T) -> Result<(T, T)> {
    if tau < T::zero() || tau.is_nan() {
        return Err(invalid("tau", "must be >= 0"));
    }
    Ok(angle_and_rate(sched, tau))
}

fn angle_and_rate<T: Real>(sched: &RotationSchedule<T>, tau: T) -> (T, T) {
    let re = sched.rate_end;
    let te = sched.t_end;
    if re == T::zero() {
        return (T::zero(), T::zero());
    }
    // angle accumulated over the full ramp
    let ramp_angle = match &sched.ramp {
        Ramp::Smoothstep | Ramp::Linear => T::half() * re * te,
        Ramp::Custom(s) => trapezoid(s, te),
    };
    if tau >= te {
        return (ramp_angle + re * (tau - te), re);
    }
    let u = tau / te;
    match &sched.ramp {
        Ramp::Smoothstep => {
            let u2 = u * u;
            let rate = re * u2 * (T::lit(3.0) - T::two() * u);
            let angle = re * te * (u2 * u - T::half() * u2 * u2);
            (angle, rate)
        }
        Ramp::Linear => (T::half() * re * te * u * u, re * u),
        Ramp::Custom(s) => (trapezoid(s, tau), interp(s, tau)),
    }
}

fn interp<T: Real>(s: &[(T, T)], t: T) -> T {
    for w in s.windows(2) {
        if t <= w[1].0 {
            let f = (t - w[0].0) / (w[1].0 - w[0].0);
            return w[0].1 + f * (w[1].1 - w[0].1);
        }
    }
    s[s.len() - 1].1
}

// Exact integral of the piecewise-linear rate up to `t`.
fn trapezoid<T: Real>(s: &[(T, T)], t: T) -> T {
    let mut acc = T::zero();
    for w in s.windows(2) {
        let (a, ra) = w[0];
        let (b, rb) = w[1];
        if t <= a {
            break;
        }
        let end = t.min(b);
        let r_end = if end < b { ra + (end - a) / (b - a) * (rb - ra) } else { rb };
        acc += T::half() * (ra + r_end) * (end - a);
    }
    acc
}

/// Ω²(τ) = O(φ) diag(ω_x², ω_y²) O(φ)ᵀ, or zero after the switch-off.
pub fn omega_squared_rotating<T: Real>(cfg: &TrapConfig<T>, sched: &RotationSchedule<T>, tau: T) -> Result<Matrix<T>> {
    if cfg.d != 2 && sched.rate_end != T::zero() {
        return Err(invalid("rate_end", format!("rotation requires d = 2, got d = {}", cfg.d)));
    }
    let (phi, _) = rotation_angle_and_rate(sched, tau)?;
    if sched.is_released(tau) {
        return Ok(Matrix::zeros(cfg.d));
    }
    let d = cfg.omega_sq_0();
    if cfg.d != 2 {
        return Ok(d);
    }
    let o = Matrix::rotation_2d(phi);
    Ok((o * d * o.transpose()).symmetrize())
}

/// Local expansion of the potential at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialExpansion<T> {
    pub v0: T,
    pub force: Vector<T>,
    pub omega_sq: Matrix<T>,
    pub rho: Vector<T>,
    pub rho_dot: Vector<T>,
}

/// A time-dependent quadratic trap.
pub trait Trap<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn omega_sq(&self, t: T) -> Matrix<T>;

    /// Expansion point ρ(t), the trap minimum for a force-free trap.
    fn center(&self, _t: T) -> Vector<T> {
        Vector::zeros(self.dim())
    }

    fn center_velocity(&self, _t: T) -> Vector<T> {
        Vector::zeros(self.dim())
    }

    /// Uniform force F(t).
    fn force(&self, _t: T) -> Vector<T> {
        Vector::zeros(self.dim())
    }

    fn offset(&self, _t: T) -> T {
        T::zero()
    }

    fn potential(&self, t: T, r: &Vector<T>, mass: T) -> T {
        let x = *r - self.center(t);
        self.offset(t) - self.force(t).dot(&x) + T::half() * mass * self.omega_sq(t).quad(&x)
    }

    /// ∇V(t, r) = −F + m Ω² (r − ρ).
    fn gradient(&self, t: T, r: &Vector<T>, mass: T) -> Vector<T> {
        let x = *r - self.center(t);
        self.omega_sq(t) * x * mass - self.force(t)
    }

    fn expansion(&self, t: T) -> PotentialExpansion<T> {
        PotentialExpansion {
            v0: self.offset(t),
            force: self.force(t),
            omega_sq: self.omega_sq(t),
            rho: self.center(t),
            rho_dot: self.center_velocity(t),
        }
    }

    /// Largest trap frequency at `t` (0 for a released trap).
    fn max_frequency(&self, t: T) -> T {
        self.omega_sq(t).max_eigenvalue().max(T::zero()).sqrt()
    }
}

/// Fixed trap matrix and minimum, with an optional instant switch-off.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicTrap<T> {
    pub omega_sq: Matrix<T>,
    pub center: Vector<T>,
    pub force: Vector<T>,
    pub t_off: Option<T>,
}

impl<T: Real> HarmonicTrap<T> {
    pub fn new(omega_sq: Matrix<T>) -> Self {
        let n = omega_sq.dim();
        Self { omega_sq: omega_sq.symmetrize(), center: Vector::zeros(n), force: Vector::zeros(n), t_off: None }
    }

    pub fn from_config(cfg: &TrapConfig<T>) -> Self {
        Self::new(cfg.omega_sq_0())
    }

    pub fn centered_at(mut self, c: Vector<T>) -> Self {
        self.center = c;
        self
    }

    pub fn with_force(mut self, f: Vector<T>) -> Self {
        self.force = f;
        self
    }

    pub fn released_at(mut self, t_off: T) -> Self {
        self.t_off = Some(t_off);
        self
    }

    fn on(&self, t: T) -> bool {
        self.t_off.is_none_or(|off| t < off)
    }
}

impl<T: Real> Trap<T> for HarmonicTrap<T> {
    fn dim(&self) -> usize {
        self.omega_sq.dim()
    }

    fn omega_sq(&self, t: T) -> Matrix<T> {
        if self.on(t) {
            self.omega_sq
        } else {
            Matrix::zeros(self.dim())
        }
    }

    fn center(&self, _t: T) -> Vector<T> {
        self.center
    }

    fn force(&self, t: T) -> Vector<T> {
        if self.on(t) {
            self.force
        } else {
            Vector::zeros(self.dim())
        }
    }
}

/// Anisotropic trap rotated about the z-axis by a [`RotationSchedule`].
#[derive(Clone, Debug, PartialEq)]
pub struct RotatingTrap<T> {
    cfg: TrapConfig<T>,
    sched: RotationSchedule<T>,
}

impl<T: Real> RotatingTrap<T> {
    pub fn new(cfg: TrapConfig<T>, sched: RotationSchedule<T>) -> Result<Self> {
        cfg.validate()?;
        sched.validate()?;
        if cfg.d != 2 && sched.rate_end != T::zero() {
            return Err(invalid("rate_end", format!("rotation requires d = 2, got d = {}", cfg.d)));
        }
        Ok(Self { cfg, sched })
    }

    pub fn config(&self) -> &TrapConfig<T> {
        &self.cfg
    }

    pub fn schedule(&self) -> &RotationSchedule<T> {
        &self.sched
    }

    /// Rotation angle at `t` (clamped to `t >= 0`).
    pub fn angle(&self, t: T) -> T {
        angle_and_rate(&self.sched, t.max(T::zero())).0
    }
}

impl<T: Real> Trap<T> for RotatingTrap<T> {
    fn dim(&self) -> usize {
        self.cfg.d
    }

    fn omega_sq(&self, t: T) -> Matrix<T> {
        omega_squared_rotating(&self.cfg, &self.sched, t.max(T::zero())).expect("validated schedule")
    }
}

/// Trap given by an arbitrary Ω²(t) closure, centered at the origin.
pub struct FnTrap<F> {
    d: usize,
    f: F,
}

impl<F> FnTrap<F> {
    pub fn new(d: usize, f: F) -> Self {
        Self { d, f }
    }
}

impl<T: Real, F: Fn(T) -> Matrix<T> + Send + Sync> Trap<T> for FnTrap<F> {
    fn dim(&self) -> usize {
        self.d
    }

    fn omega_sq(&self, t: T) -> Matrix<T> {
        (self.f)(t)
    }
}

/// Interpretation of the reference trajectory ρ(t).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TrajectoryMode {
    TrapMinimum,
    #[default]
    Semiclassical,
}

/// ρ(τ) and ρ̇(τ).
///
/// In semiclassical mode `m ρ̈ = −∇V(t, ρ)` is integrated with RK4 from
/// `(rho0, rho_dot0)` using steps no longer than `max_dt`.
pub fn classical_trajectory_rho<T: Real>(
    trap: &dyn Trap<T>,
    mode: TrajectoryMode,
    mass: T,
    rho0: Vector<T>,
    rho_dot0: Vector<T>,
    tau: T,
    max_dt: T,
) -> Result<(Vector<T>, Vector<T>)> {
    if tau < T::zero() {
        return Err(invalid("tau", "must be >= 0"));
    }
    match mode {
        TrajectoryMode::TrapMinimum => {
            let w = trap.omega_sq(tau);
            if !(w.min_eigenvalue() > T::zero()) {
                return Err(BecError::Singular { context: "trap-minimum trajectory", det: w.det().as_f64() });
            }
            // Minimum of −F·x + (m/2)xᵀΩ²x sits at x = Ω⁻² F/m.
            let shift = w.inverse().expect("positive definite") * trap.force(tau) * (T::one() / mass);
            Ok((trap.center(tau) + shift, trap.center_velocity(tau)))
        }
        TrajectoryMode::Semiclassical => {
            if !(max_dt > T::zero()) {
                return Err(invalid("max_dt", "must be > 0"));
            }
            let n = (tau / max_dt).ceil().to_usize().unwrap_or(0).max(1);
            let h = tau / T::from_usize_lossy(n);
            let mut f = |t: T, s: &(Vector<T>, Vector<T>)| (s.1, trap.gradient(t, &s.0, mass) * (-T::one() / mass));
            let mut s = (rho0, rho_dot0);
            for k in 0..n {
                s = rk4_step(&mut f, T::from_usize_lossy(k) * h, &s, h);
            }
            Ok(s)
        }
    }
}

/// Effective 2D coupling of a pancake with transverse oscillator length `a_z`.
pub fn quasi2d_coupling<T: Real>(g3d: T, a_z: T) -> Result<T> {
    if !(a_z > T::zero()) {
        return Err(invalid("a_z", "must be > 0"));
    }
    Ok(g3d / ((T::two() * T::PI()).sqrt() * a_z))
}
