//! Real-time split-step propagation of the adapted GPE
//!
//! i∂_τψ_Λ = [−(Λ⁻ᵀ∇)²/2m + (V₀(ζ) + g|ψ_Λ|² − μ)/det Λ] ψ_Λ,
//! V₀(ζ) = (m/2) ζᵀΩ²(0)ζ,
//!
//! with Λ(τ) advanced alongside by RK4 at half the field step.

use num_complex::Complex;

use crate::affine::{step_lambda, AdaptiveState, IRROT_ABORT};
use crate::error::{invalid, BecError, Result};
use crate::gpe::observables::{energy_terms, EnergyTerms};
use crate::gpe::{bures_distance, residual_metric, Fft2, FieldState, Grid2D, GridReal};
use crate::linalg::{Matrix, Vector};
use crate::trap::Trap;

/// Largest kinetic phase per step, dt·max|Λ⁻ᵀk|²/2m, accepted by
/// [`Propagator::step`].
pub const KINETIC_PHASE_LIMIT: f64 = std::f64::consts::PI;

/// Relative mass allowed within two cells of the grid edge.
pub const BOUNDARY_MASS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpeParams<T> {
    pub omega_sq_0: Matrix<T>,
    pub g: T,
    pub mass: T,
    /// Chemical potential subtracted from the adapted Hamiltonian.
    pub mu: T,
}

impl<T: GridReal> GpeParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.omega_sq_0.dim() != 2 {
            return Err(BecError::Dimension("the grid solver is two-dimensional".into()));
        }
        if !(self.mass > T::zero()) {
            return Err(invalid("mass", "must be > 0"));
        }
        if !self.g.is_finite() || !self.mu.is_finite() || !self.omega_sq_0.is_finite() {
            return Err(BecError::NonFinite("GpeParams"));
        }
        Ok(())
    }
}

fn quad2<T: GridReal>(m: &Matrix<T>, a: T, b: T) -> T {
    m[(0, 0)] * a * a + (m[(0, 1)] + m[(1, 0)]) * a * b + m[(1, 1)] * b * b
}

/// Split-step propagator bound to one grid and parameter set.
pub struct Propagator<T: GridReal> {
    grid: Grid2D<T>,
    params: GpeParams<T>,
    fft: Fft2<T>,
    kx: Vec<T>,
    ky: Vec<T>,
    v0: Vec<T>,
}

impl<T: GridReal> Propagator<T> {
    pub fn new(grid: Grid2D<T>, params: GpeParams<T>) -> Result<Self> {
        params.validate()?;
        let w = params.omega_sq_0;
        let half_m = T::half() * params.mass;
        let mut v0 = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                v0.push(half_m * quad2(&w, grid.x(i), grid.y(j)));
            }
        }
        Ok(Self { fft: Fft2::new(&grid), kx: grid.kx(), ky: grid.ky(), grid, params, v0 })
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn params(&self) -> &GpeParams<T> {
        &self.params
    }

    pub fn fft(&mut self) -> &mut Fft2<T> {
        &mut self.fft
    }

    /// V₀ sampled on the grid.
    pub fn static_potential(&self) -> &[T] {
        &self.v0
    }

    fn check_field(&self, field: &FieldState<T>) -> Result<()> {
        if !self.grid.same_as(&field.grid) || field.amps.len() != self.grid.len() {
            return Err(BecError::GridMismatch("field grid differs from the propagator grid".into()));
        }
        Ok(())
    }

    /// ψ ← exp(−i·scale·(V + g|ψ|² − μ)) ψ; with `imaginary` the exponent is real.
    fn potential_kick(psi: &mut [Complex<T>], v: &[T], g: T, mu: T, scale: T, imaginary: bool) {
        for (z, &vk) in psi.iter_mut().zip(v) {
            let theta = scale * (vk + g * z.norm_sqr() - mu);
            *z = if imaginary {
                *z * (-theta).exp()
            } else {
                let (s, c) = theta.sin_cos();
                *z * Complex::new(c, -s)
            };
        }
    }

    /// ψ̂ ← exp(−i·dt·kᵀMk/2m) ψ̂.
    fn kinetic_kick(&mut self, psi: &mut [Complex<T>], dt: T, metric: &Matrix<T>, imaginary: bool) {
        self.fft.forward(psi);
        let s = dt / (T::two() * self.params.mass);
        for i in 0..self.grid.nx {
            let row = &mut psi[i * self.grid.ny..(i + 1) * self.grid.ny];
            for (z, &kyj) in row.iter_mut().zip(&self.ky) {
                let theta = s * quad2(metric, self.kx[i], kyj);
                *z = if imaginary {
                    *z * (-theta).exp()
                } else {
                    let (sn, c) = theta.sin_cos();
                    *z * Complex::new(c, -sn)
                };
            }
        }
        self.fft.inverse(psi);
    }

    /// dt·max kᵀMk/2m over the grid's wavenumber box.
    pub fn kinetic_phase(&self, dt: T, metric: &Matrix<T>) -> T {
        let (kx, ky) = self.grid.k_max();
        let a = quad2(metric, kx, ky);
        let b = quad2(metric, kx, -ky);
        dt * a.max(b) / (T::two() * self.params.mass)
    }

    fn metric(lam: &Matrix<T>) -> Result<Matrix<T>> {
        let inv = lam.inverse().ok_or(BecError::Singular { context: "metric (Lambda)", det: lam.det().as_f64() })?;
        Ok(inv * inv.transpose())
    }

    /// One Strang step: potential half with det Λ(τ), kinetic with Λ(τ + dt/2),
    /// potential half with det Λ(τ + dt). Returns the advanced Λ state.
    pub fn step(
        &mut self,
        field: &mut FieldState<T>,
        state: &AdaptiveState<T>,
        trap: &dyn Trap<T>,
        dt: T,
    ) -> Result<AdaptiveState<T>> {
        self.check_field(field)?;
        let w0 = self.params.omega_sq_0;
        let mu = self.params.mu;
        let mid = step_lambda(state, trap, &w0, T::half() * dt, mu)?;
        let end = step_lambda(&mid, trap, &w0, T::half() * dt, mu)?;
        let metric = Self::metric(&mid.lam)?;
        let phase = self.kinetic_phase(dt, &metric);
        if phase > T::lit(KINETIC_PHASE_LIMIT) {
            return Err(BecError::StepSize(format!(
                "kinetic phase per step {} exceeds pi at tau = {}",
                phase.as_f64(),
                state.t.as_f64()
            )));
        }
        let (d0, d1) = (state.det(), end.det());
        if !(d0 > T::zero() && d1 > T::zero()) {
            return Err(BecError::Singular { context: "Propagator::step (det Lambda)", det: d1.as_f64() });
        }
        let g = self.params.g;
        let half = T::half() * dt;
        Self::potential_kick(&mut field.amps, &self.v0, g, mu, half / d0, false);
        self.kinetic_kick(&mut field.amps, dt, &metric, false);
        Self::potential_kick(&mut field.amps, &self.v0, g, mu, half / d1, false);
        field.tau = end.t;
        field.mu = mu;
        Ok(end)
    }

    /// One imaginary-time Strang step with Λ = I, rescaled to norm `n_atoms`.
    ///
    /// A potential kick in imaginary time changes |ψ|, so the closing half
    /// uses the density of its own (normalized) result, found by one fixed-point
    /// pass. With the density frozen at the start of each half instead, the
    /// stationary state of the map is off by O(dt) rather than O(dt²).
    pub(crate) fn step_imaginary(&mut self, field: &mut FieldState<T>, dt: T, n_atoms: T) -> Result<()> {
        let id = Matrix::identity(2);
        let (g, half) = (self.params.g, T::half() * dt);
        Self::potential_kick(&mut field.amps, &self.v0, g, T::zero(), half, true);
        self.kinetic_kick(&mut field.amps, dt, &id, true);
        field.normalize_to(n_atoms)?;
        let mut trial = field.clone();
        Self::potential_kick(&mut trial.amps, &self.v0, g, T::zero(), half, true);
        trial.normalize_to(n_atoms)?;
        for ((z, t), &v) in field.amps.iter_mut().zip(&trial.amps).zip(&self.v0) {
            *z = *z * (-(half * (v + g * t.norm_sqr()))).exp();
        }
        field.normalize_to(n_atoms)
    }

    /// One lab-frame Strang step in the full potential `V(t, r) + g|ψ|²`
    /// (no adapted coordinates, no μ shift).
    pub fn step_lab(&mut self, field: &mut FieldState<T>, trap: &dyn Trap<T>, dt: T) -> Result<()> {
        self.check_field(field)?;
        if trap.dim() != 2 {
            return Err(BecError::Dimension("lab-frame step needs a 2D trap".into()));
        }
        let id = Matrix::identity(2);
        let phase = self.kinetic_phase(dt, &id);
        if phase > T::lit(KINETIC_PHASE_LIMIT) {
            return Err(BecError::StepSize(format!("kinetic phase per step {} exceeds pi", phase.as_f64())));
        }
        let t0 = field.tau;
        let v_start = self.sample_trap(trap, t0);
        let v_end = self.sample_trap(trap, t0 + dt);
        let (g, half) = (self.params.g, T::half() * dt);
        Self::potential_kick(&mut field.amps, &v_start, g, T::zero(), half, false);
        self.kinetic_kick(&mut field.amps, dt, &id, false);
        Self::potential_kick(&mut field.amps, &v_end, g, T::zero(), half, false);
        field.tau = t0 + dt;
        Ok(())
    }

    /// V(t, r) on the grid.
    pub fn sample_trap(&self, trap: &dyn Trap<T>, t: T) -> Vec<T> {
        let e = trap.expansion(t);
        let half_m = T::half() * self.params.mass;
        let mut v = Vec::with_capacity(self.grid.len());
        for i in 0..self.grid.nx {
            let x = self.grid.x(i) - e.rho[0];
            for j in 0..self.grid.ny {
                let y = self.grid.y(j) - e.rho[1];
                v.push(e.v0 - e.force[0] * x - e.force[1] * y + half_m * quad2(&e.omega_sq, x, y));
            }
        }
        v
    }

    /// ∇ᵀ(Λ⁻¹Λ⁻ᵀ)∇ψ evaluated spectrally.
    pub fn warped_laplacian(&mut self, psi: &[Complex<T>], lam: &Matrix<T>) -> Result<Vec<Complex<T>>> {
        if psi.len() != self.grid.len() {
            return Err(BecError::GridMismatch("field length differs from the grid".into()));
        }
        let m = Self::metric(lam)?;
        let mut out = psi.to_vec();
        self.fft.forward(&mut out);
        for i in 0..self.grid.nx {
            for j in 0..self.grid.ny {
                let k = self.grid.idx(i, j);
                out[k] = out[k] * -quad2(&m, self.kx[i], self.ky[j]);
            }
        }
        self.fft.inverse(&mut out);
        Ok(out)
    }

    /// Adapted-frame energy terms: kinetic with metric Λ⁻¹Λ⁻ᵀ, potential and
    /// interaction divided by det Λ.
    pub fn adapted_energy(&mut self, field: &FieldState<T>, lam: &Matrix<T>) -> Result<EnergyTerms<T>> {
        self.check_field(field)?;
        let m = Self::metric(lam)?;
        let det = lam.det();
        let mut e = energy_terms(field, &self.v0, self.params.g, self.params.mass, Some(&m), &mut self.fft)?;
        e.potential /= det;
        e.interaction /= det;
        Ok(e)
    }

    /// Lab-frame energy terms in the potential `V(t, r)` of `trap`.
    pub fn lab_energy(&mut self, field: &FieldState<T>, trap: &dyn Trap<T>) -> Result<EnergyTerms<T>> {
        self.check_field(field)?;
        let v = self.sample_trap(trap, field.tau);
        energy_terms(field, &v, self.params.g, self.params.mass, None, &mut self.fft)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LogOptions<'a, T> {
    /// Record every `stride` steps (and after the last one).
    pub stride: usize,
    /// State for Bures and residual diagnostics; none skips them.
    pub reference: Option<&'a FieldState<T>>,
    pub energies: bool,
}

impl<T> Default for LogOptions<'_, T> {
    fn default() -> Self {
        Self { stride: 100, reference: None, energies: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PropagationLog<T> {
    pub times: Vec<T>,
    pub norms: Vec<T>,
    pub bures: Vec<T>,
    pub residual_l2: Vec<T>,
    pub energies: Vec<EnergyTerms<T>>,
    pub lambdas: Vec<AdaptiveState<T>>,
}

/// Propagates `field` and `adaptive` together for `n_steps` steps of `dt`.
///
/// Fails if their clocks disagree, if Λ loses irrotationality, if the norm
/// becomes non-finite, or if mass reaches the grid edge.
pub fn propagate_real<T: GridReal>(
    prop: &mut Propagator<T>,
    field: &FieldState<T>,
    adaptive: &AdaptiveState<T>,
    trap: &dyn Trap<T>,
    dt: T,
    n_steps: usize,
    log: &LogOptions<'_, T>,
) -> Result<(FieldState<T>, AdaptiveState<T>, PropagationLog<T>)> {
    propagate_real_observed(prop, field, adaptive, trap, dt, n_steps, log, |_, _| Ok(()))
}

/// [`propagate_real`] with a callback run at every logged sample.
#[allow(clippy::too_many_arguments)]
pub fn propagate_real_observed<T: GridReal>(
    prop: &mut Propagator<T>,
    field: &FieldState<T>,
    adaptive: &AdaptiveState<T>,
    trap: &dyn Trap<T>,
    dt: T,
    n_steps: usize,
    log: &LogOptions<'_, T>,
    mut observe: impl FnMut(&FieldState<T>, &AdaptiveState<T>) -> Result<()>,
) -> Result<(FieldState<T>, AdaptiveState<T>, PropagationLog<T>)> {
    if !(dt > T::zero()) {
        return Err(invalid("dt", "must be > 0"));
    }
    let sync = T::lit(1e-9) * adaptive.t.max(T::one());
    if crate::gpe::fabs(field.tau - adaptive.t) > sync {
        return Err(invalid("tau", format!("field at {} but Lambda at {}", field.tau.as_f64(), adaptive.t.as_f64())));
    }
    if adaptive.dim() != 2 {
        return Err(BecError::Dimension("the grid solver is two-dimensional".into()));
    }
    let stride = log.stride.max(1);
    let mut psi = field.clone();
    let mut lam = *adaptive;
    let n0 = field.norm();
    let mut out = PropagationLog::default();
    let mut record = |prop: &mut Propagator<T>, psi: &FieldState<T>, lam: &AdaptiveState<T>| -> Result<()> {
        let n = psi.norm();
        if !n.is_finite() {
            return Err(BecError::NonFinite("propagate_real (norm)"));
        }
        let edge = psi.boundary_mass(2);
        if edge > T::lit(BOUNDARY_MASS_TOL) * n0 {
            return Err(BecError::BoundaryMass {
                mass: edge.as_f64(),
                limit: (T::lit(BOUNDARY_MASS_TOL) * n0).as_f64(),
                context: "propagate_real",
            });
        }
        out.times.push(psi.tau);
        out.norms.push(n);
        if let Some(r) = log.reference {
            out.bures.push(bures_distance(r, psi)?);
            out.residual_l2.push(residual_metric(psi, r)?.l2);
        }
        if log.energies {
            out.energies.push(prop.adapted_energy(psi, &lam.lam)?);
        }
        out.lambdas.push(*lam);
        observe(psi, lam)
    };
    record(prop, &psi, &lam)?;
    for k in 1..=n_steps {
        lam = prop.step(&mut psi, &lam, trap, dt)?;
        let r = lam.irrotationality_residual();
        if r > T::lit(IRROT_ABORT) {
            return Err(BecError::Irrotationality { residual: r.as_f64(), limit: IRROT_ABORT, t: lam.t.as_f64() });
        }
        if k % stride == 0 || k == n_steps {
            record(prop, &psi, &lam)?;
        }
    }
    Ok((psi, lam, out))
}

/// Center of mass of a lab-frame field, `⟨r⟩`.
pub fn center_of_mass<T: GridReal>(field: &FieldState<T>) -> Vector<T> {
    let g = &field.grid;
    let (mut sx, mut sy, mut n) = (T::zero(), T::zero(), T::zero());
    for i in 0..g.nx {
        for j in 0..g.ny {
            let w = field.amps[g.idx(i, j)].norm_sqr();
            sx += w * g.x(i);
            sy += w * g.y(j);
            n += w;
        }
    }
    Vector::from_slice(&[sx / n, sy / n])
}
