//! Stationary state by imaginary-time split-step with decreasing step sizes.

use num_complex::Complex;

use crate::error::{invalid, BecError, Result};
use crate::gpe::observables::{energy_terms, EnergyTerms};
use crate::gpe::propagate::{GpeParams, Propagator};
use crate::gpe::{FieldState, Grid2D, GridReal};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImagTimeOptions<T> {
    /// First-stage step; each refinement divides it by ten.
    pub dt: T,
    pub refinements: usize,
    /// Stage ends once ‖ψ(τ) − ψ(τ − Δτ)‖/(‖ψ‖Δτ), the relative change of
    /// the state per unit imaginary time, drops below this.
    pub tol: T,
    /// Step cap per stage.
    pub max_steps: usize,
    pub check_every: usize,
}

impl<T: GridReal> Default for ImagTimeOptions<T> {
    fn default() -> Self {
        Self { dt: T::lit(1e-2), refinements: 1, tol: T::lit(1e-7), max_steps: 200_000, check_every: 10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundState<T> {
    pub field: FieldState<T>,
    pub energy: EnergyTerms<T>,
    /// (E_kin + E_pot + 2E_int)/N.
    pub mu: T,
    pub steps: usize,
}

/// Minimizes the GP energy in the static trap Ω²(0) at fixed norm `n_atoms`.
///
/// `params.mu` is ignored; the returned field carries the computed μ.
pub fn ground_state_imaginary_time<T: GridReal>(
    grid: Grid2D<T>,
    params: &GpeParams<T>,
    n_atoms: T,
    opts: &ImagTimeOptions<T>,
) -> Result<GroundState<T>> {
    if !(n_atoms > T::zero()) {
        return Err(invalid("n_atoms", "must be > 0"));
    }
    if !(opts.dt > T::zero()) || !(opts.tol > T::zero()) || opts.check_every == 0 {
        return Err(invalid("imaginary_time", "dt and tol must be > 0, check_every >= 1"));
    }
    let mut p = GpeParams { mu: T::zero(), ..*params };
    let mut prop = Propagator::new(grid, p)?;
    // harmonic-oscillator ground state as the starting guess
    let w = params.omega_sq_0.sym_fn(|x| x.max(T::zero()).sqrt()) * (T::half() * params.mass);
    let mut field = FieldState::from_fn(grid, |x, y| {
        let q = w[(0, 0)] * x * x + T::two() * w[(0, 1)] * x * y + w[(1, 1)] * y * y;
        Complex::new((-q).exp(), T::zero())
    });
    field.normalize_to(n_atoms)?;

    let energy = |prop: &mut Propagator<T>, f: &FieldState<T>| -> Result<EnergyTerms<T>> {
        let v = prop.static_potential().to_vec();
        energy_terms(f, &v, params.g, params.mass, None, prop.fft())
    };
    let mut steps = 0;
    let mut dt = opts.dt;
    for stage in 0..=opts.refinements {
        let mut converged = false;
        let mut k = 0;
        while k < opts.max_steps {
            let before = field.amps.clone();
            for _ in 0..opts.check_every {
                prop.step_imaginary(&mut field, dt, n_atoms)?;
            }
            k += opts.check_every;
            if !field.is_finite() {
                return Err(BecError::NonFinite("ground_state_imaginary_time"));
            }
            let change: T = field.amps.iter().zip(&before).map(|(a, b)| (a - b).norm_sqr()).sum();
            let size: T = field.amps.iter().map(|z| z.norm_sqr()).sum();
            let span = dt * T::from_usize_lossy(opts.check_every);
            if (change / size).sqrt() / span < opts.tol {
                converged = true;
                break;
            }
        }
        steps += k;
        if !converged {
            return Err(BecError::NoConvergence {
                what: "imaginary-time ground state",
                iterations: steps,
                detail: format!("stage {stage} (dt = {}) did not reach tol {}", dt.as_f64(), opts.tol.as_f64()),
            });
        }
        dt = dt / T::lit(10.0);
    }
    let e = energy(&mut prop, &field)?;
    p.mu = e.mu();
    field.mu = p.mu;
    field.tau = T::zero();
    Ok(GroundState { field, energy: e, mu: p.mu, steps })
}

/// Ω²(0) for the grid solver from trap frequencies (ω_x, ω_y).
pub fn omega_sq_2d<T: GridReal>(wx: T, wy: T) -> Matrix<T> {
    Matrix::from_diag(&[wx * wx, wy * wy])
}
