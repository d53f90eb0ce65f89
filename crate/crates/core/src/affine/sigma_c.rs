//! The equivalent first-order description in terms of Σ⁻¹ and C.
//!
//! dΣ⁻¹/dt = −CΣ⁻¹ − Σ⁻¹C,
//! dC/dt   = −C² − Ω²(t) + Σ⁻¹ √(det Σ⁻¹ / det Ω²(0)).

use crate::error::{invalid, BecError, Result};
use crate::linalg::Matrix;
use crate::ode::rk4_step;
use crate::scalar::Real;
use crate::trap::Trap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaCState<T> {
    pub sigma_inv: Matrix<T>,
    pub c_mat: Matrix<T>,
    pub t: T,
}

impl<T: Real> SigmaCState<T> {
    /// Σ⁻¹(0) = Ω²(0), C(0) = 0.
    pub fn initial(omega_sq_0: &Matrix<T>) -> Self {
        Self { sigma_inv: *omega_sq_0, c_mat: Matrix::zeros(omega_sq_0.dim()), t: T::zero() }
    }

    pub fn sigma(&self) -> Option<Matrix<T>> {
        self.sigma_inv.inverse().map(|s| s.symmetrize())
    }

    /// det Λ recovered as √(det Ω²(0) / det Σ⁻¹).
    pub fn det_lambda(&self, omega_sq_0: &Matrix<T>) -> T {
        (omega_sq_0.det() / self.sigma_inv.det()).sqrt()
    }
}

fn rhs<T: Real>(si: &Matrix<T>, c: &Matrix<T>, w_now: &Matrix<T>, det_w0: T) -> (Matrix<T>, Matrix<T>) {
    let dsi = -(*c * *si) - *si * *c;
    let scale = (si.det() / det_w0).max(T::zero()).sqrt();
    let dc = -(*c * *c) - *w_now + *si * scale;
    (dsi, dc)
}

/// Advances (Σ⁻¹, C) with RK4, symmetrizing both after every step.
pub fn integrate_sigma_c_observed<T: Real>(
    state: &SigmaCState<T>,
    trap: &dyn Trap<T>,
    omega_sq_0: &Matrix<T>,
    dt: T,
    n_steps: usize,
    mut observe: impl FnMut(&SigmaCState<T>),
) -> Result<SigmaCState<T>> {
    if !(dt > T::zero()) {
        return Err(invalid("dt", "must be > 0"));
    }
    let det_w0 = omega_sq_0.det();
    if !(det_w0 > T::zero()) {
        return Err(BecError::Singular { context: "integrate_sigma_c (Omega^2(0))", det: det_w0.as_f64() });
    }
    let mut s = *state;
    let mut f = |t: T, y: &(Matrix<T>, Matrix<T>)| rhs(&y.0, &y.1, &trap.omega_sq(t), det_w0);
    for _ in 0..n_steps {
        let (si, c) = rk4_step(&mut f, s.t, &(s.sigma_inv, s.c_mat), dt);
        s = SigmaCState { sigma_inv: si.symmetrize(), c_mat: c.symmetrize(), t: s.t + dt };
        if !s.sigma_inv.is_finite() || !s.c_mat.is_finite() {
            return Err(BecError::NonFinite("integrate_sigma_c"));
        }
        if !(s.sigma_inv.min_eigenvalue() > T::zero()) {
            return Err(BecError::NotPositiveDefinite { t: s.t.as_f64() });
        }
        observe(&s);
    }
    Ok(s)
}

pub fn integrate_sigma_c<T: Real>(
    state: &SigmaCState<T>,
    trap: &dyn Trap<T>,
    omega_sq_0: &Matrix<T>,
    dt: T,
    n_steps: usize,
) -> Result<SigmaCState<T>> {
    integrate_sigma_c_observed(state, trap, omega_sq_0, dt, n_steps, |_| {})
}
