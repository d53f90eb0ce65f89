//! Center-of-mass motion and the classical action phases S_k.

use crate::error::{invalid, BecError, Result};
use crate::linalg::Vector;
use crate::ode::rk4_step;
use crate::scalar::Real;
use crate::trap::Trap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComState<T> {
    pub r_com: Vector<T>,
    pub p_com: Vector<T>,
    pub t: T,
    /// ∫₀ᵗ 𝓛 dt′ with 𝓛 = P²/2m − V(t, R).
    pub lagrangian_integral: T,
    r0: Vector<T>,
    p0: Vector<T>,
}

impl<T: Real> ComState<T> {
    /// Starts at `t = 0` with the given expectation values.
    pub fn new(r0: Vector<T>, p0: Vector<T>) -> Self {
        Self { r_com: r0, p_com: p0, t: T::zero(), lagrangian_integral: T::zero(), r0, p0 }
    }

    /// `R(0) = ρ(0)`, `P(0) = m ρ̇(0)`.
    pub fn from_trajectory(rho0: Vector<T>, rho_dot0: Vector<T>, mass: T) -> Self {
        Self::new(rho0, rho_dot0 * mass)
    }

    pub fn at_rest(d: usize) -> Self {
        Self::new(Vector::zeros(d), Vector::zeros(d))
    }

    pub fn initial_position(&self) -> Vector<T> {
        self.r0
    }

    pub fn initial_momentum(&self) -> Vector<T> {
        self.p0
    }

    fn surface(&self) -> T {
        self.r_com.dot(&self.p_com) - self.r0.dot(&self.p0)
    }

    pub fn s1(&self) -> T {
        self.lagrangian_integral - T::half() * self.surface()
    }

    pub fn s2(&self) -> T {
        self.lagrangian_integral - self.surface()
    }

    /// Classical energy P²/2m + V(t, R).
    pub fn energy(&self, trap: &dyn Trap<T>, mass: T) -> T {
        self.p_com.dot(&self.p_com) / (T::two() * mass) + trap.potential(self.t, &self.r_com, mass)
    }
}

/// S_k(t) = ∫₀ᵗ 𝓛 − (k/2)[R(t)·P(t) − R(0)·P(0)] for k ∈ {1, 2}.
pub fn action_s_k<T: Real>(state: &ComState<T>, k: u32) -> Result<T> {
    match k {
        1 => Ok(state.s1()),
        2 => Ok(state.s2()),
        _ => Err(invalid("k", format!("only k = 1 or 2 is supported, got {k}"))),
    }
}

/// Largest `dt · max‖Ω‖` accepted by [`integrate_com`].
pub const COM_STEP_LIMIT: f64 = 0.5;

/// Advances (R, P) and the action integral by `n_steps` RK4 steps.
///
/// The action is carried as a third component of the RK4 state so that phase
/// and trajectory see identical stage evaluations.
pub fn integrate_com<T: Real>(
    state: &ComState<T>,
    trap: &dyn Trap<T>,
    mass: T,
    dt: T,
    n_steps: usize,
) -> Result<ComState<T>> {
    if !(dt > T::zero()) {
        return Err(invalid("dt", "must be > 0"));
    }
    let mut out = *state;
    let inv_m = T::one() / mass;
    let mut f = |t: T, y: &(Vector<T>, Vector<T>, T)| {
        let (r, p, _) = y;
        let lag = p.dot(p) * T::half() * inv_m - trap.potential(t, r, mass);
        (*p * inv_m, -trap.gradient(t, r, mass), lag)
    };
    for _ in 0..n_steps {
        let w = trap.max_frequency(out.t);
        if dt * w > T::lit(COM_STEP_LIMIT) {
            return Err(BecError::StepSize(format!(
                "dt * max|Omega| = {} exceeds {COM_STEP_LIMIT}",
                (dt * w).as_f64()
            )));
        }
        let y = rk4_step(&mut f, out.t, &(out.r_com, out.p_com, out.lagrangian_integral), dt);
        out.r_com = y.0;
        out.p_com = y.1;
        out.lagrangian_integral = y.2;
        out.t += dt;
    }
    Ok(out)
}
