//! The adaptive matrix Λ(t) and the quantities derived from it.
//!
//! Λ obeys `Λ̈ = Λ⁻ᵀ Ω²(0) / det Λ − Ω²(t) Λ` with `Λ(0) = 1`, `Λ̇(0) = 0`.

pub mod analytic;
pub mod canonical;
pub mod sigma_c;

use crate::error::{invalid, BecError, Result};
use crate::linalg::{Matrix, Vector};
use crate::ode::{rk4_step, Axpy};
use crate::scalar::Real;
use crate::trap::Trap;

pub use analytic::{
    analytic_lambda_isotropic, isotropic_integral, longtime_asymptote, longtime_coefficients, LongTimeFit,
};
pub use canonical::{
    bracket_canonical, bracket_in_original_variables, canonical_map, canonical_rhs, hamiltonian_canonical,
    hamiltonian_gradient, CanonicalState,
};
pub use sigma_c::{integrate_sigma_c, integrate_sigma_c_observed, SigmaCState};

/// Determinants below this are treated as singular.
pub const DET_GUARD: f64 = 1e-300;
/// Largest `dt · ω_max` accepted by [`integrate_lambda`].
pub const LAMBDA_STEP_LIMIT: f64 = 0.1;
/// Relative irrotationality residual that aborts an integration.
pub const IRROT_ABORT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveState<T> {
    pub lam: Matrix<T>,
    pub lam_dot: Matrix<T>,
    pub t: T,
    /// β(t) = ∫₀ᵗ μ / det Λ.
    pub beta: T,
}

impl<T: Real> AdaptiveState<T> {
    /// Λ = 1, Λ̇ = 0 at t = 0.
    pub fn initial(d: usize) -> Self {
        Self { lam: Matrix::identity(d), lam_dot: Matrix::zeros(d), t: T::zero(), beta: T::zero() }
    }

    pub fn dim(&self) -> usize {
        self.lam.dim()
    }

    pub fn det(&self) -> T {
        self.lam.det()
    }

    /// Z = ΛᵀΛ̇ − Λ̇ᵀΛ.
    pub fn irrotationality(&self) -> Matrix<T> {
        let a = self.lam.transpose() * self.lam_dot;
        a - a.transpose()
    }

    /// ‖Z‖_F / max(1, ‖ΛᵀΛ̇‖_F).
    pub fn irrotationality_residual(&self) -> T {
        let a = self.lam.transpose() * self.lam_dot;
        (a - a.transpose()).frobenius() / a.frobenius().max(T::one())
    }
}

fn checked_inverse<T: Real>(m: &Matrix<T>, context: &'static str) -> Result<(Matrix<T>, T)> {
    let det = m.det();
    if !(det.abs() >= T::lit(DET_GUARD)) {
        return Err(BecError::Singular { context, det: det.as_f64() });
    }
    let inv = m.inverse().ok_or(BecError::Singular { context, det: det.as_f64() })?;
    Ok((inv, det))
}

/// Λ̈ = Λ⁻ᵀ Ω²(0) / det Λ − Ω²(t) Λ.
pub fn lambda_rhs<T: Real>(lam: &Matrix<T>, omega_sq_now: &Matrix<T>, omega_sq_0: &Matrix<T>) -> Result<Matrix<T>> {
    let (inv, det) = checked_inverse(lam, "lambda_rhs")?;
    Ok(inv.transpose() * *omega_sq_0 * (T::one() / det) - *omega_sq_now * *lam)
}

/// λ̈_i = ω_i²(0)/(λ_i ∏λ_k) − ω_i²(t) λ_i for diagonal Λ and Ω².
pub fn scaling_diagonal_rhs<T: Real>(
    lambdas: &Vector<T>,
    omega_now: &Vector<T>,
    omega0: &Vector<T>,
) -> Result<Vector<T>> {
    if lambdas.dim() != omega_now.dim() || lambdas.dim() != omega0.dim() {
        return Err(BecError::Dimension("scaling_diagonal_rhs inputs differ in length".into()));
    }
    if lambdas.iter().any(|l| !(l > T::zero())) {
        return Err(invalid("lambdas", "all scaling factors must be > 0"));
    }
    let prod: T = lambdas.iter().fold(T::one(), |p, l| p * l);
    let mut out = Vector::zeros(lambdas.dim());
    for i in 0..lambdas.dim() {
        let w0 = omega0[i] * omega0[i];
        let w = omega_now[i] * omega_now[i];
        out[i] = w0 / (lambdas[i] * prod) - w * lambdas[i];
    }
    Ok(out)
}

#[derive(Clone, Copy)]
struct Phase<T> {
    lam: Matrix<T>,
    lam_dot: Matrix<T>,
    beta: T,
}

impl<T: Real> Axpy<T> for Phase<T> {
    fn axpy(&self, a: T, x: &Self) -> Self {
        Phase { lam: self.lam.axpy(a, &x.lam), lam_dot: self.lam_dot.axpy(a, &x.lam_dot), beta: self.beta + a * x.beta }
    }
}

/// One RK4 step of the Λ equation together with β.
pub fn step_lambda<T: Real>(
    state: &AdaptiveState<T>,
    trap: &dyn Trap<T>,
    omega_sq_0: &Matrix<T>,
    dt: T,
    mu: T,
) -> Result<AdaptiveState<T>> {
    let mut err = None;
    let mut f = |t: T, y: &Phase<T>| -> Phase<T> {
        let det = y.lam.det();
        match lambda_rhs(&y.lam, &trap.omega_sq(t), omega_sq_0) {
            Ok(acc) => Phase { lam: y.lam_dot, lam_dot: acc, beta: mu / det },
            Err(e) => {
                err.get_or_insert(e);
                Phase { lam: Matrix::zeros(y.lam.dim()), lam_dot: Matrix::zeros(y.lam.dim()), beta: T::zero() }
            }
        }
    };
    let y0 = Phase { lam: state.lam, lam_dot: state.lam_dot, beta: state.beta };
    let y = rk4_step(&mut f, state.t, &y0, dt);
    if let Some(e) = err {
        return Err(e);
    }
    Ok(AdaptiveState { lam: y.lam, lam_dot: y.lam_dot, t: state.t + dt, beta: y.beta })
}

fn check_lambda_step<T: Real>(trap: &dyn Trap<T>, omega_sq_0: &Matrix<T>, t: T, dt: T) -> Result<()> {
    let w = trap.max_frequency(t).max(omega_sq_0.max_eigenvalue().max(T::zero()).sqrt());
    if dt * w > T::lit(LAMBDA_STEP_LIMIT) {
        return Err(BecError::StepSize(format!("dt * omega_max = {} exceeds {LAMBDA_STEP_LIMIT}", (dt * w).as_f64())));
    }
    Ok(())
}

fn check_state<T: Real>(s: &AdaptiveState<T>) -> Result<()> {
    if !s.lam.is_finite() || !s.lam_dot.is_finite() {
        return Err(BecError::NonFinite("integrate_lambda"));
    }
    let det = s.det();
    if !(det > T::zero()) {
        return Err(BecError::Singular { context: "integrate_lambda (det Lambda <= 0)", det: det.as_f64() });
    }
    let r = s.irrotationality_residual();
    if r > T::lit(IRROT_ABORT) {
        return Err(BecError::Irrotationality { residual: r.as_f64(), limit: IRROT_ABORT, t: s.t.as_f64() });
    }
    Ok(())
}

/// Integrates Λ, Λ̇ and β over `n_steps` RK4 steps, calling `observe` after
/// every step.
pub fn integrate_lambda_observed<T: Real>(
    state: &AdaptiveState<T>,
    trap: &dyn Trap<T>,
    omega_sq_0: &Matrix<T>,
    dt: T,
    n_steps: usize,
    mu: T,
    mut observe: impl FnMut(&AdaptiveState<T>),
) -> Result<AdaptiveState<T>> {
    if !(dt > T::zero()) {
        return Err(invalid("dt", "must be > 0"));
    }
    if trap.dim() != state.dim() || omega_sq_0.dim() != state.dim() {
        return Err(BecError::Dimension("trap and Lambda dimensions differ".into()));
    }
    let mut s = *state;
    for _ in 0..n_steps {
        check_lambda_step(trap, omega_sq_0, s.t, dt)?;
        s = step_lambda(&s, trap, omega_sq_0, dt, mu)?;
        check_state(&s)?;
        observe(&s);
    }
    Ok(s)
}

pub fn integrate_lambda<T: Real>(
    state: &AdaptiveState<T>,
    trap: &dyn Trap<T>,
    omega_sq_0: &Matrix<T>,
    dt: T,
    n_steps: usize,
    mu: T,
) -> Result<AdaptiveState<T>> {
    integrate_lambda_observed(state, trap, omega_sq_0, dt, n_steps, mu, |_| {})
}

/// Σ, C, A and optionally the Thomas-Fermi radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedMatrices<T> {
    /// Σ = Λ Ω⁻²(0) Λᵀ.
    pub sigma: Matrix<T>,
    /// C = Λ̇ Λ⁻¹.
    pub c_mat: Matrix<T>,
    /// A = (m/2) Λᵀ Λ̇.
    pub a_mat: Matrix<T>,
    /// √(2 μ σ_i / m), ascending.
    pub radii: Option<Vector<T>>,
}

pub fn sigma_and_c<T: Real>(
    state: &AdaptiveState<T>,
    omega_sq_0: &Matrix<T>,
    mass: T,
    mu_tf: Option<T>,
) -> Result<DerivedMatrices<T>> {
    let (lam_inv, _) = checked_inverse(&state.lam, "sigma_and_c (Lambda)")?;
    let (w0_inv, _) = checked_inverse(omega_sq_0, "sigma_and_c (Omega^2(0))")?;
    let sigma = (state.lam * w0_inv * state.lam.transpose()).symmetrize();
    let c_mat = state.lam_dot * lam_inv;
    let a_mat = state.lam.transpose() * state.lam_dot * (T::half() * mass);
    let radii = mu_tf.map(|mu| {
        let (w, _) = sigma.sym_eigen();
        w.map(|s| (T::two() * mu * s / mass).max(T::zero()).sqrt())
    });
    Ok(DerivedMatrices { sigma, c_mat, a_mat, radii })
}

/// E_Λ = ½ Tr[(Λ̇ᵀΛ̇ + ΛᵀΩ²(t)Λ) Ω⁻²(0)] + 1/det Λ.
pub fn energy_lambda<T: Real>(state: &AdaptiveState<T>, omega_sq_now: &Matrix<T>, omega_sq_0: &Matrix<T>) -> Result<T> {
    let (w0_inv, _) = checked_inverse(omega_sq_0, "energy_lambda")?;
    let l = state.lam;
    let ld = state.lam_dot;
    let m = ld.transpose() * ld + l.transpose() * *omega_sq_now * l;
    Ok(T::half() * (m * w0_inv).trace() + T::one() / l.det())
}

/// α = [det Ω²(0)]^(1/2d).
pub fn alpha<T: Real>(omega_sq_0: &Matrix<T>) -> T {
    let d = T::from_usize_lossy(omega_sq_0.dim());
    omega_sq_0.det().powf(T::one() / (T::two() * d))
}

/// L_Λ = α [Λ Ω⁻²(0) Λ̇ᵀ − Λ̇ Ω⁻²(0) Λᵀ], antisymmetrized.
pub fn angmom_lambda<T: Real>(state: &AdaptiveState<T>, omega_sq_0: &Matrix<T>) -> Result<Matrix<T>> {
    if state.dim() < 2 {
        return Err(invalid("d", "angular momentum needs d >= 2"));
    }
    let (w0_inv, _) = checked_inverse(omega_sq_0, "angmom_lambda")?;
    let a = state.lam * w0_inv * state.lam_dot.transpose();
    let l = (a - a.transpose()) * alpha(omega_sq_0);
    Ok((l - l.transpose()) * T::half())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trap::{FnTrap, HarmonicTrap, RotatingTrap, RotationSchedule, TrapConfig};

    fn w0() -> Matrix<f64> {
        Matrix::from_diag(&[1.0, 2.25])
    }

    #[test]
    fn rhs_fixed_point_and_release() {
        let i = Matrix::identity(2);
        assert!(lambda_rhs(&i, &w0(), &w0()).unwrap().max_abs() < 1e-15);
        assert_eq!(lambda_rhs(&i, &Matrix::zeros(2), &w0()).unwrap(), w0());
        assert!(lambda_rhs(&Matrix::zeros(2), &w0(), &w0()).is_err());
    }

    #[test]
    fn diagonal_rhs_matches_dense_rhs() {
        let l = Vector::from_slice(&[1.3, 0.7, 2.1]);
        let wn = Vector::from_slice(&[0.4, 1.1, 0.0]);
        let w = Vector::from_slice(&[1.0, 1.5, 0.8]);
        let fast = scaling_diagonal_rhs(&l, &wn, &w).unwrap();
        let sq = |v: &Vector<f64>| Matrix::from_diag(&v.iter().map(|x| x * x).collect::<Vec<_>>());
        let dense = lambda_rhs(&Matrix::from_diag(l.as_slice()), &sq(&wn), &sq(&w)).unwrap();
        assert!((dense.diag() - fast).max_abs() < 1e-14);
        assert!(scaling_diagonal_rhs(&Vector::from_slice(&[0.0, 1.0, 1.0]), &wn, &w).is_err());
    }

    #[test]
    fn static_trap_is_a_fixed_point() {
        let trap = HarmonicTrap::new(w0());
        let s = integrate_lambda(&AdaptiveState::initial(2), &trap, &w0(), 0.01, 1000, 3.0).unwrap();
        assert!((s.lam - Matrix::identity(2)).max_abs() < 1e-14);
        assert!(s.lam_dot.max_abs() < 1e-14);
        assert!((s.beta - 30.0).abs() < 1e-10);
    }

    #[test]
    fn initial_derived_matrices() {
        let d = sigma_and_c(&AdaptiveState::initial(2), &w0(), 1.0, Some(2.0)).unwrap();
        assert!((d.sigma - w0().inverse().unwrap()).max_abs() < 1e-15);
        assert_eq!(d.c_mat, Matrix::zeros(2));
        assert_eq!(d.a_mat, Matrix::zeros(2));
        let r = d.radii.unwrap();
        assert!((r[0] - (4.0f64 / 2.25).sqrt()).abs() < 1e-14 && (r[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn initial_energy_and_angular_momentum() {
        for d in 1..=3 {
            let w = Matrix::from_fn(d, |i, j| if i == j { 1.0 + i as f64 } else { 0.1 });
            let e = energy_lambda(&AdaptiveState::initial(d), &w, &w).unwrap();
            assert!((e - (d as f64 / 2.0 + 1.0)).abs() < 1e-14);
        }
        assert_eq!(angmom_lambda(&AdaptiveState::initial(2), &w0()).unwrap(), Matrix::zeros(2));
        assert!(angmom_lambda(&AdaptiveState::initial(1), &Matrix::<f64>::identity(1)).is_err());
    }

    #[test]
    fn isotropic_schedule_conserves_angular_momentum() {
        // start from a state that already carries angular momentum
        let trap = FnTrap::new(2, |t: f64| Matrix::identity(2) * (1.0 + 0.3 * (0.7 * t).sin()));
        let w = Matrix::<f64>::identity(2);
        let mut s = AdaptiveState::initial(2);
        s.lam_dot = Matrix::from_row_slice(2, &[0.1, 0.2, 0.2, -0.05]);
        let l0 = angmom_lambda(&s, &w).unwrap();
        let mut drift = 0.0f64;
        integrate_lambda_observed(&s, &trap, &w, 0.005, 4000, 0.0, |st| {
            drift = drift.max((angmom_lambda(st, &w).unwrap() - l0).max_abs());
        })
        .unwrap();
        assert!(drift < 1e-8, "{drift}");
    }

    #[test]
    fn rotating_trajectory_stays_irrotational() {
        let cfg = TrapConfig::anisotropic_2d(1.5, 100.0, 1.0).unwrap();
        let trap = RotatingTrap::new(cfg, RotationSchedule::smoothstep(0.4, 30.0)).unwrap();
        let mut worst = 0.0f64;
        let mut c_asym = 0.0f64;
        integrate_lambda_observed(&AdaptiveState::initial(2), &trap, &w0(), 0.01, 6000, 1.0, |s| {
            worst = worst.max(s.irrotationality_residual());
            let d = sigma_and_c(s, &w0(), 1.0, None).unwrap();
            c_asym = c_asym.max(d.c_mat.asymmetry());
        })
        .unwrap();
        assert!(worst < 1e-8, "{worst}");
        assert!(c_asym < 1e-8, "{c_asym}");
    }

    #[test]
    fn guards() {
        let trap = HarmonicTrap::new(w0());
        assert!(integrate_lambda(&AdaptiveState::initial(2), &trap, &w0(), 0.2, 1, 0.0).is_err());
        assert!(integrate_lambda(&AdaptiveState::initial(2), &trap, &w0(), -0.01, 1, 0.0).is_err());
    }
}
