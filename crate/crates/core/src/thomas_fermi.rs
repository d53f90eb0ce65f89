//! Thomas-Fermi ground state and its time-dependent continuation.

use crate::affine::{alpha, angmom_lambda, energy_lambda, sigma_and_c, AdaptiveState, SigmaCState};
use crate::com::ComState;
use crate::error::{invalid, BecError, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Real;
use crate::special::gamma;
use crate::trap::{Trap, TrapConfig};

/// μ_TF = (m/2) [2Γ(2 + d/2)/π^{d/2} · (Ng/m) · √det Ω²(0)]^{2/(d+2)}.
pub fn chemical_potential_tf<T: Real>(cfg: &TrapConfig<T>) -> Result<T> {
    cfg.validate()?;
    if !cfg.is_trapped() {
        return Err(invalid("omega0", "all trap frequencies must be > 0"));
    }
    if !(cfg.g_n() > T::zero()) {
        return Err(invalid("g", "g * N must be > 0"));
    }
    Ok(mu_from_parts(cfg.d, cfg.g_n(), cfg.mass, cfg.omega_sq_0().det()))
}

fn mu_from_parts<T: Real>(d: usize, gn: T, mass: T, det_w0: T) -> T {
    let dh = T::from_usize_lossy(d) * T::half();
    let base = T::two() * gamma(T::two() + dh) / T::PI().powf(dh) * gn / mass * det_w0.sqrt();
    T::half() * mass * base.powf(T::two() / (T::from_usize_lossy(d) + T::two()))
}

/// Parameters of the TF ground state.
#[derive(Clone, Debug, PartialEq)]
pub struct TFModel<T> {
    pub mu_tf: T,
    pub omega_sq_0: Matrix<T>,
    pub r0: Vector<T>,
    pub p0: Vector<T>,
    pub g: T,
    pub n_atoms: T,
    pub mass: T,
    pub d: usize,
}

impl<T: Real> TFModel<T> {
    pub fn new(cfg: &TrapConfig<T>, r0: Vector<T>, p0: Vector<T>) -> Result<Self> {
        let mu_tf = chemical_potential_tf(cfg)?;
        Ok(Self {
            mu_tf,
            omega_sq_0: cfg.omega_sq_0(),
            r0,
            p0,
            g: cfg.g,
            n_atoms: cfg.n_atoms,
            mass: cfg.mass,
            d: cfg.d,
        })
    }

    /// TF model for a general (possibly rotated) Ω²(0).
    pub fn with_trap_matrix(omega_sq_0: Matrix<T>, g: T, n_atoms: T, mass: T) -> Result<Self> {
        let d = omega_sq_0.dim();
        if !(omega_sq_0.min_eigenvalue() > T::zero()) {
            return Err(BecError::Singular { context: "TFModel (Omega^2(0))", det: omega_sq_0.det().as_f64() });
        }
        if !(g * n_atoms > T::zero()) || !(mass > T::zero()) {
            return Err(invalid("g", "g * N and m must be > 0"));
        }
        let mu_tf = mu_from_parts(d, g * n_atoms, mass, omega_sq_0.det());
        Ok(Self { mu_tf, omega_sq_0, r0: Vector::zeros(d), p0: Vector::zeros(d), g, n_atoms, mass, d })
    }

    fn weight(&self) -> T {
        T::two() / (T::from_usize_lossy(self.d) + T::lit(4.0))
    }

    /// The t = 0 snapshot.
    pub fn initial_snapshot(&self) -> TFSnapshot<T> {
        TFSnapshot {
            t: T::zero(),
            sigma: self.omega_sq_0.inverse().expect("positive definite").symmetrize(),
            sigma_inv: self.omega_sq_0,
            c_mat: Matrix::zeros(self.d),
            det_lam: T::one(),
            lam: Some(Matrix::identity(self.d)),
            r_com: self.r0,
            p_com: self.p0,
            s2: T::zero(),
            beta: T::zero(),
        }
    }
}

/// Everything the time-dependent TF wave function needs at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TFSnapshot<T> {
    pub t: T,
    pub sigma: Matrix<T>,
    pub sigma_inv: Matrix<T>,
    pub c_mat: Matrix<T>,
    pub det_lam: T,
    /// Λ itself; only the generalized phase uses it.
    pub lam: Option<Matrix<T>>,
    pub r_com: Vector<T>,
    pub p_com: Vector<T>,
    pub s2: T,
    pub beta: T,
}

impl<T: Real> TFSnapshot<T> {
    pub fn from_states(model: &TFModel<T>, adaptive: &AdaptiveState<T>, com: &ComState<T>) -> Result<Self> {
        let dm = sigma_and_c(adaptive, &model.omega_sq_0, model.mass, None)?;
        let sigma_inv =
            dm.sigma.inverse().ok_or(BecError::Singular { context: "TFSnapshot", det: dm.sigma.det().as_f64() })?;
        Ok(Self {
            t: adaptive.t,
            sigma: dm.sigma,
            sigma_inv: sigma_inv.symmetrize(),
            c_mat: dm.c_mat,
            det_lam: adaptive.det(),
            lam: Some(adaptive.lam),
            r_com: com.r_com,
            p_com: com.p_com,
            s2: com.s2(),
            beta: adaptive.beta,
        })
    }

    /// Snapshot from the Σ⁻¹/C description (det Λ from √(det Ω²(0)/det Σ⁻¹)).
    pub fn from_sigma_c(model: &TFModel<T>, sc: &SigmaCState<T>, com: &ComState<T>, beta: T) -> Result<Self> {
        let sigma = sc.sigma().ok_or(BecError::NotPositiveDefinite { t: sc.t.as_f64() })?;
        Ok(Self {
            t: sc.t,
            sigma,
            sigma_inv: sc.sigma_inv,
            c_mat: sc.c_mat,
            det_lam: sc.det_lambda(&model.omega_sq_0),
            lam: None,
            r_com: com.r_com,
            p_com: com.p_com,
            s2: com.s2(),
            beta,
        })
    }
}

fn positive_part<T: Real>(x: T, power: T) -> T {
    if x > T::zero() {
        x.powf(power)
    } else {
        T::zero()
    }
}

/// n(t, r) = {μ − (m/2)(r − R)ᵀΣ⁻¹(r − R)}₊ / (g det Λ).
pub fn tf_density<T: Real>(model: &TFModel<T>, snap: &TFSnapshot<T>, r: &Vector<T>) -> T {
    let x = *r - snap.r_com;
    let inner = model.mu_tf - T::half() * model.mass * snap.sigma_inv.quad(&x);
    positive_part(inner, T::one()) / (model.g * snap.det_lam)
}

/// Φ_TF(t, r) = S₂ − β + P·r + (m/2)(r − R)ᵀC(r − R) in units of ħ.
///
/// With `generalized`, adds −P(0)·(Λ⁻¹[r − R] + R(0)), the form valid for
/// initial states other than the TF ground state.
pub fn tf_phase<T: Real>(model: &TFModel<T>, snap: &TFSnapshot<T>, r: &Vector<T>, generalized: bool) -> Result<T> {
    let x = *r - snap.r_com;
    let mut phase = snap.s2 - snap.beta + snap.p_com.dot(r) + T::half() * model.mass * snap.c_mat.quad(&x);
    if generalized {
        let lam = snap.lam.ok_or(invalid("snap", "generalized phase needs Lambda"))?;
        let li = lam.inverse().ok_or(BecError::Singular { context: "tf_phase", det: lam.det().as_f64() })?;
        phase -= model.p0.dot(&(li * x + model.r0));
    }
    Ok(phase)
}

/// Density with the axes outside `keep_axes` integrated out, at kept coordinates `r_kept`.
pub fn integrated_density<T: Real>(
    model: &TFModel<T>,
    snap: &TFSnapshot<T>,
    keep_axes: &[usize],
    r_kept: &Vector<T>,
) -> Result<T> {
    let d = model.d;
    if keep_axes.is_empty() || keep_axes.len() >= d {
        return Err(invalid("keep_axes", format!("must keep between 1 and {} axes", d - 1)));
    }
    if keep_axes.iter().any(|&a| a >= d) || r_kept.dim() != keep_axes.len() {
        return Err(BecError::Dimension("keep_axes / r_kept do not match d".into()));
    }
    let mut sorted = keep_axes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep_axes.len() {
        return Err(invalid("keep_axes", "duplicate axis"));
    }
    let s11 = snap.sigma.submatrix(keep_axes);
    let s11_inv = s11.inverse().ok_or(BecError::Singular { context: "integrated_density", det: s11.det().as_f64() })?;
    let r_com = Vector::from_slice(&keep_axes.iter().map(|&a| snap.r_com[a]).collect::<Vec<_>>());
    let x = *r_kept - r_com;
    let n = T::from_usize_lossy(d - keep_axes.len());
    let m = model.mass;
    let prefactor = ((T::two() * T::PI() / m).powf(n) / (model.omega_sq_0.det() * s11.det())).sqrt()
        / (gamma(n * T::half() + T::two()) * model.g);
    let inner = model.mu_tf - T::half() * m * s11_inv.quad(&x);
    Ok(prefactor * positive_part(inner, n * T::half() + T::one()))
}

/// Per-particle energy decomposition in the time-dependent TF regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TFEnergy<T> {
    pub total: T,
    pub com_kinetic: T,
    pub com_potential: T,
    pub internal: T,
}

/// E/N = P²/2m + V(t, R) + (2/(d+4)) μ_TF E_Λ(t).
pub fn tf_energy<T: Real>(
    model: &TFModel<T>,
    adaptive: &AdaptiveState<T>,
    com: &ComState<T>,
    trap: &dyn Trap<T>,
) -> Result<TFEnergy<T>> {
    let e_lam = energy_lambda(adaptive, &trap.omega_sq(adaptive.t), &model.omega_sq_0)?;
    let com_kinetic = com.p_com.dot(&com.p_com) / (T::two() * model.mass);
    let com_potential = trap.potential(com.t, &com.r_com, model.mass);
    let internal = model.weight() * model.mu_tf * e_lam;
    Ok(TFEnergy { total: com_kinetic + com_potential + internal, com_kinetic, com_potential, internal })
}

/// ⟨L̂⟩_TF = (2/(d+4)) μ_TF / α · L_Λ(t), per particle.
pub fn tf_angular_momentum<T: Real>(model: &TFModel<T>, adaptive: &AdaptiveState<T>) -> Result<Matrix<T>> {
    let l = angmom_lambda(adaptive, &model.omega_sq_0)?;
    Ok(l * (model.weight() * model.mu_tf / alpha(&model.omega_sq_0)))
}

/// ⟨[r − R(0)] ⊗ [r − R(0)]ᵀ⟩ = (2/(d+4)) (μ_TF/m) Ω⁻²(0).
pub fn tf_second_moment<T: Real>(model: &TFModel<T>) -> Matrix<T> {
    let inv = model.omega_sq_0.inverse().expect("positive definite");
    inv * (model.weight() * model.mu_tf / model.mass)
}

/// E_int(0) = (2/(d+4)) N μ_TF.
pub fn tf_initial_interaction_energy<T: Real>(model: &TFModel<T>) -> T {
    model.weight() * model.n_atoms * model.mu_tf
}
