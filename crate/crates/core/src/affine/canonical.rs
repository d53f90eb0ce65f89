//! Canonical (Hamiltonian) form of the Λ equation.
//!
//! With Ω²(0) = O D Oᵀ and α = [det Ω²(0)]^(1/2d) the variables
//! Λ̃ = α OᵀΛO D^(−1/2), Π̃ = OᵀΛ̇O D^(−1/2) evolve in t̃ = αt under
//! H = ½ Tr[Π̃ᵀΠ̃ + Λ̃ᵀΩ̃²Λ̃] + 1/det Λ̃ with Ω̃² = OᵀΩ²O/α².

use super::{alpha, checked_inverse, AdaptiveState};
use crate::error::{BecError, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalState<T> {
    pub lam_tilde: Matrix<T>,
    pub pi_tilde: Matrix<T>,
    pub alpha: T,
    pub o_mat: Matrix<T>,
    /// Eigenvalues of Ω²(0) on the diagonal.
    pub d_mat: Matrix<T>,
}

fn diagonalize<T: Real>(omega_sq_0: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    let tol = T::lit(1e-12) * omega_sq_0.max_abs().max(T::one());
    if omega_sq_0.asymmetry() > tol {
        return Err(BecError::Dimension("Omega^2(0) is not symmetric".into()));
    }
    let (w, o) = omega_sq_0.sym_eigen();
    if !(w[0] > T::zero()) {
        return Err(BecError::Singular {
            context: "canonical_map (Omega^2(0) not positive definite)",
            det: omega_sq_0.det().as_f64(),
        });
    }
    Ok((o, Matrix::from_diag(w.as_slice())))
}

/// Maps (Λ, Λ̇) to canonical variables.
pub fn canonical_map<T: Real>(state: &AdaptiveState<T>, omega_sq_0: &Matrix<T>) -> Result<CanonicalState<T>> {
    let (o, d) = diagonalize(omega_sq_0)?;
    let a = alpha(omega_sq_0);
    let d_inv_sqrt = d.map(|x| if x > T::zero() { T::one() / x.sqrt() } else { T::zero() });
    let ot = o.transpose();
    Ok(CanonicalState {
        lam_tilde: ot * state.lam * o * d_inv_sqrt * a,
        pi_tilde: ot * state.lam_dot * o * d_inv_sqrt,
        alpha: a,
        o_mat: o,
        d_mat: d,
    })
}

impl<T: Real> CanonicalState<T> {
    fn d_sqrt(&self) -> Matrix<T> {
        self.d_mat.map(|x| x.max(T::zero()).sqrt())
    }

    /// Inverse map back to (Λ, Λ̇).
    pub fn to_original(&self) -> (Matrix<T>, Matrix<T>) {
        let o = self.o_mat;
        let ot = o.transpose();
        let ds = self.d_sqrt();
        let lam = o * self.lam_tilde * ds * ot * (T::one() / self.alpha);
        let lam_dot = o * self.pi_tilde * ds * ot;
        (lam, lam_dot)
    }

    /// Inverse map keeping the time and β of `template`.
    pub fn to_adaptive(&self, t: T, beta: T) -> AdaptiveState<T> {
        let (lam, lam_dot) = self.to_original();
        AdaptiveState { lam, lam_dot, t, beta }
    }

    /// Ω̃² = Oᵀ Ω² O / α².
    pub fn omega_tilde_sq(&self, omega_sq_now: &Matrix<T>) -> Matrix<T> {
        self.o_mat.transpose() * *omega_sq_now * self.o_mat * (T::one() / (self.alpha * self.alpha))
    }

    /// L̃ = Λ̃Π̃ᵀ − Π̃Λ̃ᵀ.
    pub fn angmom(&self) -> Matrix<T> {
        let a = self.lam_tilde * self.pi_tilde.transpose();
        a - a.transpose()
    }

    /// Rate dL̃/dt̃ = Ω̃²Λ̃Λ̃ᵀ − Λ̃Λ̃ᵀΩ̃², evaluated from Hamilton's equations.
    pub fn angmom_rate(&self, omega_tilde_sq: &Matrix<T>) -> Matrix<T> {
        let g = self.lam_tilde * self.lam_tilde.transpose();
        *omega_tilde_sq * g - g * *omega_tilde_sq
    }
}

/// H(Λ̃, Π̃; Ω̃²).
pub fn hamiltonian_canonical<T: Real>(cs: &CanonicalState<T>, omega_tilde_sq: &Matrix<T>) -> Result<T> {
    let det = cs.lam_tilde.det();
    if !(det > T::zero()) {
        return Err(BecError::Singular { context: "hamiltonian_canonical", det: det.as_f64() });
    }
    let l = cs.lam_tilde;
    let p = cs.pi_tilde;
    let m = p.transpose() * p + l.transpose() * *omega_tilde_sq * l;
    Ok(T::half() * m.trace() + T::one() / det)
}

/// ∂H/∂Λ̃ = Ω̃²Λ̃ − Λ̃⁻ᵀ/det Λ̃ (and ∂H/∂Π̃ = Π̃).
pub fn hamiltonian_gradient<T: Real>(lam_tilde: &Matrix<T>, omega_tilde_sq: &Matrix<T>) -> Result<Matrix<T>> {
    let (inv, det) = checked_inverse(lam_tilde, "hamiltonian_gradient")?;
    Ok(*omega_tilde_sq * *lam_tilde - inv.transpose() * (T::one() / det))
}

/// Canonical right side (dΛ̃/dt̃, dΠ̃/dt̃) = (Π̃, −∂H/∂Λ̃).
pub fn canonical_rhs<T: Real>(cs: &CanonicalState<T>, omega_tilde_sq: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    Ok((cs.pi_tilde, -hamiltonian_gradient(&cs.lam_tilde, omega_tilde_sq)?))
}

/// Sum over ∂f/∂Λ_{μν} Ω²_{νλ}(0) ∂g/∂Π_{μλ} − (f ↔ g), scaled by −1/α.
///
/// This is what the canonical bracket
/// `{f, g} = −Σ(∂f/∂Λ̃ ∂g/∂Π̃ − ∂g/∂Λ̃ ∂f/∂Π̃)` becomes in the original
/// variables.
pub fn bracket_in_original_variables<T: Real>(
    df_dlam: &Matrix<T>,
    df_dpi: &Matrix<T>,
    dg_dlam: &Matrix<T>,
    dg_dpi: &Matrix<T>,
    omega_sq_0: &Matrix<T>,
) -> T {
    let w = *omega_sq_0;
    let term = |a: &Matrix<T>, b: &Matrix<T>| (a.transpose() * *b * w).trace();
    -(term(df_dlam, dg_dpi) - term(dg_dlam, df_dpi)) / alpha(omega_sq_0)
}

/// Canonical bracket `−Σ(∂f/∂Λ̃ ∂g/∂Π̃ − ∂g/∂Λ̃ ∂f/∂Π̃)` from gradients.
pub fn bracket_canonical<T: Real>(
    df_dlam: &Matrix<T>,
    df_dpi: &Matrix<T>,
    dg_dlam: &Matrix<T>,
    dg_dpi: &Matrix<T>,
) -> T {
    let dot = |a: &Matrix<T>, b: &Matrix<T>| (a.transpose() * *b).trace();
    -(dot(df_dlam, dg_dpi) - dot(dg_dlam, df_dpi))
}
