use crate::error::{BecError, Result};
use crate::gpe::{FieldState, GridReal};

/// B = √(2 − (2/N)|⟨ψ₁|ψ₂⟩|) with N = √(N₁N₂).
///
/// Zero for identical states, √2 for orthogonal ones. Round-off that would make
/// the radicand negative is clamped.
pub fn bures_distance<T: GridReal>(a: &FieldState<T>, b: &FieldState<T>) -> Result<T> {
    let ov = a.inner(b)?;
    let n = (a.norm() * b.norm()).sqrt();
    if !(n > T::zero()) {
        return Err(BecError::NonFinite("bures_distance (zero norm)"));
    }
    let r = T::two() - T::two() * ov.norm() / n;
    Ok(r.max(T::zero()).sqrt())
}

/// Pointwise (|ψ(τ)| − |ψ(0)|)² with its maximum location and L2 norm.
///
/// Insensitive to phase, so a stationary state gives a zero field.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<T> {
    pub field: Vec<T>,
    pub max_value: T,
    pub max_index: usize,
    /// √(∫(|ψ(τ)| − |ψ(0)|)²).
    pub l2: T,
}

pub fn residual_metric<T: GridReal>(state: &FieldState<T>, initial: &FieldState<T>) -> Result<Residual<T>> {
    if !state.grid.same_as(&initial.grid) {
        return Err(BecError::GridMismatch("residual of fields on different grids".into()));
    }
    let field: Vec<T> = state
        .amps
        .iter()
        .zip(&initial.amps)
        .map(|(a, b)| {
            let d = a.norm() - b.norm();
            d * d
        })
        .collect();
    let (mut max_index, mut max_value) = (0, T::zero());
    for (k, &v) in field.iter().enumerate() {
        if v > max_value {
            max_value = v;
            max_index = k;
        }
    }
    let l2 = (field.iter().copied().sum::<T>() * state.grid.cell_area()).sqrt();
    Ok(Residual { field, max_value, max_index, l2 })
}
