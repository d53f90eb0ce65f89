//! Spectral Gross-Pitaevskii solver on a 2D grid in adapted coordinates.
//!
//! The adapted wave function ψ_Λ(τ, ζ) lives on a fixed grid; the affine map
//! r = Λ(τ)ζ + R(τ) carries it to the lab frame. Units: ħ = 1.

pub mod bures;
pub mod fft2;
pub mod field;
pub mod frame;
pub mod grid;
pub mod ground;
pub mod momentum;
pub mod observables;
pub mod propagate;

use num_traits::Float;
use rustfft::FftNum;

use crate::scalar::Real;

pub use bures::{bures_distance, residual_metric, Residual};
pub use fft2::Fft2;
pub use field::FieldState;
pub use frame::{from_lab_frame, to_lab_frame};
pub use grid::Grid2D;
pub use ground::{ground_state_imaginary_time, GroundState, ImagTimeOptions};
pub use momentum::{momentum_distribution, MomentumDistribution};
pub use observables::{
    angular_momentum_z, energy_terms, grid_observables, principal_angle, principal_angle_of_moment, unwrap_angles,
    EnergyTerms, GridObservables,
};
pub use propagate::{propagate_real, propagate_real_observed, GpeParams, LogOptions, PropagationLog, Propagator};

/// Scalars usable on the grid: [`Real`] plus FFT support.
pub trait GridReal: Real + FftNum {}

impl<T: Real + FftNum> GridReal for T {}

// `Float::abs` and `Signed::abs` are both in scope for `GridReal`.
#[inline]
pub(crate) fn fabs<T: GridReal>(x: T) -> T {
    Float::abs(x)
}
