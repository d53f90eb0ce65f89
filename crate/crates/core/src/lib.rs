//! Affine description of Bose-Einstein condensate dynamics in time-dependent,
//! rotating harmonic traps.
//!
//! Working units are ħ = m = ω_x = 1 unless a [`TrapConfig`] says otherwise.
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! bottom of this file fix the scalar to `f64`.

pub mod affine;
pub mod com;
pub mod error;
pub mod gpe;
pub mod linalg;
pub mod ode;
pub mod scalar;
pub mod special;
pub mod thomas_fermi;
pub mod trap;

pub use error::{BecError, Result};
pub use scalar::Real;
pub use trap::{Ramp, TrajectoryMode, Trap};

pub type Matrix = linalg::Matrix<f64>;
pub type Vector = linalg::Vector<f64>;
pub type TrapConfig = trap::TrapConfig<f64>;
pub type RotationSchedule = trap::RotationSchedule<f64>;
pub type RotatingTrap = trap::RotatingTrap<f64>;
pub type HarmonicTrap = trap::HarmonicTrap<f64>;
pub type ComState = com::ComState<f64>;
pub type AdaptiveState = affine::AdaptiveState<f64>;
pub type SigmaCState = affine::SigmaCState<f64>;
pub type CanonicalState = affine::CanonicalState<f64>;
pub type TFModel = thomas_fermi::TFModel<f64>;
pub type TFSnapshot = thomas_fermi::TFSnapshot<f64>;
pub type Grid2D = gpe::Grid2D<f64>;
pub type FieldState = gpe::FieldState<f64>;
pub type GpeParams = gpe::GpeParams<f64>;
pub type Propagator = gpe::Propagator<f64>;
pub type GroundState = gpe::GroundState<f64>;
