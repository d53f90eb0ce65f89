use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::gpe::{Fft2, FieldState, Grid2D, GridReal};

/// |ψ̃(p)|² on an ascending momentum grid, normalized so that the sum times
/// `dpx·dpy` equals the norm of the input field.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumDistribution<T> {
    pub px: Vec<T>,
    pub py: Vec<T>,
    /// Row-major, `px` index first.
    pub density: Vec<T>,
    pub dpx: T,
    pub dpy: T,
}

/// Momentum density of `field`; `pad` > 1 zero-pads the box by that factor to
/// refine the momentum spacing.
pub fn momentum_distribution<T: GridReal>(field: &FieldState<T>, pad: usize) -> Result<MomentumDistribution<T>> {
    if pad == 0 || !pad.is_power_of_two() {
        return Err(invalid("pad", "must be a power of two >= 1"));
    }
    let g = &field.grid;
    let big = Grid2D::rect(g.nx * pad, g.ny * pad, g.lx * T::from_usize_lossy(pad), g.ly * T::from_usize_lossy(pad))?;
    let (ox, oy) = ((big.nx - g.nx) / 2, (big.ny - g.ny) / 2);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); big.len()];
    for i in 0..g.nx {
        for j in 0..g.ny {
            buf[big.idx(i + ox, j + oy)] = field.amps[g.idx(i, j)];
        }
    }
    Fft2::new(&big).forward(&mut buf);
    // ψ̃(p) = (1/2π) ∫ψ e^(−ip·r) d²r ≈ (dA/2π) DFT, up to a phase
    let scale = {
        let s = g.cell_area() / (T::two() * T::PI());
        s * s
    };
    let shift = |n: usize, i: usize| (i + n / 2) % n;
    let (kx, ky) = (big.kx(), big.ky());
    let px: Vec<T> = (0..big.nx).map(|i| kx[shift(big.nx, i)]).collect();
    let py: Vec<T> = (0..big.ny).map(|j| ky[shift(big.ny, j)]).collect();
    let mut density = Vec::with_capacity(big.len());
    for i in 0..big.nx {
        for j in 0..big.ny {
            density.push(buf[big.idx(shift(big.nx, i), shift(big.ny, j))].norm_sqr() * scale);
        }
    }
    let two_pi = T::two() * T::PI();
    Ok(MomentumDistribution { px, py, density, dpx: two_pi / big.lx, dpy: two_pi / big.ly })
}
