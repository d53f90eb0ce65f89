use num_complex::Complex;

use crate::error::{BecError, Result};
use crate::gpe::{Grid2D, GridReal};

/// Complex amplitudes on a [`Grid2D`] plus the time and chemical potential
/// they belong to.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState<T> {
    pub grid: Grid2D<T>,
    pub amps: Vec<Complex<T>>,
    pub tau: T,
    pub mu: T,
}

impl<T: GridReal> FieldState<T> {
    pub fn new(grid: Grid2D<T>, amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(BecError::GridMismatch(format!(
                "{} amplitudes for a {}x{} grid",
                amps.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(Self { grid, amps, tau: T::zero(), mu: T::zero() })
    }

    pub fn from_fn(grid: Grid2D<T>, f: impl Fn(T, T) -> Complex<T>) -> Self {
        let mut amps = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.ny {
                amps.push(f(x, grid.y(j)));
            }
        }
        Self { grid, amps, tau: T::zero(), mu: T::zero() }
    }

    /// ∫|ψ|² d²ζ.
    pub fn norm(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<T>() * self.grid.cell_area()
    }

    pub fn normalize_to(&mut self, n_atoms: T) -> Result<()> {
        let n = self.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(BecError::NonFinite("normalize_to (zero or non-finite norm)"));
        }
        let s = (n_atoms / n).sqrt();
        for z in &mut self.amps {
            *z = *z * s;
        }
        Ok(())
    }

    /// ⟨self|other⟩ = ∫ψ₁*ψ₂ d²ζ.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if !self.grid.same_as(&other.grid) {
            return Err(BecError::GridMismatch("inner product of fields on different grids".into()));
        }
        let s: Complex<T> = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.cell_area())
    }

    /// Mass within `cells` grid points of any edge.
    pub fn boundary_mass(&self, cells: usize) -> T {
        let g = &self.grid;
        let mut s = T::zero();
        for i in 0..g.nx {
            let edge_x = i < cells || i + cells >= g.nx;
            for j in 0..g.ny {
                if edge_x || j < cells || j + cells >= g.ny {
                    s += self.amps[g.idx(i, j)].norm_sqr();
                }
            }
        }
        s * g.cell_area()
    }

    pub fn density(&self) -> Vec<T> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
