use crate::error::{invalid, Result};
use crate::gpe::GridReal;

/// Uniform periodic grid centered on the origin: `x_i = −L/2 + i·dx`.
///
/// Samples are stored with `y` contiguous: index `ix * ny + iy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D<T> {
    pub nx: usize,
    pub ny: usize,
    pub lx: T,
    pub ly: T,
    pub dx: T,
    pub dy: T,
}

impl<T: GridReal> Grid2D<T> {
    pub fn new(n: usize, length: T) -> Result<Self> {
        Self::rect(n, n, length, length)
    }

    pub fn rect(nx: usize, ny: usize, lx: T, ly: T) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 16 || !n.is_power_of_two() {
                return Err(invalid(name, format!("must be a power of two >= 16, got {n}")));
            }
        }
        if !(lx > T::zero() && ly > T::zero()) || !lx.is_finite() || !ly.is_finite() {
            return Err(invalid("length", "must be finite and > 0"));
        }
        Ok(Self { nx, ny, lx, ly, dx: lx / T::from_usize_lossy(nx), dy: ly / T::from_usize_lossy(ny) })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    pub fn origin(&self) -> (T, T) {
        (-T::half() * self.lx, -T::half() * self.ly)
    }

    #[inline]
    pub fn x(&self, ix: usize) -> T {
        -T::half() * self.lx + T::from_usize_lossy(ix) * self.dx
    }

    #[inline]
    pub fn y(&self, iy: usize) -> T {
        -T::half() * self.ly + T::from_usize_lossy(iy) * self.dy
    }

    pub fn cell_area(&self) -> T {
        self.dx * self.dy
    }

    fn wavenumbers(n: usize, length: T) -> Vec<T> {
        let two_pi = T::two() * T::PI();
        (0..n)
            .map(|i| {
                let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
                two_pi * T::lit(m) / length
            })
            .collect()
    }

    /// Discrete angular wavenumbers along x in FFT order.
    pub fn kx(&self) -> Vec<T> {
        Self::wavenumbers(self.nx, self.lx)
    }

    pub fn ky(&self) -> Vec<T> {
        Self::wavenumbers(self.ny, self.ly)
    }

    /// Largest |k| per axis (the Nyquist wavenumber).
    pub fn k_max(&self) -> (T, T) {
        (T::PI() / self.dx, T::PI() / self.dy)
    }

    /// Same geometry up to round-off.
    pub fn same_as(&self, o: &Self) -> bool {
        let close = |a: T, b: T| crate::gpe::fabs(a - b) <= T::lit(1e-12) * (crate::gpe::fabs(a) + T::one());
        self.nx == o.nx && self.ny == o.ny && close(self.lx, o.lx) && close(self.ly, o.ly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_defaults() {
        let g = Grid2D::new(128, 20.0f64).unwrap();
        assert_eq!(g.dx, 20.0 / 128.0);
        assert_eq!(g.x(0), -10.0);
        assert_eq!(g.x(64), 0.0);
        let k = g.kx();
        assert_eq!(k[0], 0.0);
        assert!((k[1] - 2.0 * std::f64::consts::PI / 20.0).abs() < 1e-15);
        assert!((k[64] + std::f64::consts::PI / g.dx).abs() < 1e-12);
        assert!(k[127] < 0.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2D::new(100, 20.0f64).is_err());
        assert!(Grid2D::new(8, 20.0f64).is_err());
        assert!(Grid2D::new(64, 0.0f64).is_err());
    }
}
