use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::gpe::{Grid2D, GridReal};

/// In-place 2D FFT for the `ix * ny + iy` layout.
///
/// `inverse` includes the 1/(nx·ny) normalization.
pub struct Fft2<T: GridReal> {
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<T>>,
    fy: Arc<dyn Fft<T>>,
    ix: Arc<dyn Fft<T>>,
    iy: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
    tmp: Vec<Complex<T>>,
}

impl<T: GridReal> Fft2<T> {
    pub fn new(grid: &Grid2D<T>) -> Self {
        let mut p = FftPlanner::new();
        let fx = p.plan_fft_forward(grid.nx);
        let fy = p.plan_fft_forward(grid.ny);
        let ix = p.plan_fft_inverse(grid.nx);
        let iy = p.plan_fft_inverse(grid.ny);
        let scratch_len = [&fx, &fy, &ix, &iy].iter().map(|f| f.get_inplace_scratch_len()).max().unwrap_or(0);
        Self {
            nx: grid.nx,
            ny: grid.ny,
            fx,
            fy,
            ix,
            iy,
            scratch: vec![Complex::new(T::zero(), T::zero()); scratch_len],
            tmp: vec![Complex::new(T::zero(), T::zero()); grid.len()],
        }
    }

    fn transpose(src: &[Complex<T>], dst: &mut [Complex<T>], rows: usize, cols: usize) {
        for r in 0..rows {
            for c in 0..cols {
                dst[c * rows + r] = src[r * cols + c];
            }
        }
    }

    fn run(&mut self, data: &mut [Complex<T>], inverse: bool) {
        assert_eq!(data.len(), self.nx * self.ny, "field length does not match the FFT plan");
        let (along_y, along_x) = if inverse { (&self.iy, &self.ix) } else { (&self.fy, &self.fx) };
        along_y.process_with_scratch(data, &mut self.scratch);
        Self::transpose(data, &mut self.tmp, self.nx, self.ny);
        along_x.process_with_scratch(&mut self.tmp, &mut self.scratch);
        Self::transpose(&self.tmp, data, self.ny, self.nx);
    }

    pub fn forward(&mut self, data: &mut [Complex<T>]) {
        self.run(data, false);
    }

    pub fn inverse(&mut self, data: &mut [Complex<T>]) {
        self.run(data, true);
        let s = T::one() / T::from_usize_lossy(self.nx * self.ny);
        for z in data.iter_mut() {
            *z = *z * s;
        }
    }
}
