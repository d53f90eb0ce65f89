//! Expectation values computed directly on the grid.

use num_complex::Complex;

use crate::error::{BecError, Result};
use crate::gpe::{fabs, Fft2, FieldState, GridReal};
use crate::linalg::{Matrix, Vector};

/// Energy per particle split by term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyTerms<T> {
    pub kinetic: T,
    pub potential: T,
    pub interaction: T,
}

impl<T: GridReal> EnergyTerms<T> {
    pub fn total(&self) -> T {
        self.kinetic + self.potential + self.interaction
    }

    /// μ = (E_kin + E_pot + 2E_int)/N.
    pub fn mu(&self) -> T {
        self.kinetic + self.potential + T::two() * self.interaction
    }
}

fn spectral_weight<T: GridReal>(field: &FieldState<T>, fft: &mut Fft2<T>) -> Vec<T> {
    let mut buf = field.amps.clone();
    fft.forward(&mut buf);
    buf.iter().map(|z| z.norm_sqr()).collect()
}

fn checked_norm<T: GridReal>(field: &FieldState<T>) -> Result<T> {
    let n = field.norm();
    if !(n > T::zero()) || !n.is_finite() {
        return Err(BecError::NonFinite("observables (zero or non-finite norm)"));
    }
    Ok(n)
}

/// Energy terms for `H = kᵀMk/2m + V + (g/2)|ψ|²`.
///
/// `metric` is M (identity in the lab frame, Λ⁻¹Λ⁻ᵀ in adapted coordinates);
/// `potential` holds V sampled on the grid.
pub fn energy_terms<T: GridReal>(
    field: &FieldState<T>,
    potential: &[T],
    g: T,
    mass: T,
    metric: Option<&Matrix<T>>,
    fft: &mut Fft2<T>,
) -> Result<EnergyTerms<T>> {
    let grid = &field.grid;
    if potential.len() != grid.len() {
        return Err(BecError::GridMismatch("potential sample count differs from the grid".into()));
    }
    let n = checked_norm(field)?;
    let m = metric.copied().unwrap_or_else(|| Matrix::identity(2));
    let (kx, ky) = (grid.kx(), grid.ky());
    let w = spectral_weight(field, fft);
    let mut kin = T::zero();
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let e = m[(0, 0)] * kx[i] * kx[i] + (m[(0, 1)] + m[(1, 0)]) * kx[i] * ky[j] + m[(1, 1)] * ky[j] * ky[j];
            kin += w[grid.idx(i, j)] * e;
        }
    }
    kin = kin / (T::two() * mass) * grid.cell_area() / T::from_usize_lossy(grid.len());
    let (mut pot, mut int) = (T::zero(), T::zero());
    for (z, &v) in field.amps.iter().zip(potential) {
        let rho = z.norm_sqr();
        pot += v * rho;
        int += rho * rho;
    }
    let da = grid.cell_area();
    Ok(EnergyTerms { kinetic: kin / n, potential: pot * da / n, interaction: T::half() * g * int * da / n })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridObservables<T> {
    pub norm: T,
    pub r_mean: Vector<T>,
    pub p_mean: Vector<T>,
    /// ⟨(r − ⟨r⟩)(r − ⟨r⟩)ᵀ⟩.
    pub r_second: Matrix<T>,
    /// ⟨(p − ⟨p⟩)(p − ⟨p⟩)ᵀ⟩.
    pub p_second: Matrix<T>,
}

fn moments<T: GridReal>(w: &[T], xs: &[T], ys: &[T], ny: usize) -> (Vector<T>, Matrix<T>) {
    let total: T = w.iter().copied().sum();
    let (mut sx, mut sy) = (T::zero(), T::zero());
    for (k, &p) in w.iter().enumerate() {
        sx += p * xs[k / ny];
        sy += p * ys[k % ny];
    }
    let mean = Vector::from_slice(&[sx / total, sy / total]);
    let (mut xx, mut xy, mut yy) = (T::zero(), T::zero(), T::zero());
    for (k, &p) in w.iter().enumerate() {
        let dx = xs[k / ny] - mean[0];
        let dy = ys[k % ny] - mean[1];
        xx += p * dx * dx;
        xy += p * dx * dy;
        yy += p * dy * dy;
    }
    (mean, Matrix::from_row_slice(2, &[xx / total, xy / total, xy / total, yy / total]))
}

/// Position and momentum moments (ħ = 1, so p = k).
pub fn grid_observables<T: GridReal>(field: &FieldState<T>, fft: &mut Fft2<T>) -> Result<GridObservables<T>> {
    let norm = checked_norm(field)?;
    let g = &field.grid;
    let xs: Vec<T> = (0..g.nx).map(|i| g.x(i)).collect();
    let ys: Vec<T> = (0..g.ny).map(|j| g.y(j)).collect();
    let (r_mean, r_second) = moments(&field.density(), &xs, &ys, g.ny);
    let (p_mean, p_second) = moments(&spectral_weight(field, fft), &g.kx(), &g.ky(), g.ny);
    Ok(GridObservables { norm, r_mean, p_mean, r_second, p_second })
}

/// ⟨x p_y − y p_x⟩ per particle, derivatives taken spectrally.
pub fn angular_momentum_z<T: GridReal>(field: &FieldState<T>, fft: &mut Fft2<T>) -> Result<T> {
    let n = checked_norm(field)?;
    let g = &field.grid;
    let (kx, ky) = (g.kx(), g.ky());
    let mut hat = field.amps.clone();
    fft.forward(&mut hat);
    let i_unit = Complex::new(T::zero(), T::one());
    let mut dx = hat.clone();
    let mut dy = hat;
    for i in 0..g.nx {
        for j in 0..g.ny {
            let k = g.idx(i, j);
            dx[k] = dx[k] * i_unit * kx[i];
            dy[k] = dy[k] * i_unit * ky[j];
        }
    }
    fft.inverse(&mut dx);
    fft.inverse(&mut dy);
    // ψ*(−i)(x∂_y − y∂_x)ψ
    let mut s = Complex::new(T::zero(), T::zero());
    for i in 0..g.nx {
        let x = g.x(i);
        for j in 0..g.ny {
            let k = g.idx(i, j);
            s += field.amps[k].conj() * (dy[k] * x - dx[k] * g.y(j));
        }
    }
    Ok((s * (-i_unit)).re * g.cell_area() / n)
}

/// Orientation of the major axis of a symmetric 2x2 moment matrix, in
/// (−π/2, π/2].
pub fn principal_angle_of_moment<T: GridReal>(m: &Matrix<T>) -> Result<T> {
    if m.dim() != 2 {
        return Err(BecError::Dimension("principal angle needs a 2x2 matrix".into()));
    }
    let (a, b, c) = (m[(0, 0)], T::half() * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    let split = ((a - c) * (a - c) + T::lit(4.0) * b * b).sqrt();
    if !(split > T::lit(1e-6) * (fabs(a) + fabs(c))) {
        return Err(BecError::InvalidParameter { name: "moment", reason: "principal axes are degenerate".into() });
    }
    let mut phi = T::half() * (T::two() * b).atan2(a - c);
    if phi <= -T::FRAC_PI_2() {
        phi += T::PI();
    }
    Ok(phi)
}

/// Major-axis angle of the density |ψ|² about its center.
pub fn principal_angle<T: GridReal>(field: &FieldState<T>) -> Result<T> {
    checked_norm(field)?;
    let g = &field.grid;
    let xs: Vec<T> = (0..g.nx).map(|i| g.x(i)).collect();
    let ys: Vec<T> = (0..g.ny).map(|j| g.y(j)).collect();
    let (_, m) = moments(&field.density(), &xs, &ys, g.ny);
    principal_angle_of_moment(&m)
}

/// Removes jumps of π between consecutive axis angles.
pub fn unwrap_angles<T: GridReal>(angles: &mut [T]) {
    for k in 1..angles.len() {
        let prev = angles[k - 1];
        let mut a = angles[k];
        while a - prev > T::FRAC_PI_2() {
            a -= T::PI();
        }
        while a - prev < -T::FRAC_PI_2() {
            a += T::PI();
        }
        angles[k] = a;
    }
}
