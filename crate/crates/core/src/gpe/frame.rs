//! Maps between the adapted field ψ_Λ(ζ) and the lab field ψ(r):
//!
//! ψ(t, r) = det Λ^(−1/2) e^(iΦ) ψ_Λ(Λ⁻¹(r − R)),
//! Φ = S₁ − β + P·(r − R/2) + (m/2)(r − R)ᵀC(r − R).

use num_complex::Complex;

use crate::affine::AdaptiveState;
use crate::com::ComState;
use crate::error::{BecError, Result};
use crate::gpe::{FieldState, Grid2D, GridReal};
use crate::linalg::{Matrix, Vector};

/// Mass fraction allowed to fall outside the target grid.
pub const FRAME_MASS_TOL: f64 = 1e-8;

/// Cubic convolution weight (Keys, a = −1/2).
fn keys<T: GridReal>(x: T) -> T {
    let x = crate::gpe::fabs(x);
    let (one, two) = (T::one(), T::two());
    let a = -T::half();
    if x <= one {
        ((a + two) * x - (a + T::lit(3.0))) * x * x + one
    } else if x < two {
        ((a * x - T::lit(5.0) * a) * x + T::lit(8.0) * a) * x - T::lit(4.0) * a
    } else {
        T::zero()
    }
}

/// Bicubic interpolation on a 4x4 stencil, zero outside the sampled box.
fn interpolate<T: GridReal>(grid: &Grid2D<T>, vals: &[Complex<T>], x: T, y: T) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let (x0, y0) = grid.origin();
    let u = (x - x0) / grid.dx;
    let v = (y - y0) / grid.dy;
    let lim_u = T::from_usize_lossy(grid.nx);
    let lim_v = T::from_usize_lossy(grid.ny);
    if !(u > -T::one() && v > -T::one() && u < lim_u && v < lim_v) {
        return zero;
    }
    let (fi, fj) = (u.floor(), v.floor());
    let (i, j) = (fi.to_i64().unwrap_or(i64::MIN), fj.to_i64().unwrap_or(i64::MIN));
    let mut acc = zero;
    for a in -1..=2i64 {
        let ia = i + a;
        if ia < 0 || ia >= grid.nx as i64 {
            continue;
        }
        let wu = keys(u - fi - T::lit(a as f64));
        for b in -1..=2i64 {
            let jb = j + b;
            if jb < 0 || jb >= grid.ny as i64 {
                continue;
            }
            let w = wu * keys(v - fj - T::lit(b as f64));
            acc += vals[grid.idx(ia as usize, jb as usize)] * w;
        }
    }
    acc
}

struct AffineMap<T> {
    lam: Matrix<T>,
    lam_inv: Matrix<T>,
    c_mat: Matrix<T>,
    det: T,
    r: Vector<T>,
    p: Vector<T>,
    phase0: T,
    mass: T,
}

impl<T: GridReal> AffineMap<T> {
    fn new(adaptive: &AdaptiveState<T>, com: &ComState<T>, mass: T) -> Result<Self> {
        if adaptive.dim() != 2 || com.r_com.dim() != 2 {
            return Err(BecError::Dimension("frame maps need d = 2".into()));
        }
        let det = adaptive.det();
        let lam_inv = adaptive
            .lam
            .inverse()
            .filter(|_| det > T::zero())
            .ok_or(BecError::Singular { context: "frame map (det Lambda)", det: det.as_f64() })?;
        Ok(Self {
            lam: adaptive.lam,
            lam_inv,
            c_mat: adaptive.lam_dot * lam_inv,
            det,
            r: com.r_com,
            p: com.p_com,
            phase0: com.s1() - adaptive.beta,
            mass,
        })
    }

    fn phase(&self, r: &Vector<T>) -> T {
        let dr = *r - self.r;
        self.phase0 + self.p.dot(&(*r - self.r * T::half())) + T::half() * self.mass * self.c_mat.quad(&dr)
    }

    fn outside_mass(&self, src: &FieldState<T>, forward: bool, target: &Grid2D<T>) -> T {
        let (x0, y0) = target.origin();
        let (x1, y1) = (x0 + target.lx - target.dx, y0 + target.ly - target.dy);
        let g = &src.grid;
        let mut out = T::zero();
        for i in 0..g.nx {
            for j in 0..g.ny {
                let w = src.amps[g.idx(i, j)].norm_sqr();
                if w == T::zero() {
                    continue;
                }
                let p = Vector::from_slice(&[g.x(i), g.y(j)]);
                let q = if forward { self.lam * p + self.r } else { self.lam_inv * (p - self.r) };
                if !(q[0] >= x0 && q[0] <= x1 && q[1] >= y0 && q[1] <= y1) {
                    out += w;
                }
            }
        }
        out * g.cell_area()
    }
}

fn check_outside<T: GridReal>(out: T, norm: T, context: &'static str) -> Result<()> {
    if out > T::lit(FRAME_MASS_TOL) * norm {
        return Err(BecError::BoundaryMass {
            mass: out.as_f64(),
            limit: (T::lit(FRAME_MASS_TOL) * norm).as_f64(),
            context,
        });
    }
    Ok(())
}

/// Resamples the adapted field onto a lab grid.
pub fn to_lab_frame<T: GridReal>(
    field: &FieldState<T>,
    adaptive: &AdaptiveState<T>,
    com: &ComState<T>,
    lab: &Grid2D<T>,
    mass: T,
) -> Result<FieldState<T>> {
    let map = AffineMap::new(adaptive, com, mass)?;
    check_outside(map.outside_mass(field, true, lab), field.norm(), "to_lab_frame")?;
    let amp = T::one() / map.det.sqrt();
    let mut out = FieldState::from_fn(*lab, |x, y| {
        let r = Vector::from_slice(&[x, y]);
        let z = map.lam_inv * (r - map.r);
        interpolate(&field.grid, &field.amps, z[0], z[1]) * Complex::from_polar(amp, map.phase(&r))
    });
    out.tau = field.tau;
    out.mu = field.mu;
    Ok(out)
}

/// Inverse of [`to_lab_frame`]; the phase is stripped before interpolation.
pub fn from_lab_frame<T: GridReal>(
    field: &FieldState<T>,
    adaptive: &AdaptiveState<T>,
    com: &ComState<T>,
    adapted: &Grid2D<T>,
    mass: T,
) -> Result<FieldState<T>> {
    let map = AffineMap::new(adaptive, com, mass)?;
    check_outside(map.outside_mass(field, false, adapted), field.norm(), "from_lab_frame")?;
    let g = &field.grid;
    let mut stripped = field.amps.clone();
    for i in 0..g.nx {
        for j in 0..g.ny {
            let r = Vector::from_slice(&[g.x(i), g.y(j)]);
            let k = g.idx(i, j);
            stripped[k] = stripped[k] * Complex::from_polar(T::one(), -map.phase(&r));
        }
    }
    let amp = map.det.sqrt();
    let mut out = FieldState::from_fn(*adapted, |x, y| {
        let r = map.lam * Vector::from_slice(&[x, y]) + map.r;
        interpolate(g, &stripped, r[0], r[1]) * amp
    });
    out.tau = field.tau;
    out.mu = field.mu;
    Ok(out)
}
