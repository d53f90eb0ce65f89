//! Isotropic free expansion: λ(t) from ∫₁^λ ζ^{d/2}/√(ζ^d − 1) dζ = √(2/d) ω₀ t.

use crate::error::{invalid, BecError, Result};
use crate::linalg::Vector;
use crate::scalar::Real;
use crate::special::{hyp2f1_third_half_twothirds, intercept_3d};

fn check_d(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(invalid("d", format!("must be 1, 2 or 3, got {d}")))
    }
}

/// Left side of the integral equation, evaluated in closed form.
pub fn isotropic_integral<T: Real>(d: usize, lam: T) -> Result<T> {
    check_d(d)?;
    if lam < T::one() {
        return Err(invalid("lambda", "free expansion has lambda >= 1"));
    }
    Ok(match d {
        1 => (lam * (lam - T::one())).sqrt() + (lam.sqrt() + (lam - T::one()).sqrt()).ln(),
        2 => (lam * lam - T::one()).sqrt(),
        _ => lam * hyp2f1_third_half_twothirds(T::one() / (lam * lam * lam)) - intercept_3d::<T>(),
    })
}

// Integrand ζ^{d/2}/√(ζ^d − 1), i.e. dI/dλ.
fn integrand<T: Real>(d: usize, lam: T) -> T {
    let di = d as i32;
    lam.powf(T::lit(d as f64 / 2.0)) / (lam.powi(di) - T::one()).sqrt()
}

/// λ(t) for isotropic release from a trap of frequency `omega0`.
///
/// d = 2 is closed form. d = 1 and d = 3 bisect on `[1, 2 + √(2/d) ω₀t]` to a
/// bracket of 1e-12, then take one Newton step.
pub fn analytic_lambda_isotropic<T: Real>(d: usize, omega0: T, t: T) -> Result<T> {
    check_d(d)?;
    if !(omega0 > T::zero()) {
        return Err(invalid("omega0", "must be > 0"));
    }
    if !(t >= T::zero()) {
        return Err(invalid("t", "must be >= 0"));
    }
    let x = omega0 * t;
    if d == 2 {
        return Ok((T::one() + x * x).sqrt());
    }
    if t == T::zero() {
        return Ok(T::one());
    }
    let rhs = (T::two() / T::from_usize_lossy(d)).sqrt() * x;
    let g = |l: T| isotropic_integral(d, l).map(|v| v - rhs);
    let mut lo = T::one();
    let mut hi = T::two() + rhs;
    let width = |l: T| T::lit(1e-12).max(T::lit(4.0) * T::epsilon() * l);
    let mut iterations = 0;
    while hi - lo > width(hi) {
        if iterations > 400 {
            return Err(BecError::NoConvergence {
                what: "analytic_lambda_isotropic",
                iterations,
                detail: format!("bracket [{}, {}]", lo.as_f64(), hi.as_f64()),
            });
        }
        let mid = T::half() * (lo + hi);
        if g(mid)? > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let mid = T::half() * (lo + hi);
    let newton = mid - g(mid)? / integrand(d, mid);
    let wide = T::lit(2.0) * width(hi);
    if newton.is_finite() && newton >= lo - wide && newton <= hi + wide {
        Ok(newton)
    } else {
        Ok(mid)
    }
}

/// Long-time approximation of λ(t).
///
/// d = 1: √2ω₀t − ½[ln(4√2 ω₀t) − 1]; d = 2: ω₀t; d = 3: √(2/3)ω₀t + √πΓ(2/3)/Γ(1/6).
pub fn longtime_asymptote<T: Real>(d: usize, omega0: T, t: T) -> Result<T> {
    check_d(d)?;
    let x = omega0 * t;
    Ok(match d {
        1 => {
            let y = T::two().sqrt() * x;
            y - T::half() * ((T::lit(4.0) * y).ln() - T::one())
        }
        2 => x,
        _ => (T::two() / T::lit(3.0)).sqrt() * x + intercept_3d::<T>(),
    })
}

/// Linear fit λ_i(t) ≅ a_i + b_i t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LongTimeFit<T> {
    pub a: Vector<T>,
    pub b: Vector<T>,
    /// Largest rms fit residual relative to the fitted rise over the window.
    pub residual: T,
}

/// Least-squares fit over the last third of a free-expansion trajectory.
///
/// `samples` holds `(t, λ)` pairs with `λ` the vector of scaling factors
/// (the diagonal of Λ). Rejects trajectories shorter than ω t = 50 and ones
/// that are not expanding linearly.
pub fn longtime_coefficients<T: Real>(samples: &[(T, Vector<T>)], omega_max: T) -> Result<LongTimeFit<T>> {
    let Some((t_last, _)) = samples.last() else {
        return Err(invalid("samples", "empty trajectory"));
    };
    if *t_last * omega_max < T::lit(50.0) || samples.len() < 6 {
        return Err(invalid("samples", "trajectory too short; need omega * t >= 50"));
    }
    let tail = &samples[samples.len() - samples.len() / 3..];
    let n = T::from_usize_lossy(tail.len());
    let d = tail[0].1.dim();
    let tm = tail.iter().map(|s| s.0).sum::<T>() / n;
    let stt = tail.iter().map(|s| (s.0 - tm) * (s.0 - tm)).sum::<T>();
    let span = tail[tail.len() - 1].0 - tail[0].0;
    let mut a = Vector::zeros(d);
    let mut b = Vector::zeros(d);
    let mut worst = T::zero();
    for i in 0..d {
        let ym = tail.iter().map(|s| s.1[i]).sum::<T>() / n;
        let sty = tail.iter().map(|s| (s.0 - tm) * (s.1[i] - ym)).sum::<T>();
        b[i] = sty / stt;
        a[i] = ym - b[i] * tm;
        let rms = (tail.iter().map(|s| (s.1[i] - a[i] - b[i] * s.0).powi(2)).sum::<T>() / n).sqrt();
        let rise = b[i] * span;
        if !(rise > T::lit(1e-6) * ym.abs().max(T::one())) {
            return Err(invalid("samples", "trajectory is not expanding (no free expansion)"));
        }
        worst = worst.max(rms / rise);
    }
    if worst > T::lit(1e-2) {
        return Err(invalid("samples", format!("poor linear fit, relative residual {}", worst.as_f64())));
    }
    Ok(LongTimeFit { a, b, residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_and_closed_form() {
        for d in 1..=3 {
            assert_eq!(analytic_lambda_isotropic(d, 1.0f64, 0.0).unwrap(), 1.0);
        }
        assert!((analytic_lambda_isotropic(2, 1.0f64, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn roots_satisfy_their_equation() {
        for d in [1, 3] {
            for x in [0.01, 0.5, 3.0, 10.0, 100.0] {
                let l: f64 = analytic_lambda_isotropic(d, 1.0, x).unwrap();
                let lhs = isotropic_integral(d, l).unwrap();
                assert!((lhs - (2.0 / d as f64).sqrt() * x).abs() < 1e-11, "d={d} x={x}");
            }
        }
    }

    #[test]
    fn d1_reference_value() {
        let l: f64 = analytic_lambda_isotropic(1, 1.0, 10.0).unwrap();
        assert!((l - 12.708_380).abs() < 1e-5, "{l}");
        let approx = longtime_asymptote(1, 1.0f64, 10.0).unwrap();
        assert!((approx - 12.624_409).abs() < 1e-5);
        assert!(((l - approx) / l).abs() < 0.01);
    }

    #[test]
    fn hyp_branch_is_smooth_across_switch() {
        // z = λ⁻³ = 1/2 at λ = 2^(1/3)
        let l0 = 2f64.powf(1.0 / 3.0);
        let below = isotropic_integral(3, l0 * (1.0 - 1e-9)).unwrap();
        let above = isotropic_integral(3, l0 * (1.0 + 1e-9)).unwrap();
        let slope = integrand(3, l0);
        assert!(((above - below) / (2e-9 * l0) - slope).abs() < 1e-4);
    }

    #[test]
    fn fit_rejects_static_and_short() {
        let st: Vec<(f64, Vector<f64>)> = (0..=200).map(|k| (k as f64 * 0.5, Vector::from_slice(&[1.0]))).collect();
        assert!(longtime_coefficients(&st, 1.0).is_err());
        let short: Vec<(f64, Vector<f64>)> = (0..=20).map(|k| (k as f64, Vector::from_slice(&[k as f64]))).collect();
        assert!(longtime_coefficients(&short, 1.0).is_err());
    }

    #[test]
    fn single_precision_root() {
        let l: f32 = analytic_lambda_isotropic(3, 1.0f32, 5.0).unwrap();
        let l64: f64 = analytic_lambda_isotropic(3, 1.0f64, 5.0).unwrap();
        assert!((l as f64 - l64).abs() < 1e-5);
    }
}
