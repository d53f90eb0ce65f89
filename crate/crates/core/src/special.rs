//! Special functions needed by the isotropic free-expansion solutions.

use crate::scalar::Real;

/// Gamma function. Evaluated in double precision.
pub fn gamma<T: Real>(x: T) -> T {
    T::lit(statrs::function::gamma::gamma(x.as_f64()))
}

/// Truncated power series of ₂F₁(a, b; c; z).
///
/// Stops once a term falls below `1e-14` relative to the partial sum
/// (or the type's epsilon, whichever is larger). Intended for `|z| <= 0.5`,
/// where it needs at most ~50 terms.
pub fn hyp2f1_series<T: Real>(a: T, b: T, c: T, z: T) -> T {
    let cutoff = T::lit(1e-14).max(T::epsilon());
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::zero();
    for _ in 0..10_000 {
        term = term * (a + k) * (b + k) / ((c + k) * (k + T::one())) * z;
        sum += term;
        if term.abs() <= cutoff * sum.abs() {
            break;
        }
        k += T::one();
    }
    sum
}

/// ₂F₁(−1/3, 1/2; 2/3; z) on `0 <= z <= 1`.
///
/// The direct series converges like `k^{-3/2}` near `z = 1`, so for
/// `z > 1/2` the Gauss connection formula around `1 − z` is used. One of
/// its two branches collapses to `z^{1/3}` because `b` equals the shifted
/// lower parameter.
pub fn hyp2f1_third_half_twothirds<T: Real>(z: T) -> T {
    let third = T::one() / T::lit(3.0);
    let a = -third;
    let b = T::half();
    let c = T::two() * third;
    if z <= T::half() {
        return hyp2f1_series(a, b, c, z);
    }
    let w = T::one() - z;
    let sqrt_pi = T::PI().sqrt();
    let g23 = gamma(c);
    // Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)) with c−a−b = 1/2, c−a = 1, c−b = 1/6
    let coef_a = g23 * sqrt_pi / gamma(T::one() / T::lit(6.0));
    // Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)); Γ(−1/2) = −2√π, Γ(−1/3) = −3Γ(2/3)
    let coef_b = g23 * (-T::two() * sqrt_pi) / ((-T::lit(3.0) * g23) * sqrt_pi);
    let branch_a = z.powf(third);
    let branch_b = w.sqrt() * hyp2f1_series(T::one(), T::one() / T::lit(6.0), T::lit(1.5), w);
    coef_a * branch_a + coef_b * branch_b
}

/// `√π Γ(2/3) / Γ(1/6)`, the long-time intercept of the 3D isotropic solution.
pub fn intercept_3d<T: Real>() -> T {
    let g = |x: f64| statrs::function::gamma::gamma(x);
    T::lit(std::f64::consts::PI.sqrt() * g(2.0 / 3.0) / g(1.0 / 6.0))
}
