//! Fixed-step classical Runge-Kutta.

use crate::linalg::{Matrix, Vector};
use crate::scalar::Real;

/// States that RK4 can combine: `self + a * x`.
pub trait Axpy<T>: Copy {
    fn axpy(&self, a: T, x: &Self) -> Self;
}

impl<T: Real> Axpy<T> for T {
    fn axpy(&self, a: T, x: &Self) -> Self {
        *self + a * *x
    }
}

impl<T: Real> Axpy<T> for Vector<T> {
    fn axpy(&self, a: T, x: &Self) -> Self {
        *self + *x * a
    }
}

impl<T: Real> Axpy<T> for Matrix<T> {
    fn axpy(&self, a: T, x: &Self) -> Self {
        *self + *x * a
    }
}

impl<T: Real, A: Axpy<T>, B: Axpy<T>> Axpy<T> for (A, B) {
    fn axpy(&self, a: T, x: &Self) -> Self {
        (self.0.axpy(a, &x.0), self.1.axpy(a, &x.1))
    }
}

impl<T: Real, A: Axpy<T>, B: Axpy<T>, C: Axpy<T>> Axpy<T> for (A, B, C) {
    fn axpy(&self, a: T, x: &Self) -> Self {
        (self.0.axpy(a, &x.0), self.1.axpy(a, &x.1), self.2.axpy(a, &x.2))
    }
}

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4_step<T, S, F>(f: &mut F, t: T, y: &S, h: T) -> S
where
    T: Real,
    S: Axpy<T>,
    F: FnMut(T, &S) -> S,
{
    let half = T::half() * h;
    let k1 = f(t, y);
    let k2 = f(t + half, &y.axpy(half, &k1));
    let k3 = f(t + half, &y.axpy(half, &k2));
    let k4 = f(t + h, &y.axpy(h, &k3));
    let sixth = h / T::lit(6.0);
    let third = h / T::lit(3.0);
    y.axpy(sixth, &k1).axpy(third, &k2).axpy(third, &k3).axpy(sixth, &k4)
}
