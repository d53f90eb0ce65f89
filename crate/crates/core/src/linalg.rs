//! Dense matrices and vectors of dimension 1 to 3.
//!
//! Everything here is `Copy` and stack allocated; the ODE layers push these
//! through RK4 stages millions of times, so heap storage would dominate.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::scalar::Real;

pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<T> {
    n: usize,
    v: [T; MAX_DIM],
}

/// Row-major square matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    a: [T; MAX_DIM * MAX_DIM],
}

fn check_dim(n: usize) {
    assert!((1..=MAX_DIM).contains(&n), "dimension {n} outside 1..=3");
}

impl<T: Real> Vector<T> {
    pub fn zeros(n: usize) -> Self {
        check_dim(n);
        Self { n, v: [T::zero(); MAX_DIM] }
    }

    pub fn from_slice(s: &[T]) -> Self {
        let mut out = Self::zeros(s.len());
        out.v[..s.len()].copy_from_slice(s);
        out
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut out = Self::zeros(n);
        out.v[i] = T::one();
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.v[..self.n]
    }

    pub fn dot(&self, o: &Self) -> T {
        debug_assert_eq!(self.n, o.n);
        (0..self.n).map(|i| self.v[i] * o.v[i]).sum()
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let mut out = *self;
        for x in out.v[..self.n].iter_mut() {
            *x = f(*x);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.v[..self.n].iter().copied()
    }

    pub fn max_abs(&self) -> T {
        self.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn cast<U: Real>(&self) -> Vector<U> {
        let mut out = Vector::<U>::zeros(self.n);
        for i in 0..self.n {
            out.v[i] = U::lit(self.v[i].as_f64());
        }
        out
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        debug_assert!(i < self.n);
        &self.v[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        debug_assert!(i < self.n);
        &mut self.v[i]
    }
}

impl<T: Real> Add for Vector<T> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        for i in 0..self.n {
            self.v[i] += o.v[i];
        }
        self
    }
}

impl<T: Real> Sub for Vector<T> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        for i in 0..self.n {
            self.v[i] -= o.v[i];
        }
        self
    }
}

impl<T: Real> Neg for Vector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl<T: Real> Mul<T> for Vector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.map(|x| x * s)
    }
}

impl<T: Real> AddAssign for Vector<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Vector<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        check_dim(n);
        Self { n, a: [T::zero(); MAX_DIM * MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds an `n×n` matrix from `n*n` row-major entries.
    pub fn from_row_slice(n: usize, s: &[T]) -> Self {
        assert_eq!(s.len(), n * n, "expected {} entries", n * n);
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = s[i * n + j];
            }
        }
        m
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Matrix with entries `f(i, j)`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn outer(u: &Vector<T>, w: &Vector<T>) -> Self {
        Self::from_fn(u.dim(), |i, j| u[i] * w[j])
    }

    /// 2D rotation `[[cos, sin], [-sin, cos]]`.
    pub fn rotation_2d(phi: T) -> Self {
        let (s, c) = phi.sin_cos();
        Self::from_row_slice(2, &[c, s, -s, c])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Row-major entries.
    pub fn to_vec(&self) -> Vec<T> {
        let n = self.n;
        (0..n * n).map(|k| self[(k / n, k % n)]).collect()
    }

    pub fn diag(&self) -> Vector<T> {
        let mut v = Vector::zeros(self.n);
        for i in 0..self.n {
            v[i] = self[(i, i)];
        }
        v
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(self.n, |i, j| f(self[(i, j)]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn det(&self) -> T {
        let m = |i, j| self[(i, j)];
        match self.n {
            1 => m(0, 0),
            2 => m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
            _ => {
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
        }
    }

    /// Inverse via the adjugate; `None` when singular or non-finite.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let m = |i, j| self[(i, j)];
        let adj = match self.n {
            1 => Self::from_row_slice(1, &[T::one()]),
            2 => Self::from_row_slice(2, &[m(1, 1), -m(0, 1), -m(1, 0), m(0, 0)]),
            _ => Self::from_fn(3, |i, j| {
                // cofactor of (j, i)
                let r: Vec<usize> = (0..3).filter(|&k| k != j).collect();
                let c: Vec<usize> = (0..3).filter(|&k| k != i).collect();
                let minor = m(r[0], c[0]) * m(r[1], c[1]) - m(r[0], c[1]) * m(r[1], c[0]);
                if (i + j) % 2 == 0 {
                    minor
                } else {
                    -minor
                }
            }),
        };
        let inv = adj * (T::one() / det);
        inv.is_finite().then_some(inv)
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|x| x.is_finite())
    }

    pub fn frobenius(&self) -> T {
        self.to_vec().iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.to_vec().iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn symmetrize(&self) -> Self {
        (*self + self.transpose()) * T::half()
    }

    /// Frobenius norm of the antisymmetric part `M - Mᵀ`.
    pub fn asymmetry(&self) -> T {
        (*self - self.transpose()).frobenius()
    }

    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    /// Symmetric eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order and the orthogonal matrix whose
    /// columns are the matching eigenvectors, so `self = O diag(w) Oᵀ`.
    /// Only the symmetric part of `self` is used.
    pub fn sym_eigen(&self) -> (Vector<T>, Self) {
        let n = self.n;
        let mut a = self.symmetrize();
        let mut v = Self::identity(n);
        let scale = a.frobenius();
        if scale > T::zero() {
            let tiny = T::epsilon() * T::epsilon() * scale * scale;
            for _sweep in 0..64 {
                let mut off = T::zero();
                for p in 0..n {
                    for q in p + 1..n {
                        off += a[(p, q)] * a[(p, q)];
                    }
                }
                if off <= tiny {
                    break;
                }
                for p in 0..n {
                    for q in p + 1..n {
                        let apq = a[(p, q)];
                        if apq == T::zero() {
                            continue;
                        }
                        let theta = (a[(q, q)] - a[(p, p)]) / (T::two() * apq);
                        let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                        let c = T::one() / (t * t + T::one()).sqrt();
                        let s = t * c;
                        let mut rot = Self::identity(n);
                        rot[(p, p)] = c;
                        rot[(q, q)] = c;
                        rot[(p, q)] = s;
                        rot[(q, p)] = -s;
                        a = rot.transpose() * a * rot;
                        a[(p, q)] = T::zero();
                        a[(q, p)] = T::zero();
                        v = v * rot;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
        let mut w = Vector::zeros(n);
        let mut o = Self::zeros(n);
        for (k, &i) in order.iter().enumerate() {
            w[k] = a[(i, i)];
            for r in 0..n {
                o[(r, k)] = v[(r, i)];
            }
        }
        (w, o)
    }

    /// `f(M) = O f(w) Oᵀ` for symmetric `M`.
    pub fn sym_fn(&self, f: impl Fn(T) -> T) -> Self {
        let (w, o) = self.sym_eigen();
        let fw: Vec<T> = w.iter().map(f).collect();
        o * Self::from_diag(&fw) * o.transpose()
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn min_eigenvalue(&self) -> T {
        self.sym_eigen().0[0]
    }

    /// Largest eigenvalue of the symmetric part.
    pub fn max_eigenvalue(&self) -> T {
        let (w, _) = self.sym_eigen();
        w[w.dim() - 1]
    }

    /// Quadratic form `uᵀ M u`.
    pub fn quad(&self, u: &Vector<T>) -> T {
        u.dot(&(*self * *u))
    }

    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix::<U>::from_fn(self.n, |i, j| U::lit(self[(i, j)].as_f64()))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.n && j < self.n);
        &self.a[i * MAX_DIM + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.n && j < self.n);
        &mut self.a[i * MAX_DIM + j]
    }
}

impl<T: Real> Add for Matrix<T> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        for (x, y) in self.a.iter_mut().zip(o.a.iter()) {
            *x += *y;
        }
        self
    }
}

impl<T: Real> Sub for Matrix<T> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        for (x, y) in self.a.iter_mut().zip(o.a.iter()) {
            *x -= *y;
        }
        self
    }
}

impl<T: Real> Neg for Matrix<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * (-T::one())
    }
}

impl<T: Real> Mul<T> for Matrix<T> {
    type Output = Self;
    fn mul(mut self, s: T) -> Self {
        for x in self.a.iter_mut() {
            *x *= s;
        }
        self
    }
}

impl<T: Real> Mul for Matrix<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += aik * o[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Mul<Vector<T>> for Matrix<T> {
    type Output = Vector<T>;
    fn mul(self, u: Vector<T>) -> Vector<T> {
        debug_assert_eq!(self.n, u.dim());
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[i] += self[(i, j)] * u[j];
            }
        }
        out
    }
}

impl<T: Real> AddAssign for Matrix<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Matrix<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
