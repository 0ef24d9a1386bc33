//! Dense linear algebra: LU with partial pivoting, symmetric tridiagonal QL,
//! Hermitian eigenvalues, and a small 3×3 complex matrix type.

use crate::scalar::Real;
use crate::{Error, Result, C64};
use num_complex::Complex;
use std::ops::{Add, Mul, Sub};

/// LU factorization with partial pivoting of a row-major n×n matrix.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    n: usize,
    lu: Vec<T>,
    piv: Vec<usize>,
    sign: T,
}

impl<T: Real> Lu<T> {
    pub fn new(mut a: Vec<T>, n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Argument("matrix size mismatch".into()));
        }
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].abs());
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let d = a[k * n + k];
            if d == T::zero() {
                continue;
            }
            for i in k + 1..n {
                let l = a[i * n + k] / d;
                a[i * n + k] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, lu: a, piv, sign })
    }

    pub fn det(&self) -> T {
        (0..self.n).fold(self.sign, |acc, i| acc * self.lu[i * self.n + i])
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        let mut x: Vec<T> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            let d = self.lu[i * n + i];
            if d == T::zero() {
                return Err(Error::Numerical("singular matrix".into()));
            }
            x[i] /= d;
        }
        Ok(x)
    }

    /// Row-major inverse.
    pub fn inverse(&self) -> Result<Vec<T>> {
        let n = self.n;
        let mut inv = vec![T::zero(); n * n];
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[i * n + j] = col[i];
            }
        }
        Ok(inv)
    }
}

/// Determinant by pivoted LU.
pub fn det<T: Real>(a: Vec<T>, n: usize) -> Result<T> {
    Ok(Lu::new(a, n)?.det())
}

/// 1-norm condition number estimate computed from the explicit inverse.
pub fn condition_1<T: Real>(a: &[T], n: usize) -> Result<T> {
    let inv = Lu::new(a.to_vec(), n)?.inverse()?;
    let norm1 = |m: &[T]| {
        (0..n)
            .map(|j| (0..n).fold(T::zero(), |s, i| s + m[i * n + j].abs()))
            .fold(T::zero(), T::max)
    };
    Ok(norm1(a) * norm1(&inv))
}

/// Implicit QL for a symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (length n-1). Optionally returns the first components of
/// the normalized eigenvectors.
pub fn symmetric_tridiagonal_eig<T: Real>(mut d: Vec<T>, e_in: Vec<T>, first: bool) -> Result<(Vec<T>, Option<Vec<T>>)> {
    let n = d.len();
    let mut e = e_in;
    e.push(T::zero());
    let mut z: Vec<T> = (0..n).map(|i| if i == 0 { T::one() } else { T::zero() }).collect();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numerical("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if first {
                    let f2 = z[i + 1];
                    z[i + 1] = s * z[i] + c * f2;
                    z[i] = c * z[i] - s * f2;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok((d, if first { Some(z) } else { None }))
}

/// Eigenvalues (ascending) of a complex Hermitian matrix given row-major.
/// Householder reduction to real tridiagonal form followed by implicit QL.
pub fn hermitian_eigenvalues<T: Real>(mut a: Vec<Complex<T>>, n: usize) -> Result<Vec<T>> {
    if a.len() != n * n {
        return Err(Error::Argument("matrix size mismatch".into()));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let m = k + 1;
        let xnorm = (m..n).fold(T::zero(), |s, i| s + a[i * n + k].norm_sqr()).sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = a[m * n + k];
        let phase = if x0.norm() > T::zero() { x0 / x0.norm() } else { Complex::new(T::one(), T::zero()) };
        let alpha = -phase * xnorm;
        for i in m..n {
            v[i] = a[i * n + k];
        }
        v[m] -= alpha;
        let vn = (m..n).fold(T::zero(), |s, i| s + v[i].norm_sqr()).sqrt();
        if vn == T::zero() {
            continue;
        }
        for vi in v.iter_mut().take(n).skip(m) {
            *vi = *vi / vn;
        }
        // p = A v on the trailing block (rows/cols k..n, v zero at k)
        for i in k..n {
            let mut s = zero;
            for j in m..n {
                s += a[i * n + j] * v[j];
            }
            p[i] = s;
        }
        let mut beta = zero;
        for i in m..n {
            beta += v[i].conj() * p[i];
        }
        // w = p - beta v ; A <- A - 2 v w* - 2 w v*
        let two = T::lit(2.0);
        for i in k..n {
            let wi = p[i] - if i >= m { beta * v[i] } else { zero };
            p[i] = wi;
        }
        for i in k..n {
            let vi = if i >= m { v[i] } else { zero };
            for j in k..n {
                let vj = if j >= m { v[j] } else { zero };
                a[i * n + j] -= (vi * p[j].conj() + p[i] * vj.conj()) * two;
            }
        }
    }
    let d: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();
    let e: Vec<T> = (0..n.saturating_sub(1)).map(|i| a[(i + 1) * n + i].norm()).collect();
    let (mut vals, _) = symmetric_tridiagonal_eig(d, e, false)?;
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(vals)
}

/// 3×3 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct M3(pub [[C64; 3]; 3]);

impl M3 {
    pub fn zero() -> Self {
        M3([[C64::new(0.0, 0.0); 3]; 3])
    }
    pub fn identity() -> Self {
        Self::diag([C64::new(1.0, 0.0); 3])
    }
    pub fn diag(d: [C64; 3]) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }
    pub fn from_ints(a: [[i32; 3]; 3]) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = C64::new(a[i][j] as f64, 0.0);
            }
        }
        m
    }
    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Numerical("singular 3x3 matrix".into()));
        }
        let m = &self.0;
        let mut inv = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
                let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
                inv.0[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / d;
            }
        }
        Ok(inv)
    }
    /// Max absolute row sum.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|r| r.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }
    pub fn scale(&self, s: C64) -> Self {
        let mut r = *self;
        r.0.iter_mut().flatten().for_each(|v| *v *= s);
        r
    }
    pub fn col(&self, j: usize) -> [C64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }
}

impl Mul for M3 {
    type Output = M3;
    fn mul(self, o: M3) -> M3 {
        let mut r = M3::zero();
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        r
    }
}
impl Add for M3 {
    type Output = M3;
    fn add(self, o: M3) -> M3 {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] += o.0[i][j];
            }
        }
        r
    }
}
impl Sub for M3 {
    type Output = M3;
    fn sub(self, o: M3) -> M3 {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] -= o.0[i][j];
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_determinant_and_inverse() {
        let a: Vec<f64> = vec![4.0, 3.0, 2.0, 1.0, 3.0, 5.0, 2.0, 7.0, 1.0];
        let lu = Lu::new(a.clone(), 3).unwrap();
        assert!((lu.det() - (-99.0)).abs() < 1e-12);
        let inv = lu.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
        let af: Vec<f32> = a.iter().map(|&x| x as f32).collect();
        assert!((det(af, 3).unwrap() + 99.0).abs() < 1e-4);
    }

    #[test]
    fn tridiagonal_eigenvalues() {
        // second-difference matrix: eigenvalues 2 - 2 cos(kπ/(n+1))
        let n = 12;
        let (mut vals, _) = symmetric_tridiagonal_eig(vec![2.0; n], vec![-1.0; n - 1], false).unwrap();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, v) in vals.iter().enumerate() {
            let ex = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - ex).abs() < 1e-13);
        }
    }

    #[test]
    fn hermitian_trace_and_known_spectrum() {
        // [[2, i],[ -i, 2]] has eigenvalues 1, 3
        let a = vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)];
        let v = hermitian_eigenvalues(a, 2).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        // circulant-like Hermitian 4x4 with eigenvalues from DFT
        let n = 4;
        let c = [C64::new(1.0, 0.0), C64::new(0.5, 0.25), C64::new(0.3, 0.0), C64::new(0.5, -0.25)];
        let mut m = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = c[(j + n - i) % n];
            }
        }
        let vals = hermitian_eigenvalues(m, n).unwrap();
        let mut ex: Vec<f64> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| c[j] * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64))
                    .sum::<C64>()
                    .re
            })
            .collect();
        ex.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in vals.iter().zip(&ex) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn m3_inverse() {
        let m = M3([
            [C64::new(1.0, 1.0), C64::new(2.0, 0.0), C64::new(0.0, 0.5)],
            [C64::new(0.0, 0.0), C64::new(1.0, -1.0), C64::new(3.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(1.0, 0.0)],
        ]);
        let p = m * m.inverse().unwrap();
        assert!((p - M3::identity()).norm() < 1e-14);
    }
}
