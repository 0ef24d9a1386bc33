//! Truncated power series with real coefficients.

use crate::scalar::Real;
use crate::C64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    F1,
    G1,
    F2,
    G2,
    F3,
    G3,
}

/// Σ coeffs[j] z^j around z = 0, trusted for |z| < radius.
#[derive(Debug, Clone, Serialize)]
pub struct LocalSeries {
    pub coeffs: Vec<f64>,
    pub radius: f64,
    pub which: SeriesKind,
    pub a: f64,
}

impl LocalSeries {
    pub fn new(coeffs: Vec<f64>, which: SeriesKind, a: f64) -> Self {
        let radius = radius_estimate(&coeffs).min(1.0);
        Self { coeffs, radius, which, a }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_deriv(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, (j, &c)| acc * z + c * j as f64)
    }

    pub fn at0(&self) -> f64 {
        self.coeffs[0]
    }
}

/// Root-test radius estimate from the trailing non-zero coefficients.
pub fn radius_estimate<T: Real>(c: &[T]) -> T {
    let tiny = T::epsilon() * c.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tail = c.len() / 2;
    let mut est = T::infinity();
    for (j, v) in c.iter().enumerate().skip(tail.max(1)) {
        if v.abs() > tiny {
            let r = v.abs().powf(-T::one() / T::from_usize(j).unwrap());
            est = est.min(r);
        }
    }
    est
}

/// Cauchy product truncated to `n` terms.
pub fn mul<T: Real>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut r = vec![T::zero(); n];
    for (i, &x) in a.iter().enumerate().take(n) {
        for (j, &y) in b.iter().enumerate().take(n - i) {
            r[i + j] += x * y;
        }
    }
    r
}

/// Coefficient-wise a + s·b, padded to max length.
pub fn axpy<T: Real>(a: &[T], s: T, b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(T::zero()) + s * b.get(i).copied().unwrap_or(T::zero()))
        .collect()
}

/// Multiply by z^k, truncating to `n` terms.
pub fn shift<T: Real>(a: &[T], k: usize, n: usize) -> Vec<T> {
    let mut r = vec![T::zero(); n];
    for (i, &v) in a.iter().enumerate() {
        if i + k < n {
            r[i + k] = v;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_radius() {
        let c: Vec<f64> = (0..30).map(|j| 0.5f64.powi(j)).collect();
        assert!((radius_estimate(&c) - 2.0).abs() < 1e-9);
        let c32: Vec<f32> = (0..10).map(|j| 0.5f32.powi(j)).collect();
        assert!((radius_estimate(&c32) - 2.0).abs() < 1e-4);
    }

    #[test]
    fn product() {
        let a = [1.0, 1.0];
        let p = mul(&a, &a, 4);
        assert_eq!(p, vec![1.0, 2.0, 1.0, 0.0]);
    }
}
