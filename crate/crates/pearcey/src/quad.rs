//! Quadrature rules: Gauss–Legendre (generic), adaptive Gauss–Kronrod along
//! complex segments, and Gauss–Hermite via Golub–Welsch.

use crate::linalg::symmetric_tridiagonal_eig;
use crate::scalar::Real;
use crate::{Error, Result, C64};
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss–Legendre nodes and weights on [-1, 1], ascending nodes.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let one = T::one();
    let two = T::lit(2.0);
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let m = n.div_ceil(2);
    let pi = T::lit(std::f64::consts::PI);
    let nt = T::from_usize(n).unwrap();
    for i in 0..m {
        let mut z = (pi * (T::from_usize(i).unwrap() + T::lit(0.75)) / (nt + T::lit(0.5))).cos();
        let mut dp = T::zero();
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, z);
            for k in 2..=n {
                let kt = T::from_usize(k).unwrap();
                let p2 = ((two * kt - one) * z * p1 - (kt - one) * p0) / kt;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { one } else { p0 };
            dp = nt * (z * pn - pm) / (z * z - one);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        if n == 1 {
            dp = one;
        }
        x[n - 1 - i] = z;
        x[i] = -z;
        let wi = two / ((one - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = T::zero();
    }
    (x, w)
}

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Cached `f64` Gauss–Legendre rule.
pub fn gl(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(gauss_legendre::<f64>(n)))
        .clone()
}

/// Nodes and weights of `n`-point Gauss–Legendre mapped to [a, b].
pub fn gl_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let r = gl(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (b + a);
    (
        r.0.iter().map(|&x| m + h * x).collect(),
        r.1.iter().map(|&w| h * w).collect(),
    )
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> Result<C64>>(f: &mut F, a: f64, b: f64) -> Result<(C64, f64)> {
    let h = 0.5 * (b - a);
    let m = 0.5 * (b + a);
    let fc = f(m)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(m - d)? + f(m + d)?;
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    Ok((k * h, ((k - g) * h).norm()))
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    v: C64,
    e: f64,
}
impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.e == o.e
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.e.total_cmp(&o.e)
    }
}

/// Globally adaptive 15-point Gauss–Kronrod on [a, b] for a complex-valued
/// integrand. Fails with `Accuracy` if the tolerance is not met within
/// `max_intervals` subintervals.
pub fn gk_adaptive<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_intervals: usize) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<C64>,
{
    let (v, e) = gk15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, v, e });
    let (mut total, mut err) = (v, e);
    while err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() >= max_intervals {
            return Err(Error::Accuracy(format!(
                "adaptive quadrature on [{a}, {b}] stopped at error {err:e}"
            )));
        }
        let p = heap.pop().expect("non-empty");
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Accuracy("interval underflow in adaptive quadrature".into()));
        }
        let (v1, e1) = gk15(&mut f, p.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, p.b)?;
        total += v1 + v2 - p.v;
        heap.push(Piece { a: p.a, b: mid, v: v1, e: e1 });
        heap.push(Piece { a: mid, b: p.b, v: v2, e: e2 });
        // re-sum to avoid drift
        total = heap.iter().map(|q| q.v).sum();
        err = heap.iter().map(|q| q.e).sum();
    }
    Ok(QuadResult { value: total, error: err, intervals: heap.len() })
}

/// ∫ f(z) dz along the straight segment z0 → z1.
pub fn integrate_segment<F>(mut f: F, z0: C64, z1: C64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: FnMut(C64) -> Result<C64>,
{
    let d = z1 - z0;
    gk_adaptive(|t| Ok(f(z0 + d * t)? * d), 0.0, 1.0, abs_tol, rel_tol, 4000)
}

/// Gauss–Hermite rule for the weight e^{-x²} by Golub–Welsch.
pub fn gauss_hermite<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let d = vec![T::zero(); n];
    let e: Vec<T> = (1..n).map(|k| (T::from_usize(k).unwrap() / T::lit(2.0)).sqrt()).collect();
    let (vals, first) = symmetric_tridiagonal_eig(d, e, true)?;
    let mu0 = T::lit(std::f64::consts::PI).sqrt();
    let first = first.expect("requested");
    let mut pairs: Vec<(T, T)> = vals.into_iter().zip(first.into_iter().map(|v| mu0 * v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(pairs.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre::<f64>(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let (x32, w32) = gauss_legendre::<f32>(5);
        let s32: f32 = x32.iter().zip(&w32).map(|(x, w)| w * x * x).sum();
        assert!((s32 - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn kronrod_handles_endpoint_singularity() {
        let r = gk_adaptive(|t| Ok(C64::new(t.sqrt(), 0.0)), 0.0, 1.0, 1e-13, 0.0, 500).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn segment_integral_of_entire_function() {
        let z0 = C64::new(0.0, 0.0);
        let z1 = C64::new(1.0, 2.0);
        let r = integrate_segment(|z| Ok(z.exp()), z0, z1, 1e-14, 1e-14).unwrap();
        assert!((r.value - (z1.exp() - 1.0)).norm() < 1e-12);
    }

    #[test]
    fn hermite_moments() {
        let (x, w) = gauss_hermite::<f64>(30).unwrap();
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let pi = std::f64::consts::PI;
        assert!((m0 - pi.sqrt()).abs() < 1e-13);
        assert!((m2 - pi.sqrt() / 2.0).abs() < 1e-13);
    }
}
