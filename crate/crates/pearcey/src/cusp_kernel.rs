//! The Pearcey kernel in the p/q form and in the Φ̃ form, and Fredholm
//! determinants det(I − K) on intervals (gap probabilities).

use crate::linalg::{Lu, M3};
use crate::pearcey_fn::{phi_in_sector, phi_tilde, PearceyP, PearceyQ};
use crate::quad::gl_interval;
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Below this separation the kernel is evaluated by its Taylor expansion.
pub const DIAGONAL_SWITCH: f64 = 1e-4;
/// Imaginary residue tolerated before a value is reported as real.
const REAL_TOL: f64 = 1e-9;
const TAYLOR_TERMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    CuspPq,
    CuspPhi,
    FiniteN,
    ScaledFiniteN,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelEval {
    pub kind: KernelKind,
    /// b for the cusp kernels, (n, a) for the finite-n ones.
    pub params: (f64, f64),
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapResult {
    pub c: f64,
    pub d: f64,
    pub b: f64,
    pub nodes: usize,
    pub det: f64,
    pub converged: bool,
}

/// Derivatives 0..=m of a solution of p‴ = xp + bp′ from (p, p′, p″).
fn p_derivatives(t: &[C64; 3], x: f64, b: f64, m: usize) -> Vec<C64> {
    let mut d = t.to_vec();
    for k in 0..=m.saturating_sub(3) {
        // p^{(k+3)} = x p^{(k)} + k p^{(k−1)} + b p^{(k+1)}
        let prev = if k > 0 { d[k - 1] * k as f64 } else { C64::new(0.0, 0.0) };
        d.push(d[k] * x + prev + d[k + 1] * b);
    }
    d.truncate(m + 1);
    d
}

/// r·(p, p′, p″)(x) / (x − y), where r·(p, p′, p″)(y) = 0, using a Taylor
/// expansion around y when x is close to y.
fn quotient(r: &[C64; 3], px: &[C64; 3], py: &[C64; 3], x: f64, y: f64, b: f64) -> C64 {
    let h = x - y;
    if h.abs() >= DIAGONAL_SWITCH {
        return (r[0] * px[0] + r[1] * px[1] + r[2] * px[2]) / h;
    }
    let d = p_derivatives(py, y, b, TAYLOR_TERMS + 2);
    let mut acc = C64::new(0.0, 0.0);
    let mut fact = 1.0;
    for k in 1..=TAYLOR_TERMS {
        fact *= k as f64;
        let dk = r[0] * d[k] + r[1] * d[k + 1] + r[2] * d[k + 2];
        acc += dk * h.powi(k as i32 - 1) / fact;
    }
    acc
}

fn real_part(v: C64, what: &str) -> Result<f64> {
    if v.im.abs() > REAL_TOL * v.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("{what}: imaginary residue {:e}", v.im)));
    }
    Ok(v.re)
}

/// Pearcey data at one real point: (p, p′, p″) for p = p₀/2π and the row
/// (q″ − bq, −q′, q) for q = (1/2π)∫_Σ.
#[derive(Debug, Clone)]
struct PqPoint {
    p: [C64; 3],
    row: [C64; 3],
}

impl PqPoint {
    fn new(x: f64, b: f64) -> Result<Self> {
        let z = C64::new(x, 0.0);
        let bc = C64::new(b, 0.0);
        let pp = PearceyP::new(z, bc)?;
        let qq = PearceyQ::new(z, bc)?;
        let t = pp.triple(0);
        let q = qq.triple_q();
        Ok(Self {
            p: [t[0] / (2.0 * PI), t[1] / (2.0 * PI), t[2] / (2.0 * PI)],
            row: [q[2] - bc * q[0], -q[1], q[0]],
        })
    }
}

fn kernel_from(px: &PqPoint, py: &PqPoint, x: f64, y: f64, b: f64) -> C64 {
    -quotient(&py.row, &px.p, &py.p, x, y, b)
}

/// K^cusp(x, y; b) = −(p(x)q″(y) − p′(x)q′(y) + p″(x)q(y) − b p(x)q(y))/(x − y).
///
/// The overall sign makes K(x, x) the (positive) one-point density for the
/// orientation of Σ used by [`PearceyQ`].
pub fn kcusp(x: f64, y: f64, b: f64) -> Result<f64> {
    let py = PqPoint::new(y, b)?;
    let px = if x == y { py.clone() } else { PqPoint::new(x, b)? };
    real_part(kernel_from(&px, &py, x, y, b), "kcusp")
}

pub fn kcusp_eval(x: f64, y: f64, b: f64) -> Result<KernelEval> {
    Ok(KernelEval { kind: KernelKind::CuspPq, params: (b, 0.0), x, y, value: kcusp(x, y, b)? })
}

/// Φ̃⁻¹(y) from the q-rows (q_j″ − bq_j, −q_j′, q_j), j = 1, 2, 3.
pub fn phi_tilde_inverse_rows(y: f64, b: f64) -> Result<M3> {
    let qq = PearceyQ::new(C64::new(y, 0.0), C64::new(b, 0.0))?;
    let mut m = M3::zero();
    for j in 1..=3 {
        let q = qq.triple_j(j);
        m.0[j - 1] = [q[2] - b * q[0], -q[1], q[0]];
    }
    Ok(m)
}

fn phi_tilde_at(x: f64, b: f64) -> Result<(PearceyP, M3)> {
    let pp = PearceyP::new(C64::new(x, 0.0), C64::new(b, 0.0))?;
    let m = phi_tilde(&pp);
    Ok((pp, m))
}

fn checked_inverse(m: &M3) -> Result<M3> {
    let scale = m.norm().powi(3);
    if m.det().norm() < 1e-12 * scale {
        return Err(Error::Numerical("Φ̃ is numerically singular".into()));
    }
    m.inverse()
}

/// ‖Φ̃⁻¹(direct) − Φ̃⁻¹(q-rows)‖ / ‖Φ̃⁻¹‖ at y.
pub fn inverse_agreement(y: f64, b: f64) -> Result<f64> {
    let (_, m) = phi_tilde_at(y, b)?;
    let direct = checked_inverse(&m)?;
    let rows = phi_tilde_inverse_rows(y, b)?;
    Ok((direct - rows).norm() / direct.norm())
}

/// det Φ̃(x; b).
pub fn phi_tilde_det(x: f64, b: f64) -> Result<C64> {
    Ok(phi_tilde_at(x, b)?.1.det())
}

/// K via (1/(2πi(x−y)))·(0,1,1)·Φ̃⁻¹(y)·Φ̃(x)·(1,0,0)ᵀ, with Φ̃⁻¹ by direct
/// inversion.
pub fn kcusp_phi(x: f64, y: f64, b: f64) -> Result<f64> {
    let (py, my) = phi_tilde_at(y, b)?;
    let inv = checked_inverse(&my)?;
    let r = [inv.0[1][0] + inv.0[2][0], inv.0[1][1] + inv.0[2][1], inv.0[1][2] + inv.0[2][2]];
    let tx = if x == y { py.triple(0) } else { PearceyP::new(C64::new(x, 0.0), C64::new(b, 0.0))?.triple(0) };
    let v = quotient(&r, &tx, &py.triple(0), x, y, b) / (2.0 * PI * C64::i());
    real_part(v, "kcusp_phi")
}

/// Φ₊ on the real line: the upper-side sector formula.
fn phi_plus(pp: &PearceyP, x: f64) -> M3 {
    phi_in_sector(pp, if x > 0.0 { 1 } else { 3 })
}

/// K from the four sign-case formulas with boundary values Φ₊ (x, y ≠ 0).
pub fn kcusp_sign_case(x: f64, y: f64, b: f64) -> Result<f64> {
    if x == 0.0 || y == 0.0 || x == y {
        return Err(Error::Domain("sign-case forms need x, y ≠ 0 and x ≠ y".into()));
    }
    let bc = C64::new(b, 0.0);
    let px = PearceyP::new(C64::new(x, 0.0), bc)?;
    let py = PearceyP::new(C64::new(y, 0.0), bc)?;
    let m = checked_inverse(&phi_plus(&py, y))? * phi_plus(&px, x);
    let left: [f64; 3] = if y > 0.0 { [-1.0, 1.0, 0.0] } else { [-1.0, 0.0, 1.0] };
    let right: [f64; 3] = if x > 0.0 { [1.0, 1.0, 0.0] } else { [1.0, 0.0, 1.0] };
    let mut v = C64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            v += m.0[i][j] * left[i] * right[j];
        }
    }
    real_part(v / (2.0 * PI * C64::i() * (x - y)), "kcusp_sign_case")
}

/// det(I − K) on L²(c, d) with a fixed Nyström rule of `nodes` points.
pub fn fredholm_det(c: f64, d: f64, b: f64, nodes: usize) -> Result<f64> {
    let (xs, ws) = gl_interval(nodes, c, d);
    let pts: Vec<PqPoint> = xs.par_iter().map(|&x| PqPoint::new(x, b)).collect::<Result<_>>()?;
    let sw: Vec<f64> = ws.iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<f64>> = (0..nodes)
        .into_par_iter()
        .map(|i| {
            (0..nodes)
                .map(|j| {
                    let k = kernel_from(&pts[i], &pts[j], xs[i], xs[j], b).re;
                    f64::from(u8::from(i == j)) - sw[i] * k * sw[j]
                })
                .collect()
        })
        .collect();
    let a: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(Lu::new(a, nodes)?.det())
}

/// Default self-convergence tolerance of [`gap_probability`].
pub const GAP_TOL: f64 = 1e-8;

/// Gap probability det(I − K)|_{(c,d)}, doubling the node count until two
/// successive values agree to 1e−8 (at most three doublings).
pub fn gap_probability(c: f64, d: f64, b: f64, nodes: usize) -> Result<GapResult> {
    gap_probability_tol(c, d, b, nodes, GAP_TOL)
}

pub fn gap_probability_tol(c: f64, d: f64, b: f64, nodes: usize, tol: f64) -> Result<GapResult> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    if !(c < d) {
        return Err(Error::Argument(format!("gap interval needs c < d, got ({c}, {d})")));
    }
    if nodes < 8 {
        return Err(Error::Argument("gap_probability needs at least 8 nodes".into()));
    }
    let mut n = nodes;
    let mut prev = fredholm_det(c, d, b, n)?;
    for _ in 0..3 {
        let next = fredholm_det(c, d, b, 2 * n)?;
        n *= 2;
        if (next - prev).abs() <= tol {
            return Ok(GapResult { c, d, b, nodes: n, det: next, converged: true });
        }
        prev = next;
    }
    Ok(GapResult { c, d, b, nodes: n, det: prev, converged: false })
}

/// ∫_c^d K(x, x) dx by Gauss–Legendre.
pub fn kernel_trace(c: f64, d: f64, b: f64, nodes: usize) -> Result<f64> {
    let (xs, ws) = gl_interval(nodes, c, d);
    xs.iter().zip(&ws).map(|(&x, &w)| Ok(w * kcusp(x, x, b)?)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_density_positive() {
        let k = kcusp(0.0, 0.0, 0.0).unwrap();
        let k2 = kcusp(1e-3, -1e-3, 0.0).unwrap();
        assert!(k > 0.0, "{k}");
        assert!((k - k2).abs() < 1e-6);
    }

    #[test]
    fn representations_agree() {
        for b in [0.0, 1.0] {
            for (x, y) in [(1.0, -1.0), (0.5, 0.25), (-2.0, 3.0), (0.7, 0.7 + 1e-6)] {
                let a = kcusp(x, y, b).unwrap();
                let p = kcusp_phi(x, y, b).unwrap();
                assert!((a - p).abs() < 1e-8, "({x},{y},{b}): {a} vs {p}");
            }
        }
    }

    #[test]
    fn sign_cases() {
        for (x, y) in [(1.2, -0.4), (0.3, 2.0), (-1.5, 0.8), (-0.6, -2.2)] {
            let a = kcusp_sign_case(x, y, 0.5).unwrap();
            let p = kcusp_phi(x, y, 0.5).unwrap();
            assert!((a - p).abs() < 1e-8, "({x},{y}): {a} vs {p}");
        }
    }

    #[test]
    fn inverse_forms_and_wronskian() {
        for y in [-3.0, 0.0, 2.5] {
            assert!(inverse_agreement(y, 0.8).unwrap() < 1e-8);
        }
        let d0 = phi_tilde_det(0.0, 0.8).unwrap();
        for x in [-4.0, 1.0, 3.5] {
            assert!((phi_tilde_det(x, 0.8).unwrap() - d0).norm() < 1e-8 * d0.norm());
        }
    }

    #[test]
    fn diagonal_matches_finite_separation() {
        for x in [-2.0, 0.4, 3.0] {
            let d = kcusp(x, x, 1.0).unwrap();
            // direct quotient off the switch, extrapolated linearly to h = 0
            let h = 3e-4;
            let s = 2.0 * kcusp(x + h, x, 1.0).unwrap() - kcusp(x + 2.0 * h, x, 1.0).unwrap();
            assert!((d - s).abs() < 1e-7, "{d} vs {s}");
            let n = kcusp(x + 5e-7, x - 5e-7, 1.0).unwrap();
            assert!((d - n).abs() < 1e-6);
        }
    }

    #[test]
    fn small_interval_gap() {
        let g = gap_probability(-1e-4, 1e-4, 0.0, 8).unwrap();
        let t = kernel_trace(-1e-4, 1e-4, 0.0, 8).unwrap();
        assert!((g.det - (1.0 - t)).abs() < 1e-6);
    }

    #[test]
    fn gap_convergence_and_inclusion() {
        let a = fredholm_det(-2.0, 2.0, 0.0, 40).unwrap();
        let b = fredholm_det(-2.0, 2.0, 0.0, 80).unwrap();
        assert!((a - b).abs() < 1e-8);
        let inner = gap_probability(-1.0, 1.0, 0.0, 20).unwrap();
        assert!(inner.converged && inner.det >= a && (0.0..=1.0).contains(&a));
    }
}
