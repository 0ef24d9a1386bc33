//! Pearcey integrals p_j, q_j and their derivatives, the sectionally defined
//! matrix Φ(ζ; b), its jumps and large-ζ asymptotics, and the bilinear
//! pairing [p, q] = pq″ − p′q′ + p″q − bpq.

use crate::linalg::M3;
use crate::sd_contour::{ContourSet, Moments, Quartic};
use crate::spectral_surface::OMEGA;
use crate::{Error, Result, C64};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Valley indices for e^{−s⁴/4}: 0 ↦ +∞, 1 ↦ +i∞, 2 ↦ −∞, 3 ↦ −i∞.
/// Valley indices for e^{+t⁴/4}: 0 ↦ e^{iπ/4}∞, 1 ↦ e^{3iπ/4}∞,
/// 2 ↦ e^{−3iπ/4}∞, 3 ↦ e^{−iπ/4}∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PearceyContour {
    Gamma(usize),
    Sigma,
    SigmaJ(usize),
}

impl PearceyContour {
    /// Oriented legs as (start valley, end valley).
    pub fn legs(&self) -> Vec<(usize, usize)> {
        match *self {
            PearceyContour::Gamma(j) => vec![GAMMA[j]],
            PearceyContour::Sigma => vec![SIGMA_J[1], SIGMA_J[2]],
            PearceyContour::SigmaJ(j) => vec![SIGMA_J[j - 1]],
        }
    }

    /// Directions of the legs' endpoints at infinity.
    pub fn end_angles(&self) -> Vec<(f64, f64)> {
        let ang = |k: usize, sigma: bool| if sigma { FRAC_PI_4 + k as f64 * PI / 2.0 } else { k as f64 * PI / 2.0 };
        let sigma = !matches!(self, PearceyContour::Gamma(_));
        self.legs().into_iter().map(|(a, b)| (ang(a, sigma), ang(b, sigma))).collect()
    }
}

/// Γ₀ = (−∞, ∞), Γ₁ = (i∞,0]∪[0,∞), Γ₂ = (i∞,0]∪[0,−∞), Γ₃ = (−i∞,0]∪[0,−∞),
/// Γ₄ = (−i∞,0]∪[0,∞), Γ₅ = (−i∞, i∞).
pub const GAMMA: [(usize, usize); 6] = [(2, 0), (1, 0), (1, 2), (3, 2), (3, 0), (3, 1)];
/// Σ₁ right half-plane downward, Σ₂ lower half-plane right to left, Σ₃ upper
/// half-plane left to right. These orientations make the pairing of
/// (p₀, p₁, p₄) against (q₁, q₂, q₃) the identity matrix.
pub const SIGMA_J: [(usize, usize); 3] = [(0, 3), (3, 2), (1, 0)];

/// Derivatives 0..3 of every p_j at one (ζ, b).
#[derive(Debug, Clone)]
pub struct PearceyP {
    pub zeta: C64,
    pub b: C64,
    set: ContourSet,
}

impl PearceyP {
    pub fn new(zeta: C64, b: C64) -> Result<Self> {
        check_finite(zeta, b)?;
        let q = Quartic { c4: C64::new(-0.25, 0.0), c2: -b / 2.0, c1: I * zeta };
        Ok(Self { zeta, b, set: ContourSet::new(q)? })
    }

    fn moments(&self, j: usize) -> Moments {
        let (a, b) = GAMMA[j];
        self.set.integral(a, b)
    }

    /// d-th derivative of p_j, d = 0..3.
    pub fn pj(&self, j: usize, d: usize) -> C64 {
        self.moments(j)[d] * I.powi(d as i32)
    }

    /// (p_j, p_j′, p_j″).
    pub fn triple(&self, j: usize) -> [C64; 3] {
        let m = self.moments(j);
        [m[0], m[1] * I, -m[2]]
    }
}

/// Derivatives 0..3 of every q_j at one (y, b).
#[derive(Debug, Clone)]
pub struct PearceyQ {
    pub y: C64,
    pub b: C64,
    set: ContourSet,
}

impl PearceyQ {
    pub fn new(y: C64, b: C64) -> Result<Self> {
        check_finite(y, b)?;
        let q = Quartic { c4: C64::new(0.25, 0.0), c2: b / 2.0, c1: I * y };
        Ok(Self { y, b, set: ContourSet::new(q)? })
    }

    fn sigma_moments(&self, legs: &[(usize, usize)]) -> Moments {
        let mut acc = [C64::new(0.0, 0.0); 4];
        for &(a, b) in legs {
            for (x, v) in acc.iter_mut().zip(self.set.integral(a, b)) {
                *x += v;
            }
        }
        acc
    }

    /// d-th derivative of q_j (j = 1, 2, 3) with the 1/(2πi) normalization.
    pub fn qj(&self, j: usize, d: usize) -> C64 {
        self.sigma_moments(&[SIGMA_J[j - 1]])[d] * I.powi(d as i32) / (2.0 * PI * I)
    }

    /// q₀ = q₂ + q₃.
    pub fn q0(&self, d: usize) -> C64 {
        self.qj(2, d) + self.qj(3, d)
    }

    /// d-th derivative of q = (1/2π)∫_Σ.
    pub fn q(&self, d: usize) -> C64 {
        self.sigma_moments(&PearceyContour::Sigma.legs())[d] * I.powi(d as i32) / (2.0 * PI)
    }

    pub fn triple_j(&self, j: usize) -> [C64; 3] {
        [self.qj(j, 0), self.qj(j, 1), self.qj(j, 2)]
    }

    pub fn triple_q(&self) -> [C64; 3] {
        [self.q(0), self.q(1), self.q(2)]
    }

    pub fn triple_q0(&self) -> [C64; 3] {
        [self.q0(0), self.q0(1), self.q0(2)]
    }
}

fn check_finite(a: C64, b: C64) -> Result<()> {
    if a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("non-finite Pearcey argument".into()))
    }
}

/// Whether (ζ, b) lies in the box where quadrature accuracy is validated.
pub fn in_validated_box(arg: C64, b: C64) -> bool {
    arg.norm() <= 30.0 * std::f64::consts::SQRT_2 && b.norm() <= 10.0
}

/// p(x; b) = (1/2π)∫_ℝ e^{−s⁴/4 − bs²/2 + isx} ds and its derivative `d`.
pub fn pearcey_p(x: C64, b: C64, d: usize) -> Result<C64> {
    Ok(PearceyP::new(x, b)?.pj(0, d) / (2.0 * PI))
}

/// q(y; b) = (1/2π)∫_Σ e^{t⁴/4 + bt²/2 + ity} dt and its derivative `d`.
pub fn pearcey_q(y: C64, b: C64, d: usize) -> Result<C64> {
    Ok(PearceyQ::new(y, b)?.q(d))
}

pub fn pearcey_pj(zeta: C64, b: C64, j: usize, d: usize) -> Result<C64> {
    if j > 5 || d > 3 {
        return Err(Error::Argument(format!("p_{j} derivative {d} out of range")));
    }
    Ok(PearceyP::new(zeta, b)?.pj(j, d))
}

pub fn q_j(y: C64, b: C64, j: usize, d: usize) -> Result<C64> {
    if !(1..=3).contains(&j) || d > 3 {
        return Err(Error::Argument(format!("q_{j} derivative {d} out of range")));
    }
    Ok(PearceyQ::new(y, b)?.qj(j, d))
}

pub fn q0(y: C64, b: C64, d: usize) -> Result<C64> {
    Ok(PearceyQ::new(y, b)?.q0(d))
}

/// [p, q] = pq″ − p′q′ + p″q − bpq for value/derivative triples.
pub fn bracket(p: &[C64; 3], q: &[C64; 3], b: C64) -> C64 {
    p[0] * q[2] - p[1] * q[1] + p[2] * q[0] - b * p[0] * q[0]
}

/// Solutions entering [p_j, ·] by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QSolution {
    Q(usize),
    Q0,
    Pearcey,
}

/// [p_j, q](z).
pub fn pairing(j: usize, q: QSolution, b: C64, z: C64) -> Result<C64> {
    let pp = PearceyP::new(z, b)?;
    let qq = PearceyQ::new(z, b)?;
    let qt = match q {
        QSolution::Q(k) => qq.triple_j(k),
        QSolution::Q0 => qq.triple_q0(),
        QSolution::Pearcey => qq.triple_q(),
    };
    Ok(bracket(&pp.triple(j), &qt, b))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiMatrix {
    pub zeta: C64,
    pub b: C64,
    pub sector: u8,
    pub entries: M3,
}

/// Columns of Φ per sector: (sign, j).
const SECTOR_COLUMNS: [[(f64, usize); 3]; 6] = [
    [(-1.0, 2), (1.0, 1), (1.0, 5)],
    [(1.0, 0), (1.0, 1), (1.0, 4)],
    [(-1.0, 3), (-1.0, 5), (1.0, 4)],
    [(1.0, 4), (-1.0, 5), (1.0, 3)],
    [(1.0, 0), (1.0, 2), (1.0, 3)],
    [(1.0, 1), (1.0, 2), (1.0, 5)],
];

/// Sector 1..6 of a point off the six rays.
pub fn sector_of(zeta: C64) -> Option<u8> {
    let a = zeta.arg();
    let bounds = [0.0, FRAC_PI_4, 3.0 * FRAC_PI_4, PI];
    let eps = 1e-15;
    for w in bounds.iter() {
        if (a.abs() - w).abs() <= eps {
            return None;
        }
    }
    if zeta.norm() == 0.0 {
        return None;
    }
    Some(if a > 0.0 {
        if a < FRAC_PI_4 {
            1
        } else if a < 3.0 * FRAC_PI_4 {
            2
        } else {
            3
        }
    } else if a < -3.0 * FRAC_PI_4 {
        4
    } else if a < -FRAC_PI_4 {
        5
    } else {
        6
    })
}

/// Matrix of p_j columns and derivative rows for the given sector formula.
pub fn phi_in_sector(pp: &PearceyP, sector: u8) -> M3 {
    let cols = SECTOR_COLUMNS[(sector - 1) as usize];
    let mut m = M3::zero();
    for (c, &(sg, j)) in cols.iter().enumerate() {
        let t = pp.triple(j);
        for r in 0..3 {
            m.0[r][c] = t[r] * sg;
        }
    }
    m
}

pub fn phi(zeta: C64, b: C64) -> Result<PhiMatrix> {
    let sector = sector_of(zeta).ok_or_else(|| Error::Ambiguity(format!("ζ = {zeta} lies on a jump ray of Φ")))?;
    let pp = PearceyP::new(zeta, b)?;
    Ok(PhiMatrix { zeta, b, sector, entries: phi_in_sector(&pp, sector) })
}

/// The six oriented jump rays: (angle, sector on the + side, sector on the − side).
/// Right half-plane rays point outward, left half-plane rays point inward.
pub const RAYS: [(f64, u8, u8); 6] = [
    (0.0, 1, 6),
    (FRAC_PI_4, 2, 1),
    (3.0 * FRAC_PI_4, 2, 3),
    (PI, 3, 4),
    (-3.0 * FRAC_PI_4, 4, 5),
    (-FRAC_PI_4, 6, 5),
];

/// Jump matrix j_Φ on each ray, in the order of [`RAYS`].
pub fn jump_matrix(ray: usize) -> [[i32; 3]; 3] {
    match ray {
        0 => [[0, 1, 0], [-1, 0, 0], [0, 0, 1]],
        1 => [[1, 0, 0], [1, 1, 1], [0, 0, 1]],
        2 => [[1, 0, 0], [0, 1, 0], [1, 1, 1]],
        3 => [[0, 0, 1], [0, 1, 0], [-1, 0, 0]],
        4 => [[1, 0, 0], [0, 1, 0], [1, -1, 1]],
        _ => [[1, 0, 0], [1, 1, -1], [0, 0, 1]],
    }
}

/// Boundary values (Φ₊, Φ₋) at a point r·e^{iθ} of ray `ray`.
pub fn phi_sides(ray: usize, r: f64, b: C64) -> Result<(M3, M3)> {
    let (ang, plus, minus) = RAYS[ray];
    let pp = PearceyP::new(C64::from_polar(r, ang), b)?;
    Ok((phi_in_sector(&pp, plus), phi_in_sector(&pp, minus)))
}

/// ‖Φ₊ − Φ₋ j_Φ‖ / ‖Φ₊‖ on `ray`.
pub fn jump_defect(ray: usize, r: f64, b: C64) -> Result<f64> {
    let (p, m) = phi_sides(ray, r, b)?;
    let j = M3::from_ints(jump_matrix(ray));
    Ok((p - m * j).norm() / p.norm())
}

/// θ_k(ζ; b) = ¾ω^{2k}ζ^{4/3} + (b/2)ω^kζ^{2/3}.
pub fn theta(zeta: C64, b: C64, k: usize) -> C64 {
    let z13 = zeta.powf(1.0 / 3.0);
    let z23 = z13 * z13;
    0.75 * OMEGA.powi(2 * k as i32) * z23 * z23 + 0.5 * b * OMEGA.powi(k as i32) * z23
}

fn asymptotic_parts(zeta: C64, b: C64) -> (M3, [C64; 3]) {
    let pref = (2.0 * PI / 3.0).sqrt() * I * (b * b / 6.0).exp();
    let z13 = zeta.powf(1.0 / 3.0);
    let d = M3::diag([1.0 / z13, C64::new(1.0, 0.0), z13]);
    let w = OMEGA;
    let w2 = OMEGA * OMEGA;
    let one = C64::new(1.0, 0.0);
    let (om, th) = if zeta.im > 0.0 {
        (M3([[-w, w2, one], [-one, one, one], [-w2, w, one]]), [theta(zeta, b, 1), theta(zeta, b, 2), theta(zeta, b, 3)])
    } else {
        (M3([[w2, w, one], [one, one, one], [w, w2, one]]), [theta(zeta, b, 2), theta(zeta, b, 1), theta(zeta, b, 3)])
    };
    ((d * om).scale(pref), th)
}

/// Leading-order large-ζ form of Φ.
pub fn phi_asymptotic(zeta: C64, b: C64) -> Result<M3> {
    if zeta.norm() < 3.0 {
        return Err(Error::Domain("asymptotic form requires |ζ| ≥ 3".into()));
    }
    let (l, th) = asymptotic_parts(zeta, b);
    Ok(l * M3::diag(th.map(|t| t.exp())))
}

/// ‖L⁻¹ Φ e^{−Θ} − I‖, the relative error of the leading-order form.
pub fn asymptotic_defect(zeta: C64, b: C64) -> Result<f64> {
    if zeta.norm() < 3.0 {
        return Err(Error::Domain("asymptotic form requires |ζ| ≥ 3".into()));
    }
    let f = phi(zeta, b)?;
    let (l, th) = asymptotic_parts(zeta, b);
    let m = l.inverse()? * f.entries * M3::diag(th.map(|t| (-t).exp()));
    Ok((m - M3::identity()).norm())
}

/// Φ̃ = [p₀ p₁ p₄] with derivative rows, defined in the whole plane.
pub fn phi_tilde(pp: &PearceyP) -> M3 {
    phi_in_sector(pp, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Γ(1/4) to 20 digits.
    const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

    #[test]
    fn p_at_origin() {
        let ex = GAMMA_QUARTER / (2.0 * std::f64::consts::SQRT_2 * PI);
        let v = pearcey_p(c(0.0, 0.0), c(0.0, 0.0), 0).unwrap();
        assert!((v.re - ex).abs() < 1e-13 && v.im.abs() < 1e-14);
        // brute-force trapezoid on the real line
        let h = 0.01;
        let bf: f64 = (-1200..=1200).map(|i| { let s = i as f64 * h; (-s.powi(4) / 4.0).exp() }).sum::<f64>() * h / (2.0 * PI);
        assert!((bf - ex).abs() < 1e-13);
    }

    #[test]
    fn ode_residuals() {
        for (z, b) in [(c(1.0, 0.5), 0.3), (c(-7.0, 2.0), 1.0), (c(0.0, -9.0), -2.0)] {
            let b = c(b, 0.0);
            let pp = PearceyP::new(z, b).unwrap();
            for j in 0..6 {
                let r = pp.pj(j, 3) - z * pp.pj(j, 0) - b * pp.pj(j, 1);
                let s = pp.pj(j, 3).norm() + (z * pp.pj(j, 0)).norm() + (b * pp.pj(j, 1)).norm();
                assert!(r.norm() <= 1e-8 * s.max(1.0), "j={j} z={z}");
            }
            let qq = PearceyQ::new(z, b).unwrap();
            for k in 1..=3 {
                let r = qq.qj(k, 3) + z * qq.qj(k, 0) - b * qq.qj(k, 1);
                let s = qq.qj(k, 3).norm() + (z * qq.qj(k, 0)).norm() + (b * qq.qj(k, 1)).norm();
                assert!(r.norm() <= 1e-8 * s.max(1.0), "k={k} z={z}");
            }
        }
    }

    #[test]
    fn jumps() {
        for b in [0.0, 1.3] {
            for r in [0.5, 2.0, 5.0] {
                for ray in 0..6 {
                    let d = jump_defect(ray, r, c(b, 0.0)).unwrap();
                    assert!(d < 1e-10, "ray {ray} r {r}: {d:e}");
                }
            }
        }
    }

    #[test]
    fn pairing_identity() {
        for b in [0.0, 1.5] {
            let b = c(b, 0.0);
            for z in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, -2.0)] {
                for (r, j) in [0usize, 1, 4].into_iter().enumerate() {
                    for k in 1..=3 {
                        let v = pairing(j, QSolution::Q(k), b, z).unwrap();
                        let ex = if r + 1 == k { 1.0 } else { 0.0 };
                        assert!((v - ex).norm() < 1e-8, "[p{j},q{k}] = {v}");
                    }
                }
                assert!(pairing(0, QSolution::Q0, b, z).unwrap().norm() < 1e-8);
                assert!((pairing(1, QSolution::Q0, b, z).unwrap() - 1.0).norm() < 1e-8);
                assert!((pairing(4, QSolution::Q0, b, z).unwrap() - 1.0).norm() < 1e-8);
            }
            for y in [0.0, 1.0, -2.0] {
                let y = c(y, 0.0);
                assert!((q0(y, b, 0).unwrap() + I * pearcey_q(y, b, 0).unwrap()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn real_and_even() {
        for b in [-1.0, 0.0, 2.0] {
            let b = c(b, 0.0);
            for x in [0.3, 1.7, 4.0] {
                let p = pearcey_p(c(x, 0.0), b, 0).unwrap();
                let pm = pearcey_p(c(-x, 0.0), b, 0).unwrap();
                let q = pearcey_q(c(x, 0.0), b, 0).unwrap();
                assert!(p.im.abs() < 1e-10 && q.im.abs() < 1e-10);
                assert!((p - pm).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn asymptotic_rate_nonzero_b() {
        let rs: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
        let pts: Vec<(f64, f64)> = rs
            .iter()
            .map(|&r| (r.ln(), asymptotic_defect(C64::from_polar(r, PI / 3.0), c(2.0, 0.0)).unwrap().ln()))
            .collect();
        let slope = (pts[3].1 - pts[0].1) / (pts[3].0 - pts[0].0);
        assert!((slope + 2.0 / 3.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn theta_sums_to_zero() {
        let z = c(3.0, 4.0);
        let s: C64 = (1..=3).map(|k| theta(z, c(0.7, 0.0), k)).sum();
        assert!(s.norm() < 1e-12);
    }
}
