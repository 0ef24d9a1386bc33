//! The outer model solution M(z), the matrix K(ζ) of the local Pearcey
//! asymptotics, the analytic prefactor E(z), and the matching Q M⁻¹ ≈ I on
//! the circle |z| = n^{−1/4}.

use crate::lambda_map::LambdaMap;
use crate::linalg::M3;
use crate::pearcey_fn::{in_validated_box, jump_matrix, phi, theta};
use crate::spectral_surface::{make_curve, SpectralCurve, OMEGA};
use crate::{Error, Result, Side, C64};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelMatrix {
    pub z: C64,
    pub entries: M3,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub n: usize,
    pub b: f64,
    pub radius: f64,
    pub sup_defect: f64,
    pub samples: usize,
    pub warnings: Vec<String>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// √(w² − 3c²) on sheet k. Sheet 1 takes the root asymptotic to w, sheets 2
/// and 3 the root equal to −i√2·c at w = ±c. Both are analytic wherever w is
/// not real, and on the real axis they stay off their own cuts.
fn root_on_sheet(w: C64, c3: f64, k: usize) -> C64 {
    if k == 0 {
        w * (C64::new(1.0, 0.0) - c3 / (w * w)).sqrt()
    } else {
        -C64::i() * (c3 - w * w).sqrt()
    }
}

fn m_from_w(curve: &SpectralCurve, z: C64, w: [C64; 3]) -> ModelMatrix {
    let cc = curve.c;
    let c3 = 3.0 * cc * cc;
    // rows 2 and 3 carry a factor c so that M(∞) = I for every c
    let s = cc * std::f64::consts::FRAC_1_SQRT_2;
    let mut m = M3::zero();
    for (k, &wk) in w.iter().enumerate() {
        let den = wk * root_on_sheet(wk, c3, k);
        m.0[0][k] = (wk * wk - cc * cc) / den;
        m.0[1][k] = -C64::i() * s * (wk + cc) / den;
        m.0[2][k] = -C64::i() * s * (wk - cc) / den;
    }
    ModelMatrix { z, entries: m }
}

/// M(z) for z off the cut [−z*, z*].
pub fn model_m(curve: &SpectralCurve, z: C64) -> Result<ModelMatrix> {
    if z.im == 0.0 && z.re.abs() <= curve.z_star {
        return Err(Error::Ambiguity(format!("z = {z} lies on [−z*, z*]")));
    }
    model_m_side(curve, z, Side::Plus)
}

/// M(z), or its boundary value M±(x) on the real axis.
pub fn model_m_side(curve: &SpectralCurve, z: C64, side: Side) -> Result<ModelMatrix> {
    let bv = curve.w_branches_side(z, side)?;
    Ok(m_from_w(curve, z, bv.w))
}

/// Jump of M on (0, z*) and (−z*, 0).
pub fn model_jump(x: f64) -> [[i32; 3]; 3] {
    if x > 0.0 {
        [[0, 1, 0], [-1, 0, 0], [0, 0, 1]]
    } else {
        [[0, 0, 1], [0, 1, 0], [-1, 0, 0]]
    }
}

/// ‖M₊ − M₋ j_M‖ at a point of the cut.
pub fn model_jump_defect(curve: &SpectralCurve, x: f64) -> Result<f64> {
    let p = model_m_side(curve, c(x, 0.0), Side::Plus)?.entries;
    let m = model_m_side(curve, c(x, 0.0), Side::Minus)?.entries;
    Ok((p - m * M3::from_ints(model_jump(x))).norm())
}

fn omega_block(upper: bool) -> M3 {
    let (w, w2, one) = (OMEGA, OMEGA * OMEGA, c(1.0, 0.0));
    if upper {
        M3([[-w, w2, one], [-one, one, one], [-w2, w, one]])
    } else {
        M3([[w2, w, one], [one, one, one], [w, w2, one]])
    }
}

/// K(ζ) = diag(ζ^{−1/3}, 1, ζ^{1/3})·Ω±, with Ω chosen by the half-plane.
pub fn k_matrix(zeta: C64) -> Result<M3> {
    if zeta.im == 0.0 {
        return Err(Error::Ambiguity(format!("ζ = {zeta} is real; use k_matrix_side")));
    }
    Ok(k_matrix_side(zeta, Side::Plus))
}

/// K on either side; for real ζ the side picks the boundary value.
pub fn k_matrix_side(zeta: C64, side: Side) -> M3 {
    let upper = zeta.im > 0.0 || (zeta.im == 0.0 && side == Side::Plus);
    let z = if zeta.im == 0.0 { c(zeta.re, if upper { 0.0 } else { -0.0 }) } else { zeta };
    let z13 = z.powf(1.0 / 3.0);
    M3::diag([1.0 / z13, c(1.0, 0.0), z13]) * omega_block(upper)
}

/// K₋⁻¹K₊ on the real ζ-axis.
pub fn k_jump(zeta: f64) -> Result<M3> {
    let p = k_matrix_side(c(zeta, 0.0), Side::Plus);
    let m = k_matrix_side(c(zeta, 0.0), Side::Minus);
    Ok(m.inverse()? * p)
}

/// E(z) = −√(3/2π)·i·e^{−n b(z)²/6}·M(z)·K(ζ(z))⁻¹·diag(n^{1/4}, 1, n^{−1/4}).
pub fn prefactor_e(map: &LambdaMap, z: C64, n: usize) -> Result<M3> {
    prefactor_e_side(map, z, n, Side::Plus)
}

pub fn prefactor_e_side(map: &LambdaMap, z: C64, n: usize, side: Side) -> Result<M3> {
    let nf = n as f64;
    let zeta = map.zeta_map(z)?;
    let b = map.b_map(z)?;
    let m = model_m_side(&map.curve, z, side)?.entries;
    let k = k_matrix_side(zeta, side);
    let q = nf.powf(0.25);
    let pref = -C64::i() * (3.0 / (2.0 * PI)).sqrt() * (-nf * b * b / 6.0).exp();
    Ok((m * k.inverse()? * M3::diag([c(q, 0.0), c(1.0, 0.0), c(1.0 / q, 0.0)])).scale(pref))
}

/// θ_σ(k)(ζ(z); b(z)) + λ_k(z) − z²/6 for k = 1, 2, 3, with σ the identity in
/// the upper half-plane and the swap (1 2) in the lower one.
pub fn theta_lambda_residual(map: &LambdaMap, z: C64) -> Result<[C64; 3]> {
    if z.im == 0.0 {
        return Err(Error::Ambiguity("θ/λ residual needs Im z ≠ 0".into()));
    }
    let zeta = map.zeta_map(z)?;
    let b = map.b_map(z)?;
    let perm = if z.im > 0.0 { [1, 2, 3] } else { [2, 1, 3] };
    let mut out = [c(0.0, 0.0); 3];
    for k in 1..=3 {
        out[k - 1] = theta(zeta, b, perm[k - 1]) + map.lambda(z, k)? - z * z / 6.0;
    }
    Ok(out)
}

/// ‖Q(z) M(z)⁻¹ − I‖ at one point. Φ is evaluated with its exponential
/// columns removed; the remaining factor e^{n(θ + λ − z²/6)} is exponentiated
/// from the residual, which is 0 or ±πi.
fn match_point(map: &LambdaMap, z: C64, n: usize, warnings: &mut Vec<String>) -> Result<f64> {
    let nf = n as f64;
    let zeta = map.zeta_map(z)?;
    let b = map.b_map(z)?;
    let (zn, bn) = (zeta * nf.powf(0.75), b * nf.sqrt());
    if !in_validated_box(zn, bn) {
        warnings.push(format!("Φ argument ({zn}, {bn}) outside the validated box"));
    }
    let f = phi(zn, bn)?.entries;
    let perm = if z.im > 0.0 { [1, 2, 3] } else { [2, 1, 3] };
    let strip = M3::diag(perm.map(|k| (-theta(zn, bn, k)).exp()));
    let res = theta_lambda_residual(map, z)?;
    let rest = M3::diag(res.map(|r| (r * nf).exp()));
    let e = prefactor_e(map, z, n)?;
    let m = model_m(&map.curve, z)?.entries;
    let q = e * (f * strip) * rest;
    Ok((q * m.inverse()? - M3::identity()).norm())
}

/// Sup of ‖Q M⁻¹ − I‖ over `samples` points of |z| = n^{−1/4}, a = 1 + b/(2√n).
pub fn matching_defect(b: f64, n: usize, samples: usize) -> Result<MatchReport> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Argument(format!("n must be even and positive, got {n}")));
    }
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let nf = n as f64;
    let curve = make_curve(1.0 + b / (2.0 * nf.sqrt()))?;
    let map = LambdaMap::new(curve);
    let radius = nf.powf(-0.25);
    let per: Vec<(f64, Vec<String>)> = (0..samples)
        .into_par_iter()
        .map(|j| {
            // half-step offset keeps samples off the real axis and the lens rays
            let ang = 2.0 * PI * (j as f64 + 0.5) / samples as f64 + 0.01;
            let mut w = vec![];
            match_point(&map, C64::from_polar(radius, ang), n, &mut w).map(|d| (d, w))
        })
        .collect::<Result<_>>()?;
    let mut warnings: Vec<String> = per.iter().flat_map(|p| p.1.clone()).collect();
    warnings.dedup();
    Ok(MatchReport {
        n,
        b,
        radius,
        sup_defect: per.iter().map(|p| p.0).fold(0.0, f64::max),
        samples,
        warnings,
    })
}

/// The jumps of the unscaled outer problem on the real line and the lens lips.
pub const LENS_JUMPS: [(&str, [[i32; 3]; 3]); 6] = [
    ("(0,z*)", [[0, 1, 0], [-1, 0, 0], [0, 0, 1]]),
    ("(-z*,0)", [[0, 0, 1], [0, 1, 0], [-1, 0, 0]]),
    ("upper lip, right lens", [[1, 0, 0], [1, 1, 1], [0, 0, 1]]),
    ("upper lip, left lens", [[1, 0, 0], [0, 1, 0], [1, 1, 1]]),
    ("lower lip, left lens", [[1, 0, 0], [0, 1, 0], [1, -1, 1]]),
    ("lower lip, right lens", [[1, 0, 0], [1, 1, -1], [0, 0, 1]]),
];

/// Index into the Φ ray table for each entry of [`LENS_JUMPS`].
pub const LENS_TO_RAY: [usize; 6] = [0, 3, 1, 2, 4, 5];

#[derive(Debug, Clone, Serialize)]
pub struct JumpPair {
    pub contour: &'static str,
    pub ray_angle: f64,
    pub matches: bool,
}

pub fn jump_identity_table() -> Vec<JumpPair> {
    LENS_JUMPS
        .iter()
        .zip(LENS_TO_RAY)
        .map(|(&(name, m), ray)| JumpPair {
            contour: name,
            ray_angle: crate::pearcey_fn::RAYS[ray].0,
            matches: m == jump_matrix(ray),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_tends_to_identity() {
        let curve = make_curve(1.0).unwrap();
        let d: Vec<f64> = [50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&r| (model_m(&curve, c(r, 0.0)).unwrap().entries - M3::identity()).norm())
            .collect();
        assert!(d[1] <= 0.05);
        let slope = (d[3] / d[0]).ln() / 8f64.ln();
        assert!((slope + 1.0).abs() < 0.1, "{slope}");
    }

    #[test]
    fn m_jumps_det_and_transpose() {
        for a in [0.5, 1.0, 2.0] {
            let curve = make_curve(a).unwrap();
            for i in 1..=10 {
                let x = curve.z_star * i as f64 / 11.0;
                assert!(model_jump_defect(&curve, x).unwrap() < 1e-9);
                assert!(model_jump_defect(&curve, -x).unwrap() < 1e-9);
            }
            for z in [c(0.0, 2.0), c(-1.0, 1.0), c(5.0, 0.0), c(0.3, -0.01)] {
                let m = model_m(&curve, z).unwrap().entries;
                assert!((m.det() - 1.0).norm() < 1e-10, "a={a} z={z} det={}", m.det());
                assert!((m.inverse().unwrap() - m.transpose()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn cofactor_growth_at_origin() {
        let curve = make_curve(1.0).unwrap();
        for j in 0..8 {
            let ang = PI * (j as f64 + 0.5) / 4.0;
            for e in [-6.0, -4.0, -2.0] {
                let r = 10f64.powf(e);
                let m = model_m(&curve, C64::from_polar(r, ang)).unwrap().entries;
                assert!(m.norm() * r.powf(1.0 / 3.0) <= 10.0);
                assert!(m.inverse().unwrap().norm() * r.powf(1.0 / 3.0) <= 10.0);
            }
        }
    }

    #[test]
    fn k_jumps() {
        let j = k_jump(0.7).unwrap();
        assert!((j - M3::from_ints([[0, 1, 0], [-1, 0, 0], [0, 0, 1]])).norm() < 1e-12);
        let j = k_jump(-0.7).unwrap();
        assert!((j - M3::from_ints([[0, 0, 1], [0, 1, 0], [-1, 0, 0]])).norm() < 1e-12);
        let du = k_matrix(c(0.3, 0.8)).unwrap().det();
        assert!((k_matrix(c(-2.0, 0.1)).unwrap().det() - du).norm() < 1e-10);
        let dl = k_matrix(c(0.3, -0.8)).unwrap().det();
        assert!((k_matrix(c(-2.0, -0.1)).unwrap().det() - dl).norm() < 1e-10);
    }

    #[test]
    fn e_is_analytic_across_the_axis() {
        let map = LambdaMap::new(make_curve(1.0).unwrap());
        for x in [0.02, -0.02] {
            let up = prefactor_e(&map, c(x, 1e-8), 16).unwrap();
            let dn = prefactor_e(&map, c(x, -1e-8), 16).unwrap();
            assert!((up - dn).norm() / up.norm() < 1e-6);
        }
    }

    #[test]
    fn e_bounded_at_origin() {
        let map = LambdaMap::new(make_curve(1.0).unwrap());
        for j in 0..8 {
            let ang = PI * (j as f64 + 0.5) / 4.0;
            let v: Vec<f64> =
                [1e-2, 1e-4, 1e-6].iter().map(|&r| prefactor_e(&map, C64::from_polar(r, ang), 16).unwrap().norm()).collect();
            assert!(v[2] < 2.0 * v[0], "{v:?}");
        }
    }

    #[test]
    fn theta_lambda_cancel() {
        let map = LambdaMap::new(make_curve(1.0).unwrap());
        for j in 0..6 {
            let ang = PI * (j as f64 + 0.5) / 6.0;
            let up = theta_lambda_residual(&map, C64::from_polar(0.01, ang)).unwrap();
            assert!(up.iter().all(|r| r.norm() < 1e-9), "{up:?}");
            let dn = theta_lambda_residual(&map, C64::from_polar(0.01, -ang)).unwrap();
            for (r, t) in dn.iter().zip([c(0.0, PI), c(0.0, -PI), c(0.0, 0.0)]) {
                assert!((r - t).norm() < 1e-9, "{dn:?}");
            }
        }
    }

    #[test]
    fn jump_table_matches() {
        assert!(jump_identity_table().iter().all(|p| p.matches));
    }
}
