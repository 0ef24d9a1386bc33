//! The modified Pastur curve z = w³/(w² − c²), its three labelled branches,
//! the limiting eigenvalue density and the local series at z = 0.

use crate::cubic::{continue_roots, cubic_roots};
use crate::quad::gk_adaptive;
use crate::series::{axpy, mul, shift, LocalSeries, SeriesKind};
use crate::{Error, Result, C64};
use serde::Serialize;

/// Tolerance for rejecting evaluation at a branch point.
pub const BRANCH_POINT_TOL: f64 = 1e-12;

pub const OMEGA: C64 = C64 { re: -0.5, im: 0.866_025_403_784_438_6 };

/// Boundary side for points on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Limit from the upper half-plane.
    Plus,
    /// Limit from the lower half-plane.
    Minus,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralCurve {
    pub a: f64,
    pub c: f64,
    pub p: f64,
    pub z_star: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BranchValues {
    pub z: C64,
    pub w: [C64; 3],
    pub xi: [C64; 3],
    pub sheet_tags: [u8; 3],
}

pub fn make_curve(a: f64) -> Result<SpectralCurve> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("source strength must be positive and finite, got {a}")));
    }
    let c = (a + (a * a + 8.0).sqrt()) / 4.0;
    Ok(SpectralCurve { a, c, p: c * c - 1.0, z_star: 1.5 * 3f64.sqrt() * c })
}

fn side_of(z: C64, side: Side) -> f64 {
    if z.im > 0.0 || (z.im == 0.0 && side == Side::Plus) {
        1.0
    } else {
        -1.0
    }
}

impl SpectralCurve {
    fn anchor_height(&self) -> f64 {
        10.0 * (3.0 * self.c).max(1.0)
    }

    fn w_coeffs(&self, z: C64) -> (C64, C64, C64) {
        (-z, C64::new(0.0, 0.0), z * self.c * self.c)
    }

    fn check_branch_point(&self, z: C64) -> Result<()> {
        for bp in [0.0, self.z_star, -self.z_star] {
            if (z - bp).norm() <= BRANCH_POINT_TOL {
                return Err(Error::BranchPoint(format!("{z}")));
            }
        }
        Ok(())
    }

    /// Labelled w-roots at a point far from the origin on the chosen side.
    fn anchor(&self, z: C64, s: f64) -> (C64, [C64; 3]) {
        let za = C64::new(z.re, s * self.anchor_height());
        let (b, c, d) = self.w_coeffs(za);
        let mut r = cubic_roots(b, c, d);
        r.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
        let (w2, w3) = if r[1].re > r[2].re { (r[1], r[2]) } else { (r[2], r[1]) };
        (za, [r[0], w2, w3])
    }

    fn pack(&self, z: C64, w: [C64; 3]) -> BranchValues {
        let xi = w.map(|wk| wk + self.p / wk);
        BranchValues { z, w, xi, sheet_tags: [1, 2, 3] }
    }

    /// Branches at z. Real z is read as the boundary value from above.
    pub fn w_branches(&self, z: C64) -> Result<BranchValues> {
        self.w_branches_side(z, Side::Plus)
    }

    /// Branches at z; `side` only matters for real z.
    pub fn w_branches_side(&self, z: C64, side: Side) -> Result<BranchValues> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain("non-finite z".into()));
        }
        self.check_branch_point(z)?;
        let s = side_of(z, side);
        let (za, w0) = self.anchor(z, s);
        let w = continue_roots(|u| self.w_coeffs(u), za, w0, z)?;
        Ok(self.pack(z, w))
    }

    pub fn xi_branches(&self, z: C64) -> Result<BranchValues> {
        self.w_branches(z)
    }

    pub fn xi_branches_side(&self, z: C64, side: Side) -> Result<BranchValues> {
        self.w_branches_side(z, side)
    }

    /// Continue known branch values along the straight segment to `z`.
    /// The segment must not cross a cut.
    pub fn continue_from(&self, prev: &BranchValues, z: C64) -> Result<BranchValues> {
        self.check_branch_point(z)?;
        let w = continue_roots(|u| self.w_coeffs(u), prev.z, prev.w, z)?;
        Ok(self.pack(z, w))
    }

    /// Left-hand side of the modified Pastur equation.
    pub fn modified_pastur_residual(&self, z: C64, xi: C64) -> C64 {
        let a2 = self.a * self.a;
        let c2 = self.c * self.c;
        xi * xi * xi - z * xi * xi + (1.0 - a2) * xi + a2 * z + (c2 - 1.0).powi(3) / (c2 * z)
    }

    /// Scale of the terms in the modified Pastur equation, for relative residuals.
    pub fn modified_pastur_scale(&self, z: C64, xi: C64) -> f64 {
        let a2 = self.a * self.a;
        let c2 = self.c * self.c;
        (xi * xi * xi).norm()
            + (z * xi * xi).norm()
            + ((1.0 - a2) * xi).norm()
            + (a2 * z).norm()
            + ((c2 - 1.0).powi(3) / (c2 * z)).norm()
    }

    fn pastur_coeffs(&self, z: C64) -> (C64, C64, C64) {
        let a2 = self.a * self.a;
        (-z, C64::new(1.0 - a2, 0.0), z * a2)
    }

    /// Branch ξ₁ of the unmodified Pastur equation ξ³ − zξ² + (1−a²)ξ + a²z = 0
    /// at z (boundary value from above for real z).
    pub fn pastur_xi1(&self, z: C64) -> Result<C64> {
        let s = side_of(z, Side::Plus);
        let za = C64::new(z.re, s * self.anchor_height());
        let (b, c, d) = self.pastur_coeffs(za);
        let mut r = cubic_roots(b, c, d);
        r.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
        let out = continue_roots(|u| self.pastur_coeffs(u), za, r, z)?;
        Ok(out[0])
    }

    /// Limiting mean eigenvalue density (1/π) Im ξ₁₊(x) of the ensemble.
    pub fn density(&self, x: f64) -> Result<f64> {
        let z = C64::new(x, 0.0);
        let v = match self.pastur_xi1(z) {
            Ok(v) => v.im,
            // a branch point of the unmodified curve: density vanishes there
            Err(Error::Continuation(_)) => 0.0,
            Err(e) => return Err(e),
        };
        Ok(clamp_density(v))
    }

    /// (1/π) Im ξ₁₊(x) built from the modified branches. Coincides with
    /// [`density`](Self::density) at a = 1 and is signed otherwise.
    pub fn modified_density(&self, x: f64) -> Result<f64> {
        let b = self.w_branches_side(C64::new(x, 0.0), Side::Plus)?;
        Ok(clamp_density(b.xi[0].im))
    }

    /// Support of the limiting density: one interval for a < 1, two for a ≥ 1.
    pub fn support(&self) -> Vec<(f64, f64)> {
        let a2 = self.a * self.a;
        let root = (1.0 + 8.0 * a2).sqrt();
        let zmap = |u: f64| u * (u * u + 1.0 - a2) / (u * u - a2);
        let z1 = zmap((((1.0 + 2.0 * a2) + root) / 2.0).sqrt());
        let inner = ((1.0 + 2.0 * a2) - root) / 2.0;
        if inner <= 0.0 || self.a < 1.0 {
            vec![(-z1, z1)]
        } else {
            let z2 = zmap(inner.sqrt()).abs();
            vec![(-z1, -z2), (z2, z1)]
        }
    }

    /// ∫ρ over its support with smoothing substitution at the endpoints.
    pub fn density_mass(&self, tol: f64) -> Result<f64> {
        let mut total = 0.0;
        for (lo, hi) in self.support() {
            let pieces: Vec<(f64, f64)> = if lo < 0.0 && hi > 0.0 { vec![(lo, 0.0), (0.0, hi)] } else { vec![(lo, hi)] };
            for (l, h) in pieces {
                let len = h - l;
                let r = gk_adaptive(
                    |u| {
                        let x = l + len * (3.0 * u * u - 2.0 * u * u * u);
                        let j = len * 6.0 * u * (1.0 - u);
                        if j == 0.0 {
                            return Ok(C64::new(0.0, 0.0));
                        }
                        Ok(C64::new(self.density(x)? * j, 0.0))
                    },
                    0.0,
                    1.0,
                    tol,
                    0.0,
                    2000,
                )?;
                total += r.value.re;
            }
        }
        Ok(total)
    }

    /// f₁, g₁ with w₃(z) = −z^{1/3}f₁(z) − z^{5/3}g₁(z) + z/3.
    pub fn local_series_f1g1(&self, order: usize) -> Result<(LocalSeries, LocalSeries)> {
        if order < 2 {
            return Err(Error::Argument("series order must be at least 2".into()));
        }
        let (f, g) = f1g1_coeffs(self.c, order);
        Ok((LocalSeries::new(f, SeriesKind::F1, self.a), LocalSeries::new(g, SeriesKind::G1, self.a)))
    }

    pub fn local_series_f2g2(&self, order: usize) -> Result<(LocalSeries, LocalSeries)> {
        if order < 2 {
            return Err(Error::Argument("series order must be at least 2".into()));
        }
        let (f2, g2) = f2g2_coeffs(self.c, order);
        Ok((LocalSeries::new(f2, SeriesKind::F2, self.a), LocalSeries::new(g2, SeriesKind::G2, self.a)))
    }

    /// ξ_k near 0 from the f₂, g₂ expansion (k = 1, 2, 3).
    pub fn xi_from_series(&self, f2: &LocalSeries, g2: &LocalSeries, z: C64, k: usize) -> C64 {
        let (om1, om2) = omega_pair(z, k);
        let z13 = z.powf(1.0 / 3.0);
        -om2 * z13 * f2.eval(z) - om1 * g2.eval(z) / z13 + z / 3.0
    }
}

/// (ω^k, ω^{2k}) for Im z > 0, swapped for Im z < 0.
pub(crate) fn omega_pair(z: C64, k: usize) -> (C64, C64) {
    let a = OMEGA.powi(k as i32);
    let b = OMEGA.powi(2 * k as i32);
    if z.im >= 0.0 {
        (a, b)
    } else {
        (b, a)
    }
}

fn clamp_density(im: f64) -> f64 {
    if im <= 1e-12 {
        0.0
    } else {
        im / std::f64::consts::PI
    }
}

/// Coefficients (in z) of f₁ and g₁ to `order` terms.
pub(crate) fn f1g1_coeffs(c: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    // y(x) solving y³ − x²y² + c² = 0, y(0) = −c^{2/3}
    let deg = 3 * order + 5;
    let mut y = vec![0.0; deg];
    y[0] = -c.powf(2.0 / 3.0);
    let y0sq = y[0] * y[0];
    for m in 1..deg {
        let y2 = mul(&y, &y, m + 1);
        let y3 = mul(&y2, &y, m + 1);
        let x2y2 = if m >= 2 { y2[m - 2] } else { 0.0 };
        let rest = y3[m] - x2y2;
        y[m] = -rest / (3.0 * y0sq);
    }
    let f = (0..order).map(|j| -y[3 * j]).collect();
    let g = (0..order).map(|j| -y[3 * j + 4]).collect();
    (f, g)
}

pub(crate) fn f2g2_coeffs(c: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (f1, g1) = f1g1_coeffs(c, order);
    let k = (c * c - 1.0) / (3.0 * c * c);
    let g1sq = mul(&g1, &g1, order);
    let f1sq = mul(&f1, &f1, order);
    let z2g1sq = shift(&g1sq, 2, order);
    let z2g1 = shift(&g1, 2, order);
    let f2 = axpy(&f1, k, &axpy(&f1, 3.0, &z2g1sq));
    let g2 = axpy(&z2g1, k, &axpy(&z2g1, 3.0, &f1sq));
    (f2, g2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_constants() {
        let c = make_curve(1.0).unwrap();
        assert!((c.c - 1.0).abs() < 1e-15 && c.p.abs() < 1e-15);
        assert!((c.z_star - 2.598076211353316).abs() < 1e-12);
        let c2 = make_curve(2.0).unwrap();
        assert!((2.0 * c2.c - 1.0 / c2.c - 2.0).abs() < 1e-14);
        assert!(make_curve(0.0).is_err());
        assert!(make_curve(f64::NAN).is_err());
    }

    #[test]
    fn asymptotic_labels() {
        let c = make_curve(1.0).unwrap();
        let b = c.w_branches(C64::new(10.0, 0.0)).unwrap();
        assert!((b.w[0] - 9.9).norm() < 1e-2);
        let b = c.w_branches(C64::new(100.0, 0.0)).unwrap();
        assert!((b.w[1] - (1.0 + 1.0 / 200.0)).norm() < 1e-3);
        let c2 = make_curve(2.0).unwrap();
        let b = c2.xi_branches(C64::new(100.0, 0.0)).unwrap();
        assert!((b.xi[1] - (2.0 + 1.0 / 200.0)).norm() < 1e-3);
        assert!(c.w_branches(C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn f1g1_relations() {
        for a in [0.5, 1.0, 2.0] {
            let c = make_curve(a).unwrap();
            let (f1, g1) = c.local_series_f1g1(10).unwrap();
            assert!((f1.at0() - c.c.powf(2.0 / 3.0)).abs() < 1e-14);
            let prod = mul(&f1.coeffs, &g1.coeffs, 10);
            assert!((prod[0] - 1.0 / 9.0).abs() < 1e-13);
            for v in &prod[1..] {
                assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn series_matches_branches() {
        let c = make_curve(1.5).unwrap();
        let (f2, g2) = c.local_series_f2g2(24).unwrap();
        for z in [C64::new(0.06, 0.08), C64::new(-0.05, -0.08), C64::new(0.0, 0.1), C64::new(-0.1, 0.01)] {
            let b = c.xi_branches(z).unwrap();
            for k in 0..3 {
                let s = c.xi_from_series(&f2, &g2, z, k + 1);
                assert!((s - b.xi[k]).norm() < 1e-8 * (1.0 + b.xi[k].norm()), "z={z} k={k}");
            }
        }
    }

    #[test]
    fn density_basics() {
        let c = make_curve(1.0).unwrap();
        assert_eq!(c.density(0.0).unwrap(), 0.0);
        let x = 0.3;
        assert!((c.density(x).unwrap() - c.density(-x).unwrap()).abs() < 1e-10);
        assert!((c.density(x).unwrap() - c.modified_density(x).unwrap()).abs() < 1e-10);
    }
}
