//! λ-functions (anti-derivatives of the ξ-branches), their constants at
//! infinity and jumps, the local maps ζ(z) and b(z), and critical
//! trajectories Re λ_j = Re λ_k.

use crate::cubic::continue_roots;
use crate::quad::{gl, integrate_segment};
use crate::series::{LocalSeries, SeriesKind};
use crate::spectral_surface::{f2g2_coeffs, omega_pair, BranchValues, Side, SpectralCurve};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::PI;

/// Starting point of the integration paths, where the local series is exact
/// to machine precision.
const Z_START: C64 = C64 { re: 0.0, im: 0.04 };
/// Below this modulus λ is taken from the local series (upper side only).
const SERIES_RADIUS: f64 = 0.05;
/// Internal series order for f₃, g₃, ζ and b.
const INTERNAL_ORDER: usize = 40;
const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-14;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

thread_local! {
    /// Last off-axis branch triple evaluated on this thread, keyed by c.
    static LAST_BRANCHES: RefCell<Option<(f64, BranchValues)>> = const { RefCell::new(None) };
}

fn half_plane(z: C64, side: Side) -> f64 {
    if z.im > 0.0 || (z.im == 0.0 && side == Side::Plus) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LambdaSide {
    Plus,
    Minus,
    OffAxis,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambdaValue {
    pub z: C64,
    pub k: usize,
    pub value: C64,
    pub side: LambdaSide,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MapValue {
    pub z: C64,
    pub zeta: C64,
    pub b_local: C64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrajectoryKind {
    Solid,
    Dashed,
    DashDot,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub pair: (usize, usize),
    pub points: Vec<C64>,
    /// |Re(λ_j − λ_k)| at each point.
    pub defects: Vec<f64>,
    pub kind: TrajectoryKind,
    pub closed: bool,
    /// Set when the corrector failed before a regular stopping condition.
    pub warning: bool,
}

/// Residuals of the jump relations on the real interval containing x.
#[derive(Debug, Clone, Serialize)]
pub struct JumpDefects {
    pub x: f64,
    pub interval: &'static str,
    pub residuals: Vec<(String, C64)>,
}

impl JumpDefects {
    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().map(|r| r.1.norm()).fold(0.0, f64::max)
    }
}

/// A curve together with the local series needed near z = 0.
#[derive(Debug, Clone)]
pub struct LambdaMap {
    pub curve: SpectralCurve,
    pub f2: LocalSeries,
    pub g2: LocalSeries,
    pub f3: LocalSeries,
    pub g3: LocalSeries,
}

/// f₃, g₃ from f₂, g₂ by termwise integration.
pub fn local_series_f3g3(curve: &SpectralCurve, order: usize) -> Result<(LocalSeries, LocalSeries)> {
    if order < 2 {
        return Err(Error::Argument("series order must be at least 2".into()));
    }
    let (f2, g2) = f2g2_coeffs(curve.c, order);
    Ok(f3g3_from(&f2, &g2, curve.a))
}

fn f3g3_from(f2: &[f64], g2: &[f64], a: f64) -> (LocalSeries, LocalSeries) {
    let f3 = f2.iter().enumerate().map(|(j, v)| 4.0 * v / (3.0 * j as f64 + 4.0)).collect();
    let g3 = g2.iter().enumerate().map(|(j, v)| 6.0 * v / (3.0 * j as f64 + 2.0)).collect();
    (LocalSeries::new(f3, SeriesKind::F3, a), LocalSeries::new(g3, SeriesKind::G3, a))
}

impl LambdaMap {
    pub fn new(curve: SpectralCurve) -> Self {
        let (f2c, g2c) = f2g2_coeffs(curve.c, INTERNAL_ORDER);
        let (f3, g3) = f3g3_from(&f2c, &g2c, curve.a);
        Self {
            curve,
            f2: LocalSeries::new(f2c, SeriesKind::F2, curve.a),
            g2: LocalSeries::new(g2c, SeriesKind::G2, curve.a),
            f3,
            g3,
        }
    }

    /// Radius inside which the internal series are trusted: the branch
    /// points ±z* bound the convergence disk.
    pub fn map_radius(&self) -> f64 {
        0.5 * self.curve.z_star
    }

    /// Upper-side local formula −¾ω^{2k}z^{4/3}f₃ − ½ω^k z^{2/3}g₃ + z²/6, or
    /// the lower-side one without the constant λ_{k−}(0).
    pub fn lambda_series(&self, z: C64, k: usize) -> C64 {
        let (om1, om2) = omega_pair(z, k);
        let z13 = z.powf(1.0 / 3.0);
        let z23 = z13 * z13;
        -0.75 * om2 * z23 * z23 * self.f3.eval(z) - 0.5 * om1 * z23 * self.g3.eval(z) + z * z / 6.0
    }

    /// ξ_k at z. Quadrature nodes arrive in small hops, so the branches are
    /// continued from the previous off-axis point when it lies in the same
    /// open half-plane (no cut in between), and from the far anchor otherwise.
    fn xi(&self, z: C64, k: usize, side: Side) -> Result<C64> {
        let h = half_plane(z, side);
        let prev = LAST_BRANCHES.with(|l| {
            l.borrow().as_ref().filter(|(cc, b)| *cc == self.curve.c && b.z.im * h > 0.0 && (b.z - z).norm() < 0.5).map(|p| p.1)
        });
        let bv = match prev {
            Some(p) => self.curve.continue_from(&p, z).or_else(|_| self.curve.xi_branches_side(z, side))?,
            None => self.curve.xi_branches_side(z, side)?,
        };
        if z.im != 0.0 {
            LAST_BRANCHES.with(|l| *l.borrow_mut() = Some((self.curve.c, bv)));
        }
        Ok(bv.xi[k - 1])
    }

    fn integrate_path(&self, nodes: &[C64], k: usize, side: Side) -> Result<C64> {
        let mut total = c(0.0, 0.0);
        for w in nodes.windows(2) {
            if (w[1] - w[0]).norm() == 0.0 {
                continue;
            }
            total += integrate_segment(|s| self.xi(s, k, side), w[0], w[1], QUAD_ABS, QUAD_REL)?.value;
        }
        Ok(total)
    }

    /// Integration nodes from `Z_START` to z for branch k.
    fn path(&self, z: C64, k: usize, side: Side) -> Vec<C64> {
        let upper = z.im > 0.0 || (z.im == 0.0 && side == Side::Plus);
        if upper {
            return vec![Z_START, z];
        }
        let pivot = if k == 3 { 0.04 } else { self.curve.z_star + 1.0 };
        if z.im == 0.0 && z.re > pivot {
            return vec![Z_START, c(pivot, 0.0), z];
        }
        let depth = 0.5f64;
        vec![Z_START, c(pivot, 0.0), c(pivot, -depth), c(z.re, -depth), z]
    }

    /// λ_k(z) by integration along an explicit path, without the series
    /// shortcut at the end point. `side` only matters for real z.
    pub fn lambda_by_path(&self, z: C64, k: usize, side: Side) -> Result<C64> {
        check_k(k)?;
        let start = self.lambda_series(Z_START, k);
        let nodes = self.path(z, k, side);
        Ok(start + self.integrate_path(&nodes, k, side)?)
    }

    /// λ_k(z) off the cut of branch k.
    pub fn lambda(&self, z: C64, k: usize) -> Result<C64> {
        check_k(k)?;
        if z.im == 0.0 {
            let on_cut = if k == 3 { z.re <= 0.0 } else { z.re <= self.curve.z_star };
            if on_cut {
                return Err(Error::Ambiguity(format!("z = {z} lies on the cut of λ_{k}")));
            }
        }
        self.lambda_side(z, k, Side::Plus)
    }

    /// Boundary value λ_{k±}(x) on the real axis (or plain value off it).
    pub fn lambda_side(&self, z: C64, k: usize, side: Side) -> Result<C64> {
        check_k(k)?;
        let upper = z.im > 0.0 || (z.im == 0.0 && side == Side::Plus);
        if upper && z.norm() < SERIES_RADIUS {
            if z.norm() == 0.0 {
                return Ok(c(0.0, 0.0));
            }
            return Ok(self.lambda_series(z, k));
        }
        self.lambda_by_path(z, k, side)
    }

    pub fn lambda_value(&self, z: C64, k: usize, side: Side) -> Result<LambdaValue> {
        let s = if z.im != 0.0 {
            LambdaSide::OffAxis
        } else if side == Side::Plus {
            LambdaSide::Plus
        } else {
            LambdaSide::Minus
        };
        Ok(LambdaValue { z, k, value: self.lambda_side(z, k, side)?, side: s })
    }

    fn leading(&self, z: C64, k: usize) -> C64 {
        let a = self.curve.a;
        match k {
            1 => z * z / 2.0 - z.ln(),
            2 => a * z + 0.5 * z.ln(),
            _ => -a * z + 0.5 * z.ln(),
        }
    }

    /// λ_k(z) minus its growing terms at infinity.
    pub fn lambda_remainder(&self, z: C64, k: usize) -> Result<C64> {
        Ok(self.lambda(z, k)? - self.leading(z, k))
    }

    /// ℓ_k from one ray: Richardson in h = 1/|z| over radii 50, 100, 200, 400,
    /// eliminating the h, h² and h³ terms of the remainder.
    pub fn lambda_constants_on_ray(&self, arg: f64) -> Result<[C64; 3]> {
        let mut out = [c(0.0, 0.0); 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut t: Vec<C64> = [50.0, 100.0, 200.0, 400.0]
                .iter()
                .map(|&r| self.lambda_remainder(C64::from_polar(r, arg), k + 1))
                .collect::<Result<_>>()?;
            for order in 1..4 {
                let f = 2f64.powi(order);
                t = t.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
            }
            *o = t[0];
        }
        Ok(out)
    }

    /// (ℓ₁, ℓ₂, ℓ₃), extrapolated along arg z = π/4 and checked against π/3.
    pub fn lambda_constants(&self) -> Result<[C64; 3]> {
        let a = self.lambda_constants_on_ray(PI / 4.0)?;
        let b = self.lambda_constants_on_ray(PI / 3.0)?;
        let spread = (0..3).map(|k| (a[k] - b[k]).norm()).fold(0.0, f64::max);
        if spread > 1e-6 {
            return Err(Error::Accuracy(format!("ℓ_k ray extrapolations differ by {spread:e}")));
        }
        Ok(a)
    }

    /// Residuals of the jump relations of the λ-functions at real x.
    pub fn jump_defects(&self, x: f64) -> Result<JumpDefects> {
        let z = c(x, 0.0);
        let zs = self.curve.z_star;
        if x == 0.0 || (x.abs() - zs).abs() < 1e-12 {
            return Err(Error::BranchPoint(format!("{x}")));
        }
        if x > zs {
            return Ok(JumpDefects { x, interval: "(z*,inf)", residuals: vec![] });
        }
        let mut p = [c(0.0, 0.0); 3];
        let mut m = [c(0.0, 0.0); 3];
        for k in 1..=3 {
            p[k - 1] = self.lambda_side(z, k, Side::Plus)?;
            m[k - 1] = self.lambda_side(z, k, Side::Minus)?;
        }
        let ipi = c(0.0, PI);
        let (interval, residuals) = if x > 0.0 {
            (
                "(0,z*)",
                vec![
                    ("l1+ - l2- - pi i".to_string(), p[0] - m[1] - ipi),
                    ("l2+ - l1- + pi i".to_string(), p[1] - m[0] + ipi),
                    ("l3+ - l3-".to_string(), p[2] - m[2]),
                ],
            )
        } else if x > -zs {
            (
                "(-z*,0)",
                vec![
                    ("l1+ - l3-".to_string(), p[0] - m[2]),
                    ("l2+ - l2- - pi i".to_string(), p[1] - m[1] - ipi),
                    ("l3+ - l1- + pi i".to_string(), p[2] - m[0] + ipi),
                ],
            )
        } else {
            (
                "(-inf,-z*)",
                vec![
                    ("l1+ - l1- + 2 pi i".to_string(), p[0] - m[0] + 2.0 * ipi),
                    ("l2+ - l2- - pi i".to_string(), p[1] - m[1] - ipi),
                    ("l3+ - l3- - pi i".to_string(), p[2] - m[2] - ipi),
                ],
            )
        };
        Ok(JumpDefects { x, interval, residuals })
    }

    /// λ_{k−}(0) estimated from λ_k(−iε) minus the lower-side local terms.
    pub fn lambda_minus_at_zero(&self, k: usize, eps: f64) -> Result<C64> {
        let z = c(0.0, -eps);
        Ok(self.lambda_by_path(z, k, Side::Minus)? - self.lambda_series(z, k))
    }

    fn check_map_radius(&self, z: C64) -> Result<()> {
        if z.norm() >= self.map_radius() {
            return Err(Error::Domain(format!("|z| = {} beyond validated radius {}", z.norm(), self.map_radius())));
        }
        Ok(())
    }

    /// ζ(z) = z f₃(z)^{3/4}.
    pub fn zeta_map(&self, z: C64) -> Result<C64> {
        self.check_map_radius(z)?;
        Ok(z * self.f3.eval(z).powf(0.75))
    }

    /// b(z) = g₃(z) / f₃(z)^{1/2}.
    pub fn b_map(&self, z: C64) -> Result<C64> {
        self.check_map_radius(z)?;
        Ok(self.g3.eval(z) / self.f3.eval(z).sqrt())
    }

    pub fn map_value(&self, z: C64) -> Result<MapValue> {
        Ok(MapValue { z, zeta: self.zeta_map(z)?, b_local: self.b_map(z)?, a: self.curve.a })
    }

    /// Double zero of (ξ_j − ξ_k)² on the relevant axis, if any.
    pub fn find_quadratic_zero(&self, pair: (usize, usize)) -> Result<Option<C64>> {
        let zs = self.curve.z_star;
        match pair {
            (1, 2) | (1, 3) => {
                let sgn = if pair == (1, 2) { 1.0 } else { -1.0 };
                let f = |x: f64| -> Result<f64> { Ok(self.curve.xi_branches_side(c(sgn * x, 0.0), Side::Plus)?.xi[0].im) };
                // sample for a sign change of Im ξ₁₊ on (0, z*)
                let n = 400;
                let mut prev: Option<(f64, f64)> = None;
                for i in 1..n {
                    let x = zs * i as f64 / n as f64;
                    let v = f(x)?;
                    if let Some((xp, vp)) = prev {
                        if vp.signum() != v.signum() && vp.abs() > 1e-13 && v.abs() > 1e-13 {
                            let r = bisect(&f, xp, x)?;
                            return Ok(Some(c(sgn * r, 0.0)));
                        }
                    }
                    prev = Some((x, v));
                }
                Ok(None)
            }
            (2, 3) => {
                let f = |y: f64| -> Result<f64> { Ok(self.curve.xi_branches(c(0.0, y))?.xi[1].re) };
                let ymax = 2.0 * zs;
                let n = 400;
                let mut prev: Option<(f64, f64)> = None;
                for i in 1..=n {
                    let y = ymax * i as f64 / n as f64;
                    let v = f(y)?;
                    if let Some((yp, vp)) = prev {
                        if vp.signum() != v.signum() && vp.abs() > 1e-13 && v.abs() > 1e-13 {
                            return Ok(Some(c(0.0, bisect(&f, yp, y)?)));
                        }
                    }
                    prev = Some((y, v));
                }
                Ok(None)
            }
            _ => Err(Error::Argument(format!("pair {pair:?} must be (1,2), (1,3) or (2,3)"))),
        }
    }

    /// Critical points from which trajectories of pair (j,k) emanate.
    pub fn critical_points(&self, pair: (usize, usize)) -> Result<Vec<C64>> {
        let zs = self.curve.z_star;
        let mut pts = match pair {
            (1, 2) => vec![c(0.0, 0.0), c(zs, 0.0)],
            (1, 3) => vec![c(0.0, 0.0), c(-zs, 0.0)],
            (2, 3) => vec![c(0.0, 0.0)],
            _ => return Err(Error::Argument(format!("bad pair {pair:?}"))),
        };
        if let Some(z0) = self.find_quadratic_zero(pair)? {
            pts.push(z0);
            if pair == (2, 3) {
                pts.push(z0.conj());
            }
        }
        Ok(pts)
    }

    /// Seeds on a small circle around `center` where Re(λ_j − λ_k) = 0.
    pub fn seeds_around(&self, pair: (usize, usize), center: C64, radius: f64) -> Result<Vec<C64>> {
        let m = 720;
        let start = center + c(0.0, radius);
        let mut st = TraceState::new(self, pair, start)?;
        let mut vals = Vec::with_capacity(m + 1);
        vals.push((start, st.f.re));
        for i in 1..=m {
            let z = center + C64::from_polar(radius, PI / 2.0 + 2.0 * PI * i as f64 / m as f64);
            st.advance(self, z)?;
            vals.push((z, st.f.re));
        }
        let mut seeds = vec![];
        for w in vals.windows(2) {
            if w[0].1 == 0.0 || w[0].1.signum() != w[1].1.signum() {
                let t = w[0].1 / (w[0].1 - w[1].1);
                let z = w[0].0 + (w[1].0 - w[0].0) * t;
                seeds.push(center + (z - center) / (z - center).norm() * radius);
            }
        }
        Ok(seeds)
    }

    /// Trace level curves Re(λ_j − λ_k) = 0 from each seed, moving away from
    /// `center` initially.
    pub fn trace_trajectories(&self, pair: (usize, usize), seeds: &[(C64, C64)], step: f64) -> Result<Vec<Trajectory>> {
        let kind = match pair {
            (1, 2) => TrajectoryKind::Solid,
            (1, 3) => TrajectoryKind::Dashed,
            (2, 3) => TrajectoryKind::DashDot,
            _ => return Err(Error::Argument(format!("bad pair {pair:?}"))),
        };
        seeds
            .par_iter()
            .map(|&(seed, center)| self.trace_one(pair, seed, seed - center, step, kind))
            .collect()
    }

    /// Seeds at every critical point followed by tracing.
    pub fn trajectories(&self, pair: (usize, usize), step: f64) -> Result<Vec<Trajectory>> {
        let mut seeds = vec![];
        for p in self.critical_points(pair)? {
            for s in self.seeds_around(pair, p, 1e-3)? {
                seeds.push((s, p));
            }
        }
        self.trace_trajectories(pair, &seeds, step)
    }

    fn trace_one(&self, pair: (usize, usize), seed: C64, dir0: C64, h: f64, kind: TrajectoryKind) -> Result<Trajectory> {
        let mut st = TraceState::new(self, pair, seed)?;
        st.correct(self)?;
        let mut pts = vec![st.z];
        let mut defects = vec![st.f.re.abs()];
        let mut dir = dir0 / dir0.norm();
        let mut warning = false;
        let mut closed = false;
        for stepno in 0..20_000 {
            let g = st.dxi();
            if g.norm() < 1e-10 {
                break;
            }
            let mut t = C64::i() * g.conj() / g.norm();
            if (t * dir.conj()).re < 0.0 {
                t = -t;
            }
            let moved = st.advance(self, st.z + t * h);
            if let Err(e) = moved {
                // running into a branch point ends the curve there
                warning = !matches!(e, Error::Continuation(_) | Error::BranchPoint(_));
                break;
            }
            if st.correct(self).is_err() {
                warning = true;
                break;
            }
            dir = (st.z - pts[pts.len() - 1]) / (st.z - pts[pts.len() - 1]).norm();
            pts.push(st.z);
            defects.push(st.f.re.abs());
            if st.z.norm() > 6.0 {
                break;
            }
            if stepno > 10 && (st.z - pts[0]).norm() < 0.75 * h {
                closed = true;
                break;
            }
        }
        Ok(Trajectory { pair, points: pts, defects, kind, closed, warning })
    }
}

/// Running analytic continuation of (w-roots, λ_j − λ_k) along a path.
#[derive(Debug, Clone)]
struct TraceState {
    z: C64,
    w: [C64; 3],
    f: C64,
    j: usize,
    k: usize,
    p: f64,
}

impl TraceState {
    fn new(map: &LambdaMap, pair: (usize, usize), z: C64) -> Result<Self> {
        let b = map.curve.xi_branches(z)?;
        let side = Side::Plus;
        let f = map.lambda_side(z, pair.0, side)? - map.lambda_side(z, pair.1, side)?;
        Ok(Self { z, w: b.w, f, j: pair.0 - 1, k: pair.1 - 1, p: map.curve.p })
    }

    fn dxi_at(&self, w: &[C64; 3]) -> C64 {
        (w[self.j] + self.p / w[self.j]) - (w[self.k] + self.p / w[self.k])
    }

    fn dxi(&self) -> C64 {
        self.dxi_at(&self.w)
    }

    fn advance(&mut self, map: &LambdaMap, to: C64) -> Result<()> {
        let cc = map.curve.c * map.curve.c;
        let coeffs = |u: C64| (-u, c(0.0, 0.0), u * cc);
        let rule = gl(8);
        let d = to - self.z;
        let mut acc = c(0.0, 0.0);
        let mut w = self.w;
        let mut zprev = self.z;
        for (x, wt) in rule.0.iter().zip(rule.1.iter()) {
            let s = self.z + d * (0.5 * (x + 1.0));
            w = continue_roots(coeffs, zprev, w, s)?;
            zprev = s;
            acc += self.dxi_at(&w) * (0.5 * wt);
        }
        self.w = continue_roots(coeffs, zprev, w, to)?;
        self.f += acc * d;
        self.z = to;
        Ok(())
    }

    /// Newton on Re F along the gradient.
    fn correct(&mut self, map: &LambdaMap) -> Result<()> {
        for _ in 0..8 {
            if self.f.re.abs() < 1e-12 {
                return Ok(());
            }
            let g = self.dxi();
            let dz = -self.f.re * g.conj() / g.norm_sqr();
            if dz.norm() > 0.1 {
                return Err(Error::Numerical("trajectory corrector diverged".into()));
            }
            let to = self.z + dz;
            self.advance(map, to)?;
        }
        if self.f.re.abs() < 1e-9 {
            Ok(())
        } else {
            Err(Error::Numerical("trajectory corrector did not converge".into()))
        }
    }
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_k(k: usize) -> Result<()> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(Error::Argument(format!("branch index {k} not in 1..=3")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_curve;

    #[test]
    fn f3g3_constants() {
        let cv = make_curve(1.0).unwrap();
        let (f3, g3) = local_series_f3g3(&cv, 12).unwrap();
        assert!((f3.at0() - 1.0).abs() < 1e-14 && g3.at0().abs() < 1e-14);
        let cv = make_curve(1.1).unwrap();
        let (_, g3) = local_series_f3g3(&cv, 12).unwrap();
        let ex = 3.0 * cv.c.powf(-2.0 / 3.0) * (cv.c * cv.c - 1.0);
        assert!((g3.at0() - ex).abs() < 1e-14);
        assert!((g3.at0() - 0.2).abs() < 2e-2);
    }

    #[test]
    fn series_matches_path_integral() {
        let m = LambdaMap::new(make_curve(1.0).unwrap());
        for z in [C64::from_polar(0.05, 0.4), C64::from_polar(0.05, 2.5)] {
            for k in 1..=3 {
                let s = m.lambda_series(z, k);
                let p = m.lambda_by_path(z, k, Side::Plus).unwrap();
                assert!((s - p).norm() < 1e-7, "k={k}: {s} vs {p}");
            }
        }
    }

    #[test]
    fn jumps_hold() {
        for a in [1.1, 0.5] {
            let m = LambdaMap::new(make_curve(a).unwrap());
            for x in [1.0, -1.0, -4.0] {
                let d = m.jump_defects(x).unwrap();
                assert!(d.max_abs() < 1e-8, "a={a} x={x}: {d:?}");
            }
        }
    }

    #[test]
    fn boundary_values_at_zero() {
        let m = LambdaMap::new(make_curve(1.2).unwrap());
        let ex = [c(0.0, PI), c(0.0, -PI), c(0.0, 0.0)];
        for k in 1..=3 {
            let v = m.lambda_minus_at_zero(k, 1e-3).unwrap();
            assert!((v - ex[k - 1]).norm() < 1e-10, "k={k}: {v}");
        }
    }

    #[test]
    fn quadratic_zeros() {
        let m = LambdaMap::new(make_curve(2.0).unwrap());
        let x0 = m.find_quadratic_zero((1, 2)).unwrap().unwrap();
        let b = m.curve.xi_branches(x0).unwrap();
        assert!(x0.re > 0.0 && x0.re < m.curve.z_star);
        assert!((b.xi[0] - b.xi[1]).norm() < 1e-10);
        let m1 = LambdaMap::new(make_curve(1.0).unwrap());
        assert!(m1.find_quadratic_zero((1, 2)).unwrap().is_none());
        let mh = LambdaMap::new(make_curve(0.5).unwrap());
        let y0 = mh.find_quadratic_zero((2, 3)).unwrap().unwrap();
        let b = mh.curve.xi_branches(y0).unwrap();
        assert!(y0.im > 0.0 && (b.xi[1] - b.xi[2]).norm() < 1e-10);
    }
}
