//! Contour integrals ∫ sᵈ e^{φ(s)} ds, d = 0..3, for quartic exponents
//! φ(s) = c₄s⁴ + c₂s² + c₁s between the four valleys at infinity.
//!
//! Valleys are indexed k = 0..3 by their directions α_k = (π − arg c₄ + 2πk)/4.
//! For small saddles the integrals are taken along straight rays through the
//! origin; otherwise a steepest-descent tree (one path per saddle, each joining
//! two valleys) is built and every valley-to-valley integral is a signed sum
//! of tree edges.

use crate::cubic::cubic_roots;
use crate::quad::gl;
use crate::{Error, Result, C64};

/// Number of moments carried: sᵈ for d = 0..MOMENTS-1.
pub const MOMENTS: usize = 4;
pub type Moments = [C64; MOMENTS];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
/// Saddles within this modulus are handled by straight rays.
const RAY_RADIUS: f64 = 1.6;
/// Paths stop once Re φ has dropped this far below its starting value.
const DROP: f64 = 46.0;
const CHORD_NODES: usize = 10;

#[derive(Debug, Clone, Copy)]
pub struct Quartic {
    pub c4: C64,
    pub c2: C64,
    pub c1: C64,
}

impl Quartic {
    pub fn phi(&self, s: C64) -> C64 {
        let s2 = s * s;
        (self.c4 * s2 + self.c2) * s2 + self.c1 * s
    }
    pub fn dphi(&self, s: C64) -> C64 {
        (4.0 * self.c4 * s * s + 2.0 * self.c2) * s + self.c1
    }
    pub fn d2phi(&self, s: C64) -> C64 {
        12.0 * self.c4 * s * s + 2.0 * self.c2
    }
    pub fn valley_angle(&self, k: usize) -> f64 {
        (std::f64::consts::PI - self.c4.arg() + 2.0 * std::f64::consts::PI * k as f64) / 4.0
    }
    pub fn saddles(&self) -> [C64; 3] {
        let a = 4.0 * self.c4;
        cubic_roots(ZERO, 2.0 * self.c2 / a, self.c1 / a)
    }

    fn valley_of(&self, s: C64) -> Option<usize> {
        let ang = s.arg();
        (0..4).find(|&k| {
            let d = (ang - self.valley_angle(k)).rem_euclid(2.0 * std::f64::consts::PI);
            let d = d.min(2.0 * std::f64::consts::PI - d);
            d < std::f64::consts::PI / 4.0 - 0.05
        })
    }

    /// Valley reached by continuing descent from `s` (no quadrature) until
    /// the quartic term dominates.
    fn valley_far(&self, mut s: C64) -> Option<usize> {
        let (a4, a2, a1) = (self.c4.norm(), self.c2.norm(), self.c1.norm());
        for _ in 0..10_000 {
            let r = s.norm();
            if a4 * r.powi(4) > 16.0 * (a2 * r * r + a1 * r) {
                return self.valley_of(s);
            }
            let g = self.dphi(s);
            if g.norm() == 0.0 {
                return None;
            }
            let step = (0.05 * r.max(1.0)).min(0.5 * self.phi(s).norm().max(1.0) / g.norm());
            s -= g.conj() / g.norm() * step;
        }
        None
    }

    /// Σ w·sᵈ e^{φ(s)} over GL nodes on the chord a → b.
    fn chord(&self, a: C64, b: C64, acc: &mut Moments) {
        let r = gl(CHORD_NODES);
        let h = (b - a) * 0.5;
        let m = (a + b) * 0.5;
        for (x, w) in r.0.iter().zip(r.1.iter()) {
            let s = m + h * *x;
            let mut f = self.phi(s).exp() * h * *w;
            for v in acc.iter_mut() {
                *v += f;
                f *= s;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rays,
    SteepestDescent,
}

#[derive(Debug, Clone)]
struct Edge {
    from: usize,
    to: usize,
    value: Moments,
}

/// All valley-to-valley integrals for one exponent.
#[derive(Debug, Clone)]
pub struct ContourSet {
    pub quartic: Quartic,
    pub method: Method,
    rays: Option<[Moments; 4]>,
    edges: Vec<Edge>,
}

fn sub(a: &Moments, b: &Moments) -> Moments {
    let mut r = *a;
    for (x, y) in r.iter_mut().zip(b) {
        *x -= y;
    }
    r
}

impl ContourSet {
    pub fn new(q: Quartic) -> Result<Self> {
        let sad = q.saddles();
        let rmax = sad.iter().map(|s| s.norm()).fold(0.0, f64::max);
        if rmax > RAY_RADIUS {
            if let Ok(edges) = sd_tree(&q, &sad) {
                return Ok(Self { quartic: q, method: Method::SteepestDescent, rays: None, edges });
            }
        }
        Self::with_rays(q)
    }

    pub fn with_rays(q: Quartic) -> Result<Self> {
        let mut rays = [[ZERO; MOMENTS]; 4];
        for (k, r) in rays.iter_mut().enumerate() {
            *r = ray_integral(&q, q.valley_angle(k))?;
        }
        Ok(Self { quartic: q, method: Method::Rays, rays: Some(rays), edges: vec![] })
    }

    /// ∫ from valley `a` to valley `b` of sᵈ e^{φ}, d = 0..3.
    pub fn integral(&self, a: usize, b: usize) -> Moments {
        if a == b {
            return [ZERO; MOMENTS];
        }
        if let Some(r) = &self.rays {
            return sub(&r[b], &r[a]);
        }
        // path a → b in the tree
        let mut prev: [Option<(usize, usize, bool)>; 4] = [None; 4];
        let mut seen = [false; 4];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            for (i, e) in self.edges.iter().enumerate() {
                let (nb, fwd) = if e.from == v { (e.to, true) } else if e.to == v { (e.from, false) } else { continue };
                if !seen[nb] {
                    seen[nb] = true;
                    prev[nb] = Some((v, i, fwd));
                    stack.push(nb);
                }
            }
        }
        let mut acc = [ZERO; MOMENTS];
        let mut v = b;
        while v != a {
            let (u, i, fwd) = prev[v].expect("tree spans all valleys");
            let val = &self.edges[i].value;
            for (x, y) in acc.iter_mut().zip(val) {
                if fwd {
                    *x += y;
                } else {
                    *x -= y;
                }
            }
            v = u;
        }
        acc
    }
}

/// ∫₀^{∞e^{iα}} sᵈ e^{φ} ds by panels of Gauss–Legendre.
fn ray_integral(q: &Quartic, alpha: f64) -> Result<Moments> {
    let e = C64::from_polar(1.0, alpha);
    let bound = |r: f64| -q.c4.norm() * r.powi(4) + q.c2.norm() * r * r + q.c1.norm() * r;
    let mut acc = [ZERO; MOMENTS];
    let width = 0.25;
    let mut r0 = 0.0;
    let mut peak = f64::NEG_INFINITY;
    for _ in 0..4000 {
        let r1 = r0 + width;
        q.chord(e * r0, e * r1, &mut acc);
        peak = peak.max(q.phi(e * r0).re).max(q.phi(e * r1).re);
        r0 = r1;
        // past the turning point of the bound and far below the peak
        if bound(r0) < peak - DROP && 4.0 * q.c4.norm() * r0.powi(3) > 2.0 * q.c2.norm() * r0 + q.c1.norm() {
            return Ok(acc);
        }
    }
    Err(Error::Accuracy("ray quadrature did not terminate".into()))
}

/// Polyline along the steepest-descent path from saddle `s0` leaving in
/// direction `d`, and the valley it ends in.
fn trace(q: &Quartic, s0: C64, d: C64) -> Result<(Vec<C64>, usize)> {
    let f0 = q.phi(s0);
    let (v0, r0) = (f0.im, f0.re);
    let h2 = q.d2phi(s0).norm();
    let mut h = (0.1 / h2).sqrt().clamp(1e-4, 0.3);
    let mut pts = vec![s0];
    let mut s = s0 + d * h;
    let mut dir = d;
    for _ in 0..20_000 {
        for _ in 0..6 {
            let g = q.dphi(s);
            let e = q.phi(s).im - v0;
            if e.abs() < 1e-13 * (1.0 + f0.norm()) {
                break;
            }
            s -= e * C64::i() * g.conj() / g.norm_sqr();
        }
        let last = *pts.last().unwrap();
        if q.phi(s).re > q.phi(last).re + 1e-12 * (1.0 + f0.norm()) {
            return Err(Error::Numerical("steepest-descent path failed to descend".into()));
        }
        pts.push(s);
        if r0 - q.phi(s).re > DROP {
            return match q.valley_far(s) {
                Some(k) => Ok((pts, k)),
                None => Err(Error::Numerical("steepest-descent path ended outside a valley".into())),
            };
        }
        let g = q.dphi(s);
        let gn = g.norm();
        if gn < 1e-12 {
            return Err(Error::Numerical("steepest-descent path ran into a saddle".into()));
        }
        let ndir = -g.conj() / gn;
        // keep heading roughly the same way (guards against reversing at a saddle)
        dir = if (ndir * dir.conj()).re < -0.5 { dir } else { ndir };
        let curv = q.d2phi(s).norm() / gn;
        h = (1.0 / gn).min(0.25 / curv.max(1e-300)).min(0.5 * (1.0 + s.norm()) / 4.0).max(1e-7);
        s += dir * h;
    }
    Err(Error::Numerical("steepest-descent path too long".into()))
}

fn polyline_integral(q: &Quartic, pts: &[C64]) -> Moments {
    let mut acc = [ZERO; MOMENTS];
    for w in pts.windows(2) {
        q.chord(w[0], w[1], &mut acc);
    }
    acc
}

fn sd_tree(q: &Quartic, saddles: &[C64; 3]) -> Result<Vec<Edge>> {
    for i in 0..3 {
        for j in i + 1..3 {
            if (saddles[i] - saddles[j]).norm() < 1e-6 {
                return Err(Error::Numerical("coalescing saddles".into()));
            }
        }
    }
    let mut edges = vec![];
    let mut parent = [0usize, 1, 2, 3];
    fn find(p: &mut [usize; 4], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &s0 in saddles {
        let f2 = q.d2phi(s0);
        if f2.norm() < 1e-10 {
            return Err(Error::Numerical("degenerate saddle".into()));
        }
        let d = C64::from_polar(1.0, (std::f64::consts::PI - f2.arg()) / 2.0);
        let (pa, ka) = trace(q, s0, d)?;
        let (pb, kb) = trace(q, s0, -d)?;
        if ka == kb {
            return Err(Error::Numerical("descent path returns to its valley".into()));
        }
        let (ra, rb) = (find(&mut parent, ka), find(&mut parent, kb));
        if ra == rb {
            return Err(Error::Numerical("descent paths do not form a tree".into()));
        }
        parent[ra] = rb;
        let ia = polyline_integral(q, &pa);
        let ib = polyline_integral(q, &pb);
        // from valley kb to valley ka through s0
        edges.push(Edge { from: kb, to: ka, value: sub(&ia, &ib) });
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pearcey_quartic(zeta: C64, b: C64) -> Quartic {
        Quartic { c4: C64::new(-0.25, 0.0), c2: -b / 2.0, c1: C64::i() * zeta }
    }

    #[test]
    fn valley_directions() {
        let q = pearcey_quartic(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for k in 0..4 {
            assert!((q.valley_angle(k) - k as f64 * std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn rays_and_descent_agree() {
        for (z, b) in [(C64::new(8.0, 1.0), 0.5), (C64::new(-6.5, -1.5), -1.0), (C64::new(0.5, 9.0), 2.0), (C64::new(5.0, 0.0), -4.0)] {
            let q = pearcey_quartic(z, C64::new(b, 0.0));
            let sd = ContourSet::new(q).unwrap();
            assert_eq!(sd.method, Method::SteepestDescent);
            let ry = ContourSet::with_rays(q).unwrap();
            for (a, bb) in [(2, 0), (1, 0), (3, 1), (3, 2)] {
                let x = sd.integral(a, bb);
                let y = ry.integral(a, bb);
                for d in 0..MOMENTS {
                    let scale = y[d].norm().max(1e-3);
                    assert!((x[d] - y[d]).norm() < 1e-11 * scale.max(1.0), "{z} {a}->{bb} d={d}: {} vs {}", x[d], y[d]);
                }
            }
        }
    }
}
