//! Roots of complex monic cubics and continuation of labelled root triples.

use crate::{Error, Result, C64};

const OMEGA: C64 = C64 { re: -0.5, im: 0.866_025_403_784_438_6 };

/// Roots of t³ + b t² + c t + d, polished by Newton.
pub fn cubic_roots(b: C64, c: C64, d: C64) -> [C64; 3] {
    let s = b / 3.0;
    let p = c - b * s;
    let q = d - c * s + 2.0 * s * s * s;
    // t = u - p/(3u), u³ = -q/2 ± sqrt(q²/4 + p³/27)
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u1 = -q / 2.0 + disc;
    let u2 = -q / 2.0 - disc;
    let u3 = if u1.norm() >= u2.norm() { u1 } else { u2 };
    let mut roots = [C64::new(0.0, 0.0); 3];
    if u3.norm() == 0.0 {
        roots = [-s; 3];
    } else {
        let u = u3.powf(1.0 / 3.0);
        let mut uk = u;
        for r in roots.iter_mut() {
            *r = uk - p / (3.0 * uk) - s;
            uk *= OMEGA;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = ((*r + b) * *r + c) * *r + d;
            let df = (3.0 * *r + 2.0 * b) * *r + c;
            if df.norm() <= 1e-14 * (1.0 + r.norm()).powi(2) {
                break;
            }
            let step = f / df;
            if !step.is_finite() {
                break;
            }
            *r -= step;
            if step.norm() <= 1e-16 * r.norm() {
                break;
            }
        }
    }
    roots
}

fn min_separation(r: &[C64; 3]) -> f64 {
    (r[0] - r[1]).norm().min((r[0] - r[2]).norm()).min((r[1] - r[2]).norm())
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Order `new` so that it pairs with `old` by least maximal displacement.
pub fn match_roots(old: &[C64; 3], new: &[C64; 3]) -> ([C64; 3], f64) {
    let mut best = ([C64::new(0.0, 0.0); 3], f64::INFINITY);
    for p in PERMS {
        let m = (0..3).map(|k| (new[p[k]] - old[k]).norm()).fold(0.0, f64::max);
        if m < best.1 {
            best = ([new[p[0]], new[p[1]], new[p[2]]], m);
        }
    }
    best
}

/// Carry a labelled root triple of a z-dependent monic cubic along the
/// straight segment `from → to`. `coeffs(z)` returns (b, c, d).
pub fn continue_roots<F>(coeffs: F, from: C64, roots: [C64; 3], to: C64) -> Result<[C64; 3]>
where
    F: Fn(C64) -> (C64, C64, C64),
{
    let mut t = 0.0f64;
    let mut h = 0.125f64;
    let mut cur = roots;
    let d = to - from;
    let mut steps = 0usize;
    while t < 1.0 {
        let tn = (t + h).min(1.0);
        let z = from + d * tn;
        let (b, c, e) = coeffs(z);
        let nr = cubic_roots(b, c, e);
        let (m, disp) = match_roots(&cur, &nr);
        let sep = min_separation(&cur);
        if disp < sep / 3.0 || disp == 0.0 {
            cur = m;
            t = tn;
            h = (h * 2.0).min(0.5);
        } else {
            h *= 0.5;
            if h * d.norm() < 1e-15 * (1.0 + from.norm() + to.norm()) {
                return Err(Error::Continuation(format!("roots collide near z = {z}")));
            }
        }
        steps += 1;
        if steps > 20_000 {
            return Err(Error::Continuation("too many continuation steps".into()));
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_known_cubic() {
        // (t-1)(t-2i)(t+3)
        let r1 = C64::new(1.0, 0.0);
        let r2 = C64::new(0.0, 2.0);
        let r3 = C64::new(-3.0, 0.0);
        let b = -(r1 + r2 + r3);
        let c = r1 * r2 + r1 * r3 + r2 * r3;
        let d = -(r1 * r2 * r3);
        let r = cubic_roots(b, c, d);
        for ex in [r1, r2, r3] {
            assert!(r.iter().any(|x| (x - ex).norm() < 1e-14));
        }
    }

    #[test]
    fn triple_root() {
        let r = cubic_roots(C64::new(-3.0, 0.0), C64::new(3.0, 0.0), C64::new(-1.0, 0.0));
        for x in r {
            assert!((x - 1.0).norm() < 1e-5);
        }
    }
}
