//! Finite-n side of the external-source model: a Gram-matrix oracle for
//! small n, a contour-integral kernel for moderate n, the cusp-scaled kernel,
//! and Monte Carlo sampling of the eigenvalues.

use crate::cubic::cubic_roots;
use crate::linalg::{condition_1, hermitian_eigenvalues, Lu};
use crate::quad::gl;
use crate::spectral_surface::make_curve;
use crate::{Error, Result, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleParams {
    pub n: usize,
    pub a: f64,
}

impl EnsembleParams {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n == 0 || n % 2 == 1 {
            return Err(Error::Argument(format!("n must be even and positive, got {n}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Argument(format!("a must be positive, got {a}")));
        }
        Ok(Self { n, a })
    }
}

/// Largest n for the Gram oracle and the contour kernel.
pub const ORACLE_MAX_N: usize = 12;
pub const KERNEL_MAX_N: usize = 512;

/// Projection kernel Σ φ_i(x) M_ij ψ_j(y) built from φ_i = x^i e^{−nx²/4} and
/// ψ_j = x^k e^{−n(x²/4 ∓ ax)}, with M = G^{−T}.
#[derive(Debug, Clone)]
pub struct OracleKernel {
    params: EnsembleParams,
    m: Vec<f64>,
}

/// Raw moments E[X^k], k ≤ kmax, for X ~ N(mu, var).
fn gaussian_moments(mu: f64, var: f64, kmax: usize) -> Vec<f64> {
    let mut m = vec![1.0, mu];
    for k in 2..=kmax {
        m.push(mu * m[k - 1] + (k - 1) as f64 * var * m[k - 2]);
    }
    m.truncate(kmax + 1);
    m
}

impl OracleKernel {
    pub fn new(params: EnsembleParams) -> Result<Self> {
        let EnsembleParams { n, a } = params;
        if n > ORACLE_MAX_N {
            return Err(Error::Argument(format!("oracle limited to n ≤ {ORACLE_MAX_N}")));
        }
        let nf = n as f64;
        let h = n / 2;
        // ∫ x^m e^{−nx²/2 ± nax} dx = e^{na²/2} √(2π/n) E[X^m], X ~ N(±a, 1/n)
        let pref = (nf * a * a / 2.0).exp() * (2.0 * PI / nf).sqrt();
        let mp = gaussian_moments(a, 1.0 / nf, 2 * n);
        let mm = gaussian_moments(-a, 1.0 / nf, 2 * n);
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = pref * if j < h { mp[i + j] } else { mm[i + j - h] };
            }
        }
        let cond = condition_1(&g, n)?;
        if cond > 1e12 {
            return Err(Error::Precision(format!("Gram matrix condition {cond:e} exceeds 1e12")));
        }
        let gt: Vec<f64> = (0..n * n).map(|k| g[(k % n) * n + k / n]).collect();
        let m = Lu::new(gt, n)?.inverse()?;
        Ok(Self { params, m })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let EnsembleParams { n, a } = self.params;
        let nf = n as f64;
        let h = n / 2;
        let phi: Vec<f64> = (0..n).map(|i| x.powi(i as i32) * (-nf * x * x / 4.0).exp()).collect();
        let psi: Vec<f64> = (0..n)
            .map(|j| {
                let (k, s) = if j < h { (j, 1.0) } else { (j - h, -1.0) };
                y.powi(k as i32) * (-nf * (y * y / 4.0 - s * a * y)).exp()
            })
            .collect();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += phi[i] * self.m[i * n + j] * psi[j];
            }
        }
        acc
    }
}

pub fn kernel_oracle(params: EnsembleParams, x: f64, y: f64) -> Result<f64> {
    Ok(OracleKernel::new(params)?.eval(x, y))
}

/// m·e^{e}, a complex number with a separate real log-scale.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: C64,
    e: f64,
}

/// Trapezoid sum of e^{n g(s)} over the nodes s_k = s0 + k·h·dir, k ∈ ℤ,
/// truncated where n·Re g has fallen 45 below its maximum.
fn line_sum(g: impl Fn(C64) -> C64, s0: C64, dir: C64, h: f64, n: f64) -> Scaled {
    let mut vals = vec![g(s0)];
    for sign in [1.0, -1.0] {
        let mut k = 1.0;
        let mut best = vals[0].re;
        loop {
            let v = g(s0 + dir * (sign * k * h));
            best = best.max(v.re);
            vals.push(v);
            if n * (best - v.re) > 45.0 && k * h * n.sqrt() > 4.0 {
                break;
            }
            k += 1.0;
            if k > 1e6 {
                break;
            }
        }
    }
    let top = vals.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    let s: C64 = vals.iter().map(|v| ((v - top) * n).exp()).sum();
    Scaled { m: s * dir * h, e: n * top }
}

/// Contour-integral kernel data for one (n, a).
#[derive(Debug, Clone, Copy)]
pub struct ContourKernel {
    pub params: EnsembleParams,
}

impl ContourKernel {
    pub fn new(params: EnsembleParams) -> Result<Self> {
        if params.n > KERNEL_MAX_N {
            return Err(Error::Argument(format!("kernel_n limited to n ≤ {KERNEL_MAX_N}")));
        }
        Ok(Self { params })
    }

    fn a(&self) -> f64 {
        self.params.a
    }

    /// P(X) = ∫_{σ+iℝ} e^{n(s²/2 − sX)} (s² − a²)^{n/2} ds.
    fn p(&self, x: f64) -> Scaled {
        let n = self.params.n as f64;
        let a2 = self.a() * self.a();
        let g = |s: C64| s * s / 2.0 - s * x + 0.5 * (s * s - a2).ln();
        // saddles: (s − X)(s² − a²) + s = 0
        let roots = cubic_roots(C64::new(-x, 0.0), C64::new(1.0 - a2, 0.0), C64::new(x * a2, 0.0));
        let mut cands: Vec<f64> = roots.iter().map(|r| r.re).collect();
        cands.push(x);
        let peak = |sig: f64| -> f64 {
            (0..=48).map(|k| g(C64::new(sig, (k as f64 - 24.0) * 0.08)).re).fold(f64::NEG_INFINITY, f64::max)
        };
        let sig = cands.into_iter().map(|s| (peak(s), s)).fold((f64::INFINITY, 0.0), |b, c| if c.0 < b.0 { c } else { b }).1;
        let curv = (C64::new(1.0, 0.0) + (C64::new(sig, 0.0) * sig + a2) / ((C64::new(sig, 0.0) * sig - a2).powi(2))).norm().max(1.0);
        let h = 2.0 * PI / (n * (sig - x).abs() + 12.0 * (n * curv).sqrt());
        line_sum(g, C64::new(sig, 0.0), C64::i(), h, n)
    }

    /// Q(Y) = ∮ e^{−n(t²/2 − tY)} (t² − a²)^{−n/2} dt around ±a, counterclockwise.
    fn q(&self, y: f64) -> Scaled {
        let n = self.params.n as f64;
        let a = self.a();
        let a2 = a * a;
        let h = |t: C64| -(t * t / 2.0 - t * y) - 0.5 * (t * t - a2).ln();
        let npts = 4 * self.params.n + 64;
        let mut parts = vec![];
        for pole in [a, -a] {
            let circle_max = |r: f64| -> f64 {
                (0..32)
                    .map(|k| h(C64::new(pole, 0.0) + C64::from_polar(r, 2.0 * PI * k as f64 / 32.0)).re + r.ln() / n)
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let r = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]
                .iter()
                .map(|f| f * a)
                .map(|r| (circle_max(r), r))
                .fold((f64::INFINITY, 0.0), |b, c| if c.0 < b.0 { c } else { b })
                .1;
            let vals: Vec<(C64, C64)> = (0..npts)
                .map(|k| {
                    let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / npts as f64);
                    let t = C64::new(pole, 0.0) + e * r;
                    (h(t), C64::i() * e * r)
                })
                .collect();
            let top = vals.iter().map(|v| v.0.re).fold(f64::NEG_INFINITY, f64::max);
            let s: C64 = vals.iter().map(|(v, d)| ((v - top) * n).exp() * d).sum::<C64>() * (2.0 * PI / npts as f64);
            parts.push(Scaled { m: s, e: n * top });
        }
        let e = parts[0].e.max(parts[1].e);
        Scaled { m: parts.iter().map(|p| p.m * (p.e - e).exp()).sum(), e }
    }
}

/// Gauss–Legendre nodes on [0, U] in panels of width at most `width`.
fn panel_nodes(u: f64, width: f64) -> (Vec<f64>, Vec<f64>) {
    let panels = (u / width).ceil().max(1.0) as usize;
    let w = u / panels as f64;
    let rule = gl(16);
    let mut nodes = Vec::with_capacity(panels * 16);
    let mut weights = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let lo = p as f64 * w;
        for (t, wt) in rule.0.iter().zip(&rule.1) {
            nodes.push(lo + (t + 1.0) * w / 2.0);
            weights.push(wt * w / 2.0);
        }
    }
    (nodes, weights)
}

/// Signed u-nodes covering [−U₋, U₊], where |P(x+u)Q(y+u)| has died out at
/// both ends for every pair in the block.
fn u_nodes(kern: &ContourKernel, xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = kern.params.n as f64;
    let mag = |s: Scaled| s.e + s.m.norm().max(1e-300).ln();
    let logmag = |u: f64| -> f64 {
        let p = xs.iter().map(|&x| mag(kern.p(x + u))).fold(f64::NEG_INFINITY, f64::max);
        let q = ys.iter().map(|&y| mag(kern.q(y + u))).fold(f64::NEG_INFINITY, f64::max);
        p + q
    };
    let extent = |sign: f64| -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut u: f64 = 0.0;
        // several consecutive low samples, so an isolated zero of P or Q does not stop the scan
        let mut low = 0;
        loop {
            let v = logmag(sign * u);
            best = best.max(v);
            low = if best - v > 45.0 { low + 1 } else { 0 };
            if low >= 4 || u > 40.0 {
                return u;
            }
            u += 0.1;
        }
    };
    let width = (6.0 / n).min(0.25);
    let (mut nodes, mut weights) = panel_nodes(extent(1.0), width);
    let (neg, wneg) = panel_nodes(extent(-1.0), width);
    nodes.extend(neg.iter().map(|u| -u));
    weights.extend(wneg.iter().map(|w| -w));
    (nodes, weights)
}

/// Finite-n kernel on the product grid xs × ys; entry [i][j] is K_n(xs[i], ys[j]).
///
/// K_n(x, y) = −(n²/4π²) e^{n(x²−y²)/4} ∫₀^∞ P(x+u) Q(y+u) du, which also equals
/// the same expression with +∫_{−∞}^0; the half with less absolute mass is used.
pub fn kernel_n_grid(params: EnsembleParams, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<f64>>> {
    let kern = ContourKernel::new(params)?;
    let n = params.n as f64;
    let (us, ws) = u_nodes(&kern, xs, ys);
    let ps: Vec<Vec<Scaled>> = xs.par_iter().map(|&x| us.iter().map(|&u| kern.p(x + u)).collect()).collect();
    let qs: Vec<Vec<Scaled>> = ys.par_iter().map(|&y| us.iter().map(|&u| kern.q(y + u)).collect()).collect();
    let out = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            ys.iter()
                .map(|&y| y)
                .enumerate()
                .map(|(j, y)| {
                    let shift = n * (x * x - y * y) / 4.0;
                    // ws carries the sign: positive on u > 0, negative on u < 0
                    let (mut pos, mut neg, mut mpos, mut mneg) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0, 0.0);
                    for k in 0..us.len() {
                        let f = ps[i][k].m * qs[j][k].m * (ps[i][k].e + qs[j][k].e + shift).exp() * ws[k];
                        if ws[k] > 0.0 {
                            pos += f;
                            mpos += f.norm();
                        } else {
                            neg += f;
                            mneg += f.norm();
                        }
                    }
                    let v = if mpos <= mneg { -pos } else { -neg } * n * n / (4.0 * PI * PI);
                    if v.im.abs() > 1e-6 * v.re.abs().max(1e-3) {
                        return Err(Error::Numerical(format!("kernel_n: imaginary residue {:e}", v.im)));
                    }
                    Ok(v.re)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out)
}

pub fn kernel_n(params: EnsembleParams, x: f64, y: f64) -> Result<f64> {
    Ok(kernel_n_grid(params, &[x], &[y])?[0][0])
}

/// n^{−3/4} K_n(X n^{−3/4}, Y n^{−3/4}; 1 + b/(2√n)) on a product grid.
pub fn scaled_kernel_grid(n: usize, b: f64, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<f64>>> {
    let nf = n as f64;
    let s = nf.powf(-0.75);
    let params = EnsembleParams::new(n, 1.0 + b / (2.0 * nf.sqrt()))?;
    let sx: Vec<f64> = xs.iter().map(|x| x * s).collect();
    let sy: Vec<f64> = ys.iter().map(|y| y * s).collect();
    let k = kernel_n_grid(params, &sx, &sy)?;
    Ok(k.into_iter().map(|r| r.into_iter().map(|v| v * s).collect()).collect())
}

pub fn scaled_kernel(n: usize, b: f64, x: f64, y: f64) -> Result<f64> {
    Ok(scaled_kernel_grid(n, b, &[x], &[y])?[0][0])
}

/// ∫ K_n(x, x) dx. Exchanging the order of integration in the u-representation
/// (and using ∫_ℝ P Q = 0) gives −(n²/4π²) ∫_ℝ v P(v) Q(v) dv.
pub fn kernel_n_trace(params: EnsembleParams) -> Result<f64> {
    let kern = ContourKernel::new(params)?;
    let n = params.n as f64;
    let (us, ws) = u_nodes(&kern, &[0.0], &[0.0]);
    let acc: C64 = us
        .par_iter()
        .zip(&ws)
        .map(|(&v, &w)| {
            let (p, q) = (kern.p(v), kern.q(v));
            p.m * q.m * (p.e + q.e).exp() * v * w.abs()
        })
        .sum();
    let t = -acc * n * n / (4.0 * PI * PI);
    real_or_err(t, "kernel_n_trace")
}

fn real_or_err(v: C64, what: &str) -> Result<f64> {
    if v.im.abs() > 1e-6 * v.re.abs().max(1e-3) {
        return Err(Error::Numerical(format!("{what}: imaginary residue {:e}", v.im)));
    }
    Ok(v.re)
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSample {
    pub eigenvalues: Vec<f64>,
    pub seed: u64,
    pub params: EnsembleParams,
}

/// splitmix64 finalizer, used to derive independent per-trial seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    splitmix64(seed ^ splitmix64(trial))
}

/// Eigenvalues of H + diag(a, …, a, −a, …, −a) with H drawn from e^{−n Tr H²/2}.
pub fn sample_eigenvalues(params: EnsembleParams, seed: u64) -> Result<EnsembleSample> {
    let n = params.n;
    if n > KERNEL_MAX_N {
        return Err(Error::Argument(format!("sampling limited to n ≤ {KERNEL_MAX_N}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd_diag = (1.0 / n as f64).sqrt();
    let sd_off = (0.5 / n as f64).sqrt();
    let mut h = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let g: f64 = StandardNormal.sample(&mut rng);
        let shift = if i < n / 2 { params.a } else { -params.a };
        h[i * n + i] = C64::new(g * sd_diag + shift, 0.0);
        for j in i + 1..n {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let v = C64::new(re * sd_off, im * sd_off);
            h[i * n + j] = v;
            h[j * n + i] = v.conj();
        }
    }
    let mut eig = hermitian_eigenvalues(h, n)?;
    eig.sort_by(f64::total_cmp);
    Ok(EnsembleSample { eigenvalues: eig, seed, params })
}

/// Independent samples for trials 0..trials, seeds derived from `seed`.
pub fn sample_many(params: EnsembleParams, seed: u64, trials: usize) -> Result<Vec<EnsembleSample>> {
    (0..trials as u64).into_par_iter().map(|t| sample_eigenvalues(params, trial_seed(seed, t))).collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
    pub empirical_density: f64,
    /// Bin average of the limiting density.
    pub rho_limit: f64,
}

/// Histogram of pooled eigenvalues on [lo, hi] against the limiting density.
pub fn histogram(samples: &[EnsembleSample], lo: f64, hi: f64, bins: usize) -> Result<Vec<HistBin>> {
    if samples.is_empty() || bins == 0 || !(lo < hi) {
        return Err(Error::Argument("histogram needs samples, bins > 0 and lo < hi".into()));
    }
    let a = samples[0].params.a;
    let curve = make_curve(a)?;
    let total: usize = samples.iter().map(|s| s.eigenvalues.len()).sum();
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for s in samples {
        for &x in &s.eigenvalues {
            if x >= lo && x < hi {
                counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
            }
        }
    }
    let rule = gl(8);
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let l = lo + i as f64 * w;
            let mut avg = 0.0;
            for (t, wt) in rule.0.iter().zip(&rule.1) {
                avg += wt / 2.0 * curve.density(l + (t + 1.0) * w / 2.0)?;
            }
            Ok(HistBin { bin_left: l, bin_right: l + w, count: c, empirical_density: c as f64 / (total as f64 * w), rho_limit: avg })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_trace_and_projection() {
        let p = EnsembleParams::new(6, 1.0).unwrap();
        let k = OracleKernel::new(p).unwrap();
        let rule = gl(40);
        let (lo, hi) = (-5.0, 5.0);
        let nodes: Vec<(f64, f64)> = (0..20)
            .flat_map(|s| {
                let a = lo + s as f64 * (hi - lo) / 20.0;
                let w = (hi - lo) / 20.0;
                rule.0.iter().zip(&rule.1).map(move |(t, wt)| (a + (t + 1.0) * w / 2.0, wt * w / 2.0)).collect::<Vec<_>>()
            })
            .collect();
        let tr: f64 = nodes.iter().map(|&(x, w)| w * k.eval(x, x)).sum();
        assert!((tr - 6.0).abs() < 1e-4 * 6.0, "{tr}");
        let (x, y) = (0.3, -0.5);
        let rep: f64 = nodes.iter().map(|&(t, w)| w * k.eval(x, t) * k.eval(t, y)).sum();
        assert!((rep - k.eval(x, y)).abs() < 1e-6);
    }

    #[test]
    fn contour_kernel_matches_oracle() {
        for &a in &[0.5, 1.0, 2.0] {
            for n in [2usize, 4, 6, 8] {
                let p = EnsembleParams::new(n, a).unwrap();
                let o = OracleKernel::new(p).unwrap();
                for (x, y) in [(0.1, -0.2), (0.7, 0.7), (-1.0, 0.4)] {
                    let kn = kernel_n(p, x, y).unwrap();
                    let ko = o.eval(x, y);
                    assert!((kn - ko).abs() < 1e-6, "n={n} a={a} ({x},{y}): {kn} vs {ko}");
                }
            }
        }
    }

    #[test]
    fn samples_are_reproducible() {
        let p = EnsembleParams::new(20, 1.5).unwrap();
        let a = sample_eigenvalues(p, 7).unwrap();
        let b = sample_eigenvalues(p, 7).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert!(a.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}
