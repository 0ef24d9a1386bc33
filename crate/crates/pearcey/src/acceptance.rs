//! Numbered acceptance checks. Each returns a pass flag with a short
//! measurement summary; the integration test and the CLI `selftest` print them.

use crate::cusp_kernel::{fredholm_det, gap_probability, kcusp, kcusp_phi, kernel_trace};
use crate::finite_ensemble::{
    histogram, kernel_n_grid, kernel_n_trace, sample_many, scaled_kernel_grid, EnsembleParams, OracleKernel,
};
use crate::lambda_map::LambdaMap;
use crate::linalg::M3;
use crate::pearcey_fn::{
    asymptotic_defect, jump_defect, pairing, pearcey_p, pearcey_q, q0, PearceyP, PearceyQ, QSolution,
};
use crate::rh_model::{
    jump_identity_table, k_jump, matching_defect, model_jump_defect, model_m, prefactor_e_side,
    theta_lambda_residual,
};
use crate::{make_curve, Result, Side, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

pub const COUNT: u8 = 15;

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Least-squares slope of log y against log x.
fn log_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn curve_identities() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut res, mut vieta) = (0.0f64, 0.0f64);
    for a in [0.5, 1.0, 1.01, 2.0] {
        let cv = make_curve(a)?;
        for _ in 0..500 {
            let z = c(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            if z.im.abs() < 1e-3 {
                continue;
            }
            let bv = cv.w_branches(z)?;
            let w = bv.w;
            let scale = 1.0 + z.norm() * (1.0 + cv.c * cv.c);
            vieta = vieta.max((w[0] + w[1] + w[2] - z).norm() / scale);
            vieta = vieta.max((w[0] * w[1] + w[1] * w[2] + w[0] * w[2]).norm() / scale);
            vieta = vieta.max((w[0] * w[1] * w[2] + z * cv.c * cv.c).norm() / scale);
            for xi in bv.xi {
                res = res.max(cv.modified_pastur_residual(z, xi).norm() / cv.modified_pastur_scale(z, xi));
            }
        }
    }
    Ok((res <= 1e-10 && vieta <= 1e-10, format!("residual {res:.2e}, vieta {vieta:.2e}")))
}

fn density() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 2.0] {
        worst = worst.max((make_curve(a)?.density_mass(1e-10)? - 1.0).abs());
    }
    let cv = make_curve(1.0)?;
    let at0 = cv.density(0.0)?;
    let pts: Vec<(f64, f64)> = [1e-6, 1e-5, 1e-4].iter().map(|&x| Ok((x, cv.density(x)?))).collect::<Result<_>>()?;
    let e = log_slope(&pts);
    let pass = worst <= 1e-6 && at0 == 0.0 && (e - 1.0 / 3.0).abs() <= 0.02;
    Ok((pass, format!("mass error {worst:.2e}, rho(0;1) = {at0}, exponent {e:.4}")))
}

fn lambda_jumps() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 1.1, 2.0] {
        let m = LambdaMap::new(make_curve(a)?);
        let zs = m.curve.z_star;
        let xs: Vec<f64> = (1..=20)
            .flat_map(|i| {
                let t = i as f64 / 21.0;
                [t * zs, -t * zs, -zs - 3.0 * t]
            })
            .collect();
        let d = xs.par_iter().map(|&x| Ok(m.jump_defects(x)?.max_abs())).collect::<Result<Vec<f64>>>()?;
        worst = d.into_iter().fold(worst, f64::max);
    }
    Ok((worst <= 1e-8, format!("max defect {worst:.2e}")))
}

fn lambda_constants() -> Result<(bool, String)> {
    let m = LambdaMap::new(make_curve(1.0)?);
    let ex = [c(0.0, PI), c(0.0, -PI), c(0.0, 0.0)];
    let mut bv = 0.0f64;
    for k in 1..=3 {
        bv = bv.max((m.lambda_minus_at_zero(k, 1e-3)? - ex[k - 1]).norm());
    }
    let r1 = m.lambda_constants_on_ray(PI / 4.0)?;
    let r2 = m.lambda_constants_on_ray(PI / 3.0)?;
    let spread = (0..3).map(|k| (r1[k] - r2[k]).norm()).fold(0.0, f64::max);
    Ok((bv <= 1e-10 && spread <= 1e-6, format!("boundary values {bv:.2e}, two-ray spread {spread:.2e}")))
}

fn conformal_maps() -> Result<(bool, String)> {
    let b = 1.0;
    let mut pass = true;
    let mut last = (0.0f64, 0.0f64);
    for x in [-2.0, 0.5, 1.0] {
        let mut ez = vec![];
        let mut eb = vec![];
        for n in [1e3, 1e4, 1e5] {
            let m = LambdaMap::new(make_curve(1.0 + b / (2.0 * f64::sqrt(n)))?);
            let z = c(x * f64::powf(n, -0.75), 0.0);
            ez.push((m.zeta_map(z)? * f64::powf(n, 0.75) - x).norm());
            eb.push((m.b_map(z)? * n.sqrt() - b).norm());
        }
        pass &= decreasing(&ez) && decreasing(&eb) && ez[2] <= 1e-2 && eb[2] <= 1e-2;
        last = (last.0.max(ez[2]), last.1.max(eb[2]));
    }
    Ok((pass, format!("final errors: zeta {:.2e}, b {:.2e}", last.0, last.1)))
}

/// Γ(1/4).
const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

fn pearcey_functions() -> Result<(bool, String)> {
    let mut ode = 0.0f64;
    for (z, b) in [(c(1.0, 0.5), 0.3), (c(-7.0, 2.0), 1.0), (c(0.0, -9.0), -2.0), (c(3.0, 0.0), 0.0)] {
        let b = c(b, 0.0);
        let pp = PearceyP::new(z, b)?;
        for j in 0..6 {
            let r = pp.pj(j, 3) - z * pp.pj(j, 0) - b * pp.pj(j, 1);
            let s = pp.pj(j, 3).norm() + (z * pp.pj(j, 0)).norm() + (b * pp.pj(j, 1)).norm();
            ode = ode.max(r.norm() / s.max(1.0));
        }
        let qq = PearceyQ::new(z, b)?;
        for k in 1..=3 {
            let r = qq.qj(k, 3) + z * qq.qj(k, 0) - b * qq.qj(k, 1);
            let s = qq.qj(k, 3).norm() + (z * qq.qj(k, 0)).norm() + (b * qq.qj(k, 1)).norm();
            ode = ode.max(r.norm() / s.max(1.0));
        }
    }
    let ex = GAMMA_QUARTER / (2.0 * std::f64::consts::SQRT_2 * PI);
    let p00 = (pearcey_p(c(0.0, 0.0), c(0.0, 0.0), 0)? - ex).norm();
    let (mut even, mut imag) = (0.0f64, 0.0f64);
    for b in [-1.0, 0.0, 2.0] {
        let b = c(b, 0.0);
        for x in [0.3, 1.7, 4.0] {
            let p = pearcey_p(c(x, 0.0), b, 0)?;
            let q = pearcey_q(c(x, 0.0), b, 0)?;
            even = even.max((p - pearcey_p(c(-x, 0.0), b, 0)?).norm());
            imag = imag.max(p.im.abs()).max(q.im.abs());
        }
    }
    let pass = ode <= 1e-8 && p00 <= 1e-10 && even <= 1e-10 && imag <= 1e-10;
    Ok((pass, format!("ode {ode:.2e}, p(0;0) {p00:.2e}, evenness {even:.2e}, imaginary parts {imag:.2e}")))
}

fn phi_structure() -> Result<(bool, String)> {
    let mut jump = 0.0f64;
    for b in [0.0, 1.3] {
        for r in [0.5, 2.0, 5.0] {
            for ray in 0..6 {
                jump = jump.max(jump_defect(ray, r, c(b, 0.0))?);
            }
        }
    }
    let table = jump_identity_table().iter().all(|p| p.matches);
    let mut slopes = vec![];
    for b in [0.0, 2.0] {
        let pts: Vec<(f64, f64)> = [5.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&r| Ok((r, asymptotic_defect(C64::from_polar(r, PI / 3.0), c(b, 0.0))?)))
            .collect::<Result<_>>()?;
        slopes.push(log_slope(&pts));
    }
    let ok_slopes = slopes.iter().all(|s| (s + 2.0 / 3.0).abs() <= 0.1);
    let pass = jump <= 1e-10 && table && ok_slopes;
    Ok((
        pass,
        format!("jumps {jump:.2e}, table {table}, slope b=0 {:.3}, slope b=2 {:.3}", slopes[0], slopes[1]),
    ))
}

fn pairings() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut drift = 0.0f64;
    for b in [0.0, 1.5] {
        let bc = c(b, 0.0);
        for z in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, -2.0)] {
            for (r, j) in [0usize, 1, 4].into_iter().enumerate() {
                for k in 1..=3 {
                    let ex = if r + 1 == k { 1.0 } else { 0.0 };
                    worst = worst.max((pairing(j, QSolution::Q(k), bc, z)? - ex).norm());
                }
            }
            worst = worst.max(pairing(0, QSolution::Q0, bc, z)?.norm());
            worst = worst.max((pairing(1, QSolution::Q0, bc, z)? - 1.0).norm());
            worst = worst.max((pairing(4, QSolution::Q0, bc, z)? - 1.0).norm());
        }
        for y in [0.0, 1.0, -2.0] {
            let y = c(y, 0.0);
            worst = worst.max((q0(y, bc, 0)? + C64::i() * pearcey_q(y, bc, 0)?).norm());
        }
        let vals: Vec<C64> = [c(-3.0, 0.0), c(0.0, 0.0), c(0.5, 0.5), c(2.5, 0.0)]
            .iter()
            .map(|&z| pairing(0, QSolution::Pearcey, bc, z))
            .collect::<Result<_>>()?;
        drift = drift.max(vals.iter().map(|v| (v - vals[0]).norm()).fold(0.0, f64::max));
    }
    Ok((worst <= 1e-8 && drift <= 1e-9, format!("pairing error {worst:.2e}, [p,q] drift {drift:.2e}")))
}

fn kernel_equivalence() -> Result<(bool, String)> {
    let xs: Vec<f64> = (0..21).map(|i| -5.0 + 0.5 * i as f64).collect();
    let mut worst = 0.0f64;
    for b in [0.0, 1.0, -1.0] {
        let w = xs
            .par_iter()
            .map(|&x| {
                xs.iter().map(|&y| Ok((kcusp(x, y, b)? - kcusp_phi(x, y, b)?).abs())).try_fold(0.0f64, |m, d: Result<f64>| {
                    Ok::<f64, crate::Error>(m.max(d?))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        worst = w.into_iter().fold(worst, f64::max);
    }
    Ok((worst <= 1e-8, format!("max |kcusp - kcusp_phi| {worst:.2e}")))
}

fn gap_probabilities() -> Result<(bool, String)> {
    let d40 = fredholm_det(-2.0, 2.0, 0.0, 40)?;
    let d80 = fredholm_det(-2.0, 2.0, 0.0, 80)?;
    let conv = (d40 - d80).abs();
    let small = gap_probability(-1e-4, 1e-4, 0.0, 8)?;
    let tr = kernel_trace(-1e-4, 1e-4, 0.0, 8)?;
    let expand = (small.det - (1.0 - tr)).abs();
    let nested: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&h| Ok(gap_probability(-h, h, 0.0, 20)?.det))
        .collect::<Result<_>>()?;
    let inclusion = nonincreasing(&nested);
    let in_range = nested.iter().chain([&d80]).all(|d| (0.0..=1.0).contains(d));
    let pass = conv <= 1e-8 && expand <= 1e-6 && inclusion && in_range;
    Ok((
        pass,
        format!("det(-2,2) {d80:.12}, 40/80 diff {conv:.2e}, small-interval {expand:.2e}, nested {nested:.4?}"),
    ))
}

fn finite_oracle() -> Result<(bool, String)> {
    let pts: Vec<f64> = (0..5).map(|i| -1.0 + 0.5 * i as f64).collect();
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 2.0] {
        for n in [2usize, 4, 6, 8] {
            let p = EnsembleParams::new(n, a)?;
            let o = OracleKernel::new(p)?;
            let k = kernel_n_grid(p, &pts, &pts)?;
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate() {
                    worst = worst.max((k[i][j] - o.eval(x, y)).abs());
                }
            }
        }
    }
    let mut trace = 0.0f64;
    for a in [1.0, 2.0] {
        for n in [2usize, 4, 8, 16, 32, 64] {
            trace = trace.max((kernel_n_trace(EnsembleParams::new(n, a)?)? / n as f64 - 1.0).abs());
        }
    }
    Ok((worst <= 1e-6 && trace <= 1e-4, format!("oracle {worst:.2e}, trace relative {trace:.2e}")))
}

fn cusp_limit() -> Result<(bool, String)> {
    let xs: Vec<f64> = (0..41).map(|i| -5.0 + 0.25 * i as f64).collect();
    let mut pass = true;
    let mut parts = vec![];
    for b in [0.0, 1.0] {
        let kc: Vec<Vec<f64>> =
            xs.iter().map(|&x| xs.iter().map(|&y| kcusp(x, y, b)).collect::<Result<_>>()).collect::<Result<_>>()?;
        let mut sups = vec![];
        for n in [16usize, 64, 256] {
            let k = scaled_kernel_grid(n, b, &xs, &xs)?;
            let s = k.iter().flatten().zip(kc.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            sups.push(s);
        }
        pass &= decreasing(&sups) && sups[2] <= 0.05;
        parts.push(format!("b={b}: {:.4} {:.4} {:.4}", sups[0], sups[1], sups[2]));
    }
    Ok((pass, format!("sup over n = 16, 64, 256; {}", parts.join("; "))))
}

/// Maximal runs of non-empty bins.
fn occupied_runs(counts: &[usize]) -> usize {
    counts.iter().zip(std::iter::once(&0).chain(counts.iter())).filter(|(c, prev)| **c > 0 && **prev == 0).count()
}

fn monte_carlo() -> Result<(bool, String)> {
    let (lo, hi, bins) = (-4.0, 4.0, 60);
    let s2 = sample_many(EnsembleParams::new(200, 2.0)?, 42, 200)?;
    let h2 = histogram(&s2, lo, hi, bins)?;
    let runs2 = occupied_runs(&h2.iter().map(|b| b.count).collect::<Vec<_>>());
    let sup2 = h2.iter().map(|b| (b.empirical_density - b.rho_limit).abs()).fold(0.0, f64::max);
    let s1 = sample_many(EnsembleParams::new(200, 1.0)?, 42, 200)?;
    let h1 = histogram(&s1, lo, hi, bins)?;
    let runs1 = occupied_runs(&h1.iter().map(|b| b.count).collect::<Vec<_>>());
    let centre = h1.iter().find(|b| b.bin_left <= 0.0 && 0.0 < b.bin_right).map_or(0.0, |b| b.empirical_density);
    let shoulder = h1
        .iter()
        .filter(|b| (0.5..1.5).contains(&b.bin_left.abs()))
        .map(|b| b.empirical_density)
        .fold(0.0, f64::max);
    let again = sample_many(EnsembleParams::new(200, 2.0)?, 42, 200)?;
    let same = s2.iter().zip(&again).all(|(a, b)| a.eigenvalues.iter().zip(&b.eigenvalues).all(|(x, y)| x.to_bits() == y.to_bits()));
    let pass = runs2 == 2 && sup2 <= 0.05 && runs1 == 1 && centre < shoulder && same;
    Ok((
        pass,
        format!(
            "a=2: {runs2} intervals, sup error {sup2:.4}; a=1: {runs1} interval, centre {centre:.3} vs shoulder {shoulder:.3}; reproducible {same}"
        ),
    ))
}

fn rh_model() -> Result<(bool, String)> {
    let (mut jump, mut det, mut tr, mut cof) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for a in [0.5, 1.0, 2.0] {
        let cv = make_curve(a)?;
        for i in 1..=10 {
            let x = cv.z_star * i as f64 / 11.0;
            jump = jump.max(model_jump_defect(&cv, x)?).max(model_jump_defect(&cv, -x)?);
        }
        for z in [c(0.0, 2.0), c(-1.0, 1.0), c(5.0, 0.0), c(0.3, -0.01)] {
            let m = model_m(&cv, z)?.entries;
            det = det.max((m.det() - 1.0).norm());
            tr = tr.max((m.inverse()? - m.transpose()).norm());
        }
        for j in 0..8 {
            let ang = PI * (j as f64 + 0.5) / 4.0;
            for e in [-6.0, -5.0, -4.0, -3.0, -2.0] {
                let r = 10f64.powf(e);
                let m = model_m(&cv, C64::from_polar(r, ang))?.entries;
                let s = r.powf(1.0 / 3.0);
                cof = cof.max(m.norm() * s).max(m.inverse()?.norm() * s);
            }
        }
    }
    let kj = (k_jump(0.7)? - M3::from_ints([[0, 1, 0], [-1, 0, 0], [0, 0, 1]])).norm()
        .max((k_jump(-0.7)? - M3::from_ints([[0, 0, 1], [0, 1, 0], [-1, 0, 0]])).norm());
    let pass = jump <= 1e-9 && det <= 1e-10 && tr <= 1e-9 && cof <= 10.0 && kj <= 1e-10;
    Ok((
        pass,
        format!("jumps {jump:.2e}, det {det:.2e}, inverse-transpose {tr:.2e}, |M||z|^1/3 {cof:.3}, K jumps {kj:.2e}"),
    ))
}

fn parametrix_matching() -> Result<(bool, String)> {
    let map = LambdaMap::new(make_curve(1.0)?);
    let mut side = 0.0f64;
    for x in [0.02, -0.02] {
        let up = prefactor_e_side(&map, c(x, 1e-8), 16, Side::Plus)?;
        let dn = prefactor_e_side(&map, c(x, -1e-8), 16, Side::Minus)?;
        side = side.max((up - dn).norm() / up.norm());
    }
    let mut cancel = 0.0f64;
    for j in 0..6 {
        let ang = PI * (j as f64 + 0.5) / 6.0;
        for r in theta_lambda_residual(&map, C64::from_polar(0.01, ang))? {
            cancel = cancel.max(r.norm());
        }
        let dn = theta_lambda_residual(&map, C64::from_polar(0.01, -ang))?;
        for (r, t) in dn.iter().zip([c(0.0, PI), c(0.0, -PI), c(0.0, 0.0)]) {
            cancel = cancel.max((r - t).norm());
        }
    }
    let mut parts = vec![];
    let mut mono = true;
    for b in [0.0, 1.0] {
        let d: Vec<f64> = [16, 64, 256].iter().map(|&n| Ok(matching_defect(b, n, 32)?.sup_defect)).collect::<Result<_>>()?;
        mono &= nonincreasing(&d);
        parts.push(format!("b={b}: {:.3e} {:.3e} {:.3e}", d[0], d[1], d[2]));
    }
    let pass = side <= 1e-6 && cancel <= 1e-9 && mono;
    Ok((pass, format!("E sides {side:.2e}, theta+lambda {cancel:.2e}, matching {}", parts.join("; "))))
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "curve identities",
        2 => "limiting density",
        3 => "lambda jumps",
        4 => "lambda constants",
        5 => "conformal and parameter maps",
        6 => "Pearcey functions",
        7 => "Phi jumps and asymptotics",
        8 => "pairings",
        9 => "kernel equivalence",
        10 => "gap probabilities",
        11 => "finite-n oracle and trace",
        12 => "cusp scaling limit",
        13 => "Monte Carlo",
        14 => "model RH solution",
        15 => "parametrix matching",
        _ => "unknown",
    }
}

/// Run criterion `id` (1..=15). Evaluation errors count as failures.
pub fn run(id: u8) -> Outcome {
    let t = Instant::now();
    let r = match id {
        1 => curve_identities(),
        2 => density(),
        3 => lambda_jumps(),
        4 => lambda_constants(),
        5 => conformal_maps(),
        6 => pearcey_functions(),
        7 => phi_structure(),
        8 => pairings(),
        9 => kernel_equivalence(),
        10 => gap_probabilities(),
        11 => finite_oracle(),
        12 => cusp_limit(),
        13 => monte_carlo(),
        14 => rh_model(),
        15 => parametrix_matching(),
        _ => Err(crate::Error::Argument(format!("no criterion {id}"))),
    };
    let (pass, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome { id, name: name(id), pass, detail, seconds: t.elapsed().as_secs_f64() }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=COUNT).map(run).collect()
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{:2}] {}: {} ({:.1} s)", self.id, self.name, self.detail, self.seconds)
    }
}
