//! Command-line runners for the cusp numerics. Tables go out as CSV with
//! 17 significant digits, structured results as JSON.

use clap::{Args, Parser, Subcommand};
use pearcey::cusp_kernel::{gap_probability_tol, kcusp, kcusp_phi, GAP_TOL};
use pearcey::finite_ensemble::{histogram, sample_many, scaled_kernel_grid, EnsembleParams};
use pearcey::lambda_map::LambdaMap;
use pearcey::make_curve;
use pearcey::rh_model::matching_defect;
use std::collections::HashMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Numeric(#[from] pearcey::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "pearcey", version, about = "Cusp-point numerics for the Gaussian ensemble with external source")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Random seed for sampling.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tolerance override for the command's convergence or acceptance test.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// key=value file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Limiting eigenvalue density on a grid.
    Density(DensityArgs),
    /// Critical trajectories Re λ_j = Re λ_k.
    Trajectories(TrajArgs),
    /// Pearcey kernel on a grid.
    Kernel(KernelArgs),
    /// Gap probability of an interval.
    Gap(GapArgs),
    /// Sup-distance of the scaled finite-n kernel to the Pearcey kernel.
    LimitCheck(LimitArgs),
    /// Monte Carlo eigenvalue histogram.
    Sample(SampleArgs),
    /// Matching defect of the local parametrix.
    RhCheck(RhArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    xmax: f64,
    #[arg(long, default_value_t = 801)]
    points: usize,
}

#[derive(Args, Debug)]
struct TrajArgs {
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Branch pair, e.g. 1,2.
    #[arg(long, default_value = "1,2")]
    pair: String,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    /// min:max:points for both x and y.
    #[arg(long, default_value = "-5:5:21", allow_hyphen_values = true)]
    grid: String,
    /// Representation: pq or phi.
    #[arg(long, default_value = "pq")]
    form: String,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, allow_hyphen_values = true)]
    d: f64,
    #[arg(long, default_value_t = 40)]
    nodes: usize,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    /// Comma-separated even sizes.
    #[arg(long, default_value = "16,64,256")]
    n: String,
    #[arg(long, default_value = "-5:5:41", allow_hyphen_values = true)]
    grid: String,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 60)]
    bins: usize,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    hi: f64,
}

#[derive(Args, Debug)]
struct RhArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value = "16,64,256")]
    n: String,
    #[arg(long, default_value_t = 32)]
    samples: usize,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Comma-separated criterion numbers; all when omitted.
    #[arg(long)]
    only: Option<String>,
}

/// Outcome classes mapped to exit codes 0, 2, 1.
enum Status {
    Ok,
    Warn,
}

fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Usage(format!("grid must be min:max:points with min < max and points ≥ 2, got {s}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 {
        return Err(bad());
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("bad {what} list: {s}"))))
        .collect()
}

fn sink(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn csv_out(out: &Option<PathBuf>, header: &[&str], rows: Vec<Vec<String>>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn json_out<T: serde::Serialize + ?Sized>(out: &Option<PathBuf>, v: &T) -> CliResult<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    Ok(())
}

fn positive_tol(tol: Option<f64>, default: f64) -> CliResult<f64> {
    let t = tol.unwrap_or(default);
    if !(t > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
    }
    Ok(t)
}

fn run(cli: &Cli) -> CliResult<Status> {
    let out = &cli.out;
    match &cli.command {
        Command::Density(a) => {
            let xs = parse_grid(&format!("{}:{}:{}", a.xmin, a.xmax, a.points))?;
            let cv = make_curve(a.a)?;
            let rows = xs.iter().map(|&x| Ok(vec![f17(x), f17(cv.density(x)?)])).collect::<CliResult<_>>()?;
            csv_out(out, &["x", "rho"], rows)?;
        }
        Command::Trajectories(a) => {
            let pair: Vec<usize> = parse_list(&a.pair, "pair")?;
            if pair.len() != 2 {
                return Err(CliError::Usage("--pair takes two branch indices".into()));
            }
            let map = LambdaMap::new(make_curve(a.a)?);
            let ts = map.trajectories((pair[0], pair[1]), a.step)?;
            let mut rows = vec![];
            let mut warn = false;
            for (i, t) in ts.iter().enumerate() {
                warn |= t.warning;
                for (p, d) in t.points.iter().zip(&t.defects) {
                    rows.push(vec![i.to_string(), format!("{:?}", t.kind), t.closed.to_string(), f17(p.re), f17(p.im), f17(*d)]);
                }
            }
            csv_out(out, &["trajectory", "kind", "closed", "re", "im", "defect"], rows)?;
            if warn {
                return Ok(Status::Warn);
            }
        }
        Command::Kernel(a) => {
            let xs = parse_grid(&a.grid)?;
            let f = match a.form.as_str() {
                "pq" => kcusp,
                "phi" => kcusp_phi,
                other => return Err(CliError::Usage(format!("unknown kernel form {other}"))),
            };
            let mut rows = vec![];
            for &x in &xs {
                for &y in &xs {
                    rows.push(vec![f17(x), f17(y), f17(f(x, y, a.b)?)]);
                }
            }
            csv_out(out, &["x", "y", "value"], rows)?;
        }
        Command::Gap(a) => {
            let g = gap_probability_tol(a.c, a.d, a.b, a.nodes, positive_tol(cli.tol, GAP_TOL)?)?;
            json_out(out, &g)?;
            if !g.converged {
                return Ok(Status::Warn);
            }
        }
        Command::LimitCheck(a) => {
            let ns: Vec<usize> = parse_list(&a.n, "n")?;
            let xs = parse_grid(&a.grid)?;
            let tol = positive_tol(cli.tol, 0.05)?;
            let kc: Vec<Vec<f64>> = xs
                .iter()
                .map(|&x| xs.iter().map(|&y| kcusp(x, y, a.b)).collect::<pearcey::Result<_>>())
                .collect::<pearcey::Result<_>>()?;
            let mut rows = vec![];
            let mut last = f64::INFINITY;
            for &n in &ns {
                let k = scaled_kernel_grid(n, a.b, &xs, &xs)?;
                last = k.iter().flatten().zip(kc.iter().flatten()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                rows.push(vec![n.to_string(), f17(a.b), f17(last)]);
            }
            csv_out(out, &["n", "b", "sup_diff"], rows)?;
            if last > tol {
                return Ok(Status::Warn);
            }
        }
        Command::Sample(a) => {
            let s = sample_many(EnsembleParams::new(a.n, a.a)?, cli.seed, a.trials)?;
            let h = histogram(&s, a.lo, a.hi, a.bins)?;
            let rows = h
                .iter()
                .map(|b| vec![f17(b.bin_left), f17(b.bin_right), b.count.to_string(), f17(b.empirical_density), f17(b.rho_limit)])
                .collect();
            csv_out(out, &["bin_left", "bin_right", "count", "empirical_density", "rho_limit"], rows)?;
        }
        Command::RhCheck(a) => {
            let ns: Vec<usize> = parse_list(&a.n, "n")?;
            let reports = ns.iter().map(|&n| matching_defect(a.b, n, a.samples)).collect::<pearcey::Result<Vec<_>>>()?;
            json_out(out, &reports)?;
            let tol = cli.tol.map(|t| positive_tol(Some(t), t)).transpose()?;
            let over = tol.is_some_and(|t| reports.iter().any(|r| r.sup_defect > t));
            if over || reports.iter().any(|r| !r.warnings.is_empty()) {
                return Ok(Status::Warn);
            }
        }
        Command::Selftest(a) => {
            let ids: Vec<u8> = match &a.only {
                Some(s) => parse_list(s, "criterion")?,
                None => (1..=pearcey::acceptance::COUNT).collect(),
            };
            let mut results = vec![];
            for id in ids {
                if !(1..=pearcey::acceptance::COUNT).contains(&id) {
                    return Err(CliError::Usage(format!("no criterion {id}")));
                }
                let o = pearcey::acceptance::run(id);
                eprintln!("{o}");
                results.push(o);
            }
            if out.is_some() {
                json_out(out, &results)?;
            }
            let failed = results.iter().filter(|o| !o.pass).count();
            eprintln!("{} passed, {failed} failed", results.len() - failed);
            if failed > 0 {
                return Ok(Status::Warn);
            }
        }
    }
    Ok(Status::Ok)
}

/// Read key=value lines; blank lines and lines starting with # are skipped.
fn read_config(path: &PathBuf) -> io::Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut kv = vec![];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: expected key=value", i + 1)))?;
        kv.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(kv)
}

/// Splice config-file entries in as flags after the subcommand, skipping any
/// key the command line already sets.
fn merged_args() -> Result<Vec<String>, String> {
    let args: Vec<String> = std::env::args().collect();
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].split_once('=') {
        Some((_, p)) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or("--config needs a path")?,
    };
    let kv = read_config(&PathBuf::from(&path)).map_err(|e| format!("config {path}: {e}"))?;
    let given: HashMap<String, ()> =
        args.iter().filter_map(|a| a.strip_prefix("--")).map(|a| (a.split('=').next().unwrap_or(a).to_string(), ())).collect();
    let sub = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|i| i + 2).unwrap_or(args.len());
    let mut merged = args[..sub.min(args.len())].to_vec();
    for (k, v) in kv {
        if !given.contains_key(&k) {
            merged.push(format!("--{k}={v}"));
        }
    }
    merged.extend_from_slice(&args[sub.min(args.len())..]);
    Ok(merged)
}

fn main() -> ExitCode {
    let args = match merged_args() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(64);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: --threads must be a positive integer");
            return ExitCode::from(64);
        }
    }
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Warn) => ExitCode::from(2),
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(64)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
