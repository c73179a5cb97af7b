//! Desk-scale runtime harness: timed solver sweeps over planted matrices,
//! CSV and plot-data emission, and log-log scaling-exponent fits.
//!
//! Timing covers the solve only (for the parallel method that includes
//! worker-pool setup, mirroring a layout where each processor loads its own
//! rows); matrix generation and file I/O are excluded. A dimension whose
//! matrix cannot be allocated produces a NULL record and the sweep
//! continues. Methods run one at a time so timings are uncontended.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::arnoldi::{arnoldi_factorize, ritz_values};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::parallel::epmp_parallel;
use crate::planted::{generate_planted, Spectrum};
use crate::rng;
use crate::solver::{epmp_sequential, power_method, EpmpConfig};

/// Solver under measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Power,
    EpmpSeq,
    EpmpPar,
    Arnoldi,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Power,
        Method::EpmpSeq,
        Method::EpmpPar,
        Method::Arnoldi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Power => "POWER",
            Method::EpmpSeq => "EPMP_SEQ",
            Method::EpmpPar => "EPMP_PAR",
            Method::Arnoldi => "ARNOLDI",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts the canonical record names and the CLI spellings.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "power" => Ok(Method::Power),
            "epmp" | "epmp_seq" => Ok(Method::EpmpSeq),
            "epmp_par" => Ok(Method::EpmpPar),
            "arnoldi" => Ok(Method::Arnoldi),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        }
    }
}

/// One (dimension, method, worker-count) measurement. The measure fields
/// are `None` for NULL records (the dimension could not be processed, e.g.
/// out of memory); such rows serialize as `NULL` in the CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub dim: usize,
    pub method: Method,
    pub workers: usize,
    pub reps: usize,
    pub mean_seconds: Option<f64>,
    pub stddev_seconds: Option<f64>,
    pub iterations_mean: Option<f64>,
    pub converged_fraction: Option<f64>,
}

/// Least-squares slope of `log(mean_seconds)` against `log(dim)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub r_squared: f64,
}

/// Spectrum recipe used for every benchmark matrix: `lambda1 = 10`,
/// `lambda2 = 5`, remaining values uniform in `[0, 1)`.
pub fn bench_spectrum(dim: usize, seed: u64) -> Result<Spectrum> {
    Spectrum::gapped(dim, 10.0, 5.0, seed)
}

fn run_one(
    a: &DenseMatrix,
    method: Method,
    cfg: &EpmpConfig,
    workers: usize,
) -> Result<(f64, f64, bool)> {
    let start = Instant::now();
    let (iterations, converged) = match method {
        Method::Power => {
            let e = power_method(a, cfg)?;
            (e.iterations as f64, e.converged)
        }
        Method::EpmpSeq => {
            let e = epmp_sequential(a, cfg)?;
            (e.iterations as f64, e.converged)
        }
        Method::EpmpPar => {
            let e = epmp_parallel(a, cfg, workers)?;
            (e.iterations as f64, e.converged)
        }
        Method::Arnoldi => {
            let k = 30.min(a.n().saturating_sub(1)).max(1);
            let mut r = rng::seeded(cfg.seed);
            let q1 = rng::random_unit_vector(a.n(), &mut r)?;
            let f = arnoldi_factorize(a, &q1, k)?;
            let _top = ritz_values(&f)?;
            (f.steps() as f64, true)
        }
    };
    Ok((start.elapsed().as_secs_f64(), iterations, converged))
}

fn null_record(dim: usize, method: Method, workers: usize, reps: usize) -> BenchmarkRecord {
    BenchmarkRecord {
        dim,
        method,
        workers,
        reps,
        mean_seconds: None,
        stddev_seconds: None,
        iterations_mean: None,
        converged_fraction: None,
    }
}

/// Timed sweep over `dims x methods`. One matrix is generated per dimension
/// (seeded from `cfg.seed` and the dimension) and shared across methods and
/// reps; solver seeds vary deterministically as `cfg.seed + rep`. A warm-up
/// run per method is excluded from the statistics.
pub fn run_benchmark(
    dims: &[usize],
    methods: &[Method],
    reps: usize,
    cfg: &EpmpConfig,
    workers: usize,
) -> Result<Vec<BenchmarkRecord>> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument("dims must be nonempty".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidArgument("methods must be nonempty".into()));
    }
    if reps < 1 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    cfg.validate()?;

    let mut records = Vec::with_capacity(dims.len() * methods.len());
    for &dim in dims {
        let matrix_seed = cfg.seed.wrapping_add(dim as u64);
        let matrix = bench_spectrum(dim, matrix_seed)
            .and_then(|s| generate_planted(dim, &s, matrix_seed));
        let a = match matrix {
            Ok(a) => a,
            Err(Error::OutOfMemory { .. }) => {
                for &method in methods {
                    records.push(null_record(dim, method, par_workers(method, workers, dim), reps));
                }
                continue;
            }
            Err(e) => return Err(e),
        };

        for &method in methods {
            let w = par_workers(method, workers, dim);
            let mut warm_cfg = cfg.clone();
            warm_cfg.seed = cfg.seed;
            if let Err(Error::OutOfMemory { .. }) = run_one(&a, method, &warm_cfg, w) {
                records.push(null_record(dim, method, w, reps));
                continue;
            }

            let mut times = Vec::with_capacity(reps);
            let mut iters = Vec::with_capacity(reps);
            let mut conv = 0usize;
            let mut oom = false;
            for rep in 0..reps {
                let mut rep_cfg = cfg.clone();
                rep_cfg.seed = cfg.seed.wrapping_add(rep as u64);
                match run_one(&a, method, &rep_cfg, w) {
                    Ok((secs, its, converged)) => {
                        times.push(secs);
                        iters.push(its);
                        conv += usize::from(converged);
                    }
                    Err(Error::OutOfMemory { .. }) => {
                        oom = true;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if oom {
                records.push(null_record(dim, method, w, reps));
                continue;
            }

            let k = times.len() as f64;
            let mean = times.iter().sum::<f64>() / k;
            let stddev = if times.len() > 1 {
                (times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            records.push(BenchmarkRecord {
                dim,
                method,
                workers: w,
                reps,
                mean_seconds: Some(mean),
                stddev_seconds: Some(stddev),
                iterations_mean: Some(iters.iter().sum::<f64>() / k),
                converged_fraction: Some(conv as f64 / k),
            });
        }
    }
    Ok(records)
}

fn par_workers(method: Method, workers: usize, dim: usize) -> usize {
    match method {
        Method::EpmpPar => workers.clamp(1, dim),
        _ => 1,
    }
}

/// Slope and r-squared of the log-log regression for one method. Requires
/// at least three records with positive means.
pub fn scaling_fit(records: &[BenchmarkRecord], method: Method) -> Result<ScalingFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.method == method)
        .filter_map(|r| r.mean_seconds.map(|m| (r.dim, m)))
        .filter(|&(_, m)| m > 0.0)
        .map(|(d, m)| ((d as f64).ln(), m.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientRecords {
            needed: 3,
            got: points.len(),
        });
    }
    let k = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / k;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / k;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in &points {
        sxy += (x - xbar) * (y - ybar);
        sxx += (x - xbar) * (x - xbar);
        syy += (y - ybar) * (y - ybar);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "scaling fit needs at least two distinct dimensions".into(),
        ));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(ScalingFit { slope, r_squared })
}

const CSV_HEADER: &str =
    "dim,method,workers,reps,mean_seconds,stddev_seconds,iterations_mean,converged_fraction";

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => "NULL".to_string(),
    }
}

/// Writes the records as RFC-4180-style CSV with a mandatory header; floats
/// carry 17 significant digits so parsing the file back is lossless.
pub fn emit_csv(records: &[BenchmarkRecord], path: impl AsRef<Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to emit".into()));
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.dim,
            r.method,
            r.workers,
            r.reps,
            fmt_opt(r.mean_seconds),
            fmt_opt(r.stddev_seconds),
            fmt_opt(r.iterations_mean),
            fmt_opt(r.converged_fraction),
        ));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

fn parse_opt(path: &Path, line: usize, token: &str) -> Result<Option<f64>> {
    if token == "NULL" {
        return Ok(None);
    }
    token
        .parse::<f64>()
        .map(Some)
        .map_err(|_| Error::MtxParse {
            path: path.to_path_buf(),
            line,
            msg: format!("bad numeric field '{token}'"),
        })
}

/// Reads back a CSV produced by `emit_csv`.
pub fn parse_csv(path: impl AsRef<Path>) -> Result<Vec<BenchmarkRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    if header != CSV_HEADER {
        return Err(Error::MtxParse {
            path: path.to_path_buf(),
            line: 1,
            msg: "missing or unexpected CSV header".into(),
        });
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::MtxParse {
                path: path.to_path_buf(),
                line: line_no,
                msg: format!("expected 8 fields, found {}", fields.len()),
            });
        }
        let bad = |msg: String| Error::MtxParse {
            path: path.to_path_buf(),
            line: line_no,
            msg,
        };
        records.push(BenchmarkRecord {
            dim: fields[0].parse().map_err(|_| bad("bad dim".into()))?,
            method: fields[1].parse()?,
            workers: fields[2].parse().map_err(|_| bad("bad workers".into()))?,
            reps: fields[3].parse().map_err(|_| bad("bad reps".into()))?,
            mean_seconds: parse_opt(path, line_no, fields[4])?,
            stddev_seconds: parse_opt(path, line_no, fields[5])?,
            iterations_mean: parse_opt(path, line_no, fields[6])?,
            converged_fraction: parse_opt(path, line_no, fields[7])?,
        });
    }
    Ok(records)
}

/// Writes one whitespace-separated `(dim, mean_seconds)` series per method
/// into `dir/<METHOD>.dat`, each with a comment header line. NULL records
/// are skipped; a method with no data still gets a header-only file.
pub fn emit_plot_data(records: &[BenchmarkRecord], dir: impl AsRef<Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to emit".into()));
    }
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for method in Method::ALL {
        if !records.iter().any(|r| r.method == method) {
            continue;
        }
        let mut out = String::from("# dim mean_seconds\n");
        for r in records.iter().filter(|r| r.method == method) {
            if let Some(mean) = r.mean_seconds {
                out.push_str(&format!("{} {:.16e}\n", r.dim, mean));
            }
        }
        let mut f = fs::File::create(dir.join(format!("{}.dat", method.name())))?;
        f.write_all(out.as_bytes())?;
    }
    Ok(())
}
