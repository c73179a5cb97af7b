//! `epmp` command line: solve, generate, bench, and oracle workflows over
//! Matrix Market files. Output is one `key: value` pair per line so runs
//! script cleanly.
//!
//! Exit codes: 0 success, 2 solver ran out of iterations without
//! converging, 64 usage error, 66 file error, 70 solver error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use epmp_core::{
    arnoldi_factorize, deflate_hotelling, emit_csv, emit_plot_data, epmp_parallel,
    epmp_sequential, generate_planted, hessenberg_qr_eig, load_matrix_market, power_method,
    ritz_values, run_benchmark, save_matrix_market, scaling_fit, DenseMatrix, EigenEstimate,
    EpmpConfig, Error as CoreError, Method, Spectrum,
};

const EXIT_MAX_ITER: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_FILE: u8 = 66;
const EXIT_SOLVER: u8 = 70;

#[derive(Parser)]
#[command(
    name = "epmp",
    version,
    about = "Dominant-eigenvalue solvers over Matrix Market files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the dominant eigenvalue of a matrix
    Solve(SolveArgs),
    /// Generate a symmetric test matrix with a planted spectrum
    Generate(GenerateArgs),
    /// Time the solvers across matrix dimensions and fit scaling exponents
    Bench(BenchArgs),
    /// Print the full spectrum via the dense QR eigensolver (n <= 2000)
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Power,
    Epmp,
    EpmpPar,
    Arnoldi,
}

#[derive(Args)]
struct SolverKnobs {
    /// Relative fitness-change stop tolerance
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Initial annealing temperature
    #[arg(long, default_value_t = 1.0)]
    t0: f64,
    /// Cooling rate, strictly inside (0, 1)
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// Iteration cap
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
    /// Per-entry mutation probability
    #[arg(long, default_value_t = 0.05)]
    p_mut: f64,
    /// Mutation noise base scale
    #[arg(long, default_value_t = 0.1)]
    sigma0: f64,
    /// Seed for every stochastic choice
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute residual declared success
    #[arg(long, default_value_t = 1e-8)]
    res_tol: f64,
    /// Use the literal unrepaired annealing branch (always mutates on the
    /// worse branch) for side-by-side study
    #[arg(long)]
    literal_paper_sa: bool,
}

impl SolverKnobs {
    fn config(&self) -> EpmpConfig {
        EpmpConfig {
            eps: self.eps,
            t0: self.t0,
            alpha: self.alpha,
            max_iter: self.max_iter,
            p_mut: self.p_mut,
            sigma0: self.sigma0,
            seed: self.seed,
            res_tol: self.res_tol,
            literal_sa: self.literal_paper_sa,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix Market file holding the square input matrix
    #[arg(long)]
    matrix: PathBuf,
    /// Solver to run
    #[arg(long, value_enum)]
    method: MethodArg,
    #[command(flatten)]
    knobs: SolverKnobs,
    /// Worker count for epmp-par (default: EPMP_WORKERS or the available
    /// hardware parallelism, capped at the matrix dimension)
    #[arg(long)]
    workers: Option<usize>,
    /// Deflate and re-solve K times, printing K eigenvalues
    #[arg(long, value_name = "K")]
    deflate: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Matrix dimension
    #[arg(long)]
    n: usize,
    /// Comma list of eigenvalues, or "gapped:L1,L2" for L1, L2 and the rest
    /// uniform in [0, 1)
    #[arg(long)]
    spectrum: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the Matrix Market file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma list of matrix dimensions
    #[arg(long)]
    dims: String,
    /// Comma list of methods (power, epmp, epmp-par, arnoldi)
    #[arg(long, default_value = "power,epmp,epmp-par,arnoldi")]
    methods: String,
    /// Timed repetitions per cell (a warm-up run is excluded)
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for CSV and plot data
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Annealing start; the harness defaults run hotter and cool slower
    /// than `solve` so every planted-recipe solve converges
    #[arg(long, default_value_t = 5.0)]
    t0: f64,
    #[arg(long, default_value_t = 0.999)]
    alpha: f64,
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 0.05)]
    p_mut: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma0: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    res_tol: f64,
    #[arg(long)]
    literal_paper_sa: bool,
}

impl BenchArgs {
    fn config(&self) -> EpmpConfig {
        EpmpConfig {
            eps: self.eps,
            t0: self.t0,
            alpha: self.alpha,
            max_iter: self.max_iter,
            p_mut: self.p_mut,
            sigma0: self.sigma0,
            seed: self.seed,
            res_tol: self.res_tol,
            literal_sa: self.literal_paper_sa,
        }
    }
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    matrix: PathBuf,
}

enum AppError {
    Usage(String),
    Core(CoreError),
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Core(e)
    }
}

fn exit_for(err: &AppError) -> u8 {
    match err {
        AppError::Usage(_) => EXIT_USAGE,
        AppError::Core(e) => match e {
            CoreError::Io(_)
            | CoreError::MtxParse { .. }
            | CoreError::NotSquare { .. }
            | CoreError::NonFiniteEntry { .. } => EXIT_FILE,
            _ => EXIT_SOLVER,
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            // clap renders help to stdout and errors (with usage) to stderr.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            match &err {
                AppError::Usage(msg) => eprintln!("error: {msg}"),
                AppError::Core(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_for(&err))
        }
    }
}

fn run(cli: Cli) -> Result<u8, AppError> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Generate(args) => generate(args),
        Command::Bench(args) => bench(args),
        Command::Oracle(args) => oracle(args),
    }
}

/// Resolve the worker count: flag, then EPMP_WORKERS, then the hardware
/// parallelism; always capped at the matrix dimension.
fn resolve_workers(flag: Option<usize>, n: usize) -> Result<usize, AppError> {
    let requested = match flag {
        Some(w) => w,
        None => match std::env::var("EPMP_WORKERS") {
            Ok(s) => s
                .parse::<usize>()
                .map_err(|_| AppError::Usage(format!("EPMP_WORKERS is not a number: '{s}'")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |p| p.get()),
        },
    };
    if requested == 0 {
        return Err(AppError::Usage("worker count must be positive".into()));
    }
    Ok(requested.min(n))
}

fn print_estimate(estimate: &EigenEstimate) {
    println!("lambda: {:.12}", estimate.lambda);
    println!("lambda_abs: {:.12}", estimate.lambda_abs);
    println!("residual: {:.6e}", estimate.residual);
    println!("iterations: {}", estimate.iterations);
    println!("converged: {}", estimate.converged);
    println!("mutations: {}", estimate.mutations);
    println!("worse_accepts: {}", estimate.worse_accepts);
}

fn solve_once(
    a: &DenseMatrix,
    method: MethodArg,
    cfg: &EpmpConfig,
    workers: usize,
) -> Result<EigenEstimate, AppError> {
    Ok(match method {
        MethodArg::Power => power_method(a, cfg)?,
        MethodArg::Epmp => epmp_sequential(a, cfg)?,
        MethodArg::EpmpPar => epmp_parallel(a, cfg, workers)?,
        MethodArg::Arnoldi => unreachable!("arnoldi handled separately"),
    })
}

fn solve(args: SolveArgs) -> Result<u8, AppError> {
    let a = load_matrix_market(&args.matrix)?;
    let cfg = args.knobs.config();
    let workers = resolve_workers(args.workers, a.n())?;

    if args.method == MethodArg::Arnoldi {
        if args.deflate.is_some() {
            return Err(AppError::Usage(
                "--deflate needs an eigenvector-producing method (power, epmp, epmp-par)".into(),
            ));
        }
        let k = 30.min(a.n().saturating_sub(1)).max(1);
        let q1 = epmp_core::seeded_unit_vector(a.n(), cfg.seed)?;
        let fact = arnoldi_factorize(&a, &q1, k)?;
        let top = ritz_values(&fact)?[0];
        println!("lambda: {:.12}", top.0);
        println!("lambda_abs: {:.12}", top.0.hypot(top.1));
        // Proxy: the final subdiagonal bounds how far the Krylov space is
        // from invariant; per-value residuals need Ritz vectors.
        let sub = if fact.breakdown() {
            0.0
        } else {
            fact.h(fact.steps(), fact.steps() - 1)
        };
        println!("residual: {:.6e}", sub);
        println!("iterations: {}", fact.steps());
        println!("converged: true");
        return Ok(0);
    }

    match args.deflate {
        None => {
            let estimate = solve_once(&a, args.method, &cfg, workers)?;
            print_estimate(&estimate);
            Ok(if estimate.converged { 0 } else { EXIT_MAX_ITER })
        }
        Some(k) => {
            if k == 0 {
                return Err(AppError::Usage("--deflate needs K >= 1".into()));
            }
            if k > a.n() {
                return Err(AppError::Usage(format!(
                    "--deflate {k} exceeds the matrix dimension {}",
                    a.n()
                )));
            }
            let mut current = a;
            let mut all_converged = true;
            for i in 1..=k {
                let estimate = solve_once(&current, args.method, &cfg, workers)?;
                println!("lambda_{i}: {:.12}", estimate.lambda);
                println!("residual_{i}: {:.6e}", estimate.residual);
                println!("converged_{i}: {}", estimate.converged);
                all_converged &= estimate.converged;
                if i < k {
                    current =
                        deflate_hotelling(&current, estimate.lambda, &estimate.eigenvector)?;
                }
            }
            Ok(if all_converged { 0 } else { EXIT_MAX_ITER })
        }
    }
}

fn parse_spectrum(spec: &str, n: usize, seed: u64) -> Result<Spectrum, AppError> {
    if let Some(rest) = spec.strip_prefix("gapped:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(AppError::Usage(format!(
                "gapped spectrum needs two values, got '{rest}'"
            )));
        }
        let l1: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("bad eigenvalue '{}'", parts[0])))?;
        let l2: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("bad eigenvalue '{}'", parts[1])))?;
        return Ok(Spectrum::gapped(n, l1, l2, seed)?);
    }
    let values: Result<Vec<f64>, AppError> = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| AppError::Usage(format!("bad eigenvalue '{t}'")))
        })
        .collect();
    let values = values?;
    if values.len() != n {
        return Err(AppError::Usage(format!(
            "spectrum has {} values but --n is {n}",
            values.len()
        )));
    }
    Ok(Spectrum::new(values)?)
}

fn generate(args: GenerateArgs) -> Result<u8, AppError> {
    if args.n == 0 {
        return Err(AppError::Usage("--n must be positive".into()));
    }
    let spectrum = parse_spectrum(&args.spectrum, args.n, args.seed)?;
    let a = generate_planted(args.n, &spectrum, args.seed)?;
    save_matrix_market(&a, &args.out)?;
    println!("wrote: {}", args.out.display());
    println!("n: {}", args.n);
    Ok(0)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, AppError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| AppError::Usage(format!("bad {what} '{t}'")))
        })
        .collect()
}

fn bench(args: BenchArgs) -> Result<u8, AppError> {
    let dims: Vec<usize> = parse_list(&args.dims, "dimension")?;
    let methods: Vec<Method> = args
        .methods
        .split(',')
        .map(|t| t.trim().parse::<Method>())
        .collect::<Result<_, _>>()
        .map_err(|e| AppError::Usage(e.to_string()))?;
    let max_dim = dims.iter().copied().max().unwrap_or(1);
    let workers = resolve_workers(args.workers, max_dim)?;
    let cfg = args.config();

    let records = run_benchmark(&dims, &methods, args.reps, &cfg, workers)?;
    std::fs::create_dir_all(&args.out).map_err(CoreError::from)?;
    let csv_path = args.out.join("benchmark.csv");
    emit_csv(&records, &csv_path)?;
    emit_plot_data(&records, &args.out)?;

    println!("csv: {}", csv_path.display());
    for &method in &methods {
        match scaling_fit(&records, method) {
            Ok(fit) => {
                println!("slope_{method}: {:.4}", fit.slope);
                println!("r_squared_{method}: {:.4}", fit.r_squared);
            }
            Err(_) => println!("slope_{method}: n/a (needs 3 usable dims)"),
        }
    }
    Ok(0)
}

fn oracle(args: OracleArgs) -> Result<u8, AppError> {
    let a = load_matrix_market(&args.matrix)?;
    let eigs = hessenberg_qr_eig(&a)?;
    println!("n: {}", a.n());
    for (i, (re, im)) in eigs.iter().enumerate() {
        if *im == 0.0 {
            println!("lambda_{}: {:.12}", i + 1, re);
        } else if *im > 0.0 {
            println!("lambda_{}: {:.12}+{:.12}i", i + 1, re, im);
        } else {
            println!("lambda_{}: {:.12}-{:.12}i", i + 1, re, -im);
        }
    }
    Ok(0)
}
