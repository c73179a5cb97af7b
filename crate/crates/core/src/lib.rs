//! Dominant-eigenvalue extraction for dense real matrices.
//!
//! The crate combines a power-iteration core with simulated annealing and a
//! genetic-style mutation operator, runs it either sequentially or over a
//! row-partitioned worker pool, and ships an Arnoldi baseline plus a dense
//! Hessenberg-QR eigensolver that doubles as the desk-scale oracle. A small
//! benchmark harness times the solvers across matrix dimensions and fits
//! log-log scaling exponents.
//!
//! Reproducibility is a design axiom: every stochastic choice is drawn from
//! one seeded generator owned by the solve call, and the parallel engine is
//! bit-identical to the sequential path for every worker count.

pub mod arnoldi;
pub mod bench;
pub mod error;
pub mod linalg;
pub mod mtx;
pub mod parallel;
pub mod planted;
pub mod qr;
mod rng;
pub mod sa;
pub mod solver;

pub use arnoldi::{arnoldi_factorize, ritz_values, ArnoldiFactorization};
pub use bench::{
    emit_csv, emit_plot_data, parse_csv, run_benchmark, scaling_fit, BenchmarkRecord, Method,
    ScalingFit,
};
pub use error::{Error, Result};
pub use linalg::{fitness, matvec, norm, normalize, rayleigh_quotient, DenseMatrix, Vector};
pub use mtx::{load_matrix_market, load_vector, save_matrix_market, save_vector};
pub use parallel::{
    cost_model, distribute_rows, epmp_parallel, parallel_matvec, partition_rows, CostEstimate,
    ParallelPlan, RowBlock, WorkerPool,
};
pub use planted::{generate_planted, Spectrum};
pub use qr::hessenberg_qr_eig;
pub use rng::seeded_unit_vector;
pub use sa::{cooling_step, metropolis_decide, metropolis_decide_literal, mutate, SaDecision};
pub use solver::{deflate_hotelling, epmp_sequential, power_method, EigenEstimate, EpmpConfig};
