//! Sequential solvers: the plain power-method baseline and the annealed
//! mutation solver (power iteration + Metropolis acceptance + mutation),
//! plus Hotelling deflation for extracting subsequent eigenpairs.
//!
//! Both solvers run on a matvec engine abstraction so the row-block worker
//! pool can drive the identical control flow; every stochastic draw happens
//! on the coordinator side, which is what makes the parallel solve
//! bit-identical to the sequential one.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    eigen_residual_stats, matvec, norm, scale, DenseMatrix, Vector,
};
use crate::rng;
use crate::sa::{cooling_step, metropolis_decide, metropolis_decide_literal, mutate, SaDecision};

/// Below this the relative-change stop test would divide by ~zero; a fitness
/// this small is already the success condition.
const TINY_FITNESS: f64 = 1e-300;

/// Solver knobs. `eps` is the relative-fitness-change stop tolerance, `t0`
/// and `alpha` the temperature schedule, `p_mut`/`sigma0` the mutation
/// parameters, `res_tol` the absolute residual at which a solve is declared
/// successful. `literal_sa` switches the Metropolis branch to the
/// always-mutate literal variant for side-by-side study.
#[derive(Debug, Clone, PartialEq)]
pub struct EpmpConfig {
    pub eps: f64,
    pub t0: f64,
    pub alpha: f64,
    pub max_iter: usize,
    pub p_mut: f64,
    pub sigma0: f64,
    pub seed: u64,
    pub res_tol: f64,
    pub literal_sa: bool,
}

impl Default for EpmpConfig {
    fn default() -> Self {
        Self {
            eps: 1e-8,
            t0: 1.0,
            alpha: 0.95,
            max_iter: 50_000,
            p_mut: 0.05,
            sigma0: 0.1,
            seed: 0,
            res_tol: 1e-8,
            literal_sa: false,
        }
    }
}

impl EpmpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie strictly inside (0, 1), got {}",
                self.alpha
            )));
        }
        // `<=` alone would wave NaN through; check it explicitly.
        if self.eps <= 0.0 || self.eps.is_nan() {
            return Err(Error::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        if self.t0 <= 0.0 || self.t0.is_nan() {
            return Err(Error::InvalidConfig(format!("t0 must be positive, got {}", self.t0)));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_mut) {
            return Err(Error::InvalidConfig(format!(
                "p_mut must lie in [0, 1], got {}",
                self.p_mut
            )));
        }
        if self.sigma0 <= 0.0 || self.sigma0.is_nan() {
            return Err(Error::InvalidConfig(format!(
                "sigma0 must be positive, got {}",
                self.sigma0
            )));
        }
        if self.res_tol <= 0.0 || self.res_tol.is_nan() {
            return Err(Error::InvalidConfig(format!(
                "res_tol must be positive, got {}",
                self.res_tol
            )));
        }
        Ok(())
    }
}

/// Solver output. `lambda` carries the sign (Rayleigh quotient of the
/// returned eigenvector); `lambda_abs` is the norm of the accepted
/// un-normalized iterate, the magnitude the plain iteration reports. The
/// decision tallies satisfy
/// `improved_accepts + worse_accepts + mutations + rerandomizations + 1 ==
/// iterations` (the final pass is the converged check or the cap event).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenEstimate {
    pub lambda: f64,
    pub lambda_abs: f64,
    pub eigenvector: Vector,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub mutations: usize,
    pub worse_accepts: usize,
    pub improved_accepts: usize,
    pub rerandomizations: usize,
}

/// Matvec provider: the sequential path applies the dense matrix directly,
/// the parallel path broadcasts to the worker pool. Implementations must be
/// bit-identical to `linalg::matvec` on the same matrix.
pub(crate) trait MatVecEngine {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[f64]) -> Vector;
}

pub(crate) struct SeqEngine<'a>(pub &'a DenseMatrix);

impl MatVecEngine for SeqEngine<'_> {
    fn dim(&self) -> usize {
        self.0.n()
    }

    fn apply(&self, v: &[f64]) -> Vector {
        matvec(self.0, v).expect("engine dimension verified at construction")
    }
}

/// Plain power iteration: `v <- normalize(A v)` from a seeded random start
/// until the eigen-residual drops below `res_tol` or `max_iter` passes.
/// Never mutates and never accepts a worse iterate.
pub fn power_method(a: &DenseMatrix, cfg: &EpmpConfig) -> Result<EigenEstimate> {
    solve_power(&SeqEngine(a), cfg)
}

pub(crate) fn solve_power<E: MatVecEngine>(engine: &E, cfg: &EpmpConfig) -> Result<EigenEstimate> {
    cfg.validate()?;
    let n = engine.dim();
    let mut gen = rng::seeded(cfg.seed);
    let mut v = rng::random_unit_vector(n, &mut gen)?;
    let mut w = engine.apply(&v);
    let mut improved = 0usize;
    let mut iterations = 0usize;

    let mut best: Option<(f64, f64, f64, Vector)> = None; // (res, rho, |w|, v)
    loop {
        iterations += 1;
        let wnorm = norm(&w);
        if wnorm == 0.0 {
            return Err(Error::ZeroIterate);
        }
        let (rho, res) = eigen_residual_stats(&v, &w);
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, rho, wnorm, v.clone()));
        }
        if res < cfg.res_tol {
            return Ok(EigenEstimate {
                lambda: rho,
                lambda_abs: wnorm,
                eigenvector: v,
                residual: res,
                iterations,
                converged: true,
                mutations: 0,
                worse_accepts: 0,
                improved_accepts: improved,
                rerandomizations: 0,
            });
        }
        if iterations >= cfg.max_iter {
            let (res, rho, wnorm, v) = best.expect("at least one pass recorded");
            return Ok(EigenEstimate {
                lambda: rho,
                lambda_abs: wnorm,
                eigenvector: v,
                residual: res,
                iterations,
                converged: false,
                mutations: 0,
                worse_accepts: 0,
                improved_accepts: improved,
                rerandomizations: 0,
            });
        }
        v = scale(&w, 1.0 / wnorm);
        w = engine.apply(&v);
        improved += 1;
    }
}

/// One tracked iterate: the unit vector, its image `A v`, and derived stats.
struct Iterate {
    v: Vector,
    image: Vector,
    rho: f64,
    res: f64,
}

impl Iterate {
    fn from_unit<E: MatVecEngine>(engine: &E, v: Vector) -> Self {
        let image = engine.apply(&v);
        let (rho, res) = eigen_residual_stats(&v, &image);
        Self { v, image, rho, res }
    }
}

/// The annealed mutation solver, sequential form.
pub fn epmp_sequential(a: &DenseMatrix, cfg: &EpmpConfig) -> Result<EigenEstimate> {
    solve_epmp(&SeqEngine(a), cfg)
}

/// Engine-generic annealed solve.
///
/// Loop structure per pass: normalize the image `y = A v`; converge when the
/// relative fitness change `|(P(y) - P(v)) / P(y)|` falls under `eps`, when
/// `P(y)` underflows the division guard, or when `P(y) < res_tol`; otherwise
/// accept the improvement, or on the worse branch draw `r` and either accept
/// the worse iterate or mutate. The temperature cools once per pass.
pub(crate) fn solve_epmp<E: MatVecEngine>(engine: &E, cfg: &EpmpConfig) -> Result<EigenEstimate> {
    cfg.validate()?;
    let n = engine.dim();
    let mut gen: ChaCha8Rng = rng::seeded(cfg.seed);
    let mut temp = cfg.t0;

    let mut cur = Iterate::from_unit(engine, rng::random_unit_vector(n, &mut gen)?);
    // Best-seen state for the cap exit: (res, rho, image norm, vector).
    let mut best = (cur.res, cur.rho, norm(&cur.image), cur.v.clone());

    let mut iterations = 0usize;
    let mut improved = 0usize;
    let mut worse = 0usize;
    let mut mutations = 0usize;
    let mut rerand = 0usize;
    let mut converged: Option<EigenEstimate> = None;

    loop {
        iterations += 1;
        let ynorm = norm(&cur.image);
        if ynorm == 0.0 {
            // Degenerate iterate: re-randomize from the seed stream; this
            // counts as the pass.
            if iterations >= cfg.max_iter {
                break;
            }
            rerand += 1;
            cur = Iterate::from_unit(engine, rng::random_unit_vector(n, &mut gen)?);
            if cur.res < best.0 {
                best = (cur.res, cur.rho, norm(&cur.image), cur.v.clone());
            }
            temp = cooling_step(temp, cfg.alpha);
            continue;
        }

        let cand = Iterate::from_unit(engine, scale(&cur.image, 1.0 / ynorm));
        let p_new = cand.res;
        let p_cur = cur.res;

        let stop = p_new < TINY_FITNESS
            || ((p_new - p_cur) / p_new).abs() < cfg.eps
            || p_new < cfg.res_tol;
        if stop {
            converged = Some(EigenEstimate {
                lambda: cand.rho,
                lambda_abs: ynorm,
                eigenvector: cand.v,
                residual: cand.res,
                iterations,
                converged: true,
                mutations,
                worse_accepts: worse,
                improved_accepts: improved,
                rerandomizations: rerand,
            });
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }

        if p_new < p_cur {
            improved += 1;
            cur = cand;
        } else {
            let decision = if temp > 0.0 {
                let r = rand::Rng::random::<f64>(&mut gen);
                if cfg.literal_sa {
                    metropolis_decide_literal(p_new, p_cur, temp, r)?
                } else {
                    metropolis_decide(p_new, p_cur, temp, r)?
                }
            } else {
                // Cooling underflowed: exp(-gap/T) -> 0, so the Metropolis
                // rule degenerates to always-mutate.
                SaDecision::Mutate
            };
            match decision {
                SaDecision::AcceptWorse => {
                    worse += 1;
                    cur = cand;
                }
                SaDecision::Mutate => {
                    mutations += 1;
                    let mutated = mutate(&cur.v, temp, &mut gen, cfg.p_mut, cfg.sigma0)?;
                    cur = Iterate::from_unit(engine, mutated);
                }
                SaDecision::AcceptImproved | SaDecision::Converged => unreachable!(),
            }
        }
        if cur.res < best.0 {
            best = (cur.res, cur.rho, norm(&cur.image), cur.v.clone());
        }
        temp = cooling_step(temp, cfg.alpha);
    }

    match converged {
        Some(estimate) => Ok(estimate),
        None => Ok(EigenEstimate {
            lambda: best.1,
            lambda_abs: best.2,
            eigenvector: best.3,
            residual: best.0,
            iterations,
            converged: false,
            mutations,
            worse_accepts: worse,
            improved_accepts: improved,
            rerandomizations: rerand,
        }),
    }
}

/// Symmetry tolerance for deflation, relative to the largest entry.
const DEFLATE_SYM_REL: f64 = 1e-10;

/// Hotelling deflation `A - lambda v v^T` for a unit eigenvector `v` of a
/// symmetric matrix: the deflated spectrum replaces `lambda` with zero.
/// Nonsymmetric input beyond tolerance is rejected (one-vector deflation is
/// only sound in the symmetric case).
pub fn deflate_hotelling(a: &DenseMatrix, lambda: f64, v: &[f64]) -> Result<DenseMatrix> {
    let n = a.n();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if (norm(v) - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument("eigenvector must have unit norm".into()));
    }
    let tol = DEFLATE_SYM_REL * a.max_abs().max(1.0);
    let dev = a.max_asymmetry();
    if dev > tol {
        return Err(Error::NotSymmetric { max_dev: dev, tol });
    }
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            values.push(a.get(i, j) - lambda * (v[i] * v[j]));
        }
    }
    DenseMatrix::new(n, values)
}
