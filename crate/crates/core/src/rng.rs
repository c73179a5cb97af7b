//! Seeded randomness. One ChaCha stream per solve keeps every stochastic
//! choice reproducible from a single 64-bit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{normalize, Vector};

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Unit-norm start vector drawn from `seed` exactly as the solvers draw
/// theirs; useful for seeding an Arnoldi run consistently.
pub fn seeded_unit_vector(n: usize, seed: u64) -> Result<Vector> {
    let mut rng = seeded(seed);
    random_unit_vector(n, &mut rng)
}

/// Unit-norm vector of standard normals. Retries on the (measure-zero)
/// all-zero draw so callers always get a usable start.
pub(crate) fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Result<Vector> {
    if n == 0 {
        return Err(Error::InvalidArgument("vector length must be positive".into()));
    }
    for _ in 0..8 {
        let v: Vector = (0..n).map(|_| standard_normal(rng)).collect();
        if let Ok(unit) = normalize(&v) {
            return Ok(unit);
        }
    }
    Err(Error::ZeroVector)
}
