//! Ground-truth test matrices.
//!
//! `generate_planted` builds `A = Q diag(spectrum) Q^T` where `Q` is a seeded
//! random orthogonal matrix assembled from `n` Householder reflections, so the
//! eigenvalues of `A` are known by construction. Only the lower triangle is
//! computed; the upper triangle is mirrored, which makes `A` exactly symmetric
//! in floating point.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::rng;

/// Eigenvalue list kept sorted by descending absolute value.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the given eigenvalues by descending `|lambda|`.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("spectrum must be nonempty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("spectrum entries must be finite".into()));
        }
        values.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        Ok(Self { values })
    }

    /// The well-gapped recipe used by the benchmark harness: `lambda1`,
    /// `lambda2`, and the remaining `n - 2` values uniform in `[0, 1)`.
    pub fn gapped(n: usize, lambda1: f64, lambda2: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("spectrum must be nonempty".into()));
        }
        let mut values = Vec::new();
        values.try_reserve_exact(n).map_err(|_| Error::OutOfMemory {
            requested: n as u128 * std::mem::size_of::<f64>() as u128,
        })?;
        values.push(lambda1);
        if n > 1 {
            values.push(lambda2);
        }
        let mut r = rng::seeded(seed);
        for _ in 2..n {
            values.push(r.random::<f64>());
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Four-lane dot product for the generator's inner sweeps. Only the
/// generator may reorder accumulation; the solver kernels keep the strict
/// ascending contract.
#[inline]
fn gen_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        sum += a[i] * b[i];
    }
    sum
}

/// Symmetric matrix with the planted spectrum.
///
/// The k-th reflection uses a random unit vector supported on the leading k
/// coordinates, so each similarity update touches only the leading k-by-k
/// block, and only the lower triangle is carried through the loop (the
/// sweep reads it symmetrically). One final mirror makes `A` exactly
/// symmetric in floating point. The first reflection is a coordinate sign
/// flip, which leaves the initial diagonal matrix unchanged and is skipped.
pub fn generate_planted(n: usize, spectrum: &Spectrum, seed: u64) -> Result<DenseMatrix> {
    if spectrum.len() != n {
        return Err(Error::InvalidArgument(format!(
            "spectrum has {} values for dimension {n}",
            spectrum.len()
        )));
    }
    let mut a = DenseMatrix::try_zeros(n)?;
    for (i, &lambda) in spectrum.values().iter().enumerate() {
        a.set(i, i, lambda);
    }
    let mut r = rng::seeded(seed);
    let _sign_flip = rng::standard_normal(&mut r);

    let mut u = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    for k in 2..=n {
        // Random unit Householder direction on the leading k coordinates.
        loop {
            let mut s = 0.0;
            for ui in u.iter_mut().take(k) {
                *ui = rng::standard_normal(&mut r);
                s += *ui * *ui;
            }
            if s > 0.0 {
                let inv = 1.0 / s.sqrt();
                for ui in u.iter_mut().take(k) {
                    *ui *= inv;
                }
                break;
            }
        }

        let values = a.values_mut();
        // w = A u on the leading block, reading the lower triangle only.
        w[..k].fill(0.0);
        for j in 0..k {
            let uj = u[j];
            let row = &values[j * n..j * n + j];
            w[j] += gen_dot(row, &u[..j]);
            for (wl, &ajl) in w[..j].iter_mut().zip(row) {
                *wl += uj * ajl;
            }
            w[j] += values[j * n + j] * uj;
        }
        let alpha = gen_dot(&u[..k], &w[..k]);
        // H A H = A - u z^T - z u^T with z = 2w - 2(u^T w)u.
        for j in 0..k {
            w[j] = 2.0 * w[j] - 2.0 * alpha * u[j];
        }
        for i in 0..k {
            let ui = u[i];
            let zi = w[i];
            let row = &mut values[i * n..i * n + i + 1];
            for (j, rij) in row.iter_mut().enumerate() {
                *rij -= ui * w[j] + zi * u[j];
            }
        }
    }
    // Mirror the lower triangle; A is exactly symmetric by construction.
    for i in 0..n {
        for j in 0..i {
            let v = a.get(i, j);
            a.set(j, i, v);
        }
    }
    Ok(a)
}
