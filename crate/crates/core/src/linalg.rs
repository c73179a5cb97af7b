//! Dense row-major matrices, vector primitives, and the eigen-residual
//! fitness function used to score candidate eigenvectors.

use crate::error::{Error, Result};

/// Vectors are plain `Vec<f64>`; operations take slices.
pub type Vector = Vec<f64>;

/// Square real matrix in row-major storage.
///
/// Invariants enforced at construction: the value count is exactly `n * n`
/// and every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    /// Builds an `n x n` matrix from row-major values.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        let expected = n
            .checked_mul(n)
            .ok_or(Error::OutOfMemory { requested: u128::MAX })?;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite entry at flat index {i}"
            )));
        }
        Ok(Self { n, values })
    }

    /// Zero matrix, allocated fallibly so oversized requests surface as
    /// `Error::OutOfMemory` instead of aborting the process.
    pub fn try_zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        let len = n
            .checked_mul(n)
            .ok_or(Error::OutOfMemory { requested: u128::MAX })?;
        let mut values = Vec::new();
        values.try_reserve_exact(len).map_err(|_| Error::OutOfMemory {
            requested: len as u128 * std::mem::size_of::<f64>() as u128,
        })?;
        values.resize(len, 0.0);
        Ok(Self { n, values })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::try_zeros(n).expect("identity dimension too large");
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Result<Self> {
        let n = entries.len();
        let mut m = Self::try_zeros(n)?;
        for (i, &d) in entries.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite diagonal entry {i}")));
            }
            m.values[i * n + i] = d;
        }
        Ok(m)
    }

    /// Convenience constructor from nested rows; rows must be equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n + j] = v;
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest `|a_ij - a_ji|` over all pairs.
    pub fn max_asymmetry(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        dev
    }
}

/// Row-times-vector kernel. Accumulation proceeds strictly in ascending
/// column order; this ordering is the contract that makes the row-block
/// parallel engine bit-identical to the sequential path.
#[inline]
pub(crate) fn row_dot(row: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(row.len(), v.len());
    let mut acc = 0.0;
    for k in 0..row.len() {
        acc += row[k] * v[k];
    }
    acc
}

/// Same kernel with a multiply-add counter, for cost-model validation.
#[inline]
pub(crate) fn row_dot_counted(row: &[f64], v: &[f64], flops: &mut u64) -> f64 {
    let mut acc = 0.0;
    for k in 0..row.len() {
        acc += row[k] * v[k];
        *flops += 2;
    }
    acc
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = 0.0;
    for k in 0..u.len() {
        acc += u[k] * v[k];
    }
    acc
}

/// `y = A v` with the ascending-column accumulation contract per row.
pub fn matvec(a: &DenseMatrix, v: &[f64]) -> Result<Vector> {
    if v.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: v.len(),
        });
    }
    Ok((0..a.n()).map(|i| row_dot(a.row(i), v)).collect())
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

/// Rescales to unit Euclidean norm; the zero vector is an error because it
/// signals a degenerate iterate the caller must re-randomize.
pub fn normalize(v: &[f64]) -> Result<Vector> {
    let s = norm(v);
    if s == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(scale(v, 1.0 / s))
}

pub(crate) fn scale(v: &[f64], c: f64) -> Vector {
    v.iter().map(|x| x * c).collect()
}

/// `v^T A v / v^T v`. Carries the sign of the eigenvalue estimate, which the
/// iterate-norm magnitude cannot.
pub fn rayleigh_quotient(a: &DenseMatrix, v: &[f64]) -> Result<f64> {
    if norm(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let w = matvec(a, v)?;
    Ok(dot(v, &w) / dot(v, v))
}

/// Given a unit iterate and its image `w = A v`, returns the Rayleigh
/// quotient and the eigen-residual norm `||w - rho v||`.
pub(crate) fn eigen_residual_stats(v: &[f64], w: &[f64]) -> (f64, f64) {
    let rho = dot(v, w) / dot(v, v);
    let mut sum = 0.0;
    for i in 0..v.len() {
        let d = w[i] - rho * v[i];
        sum += d * d;
    }
    (rho, sum.sqrt())
}

/// Candidate-eigenvector score: the residual norm `||A v̂ - rho(v̂) v̂||` of
/// the normalized iterate. Zero exactly when `v` spans an eigenvector, so
/// smaller is better and accept-if-smaller search minimizes it.
pub fn fitness(a: &DenseMatrix, v: &[f64]) -> Result<f64> {
    if v.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: v.len(),
        });
    }
    let unit = normalize(v)?;
    let w = matvec(a, &unit)?;
    Ok(eigen_residual_stats(&unit, &w).1)
}
