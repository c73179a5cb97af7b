//! Arnoldi factorization with modified Gram-Schmidt orthogonalization, and
//! Ritz-value extraction from the projected Hessenberg block.

use crate::error::{Error, Result};
use crate::linalg::{matvec, norm, DenseMatrix, Vector};
use crate::qr::hessenberg_qr_eig;

/// Relative breakdown threshold on the new subdiagonal entry.
const BREAKDOWN_REL: f64 = 1e-12;
/// Orthogonality drift beyond which one reorthogonalization pass runs.
const REORTH_DRIFT: f64 = 1e-8;

/// Orthonormal Krylov basis `Q` and the projected upper-Hessenberg `H` from
/// `steps` Arnoldi steps: `A Q_k = Q_{k+1} H` (or `A Q_k = Q_k H_k` exactly
/// when a lucky breakdown found an invariant subspace).
///
/// `basis` holds `steps + 1` columns normally and `steps` columns after a
/// breakdown; `H` has `basis.len()` rows and `steps` columns, with exact
/// zeros below the first subdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ArnoldiFactorization {
    n: usize,
    steps: usize,
    breakdown: bool,
    basis: Vec<Vector>,
    hess: Vec<f64>, // basis.len() x steps, row-major
}

impl ArnoldiFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of Arnoldi steps actually taken (may be less than requested
    /// when the iteration breaks down on an invariant subspace).
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    /// Orthonormal basis columns `q_1, q_2, ...`.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn h_rows(&self) -> usize {
        self.basis.len()
    }

    /// Entry `H[j][i]` of the projected Hessenberg matrix.
    pub fn h(&self, j: usize, i: usize) -> f64 {
        self.hess[j * self.steps + i]
    }

    /// The square leading `steps x steps` block of `H`, whose eigenvalues
    /// are the Ritz values.
    pub fn leading_block(&self) -> DenseMatrix {
        let k = self.steps;
        let mut values = Vec::with_capacity(k * k);
        for j in 0..k {
            for i in 0..k {
                values.push(self.h(j, i));
            }
        }
        DenseMatrix::new(k, values).expect("leading block is square and finite")
    }
}

/// Runs `k` Arnoldi steps from the unit start vector `q1`.
///
/// Each step applies the matrix, orthogonalizes against the existing basis
/// in place (modified Gram-Schmidt), runs one reorthogonalization pass when
/// the measured drift exceeds `1e-8`, and normalizes. Stops early with a
/// lucky breakdown when the new subdiagonal falls below
/// `1e-12 * ||A||_F`.
pub fn arnoldi_factorize(a: &DenseMatrix, q1: &[f64], k: usize) -> Result<ArnoldiFactorization> {
    let n = a.n();
    if q1.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q1.len(),
        });
    }
    if k < 1 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "step count must satisfy 1 <= k < n, got k = {k} for n = {n}"
        )));
    }
    if (norm(q1) - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument("start vector must have unit norm".into()));
    }

    let breakdown_tol = BREAKDOWN_REL * a.frobenius_norm();
    let mut basis: Vec<Vector> = vec![q1.to_vec()];
    let mut hess = vec![0.0f64; (k + 1) * k];
    let mut steps = 0usize;
    let mut breakdown = false;

    for step in 0..k {
        let mut w = matvec(a, &basis[step])?;
        // Modified Gram-Schmidt: subtract projections one at a time.
        for (j, q) in basis.iter().enumerate() {
            let hji = crate::linalg::dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= hji * qi;
            }
            hess[j * k + step] = hji;
        }
        // One reorthogonalization pass if the residual drift is visible.
        let wnorm = norm(&w);
        if wnorm > 0.0 {
            let drift = basis
                .iter()
                .map(|q| crate::linalg::dot(q, &w).abs())
                .fold(0.0f64, f64::max);
            if drift > REORTH_DRIFT * wnorm {
                for (j, q) in basis.iter().enumerate() {
                    let c = crate::linalg::dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                    hess[j * k + step] += c;
                }
            }
        }
        let sub = norm(&w);
        steps = step + 1;
        if sub < breakdown_tol {
            breakdown = true;
            break;
        }
        hess[(step + 1) * k + step] = sub;
        basis.push(w.iter().map(|x| x / sub).collect());
    }

    // Shrink H to basis.len() rows x steps columns.
    let rows = basis.len();
    let mut shrunk = vec![0.0f64; rows * steps];
    for j in 0..rows {
        for i in 0..steps {
            shrunk[j * steps + i] = hess[j * k + i];
        }
    }
    Ok(ArnoldiFactorization {
        n,
        steps,
        breakdown,
        basis,
        hess: shrunk,
    })
}

/// Ritz values: the eigenvalues of the leading `steps x steps` block of `H`,
/// sorted by descending magnitude.
pub fn ritz_values(fact: &ArnoldiFactorization) -> Result<Vec<(f64, f64)>> {
    hessenberg_qr_eig(&fact.leading_block())
}
