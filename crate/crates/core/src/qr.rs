//! Dense eigensolver: Householder reduction to upper Hessenberg form
//! followed by the shifted QR iteration (implicit double shift from the
//! trailing 2x2 block, deflation on negligible subdiagonals, 2x2 block
//! resolution for complex pairs).
//!
//! This is the project-wide oracle for desk-scale spectra; it is capped at
//! `n <= 2000` and is deliberately not the headline solver.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Oracle-scale cap on the input dimension.
pub const MAX_ORACLE_DIM: usize = 2000;

/// All eigenvalues of a square real matrix as `(re, im)` pairs, sorted by
/// descending magnitude (ties: descending real part, then imaginary part).
/// Complex eigenvalues come in conjugate pairs. Fails with
/// `Error::QrNoConvergence` if the iteration exhausts its sweep budget of
/// `50 * n`.
pub fn hessenberg_qr_eig(a: &DenseMatrix) -> Result<Vec<(f64, f64)>> {
    let n = a.n();
    if n > MAX_ORACLE_DIM {
        return Err(Error::InvalidArgument(format!(
            "oracle eigensolver is capped at n <= {MAX_ORACLE_DIM}, got {n}"
        )));
    }
    if n == 1 {
        return Ok(vec![(a.get(0, 0), 0.0)]);
    }
    let mut h = hessenberg_reduce(a);
    let mut eigs = francis_eigenvalues(&mut h, n, 50 * n)?;
    sort_by_magnitude(&mut eigs);
    Ok(eigs)
}

fn sort_by_magnitude(eigs: &mut [(f64, f64)]) {
    eigs.sort_by(|a, b| {
        let ma = a.0.hypot(a.1);
        let mb = b.0.hypot(b.1);
        mb.partial_cmp(&ma)
            .unwrap()
            .then(b.0.partial_cmp(&a.0).unwrap())
            .then(b.1.partial_cmp(&a.1).unwrap())
    });
}

/// Orthogonal similarity reduction to upper Hessenberg form. Entries below
/// the first subdiagonal are assigned exact zeros. Columns that are already
/// in Hessenberg form are skipped, so Hessenberg input costs little.
#[allow(clippy::needless_range_loop)] // indexed loops mirror the algorithm
fn hessenberg_reduce(a: &DenseMatrix) -> Vec<f64> {
    let n = a.n();
    let mut h = a.values().to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    let mut u = vec![0.0f64; n];

    for c in 0..n.saturating_sub(2) {
        let mut below = 0.0;
        for i in c + 2..n {
            below += h[idx(i, c)].abs();
        }
        if below == 0.0 {
            continue;
        }
        let mut scale = h[idx(c + 1, c)].abs() + below;
        if scale == 0.0 {
            scale = 1.0;
        }
        let mut xnorm2 = 0.0;
        for i in c + 1..n {
            u[i] = h[idx(i, c)] / scale;
            xnorm2 += u[i] * u[i];
        }
        // alpha = -sign(x0) * ||x|| avoids cancellation in u[0] = x0 - alpha.
        let alpha = if u[c + 1] >= 0.0 { -xnorm2.sqrt() } else { xnorm2.sqrt() };
        u[c + 1] -= alpha;
        let mut uu = 0.0;
        for i in c + 1..n {
            uu += u[i] * u[i];
        }
        if uu == 0.0 {
            continue;
        }
        let beta = 2.0 / uu;

        // Left application: rows c+1..n over columns c..n.
        for j in c..n {
            let mut s = 0.0;
            for i in c + 1..n {
                s += u[i] * h[idx(i, j)];
            }
            let s = beta * s;
            for i in c + 1..n {
                h[idx(i, j)] -= s * u[i];
            }
        }
        // Right application: all rows over columns c+1..n.
        for i in 0..n {
            let mut s = 0.0;
            for j in c + 1..n {
                s += h[idx(i, j)] * u[j];
            }
            let s = beta * s;
            for j in c + 1..n {
                h[idx(i, j)] -= s * u[j];
            }
        }
        h[idx(c + 1, c)] = alpha * scale;
        for i in c + 2..n {
            h[idx(i, c)] = 0.0;
        }
    }
    // The zero pattern below the subdiagonal is exact by construction; make
    // that unconditional for arbitrary dense input.
    for i in 2..n {
        for j in 0..i - 1 {
            h[idx(i, j)] = 0.0;
        }
    }
    h
}

/// Implicit double-shift QR on an upper Hessenberg matrix, eigenvalues only.
/// The shift pair comes from the trailing 2x2 block; every tenth stalled
/// sweep substitutes the classic exceptional shift. `sweep_budget` bounds the
/// total number of bulge-chase sweeps across all deflations.
fn francis_eigenvalues(
    h: &mut [f64],
    n: usize,
    sweep_budget: usize,
) -> Result<Vec<(f64, f64)>> {
    let eps = f64::EPSILON;
    let idx = |i: usize, j: usize| i * n + j;

    let mut hnorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            hnorm += h[idx(i, j)].abs();
        }
    }

    let mut eigs: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut exshift = 0.0f64;
    let mut iter = 0usize;
    let mut sweeps = 0usize;

    loop {
        // Deflation scan: find the lowest l with a negligible subdiagonal.
        let mut l = hi;
        while l > 0 {
            let mut s = h[idx(l - 1, l - 1)].abs() + h[idx(l, l)].abs();
            if s == 0.0 {
                s = hnorm;
            }
            if h[idx(l, l - 1)].abs() <= eps * s {
                h[idx(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == hi {
            // One real eigenvalue isolated.
            eigs.push((h[idx(hi, hi)] + exshift, 0.0));
            if hi == 0 {
                break;
            }
            hi -= 1;
            iter = 0;
            continue;
        }

        if l + 1 == hi {
            // Trailing 2x2 block: resolve directly (real or conjugate pair).
            let w = h[idx(hi, hi - 1)] * h[idx(hi - 1, hi)];
            let p = (h[idx(hi - 1, hi - 1)] - h[idx(hi, hi)]) / 2.0;
            let q = p * p + w;
            let z = q.abs().sqrt();
            let x = h[idx(hi, hi)] + exshift;
            if q >= 0.0 {
                let z = if p >= 0.0 { p + z } else { p - z };
                let lam1 = x + z;
                let lam2 = if z != 0.0 { x - w / z } else { lam1 };
                eigs.push((lam1, 0.0));
                eigs.push((lam2, 0.0));
            } else {
                eigs.push((x + p, z));
                eigs.push((x + p, -z));
            }
            if hi == 1 {
                break;
            }
            hi -= 2;
            iter = 0;
            continue;
        }

        sweeps += 1;
        if sweeps > sweep_budget {
            return Err(Error::QrNoConvergence {
                deflated: eigs.len(),
                total: n,
            });
        }
        iter += 1;

        let mut x = h[idx(hi, hi)];
        let mut y = h[idx(hi - 1, hi - 1)];
        let mut w = h[idx(hi, hi - 1)] * h[idx(hi - 1, hi)];
        if iter.is_multiple_of(10) {
            // Exceptional shift to break symmetric stagnation cycles.
            exshift += x;
            for i in l..=hi {
                h[idx(i, i)] -= x;
            }
            let s = h[idx(hi, hi - 1)].abs() + h[idx(hi - 1, hi - 2)].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }

        // Pick the bulge start: two consecutive small subdiagonals if any.
        let mut m = hi - 2;
        let (mut p, mut q, mut r);
        loop {
            let z = h[idx(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / h[idx(m + 1, m)] + h[idx(m, m + 1)];
            q = h[idx(m + 1, m + 1)] - z - rr - ss;
            r = h[idx(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            if s == 0.0 {
                p = 1.0;
                q = 0.0;
                r = 0.0;
                break;
            }
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            if h[idx(m, m - 1)].abs() * (q.abs() + r.abs())
                < eps * p.abs()
                    * (h[idx(m - 1, m - 1)].abs() + z.abs() + h[idx(m + 1, m + 1)].abs())
            {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=hi {
            h[idx(i, i - 2)] = 0.0;
            if i > m + 2 {
                h[idx(i, i - 3)] = 0.0;
            }
        }

        // Double-shift bulge chase over the active block.
        let mut k = m;
        while k < hi {
            let notlast = k != hi - 1;
            if k != m {
                p = h[idx(k, k - 1)];
                q = h[idx(k + 1, k - 1)];
                r = if notlast { h[idx(k + 2, k - 1)] } else { 0.0 };
                x = p.abs() + q.abs() + r.abs();
                if x == 0.0 {
                    k += 1;
                    continue;
                }
                p /= x;
                q /= x;
                r /= x;
            }
            let mut s = (p * p + q * q + r * r).sqrt();
            if p < 0.0 {
                s = -s;
            }
            if s != 0.0 {
                if k != m {
                    h[idx(k, k - 1)] = -s * x;
                } else if l != m {
                    h[idx(k, k - 1)] = -h[idx(k, k - 1)];
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;

                for j in k..=hi {
                    let mut pp = h[idx(k, j)] + q * h[idx(k + 1, j)];
                    if notlast {
                        pp += r * h[idx(k + 2, j)];
                        h[idx(k + 2, j)] -= pp * z;
                    }
                    h[idx(k, j)] -= pp * x;
                    h[idx(k + 1, j)] -= pp * y;
                }
                let upper = hi.min(k + 3);
                for i in l..=upper {
                    let mut pp = x * h[idx(i, k)] + y * h[idx(i, k + 1)];
                    if notlast {
                        pp += z * h[idx(i, k + 2)];
                        h[idx(i, k + 2)] -= pp * r;
                    }
                    h[idx(i, k)] -= pp;
                    h[idx(i, k + 1)] -= pp * q;
                }
            }
            k += 1;
        }
    }

    Ok(eigs)
}
