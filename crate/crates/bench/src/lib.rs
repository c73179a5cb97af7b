//! Shared fixtures for the criterion benches.

use epmp_core::{generate_planted, DenseMatrix, Spectrum};

/// Planted symmetric matrix with the harness recipe (10, 5, rest in [0, 1)).
pub fn planted(n: usize, seed: u64) -> DenseMatrix {
    let s = Spectrum::gapped(n, 10.0, 5.0, seed).expect("spectrum");
    generate_planted(n, &s, seed).expect("planted matrix")
}
