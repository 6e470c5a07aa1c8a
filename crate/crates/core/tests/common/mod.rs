#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starreach_core::linalg::Matrix;
use starreach_core::set::Star;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..=hi)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_vec(rows, cols, uniform_vec(rng, rows * cols, -scale, scale)).unwrap()
}

/// Star of dimension `n` over `m` variables in `[-1, 1]^m` with `rows`
/// random cuts that all keep `a = 0` strictly feasible.
pub fn random_star(rng: &mut ChaCha8Rng, n: usize, m: usize, rows: usize) -> Star {
    let center = uniform_vec(rng, n, -2.0, 2.0);
    let basis = random_matrix(rng, n, m, 1.5);
    let pred = random_matrix(rng, rows, m, 1.0);
    let rhs = uniform_vec(rng, rows, 0.1, 1.0);
    Star::new(center, basis, pred, rhs, vec![-1.0; m], vec![1.0; m]).unwrap()
}

/// Random box with widths in `[0.2, 2]`.
pub fn random_box(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = uniform_vec(rng, n, -1.5, 1.0);
    let hi = lo.iter().map(|l| l + rng.random_range(0.2..=2.0)).collect();
    (lo, hi)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Membership of `x` in a union of stars at tolerance `tol`.
pub fn in_union(sets: &[Star], x: &[f64], tol: f64) -> bool {
    sets.iter().any(|s| s.contains(x, tol).unwrap())
}
