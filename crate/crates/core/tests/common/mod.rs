#![allow(dead_code)]

//! Shared oracle helpers for integration tests.
//!
//! Everything here is deliberately independent of the library's solve
//! paths: plain Gauss-Jordan elimination and seeded generators only.

use gippa_core::linalg::{Mat, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gauss-Jordan solve with partial pivoting, for oracle recursions.
/// Panics on singular systems; oracle inputs are well conditioned.
#[allow(clippy::needless_range_loop)]
pub fn gauss_solve(a: &Mat, rhs: &Vector) -> Vector {
    let n = a.rows();
    assert!(a.is_square() && rhs.len() == n);
    let mut m = vec![vec![0.0f64; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = a[(i, j)];
        }
        m[i][n] = rhs[i];
    }
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap())
            .unwrap();
        m.swap(k, pivot_row);
        let pivot = m[k][k];
        assert!(pivot.abs() > 1e-13, "oracle system is singular");
        for j in k..=n {
            m[k][j] /= pivot;
        }
        for i in 0..n {
            if i != k && m[i][k] != 0.0 {
                let factor = m[i][k];
                for j in k..=n {
                    m[i][j] -= factor * m[k][j];
                }
            }
        }
    }
    Vector::new((0..n).map(|i| m[i][n]).collect())
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    Mat::new(rows, cols, data)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
}

/// Random square matrix of size `n` with rank exactly `r` (with probability
/// one), as a product of an n×r and an r×n factor.
pub fn random_rank_deficient(rng: &mut ChaCha8Rng, n: usize, r: usize) -> Mat {
    assert!(r < n && r >= 1);
    let left = random_matrix(rng, n, r);
    let right = random_matrix(rng, r, n);
    left.mul(&right).unwrap()
}

/// Random symmetric matrix of size `n` with rank exactly `r`: assembled as
/// `Σ λ_k q_k q_kᵀ` from an orthonormalized random frame.
pub fn random_symmetric_rank_deficient(rng: &mut ChaCha8Rng, n: usize, r: usize) -> Mat {
    assert!(r < n && r >= 1);
    // Gram-Schmidt an n×r random frame.
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < r {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for q in &cols {
            let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= dot * qi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            cols.push(v);
        }
    }
    let mut m = Mat::zeros(n, n);
    for q in &cols {
        let lambda: f64 = loop {
            let l: f64 = rng.random_range(-2.0..2.0);
            if l.abs() > 0.1 {
                break l;
            }
        };
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += lambda * q[i] * q[j];
            }
        }
    }
    m
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
