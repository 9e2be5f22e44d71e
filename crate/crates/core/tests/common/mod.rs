//! Oracles shared by the integration tests, written independently of the
//! library code they check.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;

/// Mean-zero circle kernel: `Σ_{n≠0} cos(2πns)/(4π²n²) = B₂(s)/2`.
pub fn bernoulli_kernel(s: f64) -> f64 {
    let d = s.rem_euclid(1.0);
    0.5 * (d * d - d + 1.0 / 6.0)
}

/// `Σ_n cos(2πns)/(4π²n²+λ²)` with Kummer acceleration: subtract the `λ = 0`
/// series (known in closed form), sum the remaining `O(n⁻⁴)` terms.
pub fn screened_sum(lambda: f64, s: f64, terms: usize) -> f64 {
    let l2 = lambda * lambda;
    let mut tail = 0.0;
    for n in (1..=terms).rev() {
        let k2 = 4.0 * PI * PI * (n * n) as f64;
        tail += 2.0 * (2.0 * PI * n as f64 * s).cos() * (1.0 / (k2 + l2) - 1.0 / k2);
    }
    1.0 / l2 + bernoulli_kernel(s) + tail
}

/// The plain truncated sum; off by at most `Σ_{n>N} 2/(4π²n²)`.
pub fn raw_sum(lambda: f64, s: f64, terms: usize) -> f64 {
    let l2 = lambda * lambda;
    let mut sum = 1.0 / l2;
    for n in (1..=terms).rev() {
        sum += 2.0 * (2.0 * PI * n as f64 * s).cos() / (4.0 * PI * PI * (n * n) as f64 + l2);
    }
    sum
}

/// `g_q` from its defining problem `-g'' + λ²g = δ` on the circle, solved by
/// hand: the periodic solution is a single `cosh` centered opposite the source.
pub fn screened(q: f64, s: f64) -> f64 {
    let l = 2.0 * PI * q;
    let d = s.rem_euclid(1.0);
    (l * (0.5 - d)).cosh() / (2.0 * l * (0.5 * l).sinh())
}

/// Second-variation matrix of `L_k` on lateral mode `q ≥ 1`.
pub fn oracle_mode_matrix(k: usize, m: f64, gamma: f64, q: f64) -> DMatrix<f64> {
    let a = 0.5 * (m + 1.0);
    let kf = k as f64;
    let pos: Vec<f64> = (0..k).flat_map(|i| [i as f64 / kf, (i as f64 + a) / kf]).collect();
    let dn = -a * (1.0 - a) / kf;
    DMatrix::from_fn(2 * k, 2 * k, |i, j| {
        let mut v = 8.0 * gamma * screened(q, pos[i] - pos[j]);
        if i == j {
            v += 4.0 * PI * PI * q * q + 4.0 * gamma * dn;
        }
        v
    })
}

/// Dense minimum over the lateral modes `1..=q_max`.
pub fn oracle_min_eigenvalue(k: usize, m: f64, gamma: f64, q_max: usize) -> f64 {
    (1..=q_max)
        .map(|q| oracle_mode_matrix(k, m, gamma, q as f64).symmetric_eigenvalues().min())
        .fold(f64::INFINITY, f64::min)
}
