//! Per-Fourier-mode second variation of lamellae.
//!
//! On `L_k` the form decouples over lateral frequencies `q`. Mode `q` acts on
//! the `2k` interface amplitudes through
//! `M(q) = 4π²|q|²·I + 8γ·K(q) + 4γ·diag(∂_ν v)`, with
//! `K(q)_ij = g_q(s_i - s_j)` and `∂_ν v = -a(1-a)/k` on every interface.
//! `K(q)` is block circulant over the `k` strips, so its spectrum follows from
//! `k` Hermitian 2×2 Bloch blocks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::green::kernel_for_frequency;
use crate::shape::Lamella;

/// `∂_ν v` at every interface of `L_k`, outward normal.
pub fn lamella_normal_derivative(k: usize, m: f64) -> f64 {
    let a = 0.5 * (m + 1.0);
    -a * (1.0 - a) / k as f64
}

fn validated(k: usize, m: f64, gamma: f64) -> Result<Lamella> {
    let l = Lamella { k, m, axis: 1, dim: 2 };
    if k == 0 || !(m > -1.0 && m < 1.0) {
        return Err(Error::InvalidParameter(format!("invalid lamella k={k}, m={m}")));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} must be finite and ≥ 0"
        )));
    }
    Ok(l)
}

#[derive(Debug, Clone)]
pub struct LamellaModeMatrix {
    /// Lateral frequency `|q|`.
    pub q: f64,
    pub k: usize,
    pub m: f64,
    pub gamma: f64,
    pub matrix: DMatrix<f64>,
}

impl LamellaModeMatrix {
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn quadratic(&self, phi: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(phi);
        v.dot(&(&self.matrix * &v))
    }
}

/// Dense `M(q)` over the interface amplitudes (normal displacements), in the
/// order lower₁, upper₁, lower₂, ...
pub fn lamella_mode_matrix(k: usize, m: f64, gamma: f64, q: f64) -> Result<LamellaModeMatrix> {
    let l = validated(k, m, gamma)?;
    let pos: Vec<f64> = l.interfaces().iter().map(|i| i.position).collect();
    let n = pos.len();
    let dn = lamella_normal_derivative(k, m);
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let mut v = 8.0 * gamma * kernel_for_frequency(q, pos[i] - pos[j]);
        if i == j {
            v += 4.0 * PI * PI * q * q + 4.0 * gamma * dn;
        }
        v
    });
    Ok(LamellaModeMatrix { q, k, m, gamma, matrix })
}

/// Lowest eigenpair of `M(q)` through the Bloch decomposition.
/// Returns the eigenvalue, the Bloch index and a real eigenvector.
pub fn mode_min_eigen(k: usize, m: f64, gamma: f64, q: f64) -> (f64, usize, Vec<f64>) {
    let a = 0.5 * (m + 1.0);
    let kf = k as f64;
    let off = [0.0, a / kf];
    let shift = 4.0 * PI * PI * q * q + 4.0 * gamma * lamella_normal_derivative(k, m);
    let g: Vec<[f64; 3]> = (0..k)
        .map(|e| {
            let s = e as f64 / kf;
            [
                kernel_for_frequency(q, s),
                kernel_for_frequency(q, s + off[0] - off[1]),
                kernel_for_frequency(q, s + off[1] - off[0]),
            ]
        })
        .collect();
    let mut best = (
        f64::INFINITY,
        0usize,
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    );
    for p in 0..k {
        let theta = 2.0 * PI * p as f64 / kf;
        let mut b00 = 0.0;
        let mut b01 = Complex64::new(0.0, 0.0);
        for (e, ge) in g.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -theta * e as f64);
            b00 += ge[0] * ph.re;
            b01 += ge[1] * ph;
        }
        // diagonal blocks coincide: g depends on the offset difference only
        let half = b01.norm();
        let lam = b00 - half;
        if lam < best.0 {
            let w = if half > 0.0 {
                [b01, Complex64::new(-half, 0.0)]
            } else {
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
            };
            best = (lam, p, w);
        }
    }
    let (lam, p, w) = best;
    let theta = 2.0 * PI * p as f64 / kf;
    let build = |part: fn(Complex64) -> f64| -> Vec<f64> {
        (0..k)
            .flat_map(|d| {
                let ph = Complex64::from_polar(1.0, theta * d as f64);
                [part(w[0] * ph), part(w[1] * ph)]
            })
            .collect()
    };
    let mut v = build(|c| c.re);
    if v.iter().map(|x| x * x).sum::<f64>() < 1e-20 {
        v = build(|c| c.im);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    (shift + 8.0 * gamma * lam, p, v)
}

/// Sorted distinct values of `|q|²` over nonzero lattice vectors of the
/// lateral torus `T^{dim-1}`, up to `max_sq`.
pub fn lateral_norms_sq(dim: usize, max_sq: u64) -> Vec<u64> {
    match dim {
        2 => (1..).map(|q: u64| q * q).take_while(|&s| s <= max_sq).collect(),
        3 => {
            let r = (max_sq as f64).sqrt() as u64 + 1;
            let mut v: Vec<u64> = (0..=r)
                .flat_map(|a| (0..=a).map(move |b| a * a + b * b))
                .filter(|&s| s > 0 && s <= max_sq)
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        }
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub k: usize,
    pub m: f64,
    pub gamma: f64,
    /// Lowest eigenvalue of `M(q)` over all scanned `q ≠ 0`, with the
    /// `L²(∂E)` normalization.
    pub min_eigenvalue: f64,
    /// Lowest Rayleigh quotient against `‖φ‖²_{H¹} = ∫|D_τφ|² + φ²`.
    pub h1_min: f64,
    /// `|q|` of the minimizing mode.
    pub q: f64,
    /// Bloch index of the minimizing mode across strips.
    pub bloch: usize,
    /// "undulation" when neighbouring interfaces of a strip move the same
    /// way along the axis, "peristaltic" when they move oppositely.
    pub mode: String,
    /// Normal-displacement amplitudes of the minimizing mode, unit norm.
    pub eigenvector: Vec<f64>,
    /// Largest `|q|²` examined.
    pub q_max_sq: u64,
    /// Lower bound for every eigenvalue with `|q|² > q_max_sq`.
    pub truncation_bound: f64,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.min_eigenvalue > 0.0
    }
}

const H1_SCAN_MAX: u64 = 1 << 16;

/// Minimum of the lamella second variation over all lateral modes `q ≠ 0`
/// (the `q = 0` block carries only translations and volume changes).
///
/// `q_max` is the initial cutoff on `|q|`; the scan continues until the
/// lower bound `4π²|q|² - 4γa(1-a)/k` exceeds the current minimum, since
/// `K(q)` is positive semidefinite.
pub fn lamella_min_eigenvalue(k: usize, m: f64, gamma: f64, q_max: u32, dim: usize) -> Result<StabilityReport> {
    validated(k, m, gamma)?;
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidParameter("lamella spectra need dim 2 or 3".into()));
    }
    let floor = 4.0 * gamma * lamella_normal_derivative(k, m);
    let bound = |s: u64| 4.0 * PI * PI * s as f64 + floor;
    let h1_tail = |s: u64| bound(s) / (1.0 + 4.0 * PI * PI * s as f64);
    let mut best: Option<(f64, f64, f64, usize, Vec<f64>)> = None;
    let mut max_sq = (q_max.max(1) as u64).pow(2);
    let mut done = 0u64;
    loop {
        for s in lateral_norms_sq(dim, max_sq).into_iter().filter(|&s| s > done) {
            let q = (s as f64).sqrt();
            let (lam, p, v) = mode_min_eigen(k, m, gamma, q);
            let h1 = lam / (1.0 + 4.0 * PI * PI * s as f64);
            match &mut best {
                None => best = Some((lam, h1, q, p, v)),
                Some(b) => {
                    b.1 = b.1.min(h1);
                    if lam < b.0 {
                        (b.0, b.2, b.3, b.4) = (lam, q, p, v);
                    }
                }
            }
        }
        done = max_sq;
        let (cur, cur_h1) = best.as_ref().map_or((f64::INFINITY, f64::INFINITY), |b| (b.0, b.1));
        let next = max_sq + 1;
        let l2_done = bound(next) > cur.max(0.0);
        // H¹ quotients beyond the cutoff are bounded below by bound/(1+4π²s)
        let h1_done = h1_tail(next) >= cur_h1;
        if l2_done && (h1_done || max_sq >= H1_SCAN_MAX) {
            break;
        }
        max_sq *= 4;
    }
    let (lam, h1, q, p, v) = best.expect("at least one lateral mode");
    let next = max_sq + 1;
    let h1 = h1.min(h1_tail(next));
    let mode = if v.len() >= 2 && v[0] * v[1] < 0.0 {
        "undulation"
    } else {
        "peristaltic"
    };
    Ok(StabilityReport {
        k,
        m,
        gamma,
        min_eigenvalue: lam,
        h1_min: h1,
        q,
        bloch: p,
        mode: mode.to_string(),
        eigenvector: v,
        q_max_sq: max_sq,
        truncation_bound: bound(next),
    })
}

/// `∂²J(L_k)[φ]` for normal displacements `φ_j` sampled at `x = l/n` on each
/// interface (2D lamellae): `Σ_q ĉ(q)ᴴ M(|q|) ĉ(q)` over the discrete Fourier
/// coefficients of the samples.
pub fn lamella_form_value(k: usize, m: f64, gamma: f64, phi: &[Vec<f64>]) -> Result<f64> {
    validated(k, m, gamma)?;
    if phi.len() != 2 * k {
        return Err(Error::InvalidParameter(format!("expected {} interface rows", 2 * k)));
    }
    let n = phi[0].len();
    if phi.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidParameter("interface rows differ in length".into()));
    }
    let coeffs: Vec<Vec<Complex64>> = phi
        .iter()
        .map(|p| {
            crate::fft::forward_real(p, &[n])
                .into_iter()
                .map(|c| c / n as f64)
                .collect()
        })
        .collect();
    let mut total = 0.0;
    for i in 0..n {
        let f = crate::fft::frequency(i, n);
        let mut mm = lamella_mode_matrix(k, m, gamma, f.unsigned_abs() as f64)?.matrix;
        if crate::fft::is_nyquist(i, n) {
            // the Nyquist row interpolates as c·cos, with half the energy of
            // a complex exponential
            mm *= 0.5;
        }
        let c: Vec<Complex64> = coeffs.iter().map(|row| row[i]).collect();
        for (a, ca) in c.iter().enumerate() {
            for (b, cb) in c.iter().enumerate() {
                total += (ca.conj() * mm[(a, b)] * cb).re;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q0_kernel_block() {
        let mm = lamella_mode_matrix(1, 0.0, 1.0, 0.0).unwrap();
        // 8γK(0) + 4γ(-1/4)I with K(0) = [[1/12,-1/24],[-1/24,1/12]]
        assert!((mm.matrix[(0, 0)] - (8.0 / 12.0 - 1.0)).abs() < 1e-15);
        assert!((mm.matrix[(0, 1)] + 8.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn translation_is_null() {
        for (k, m, g) in [(1, 0.0, 3.0), (1, 0.4, 7.5), (3, -0.3, 100.0)] {
            let mm = lamella_mode_matrix(k, m, g, 0.0).unwrap();
            let phi: Vec<f64> = (0..2 * k).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
            assert!(mm.quadratic(&phi).abs() < 1e-12 * g);
        }
    }

    #[test]
    fn gamma_zero_is_laplacian() {
        let r = lamella_min_eigenvalue(2, 0.1, 0.0, 4, 2).unwrap();
        assert!((r.min_eigenvalue - 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(r.q, 1.0);
    }

    #[test]
    fn bloch_matches_dense() {
        for (k, m, g, q) in [
            (1, 0.0, 50.0, 1.0),
            (3, 0.2, 400.0, 2.0),
            (4, -0.5, 1000.0, 1.0),
            (5, 0.0, 3000.0, 3.0),
        ] {
            let (lam, _, v) = mode_min_eigen(k, m, g, q);
            let dense = lamella_mode_matrix(k, m, g, q).unwrap();
            let e = dense.eigenvalues();
            assert!((lam - e[0]).abs() < 1e-9 * e[0].abs().max(1.0), "{lam} vs {}", e[0]);
            assert!((dense.quadratic(&v) - lam).abs() < 1e-9 * lam.abs().max(1.0));
        }
    }

    #[test]
    fn lateral_norm_sets() {
        assert_eq!(lateral_norms_sq(2, 10), vec![1, 4, 9]);
        assert_eq!(lateral_norms_sq(3, 10), vec![1, 2, 4, 5, 8, 9, 10]);
    }
}
