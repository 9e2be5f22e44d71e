//! Stability thresholds of lamellae in `γ` and in the strip count `k`.

use serde::{Deserialize, Serialize};

use super::lamella::lamella_min_eigenvalue;
use crate::error::Result;
use crate::tolerances::{THRESHOLD_GAMMA_TOL, THRESHOLD_K_MAX};

/// Upper end of the `γ` search range.
pub const GAMMA_SEARCH_MAX: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaThreshold {
    pub m: f64,
    pub k: usize,
    pub dim: usize,
    /// Midpoint of the final bracket; `None` when stable on the whole range.
    pub gamma_c: Option<f64>,
    /// `(γ_lo, γ_hi)` with a positive minimal eigenvalue at `γ_lo` and a
    /// nonpositive one at `γ_hi`.
    pub bracket: Option<(f64, f64)>,
    pub lambda_at_bracket: Option<(f64, f64)>,
    pub tolerance: f64,
    pub note: String,
}

fn min_eig(m: f64, k: usize, gamma: f64, dim: usize) -> Result<f64> {
    Ok(lamella_min_eigenvalue(k, m, gamma, 1, dim)?.min_eigenvalue)
}

/// Bisection in `γ` for the sign change of the minimal eigenvalue of `L_k`.
/// The minimal eigenvalue is concave in `γ` (a minimum of affine functions)
/// and equals `4π²` at `γ = 0`, so the sign change is unique.
pub fn stability_threshold_gamma(m: f64, k: usize, dim: usize) -> Result<GammaThreshold> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut lam_lo = min_eig(m, k, lo, dim)?;
    let mut lam_hi = min_eig(m, k, hi, dim)?;
    while lam_hi > 0.0 {
        if hi >= GAMMA_SEARCH_MAX {
            return Ok(GammaThreshold {
                m,
                k,
                dim,
                gamma_c: None,
                bracket: None,
                lambda_at_bracket: None,
                tolerance: THRESHOLD_GAMMA_TOL,
                note: format!("stable throughout range [0, {GAMMA_SEARCH_MAX:e}]"),
            });
        }
        (lo, lam_lo) = (hi, lam_hi);
        hi *= 2.0;
        lam_hi = min_eig(m, k, hi, dim)?;
    }
    while hi - lo > THRESHOLD_GAMMA_TOL {
        let mid = 0.5 * (lo + hi);
        let lam = min_eig(m, k, mid, dim)?;
        if lam > 0.0 {
            (lo, lam_lo) = (mid, lam);
        } else {
            (hi, lam_hi) = (mid, lam);
        }
    }
    debug_assert!(lam_lo > 0.0 && lam_hi <= 0.0);
    Ok(GammaThreshold {
        m,
        k,
        dim,
        gamma_c: Some(0.5 * (lo + hi)),
        bracket: Some((lo, hi)),
        lambda_at_bracket: Some((lam_lo, lam_hi)),
        tolerance: THRESHOLD_GAMMA_TOL,
        note: String::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KThreshold {
    pub m: f64,
    pub gamma: f64,
    /// Smallest `k` such that every `k' ∈ [k, k_max]` is stable.
    pub k0: Option<usize>,
    pub k_max: usize,
    /// Minimal eigenvalue for `k = 1..=k_max`.
    pub min_eigenvalues: Vec<f64>,
}

pub fn stability_threshold_k(m: f64, gamma: f64, dim: usize) -> Result<KThreshold> {
    stability_threshold_k_up_to(m, gamma, dim, THRESHOLD_K_MAX)
}

pub fn stability_threshold_k_up_to(m: f64, gamma: f64, dim: usize, k_max: usize) -> Result<KThreshold> {
    let eigs = (1..=k_max)
        .map(|k| min_eig(m, k, gamma, dim))
        .collect::<Result<Vec<f64>>>()?;
    let mut k0 = None;
    for k in (1..=k_max).rev() {
        if eigs[k - 1] > 0.0 {
            k0 = Some(k);
        } else {
            break;
        }
    }
    Ok(KThreshold {
        m,
        gamma,
        k0,
        k_max,
        min_eigenvalues: eigs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_strip_threshold_is_analytic() {
        // at q = 1 the undulation eigenvalue is 4π² - γ(1 - 8(g₁(0) - g₁(1/2)))
        let t = stability_threshold_gamma(0.0, 1, 2).unwrap();
        let c = (PI.cosh() - 1.0) / (4.0 * PI * PI.sinh());
        let exact = 4.0 * PI * PI / (1.0 - 8.0 * c);
        let g = t.gamma_c.unwrap();
        assert!((g - exact).abs() < 1e-6, "{g} vs {exact}");
        let (lo, hi) = t.bracket.unwrap();
        assert!(hi - lo <= 1e-6);
    }

    #[test]
    fn small_gamma_is_stable_for_every_k() {
        let t = stability_threshold_k_up_to(0.0, 0.1, 2, 30).unwrap();
        assert_eq!(t.k0, Some(1));
    }
}
