//! Closed-form periodic Green kernels.
//!
//! The torus Green function `G` solves `-Δ_y G(x,y) = δ_x - 1` with
//! `∫ G(x,y) dy = 0`. Fourier-transforming along one axis reduces it to the
//! circle kernels `g_q`, which solve `-g'' + (2πq)² g = δ` (and the mean-zero
//! version `-g'' = δ - 1` for `q = 0`).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tolerances::GREEN_SUM_TOL;

/// Distance on the unit circle, in `[0, 1/2]`.
#[inline]
pub fn circle_distance(s: f64) -> f64 {
    let t = s - s.floor();
    t.min(1.0 - t)
}

/// Signed representative of `s` modulo 1 in `[-1/2, 1/2)`.
#[inline]
pub(crate) fn wrap_signed(s: f64) -> f64 {
    s - (s + 0.5).floor()
}

/// Mean-zero circle kernel `g₀(s) = s²/2 - s/2 + 1/12`, `s` the circle distance.
pub fn kernel_mean_zero(s: f64) -> f64 {
    let d = circle_distance(s);
    0.5 * d * d - 0.5 * d + 1.0 / 12.0
}

/// Screened circle kernel `cosh(λ(1/2-|s|))/(2λ sinh(λ/2))` for `λ > 0`.
///
/// Written with decaying exponentials so large `λ` cannot overflow.
pub fn screened_kernel(lambda: f64, s: f64) -> f64 {
    debug_assert!(lambda > 0.0);
    let d = circle_distance(s);
    ((-lambda * d).exp() + (-lambda * (1.0 - d)).exp()) / (2.0 * lambda * -(-lambda).exp_m1())
}

/// Lateral-mode kernel `g_q` with `λ = 2πq`; `q = 0` gives the mean-zero kernel.
pub fn green_kernel_screened(q: u32, s: f64) -> f64 {
    if q == 0 {
        kernel_mean_zero(s)
    } else {
        screened_kernel(2.0 * PI * q as f64, s)
    }
}

/// Same as [`green_kernel_screened`] for a real lateral frequency `|q| ≥ 0`
/// (used for wave vectors of 3D lamellae).
pub fn kernel_for_frequency(q: f64, s: f64) -> f64 {
    if q == 0.0 {
        kernel_mean_zero(s)
    } else {
        screened_kernel(2.0 * PI * q, s)
    }
}

/// Smooth part of the lateral sum: `Σ_{q≥1} 2 cos(2πq x₁) (g_q(s) - e^{-2πqs}/(4πq))`.
fn lateral_remainder(x1: f64, s: f64, tol: f64) -> f64 {
    let mut sum = 0.0;
    let mut q = 1u32;
    loop {
        let lambda = 2.0 * PI * q as f64;
        let denom = 2.0 * lambda * -(-lambda).exp_m1();
        let bound = 2.0 * 2.0 * (-lambda * (1.0 - s)).exp() / denom;
        let term = ((-lambda * (1.0 + s)).exp() + (-lambda * (1.0 - s)).exp()) / denom;
        sum += 2.0 * (lambda * x1).cos() * term;
        if bound < tol || q > 200 {
            break;
        }
        q += 1;
    }
    sum
}

/// `1 - 2e^{-β}cos θ + e^{-2β}` with `β = 2πs`, `θ = 2πx₁`, written without cancellation.
fn log_argument(x1: f64, s: f64) -> f64 {
    let beta = 2.0 * PI * s;
    let a = -(-beta).exp_m1();
    let sn = (PI * x1).sin();
    a * a + 4.0 * (-beta).exp() * sn * sn
}

fn reduce(d: [f64; 2]) -> (f64, f64) {
    (wrap_signed(d[0]), circle_distance(d[1]))
}

/// `G(d)` for a separation `d ≠ 0` on `T²`, summing lateral modes until the tail
/// bound is below `tol`.
///
/// The `q`-sum of the free decaying exponentials is done in closed form, which
/// produces the `-(1/2π) log r` singularity exactly; what remains converges
/// like `e^{-πq}` for every separation.
pub fn green_torus_2d(d: [f64; 2], tol: f64) -> f64 {
    let (x1, s) = reduce(d);
    kernel_mean_zero(s) - log_argument(x1, s).ln() / (4.0 * PI) + lateral_remainder(x1, s, tol)
}

/// Regular part `G(d) + (1/2π) log|d|` with `|d|` the minimal-image distance.
/// Continuous at `d = 0`, where it equals its limit.
pub fn green_regular_part_2d(d: [f64; 2]) -> f64 {
    let (x1, s) = reduce(d);
    let r2 = x1 * x1 + s * s;
    let log_ratio = if r2 == 0.0 {
        (4.0 * PI * PI).ln()
    } else {
        (log_argument(x1, s) / r2).ln()
    };
    kernel_mean_zero(s) - log_ratio / (4.0 * PI) + lateral_remainder(x1, s, GREEN_SUM_TOL)
}

/// Green function of the flat torus `T²` at `(x, y)`.
pub fn green_function_2d(x: [f64; 2], y: [f64; 2], tol: f64) -> Result<f64> {
    let d = [x[0] - y[0], x[1] - y[1]];
    let (x1, s) = reduce(d);
    if x1 == 0.0 && s == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(green_torus_2d(d, tol))
}
