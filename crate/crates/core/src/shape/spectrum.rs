//! Exact Fourier coefficients of indicator functions, truncated to the band
//! of a grid. The band-limited projection is what the energy routines feed to
//! the spectral solver, which makes energies smooth in the shape parameters.

use std::collections::HashMap;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::{Droplet, GraphPerturbation, Lamella, ShapeConfig};
use crate::error::{Error, Result};
use crate::fft::{self, for_each_index, frequency, is_nyquist};
use crate::field::spectral::TrigInterpolant;
use crate::field::{ScalarField, TorusGrid};

/// Bessel function `J₁(x)` from its integral representation; the periodic
/// trapezoid rule converges geometrically once the node count exceeds
/// `|x| + O(|x|^{1/3})`.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let n = (ax + 10.0 * ax.cbrt()).ceil() as usize + 32;
    let h = 2.0 * PI / n as f64;
    let s: f64 = (0..n)
        .map(|j| {
            let t = j as f64 * h;
            (t - x * t.sin()).cos()
        })
        .sum();
    s / n as f64
}

/// `∫_0^1 e^{-2πifx}` over the union of `[lo, hi)` intervals.
fn interval_transform(f: i64, intervals: &[(f64, f64)]) -> Complex64 {
    if f == 0 {
        return intervals.iter().map(|(lo, hi)| Complex64::new(hi - lo, 0.0)).sum();
    }
    let w = 2.0 * PI * f as f64;
    intervals
        .iter()
        .map(|&(lo, hi)| {
            (Complex64::from_polar(1.0, -w * lo) - Complex64::from_polar(1.0, -w * hi)) / Complex64::new(0.0, w)
        })
        .sum()
}

fn lamella_chi(l: &Lamella, grid: &TorusGrid) -> Vec<Complex64> {
    let sizes = grid.sizes();
    let intervals: Vec<(f64, f64)> = l
        .interfaces()
        .chunks(2)
        .map(|p| (p[0].position, p[1].position))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for_each_index(sizes, |flat, idx| {
        let lateral_zero = idx.iter().enumerate().all(|(a, &i)| a == l.axis || i == 0);
        if lateral_zero {
            out[flat] = interval_transform(frequency(idx[l.axis], sizes[l.axis]), &intervals);
        }
    });
    out
}

fn droplets_chi(dim: usize, droplets: &[Droplet], grid: &TorusGrid) -> Vec<Complex64> {
    let sizes = grid.sizes();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for d in droplets {
        let r = d.radius;
        let mut cache: HashMap<i64, f64> = HashMap::new();
        let mut profile = |q2: i64| -> f64 {
            *cache.entry(q2).or_insert_with(|| {
                if q2 == 0 {
                    return d.volume();
                }
                let q = (q2 as f64).sqrt();
                if dim == 2 {
                    r * bessel_j1(2.0 * PI * r * q) / q
                } else {
                    let k = 2.0 * PI * q;
                    let kr = k * r;
                    4.0 * PI * (kr.sin() - kr * kr.cos()) / k.powi(3)
                }
            })
        };
        for_each_index(sizes, |flat, idx| {
            let mut q2 = 0i64;
            let mut phase = 0.0;
            for (a, &i) in idx.iter().enumerate() {
                let f = frequency(i, sizes[a]);
                q2 += f * f;
                phase -= 2.0 * PI * f as f64 * d.center[a];
            }
            out[flat] += Complex64::from_polar(profile(q2), phase);
        });
    }
    out
}

fn graph_chi(g: &GraphPerturbation, grid: &TorusGrid) -> Vec<Complex64> {
    let sizes = grid.sizes();
    let axis = g.base.axis;
    let lat = g.base.lateral_axes()[0];
    let (n_ax, n_lat) = (sizes[axis], sizes[lat]);
    // lateral quadrature: oversampled so the heights' exponentials are resolved
    let m = (4 * n_lat).max(4 * g.samples()).next_power_of_two();
    let series = g.series();
    let itf = g.base.interfaces();
    let heights: Vec<Vec<f64>> = series
        .iter()
        .zip(&itf)
        .map(|(s, i)| s.resample(m, 0).into_iter().map(|h| i.position + h).collect())
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for ia in 0..n_ax {
        let f = frequency(ia, n_ax);
        for (l, slot) in line.iter_mut().enumerate() {
            let intervals: Vec<(f64, f64)> = (0..g.base.k)
                .map(|s| (heights[2 * s][l], heights[2 * s + 1][l]))
                .collect();
            *slot = interval_transform(f, &intervals) / m as f64;
        }
        fft::forward(&mut line, &[m]);
        for il in 0..n_lat {
            let fl = frequency(il, n_lat);
            let bin = fl.rem_euclid(m as i64) as usize;
            let mut idx = [0usize; 2];
            idx[axis] = ia;
            idx[lat] = il;
            out[grid.flat_index(&idx)] = line[bin];
        }
    }
    out
}

/// Fourier-series coefficients of `u_E = 2χ_E - 1` on the bins of `grid`,
/// in DFT order; Nyquist bins are set to zero.
pub fn indicator_series(shape: &ShapeConfig, grid: &TorusGrid) -> Result<Vec<Complex64>> {
    if shape.dim() != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "shape dimension {} vs grid dimension {}",
            shape.dim(),
            grid.dim()
        )));
    }
    let mut chi = match shape {
        ShapeConfig::Lamella(l) => lamella_chi(l, grid),
        ShapeConfig::Droplets { dim, droplets } => droplets_chi(*dim, droplets, grid),
        ShapeConfig::Graph(g) => graph_chi(g, grid),
    };
    let sizes = grid.sizes().to_vec();
    for_each_index(&sizes, |flat, idx| {
        if idx.iter().zip(&sizes).any(|(&i, &n)| is_nyquist(i, n)) {
            chi[flat] = Complex64::new(0.0, 0.0);
        } else {
            chi[flat] *= 2.0;
        }
    });
    chi[0] -= 1.0;
    Ok(chi)
}

/// Grid samples of the band-limited projection of `u_E`.
pub fn project(shape: &ShapeConfig, grid: &TorusGrid) -> Result<ScalarField> {
    let series = indicator_series(shape, grid)?;
    Ok(TrigInterpolant::from_series(grid, &series).to_field(grid))
}
