//! Fourier-space operators on the torus: the mean-zero Poisson solve, the
//! Dirichlet energy by Parseval, spectral derivatives and trigonometric
//! interpolation at off-grid points.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::{ScalarField, TorusGrid};
use crate::error::{Error, Result};
use crate::fft::{self, for_each_index, frequency, is_nyquist};
use crate::tolerances::MEAN_ZERO;

/// `|k|²` for every DFT bin of a periodic box with side lengths `lengths`,
/// where `k = 2πξ/L` per axis.
pub(crate) fn wave_numbers_sq(sizes: &[usize], lengths: &[f64]) -> Vec<f64> {
    let per_axis: Vec<Vec<f64>> = sizes
        .iter()
        .zip(lengths)
        .map(|(&n, &len)| {
            (0..n)
                .map(|i| {
                    let k = 2.0 * PI * frequency(i, n) as f64 / len;
                    k * k
                })
                .collect()
        })
        .collect();
    let mut out = vec![0.0; sizes.iter().product()];
    for_each_index(sizes, |flat, idx| {
        out[flat] = idx.iter().enumerate().map(|(a, &i)| per_axis[a][i]).sum();
    });
    out
}

pub(crate) fn check_mean_zero(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if mean.abs() > MEAN_ZERO * scale {
        return Err(Error::NotMeanZero { mean });
    }
    Ok(())
}

/// Solves `-Δv = f` on a periodic box, zero mode of `v` set to 0.
pub(crate) fn solve_spectral(values: &[f64], sizes: &[usize], lengths: &[f64]) -> Vec<f64> {
    let k2 = wave_numbers_sq(sizes, lengths);
    let mut spec = fft::forward_real(values, sizes);
    spec[0] = Complex64::new(0.0, 0.0);
    for (c, &k) in spec.iter_mut().zip(&k2).skip(1) {
        *c /= k;
    }
    fft::inverse_real(spec, sizes)
}

/// `∫|∇v|²` over a periodic box of the given side lengths, by Parseval.
pub(crate) fn grad_energy_spectral(values: &[f64], sizes: &[usize], lengths: &[f64]) -> f64 {
    let k2 = wave_numbers_sq(sizes, lengths);
    let spec = fft::forward_real(values, sizes);
    let n = values.len() as f64;
    let volume: f64 = lengths.iter().product();
    volume * spec.iter().zip(&k2).map(|(c, &k)| k * c.norm_sqr()).sum::<f64>() / (n * n)
}

/// Mean-zero periodic solution of `-Δv = f` on the unit torus.
///
/// Fourier coefficients of `f` are divided by `4π²|ξ|²`; the zero mode of `v`
/// is set to exactly 0. `f` must itself be mean-zero.
pub fn solve_poisson_periodic(f: &ScalarField) -> Result<ScalarField> {
    check_mean_zero(f.values())?;
    let grid = f.grid();
    let lengths = vec![1.0; grid.dim()];
    let v = solve_spectral(f.values(), grid.sizes(), &lengths);
    Ok(ScalarField::from_parts_unchecked(grid.clone(), v))
}

/// Spectral Dirichlet energy `∫_{T^N} |∇v|² dx`.
pub fn dirichlet_energy(v: &ScalarField) -> Result<f64> {
    v.ensure_finite()?;
    let grid = v.grid();
    Ok(grad_energy_spectral(v.values(), grid.sizes(), &vec![1.0; grid.dim()]))
}

/// Spectral Laplacian.
pub fn laplacian(v: &ScalarField) -> ScalarField {
    let grid = v.grid();
    let k2 = wave_numbers_sq(grid.sizes(), &vec![1.0; grid.dim()]);
    let mut spec = fft::forward_real(v.values(), grid.sizes());
    for (c, &k) in spec.iter_mut().zip(&k2) {
        *c *= -k;
    }
    ScalarField::from_parts_unchecked(grid.clone(), fft::inverse_real(spec, grid.sizes()))
}

/// Spectral gradient, one field per axis. Nyquist bins are dropped.
pub fn gradient(v: &ScalarField) -> Vec<ScalarField> {
    let grid = v.grid();
    let sizes = grid.sizes();
    let spec = fft::forward_real(v.values(), sizes);
    (0..grid.dim())
        .map(|axis| {
            let n = sizes[axis];
            let mut d = spec.clone();
            for_each_index(sizes, |flat, idx| {
                let i = idx[axis];
                d[flat] *= if is_nyquist(i, n) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, 2.0 * PI * frequency(i, n) as f64)
                };
            });
            ScalarField::from_parts_unchecked(grid.clone(), fft::inverse_real(d, sizes))
        })
        .collect()
}

/// Trigonometric interpolant of a grid field, evaluable anywhere on the torus.
///
/// The Nyquist bin of an even axis is represented by a cosine so the
/// interpolant stays real.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    sizes: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl TrigInterpolant {
    pub fn new(field: &ScalarField) -> Self {
        let sizes = field.grid().sizes().to_vec();
        let n = field.values().len() as f64;
        let coeffs = fft::forward_real(field.values(), &sizes)
            .into_iter()
            .map(|c| c / n)
            .collect();
        Self { sizes, coeffs }
    }

    /// Builds the interpolant from Fourier-series coefficients `c_ξ` of a
    /// function `u(x) = Σ c_ξ e^{2πiξ·x}`, stored in DFT bin order.
    pub(crate) fn from_series(grid: &TorusGrid, series: &[Complex64]) -> Self {
        // Grid samples sit at (i+1/2)h, so the DFT of the samples carries a
        // half-cell phase relative to the series coefficients.
        let sizes = grid.sizes().to_vec();
        let mut coeffs = series.to_vec();
        for_each_index(&sizes, |flat, idx| {
            let phase: f64 = idx
                .iter()
                .zip(&sizes)
                .map(|(&i, &n)| PI * frequency(i, n) as f64 / n as f64)
                .sum();
            coeffs[flat] *= Complex64::from_polar(1.0, phase);
        });
        Self { sizes, coeffs }
    }

    fn basis(&self, axis: usize, x: f64, derivative: bool) -> Vec<Complex64> {
        let n = self.sizes[axis];
        let shifted = x - 0.5 / n as f64;
        (0..n)
            .map(|i| {
                let f = frequency(i, n) as f64;
                let arg = 2.0 * PI * f * shifted;
                match (is_nyquist(i, n), derivative) {
                    (true, false) => Complex64::new(arg.cos(), 0.0),
                    (true, true) => Complex64::new(2.0 * PI * f * arg.sin(), 0.0),
                    (false, false) => Complex64::from_polar(1.0, arg),
                    (false, true) => Complex64::new(0.0, 2.0 * PI * f) * Complex64::from_polar(1.0, arg),
                }
            })
            .collect()
    }

    fn contract(&self, bases: &[Vec<Complex64>]) -> f64 {
        let mut data = self.coeffs.clone();
        let mut len = data.len();
        for axis in (0..self.sizes.len()).rev() {
            let n = self.sizes[axis];
            let outer = len / n;
            for o in 0..outer {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, b) in bases[axis].iter().enumerate() {
                    acc += data[o * n + j] * b;
                }
                data[o] = acc;
            }
            len = outer;
        }
        data[0].re
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let bases: Vec<_> = (0..self.sizes.len()).map(|a| self.basis(a, x[a], false)).collect();
        self.contract(&bases)
    }

    /// Partial derivative along `axis` at `x`.
    pub fn eval_derivative(&self, x: &[f64], axis: usize) -> f64 {
        let bases: Vec<_> = (0..self.sizes.len()).map(|a| self.basis(a, x[a], a == axis)).collect();
        self.contract(&bases)
    }
}

impl TrigInterpolant {
    /// Samples the interpolant back onto its grid.
    pub fn to_field(&self, grid: &TorusGrid) -> ScalarField {
        let n = self.coeffs.len() as f64;
        let spec: Vec<Complex64> = self.coeffs.iter().map(|c| c * n).collect();
        ScalarField::from_parts_unchecked(grid.clone(), fft::inverse_real(spec, &self.sizes))
    }
}
