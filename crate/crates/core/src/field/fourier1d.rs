//! Band-limited periodic functions on the unit circle given by equispaced
//! samples at `x_l = l/n`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::fft::{self, frequency, is_nyquist};

#[derive(Debug, Clone)]
pub struct Fourier1D {
    /// Series coefficients in DFT bin order; an even-length Nyquist bin is
    /// stored once and evaluated as a cosine.
    coeffs: Vec<Complex64>,
}

impl Fourier1D {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let coeffs = fft::forward_real(samples, &[samples.len()])
            .into_iter()
            .map(|c| c / n)
            .collect();
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn mean(&self) -> f64 {
        self.coeffs.first().map_or(0.0, |c| c.re)
    }

    /// `order`-th derivative at `x`.
    pub fn eval(&self, x: f64, order: u32) -> f64 {
        let n = self.coeffs.len();
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let w = 2.0 * PI * frequency(i, n) as f64;
            let d = Complex64::new(0.0, w).powu(order);
            if is_nyquist(i, n) {
                // c·cos(w x) differentiated `order` times
                let phase = w * x + order as f64 * PI / 2.0;
                acc += c.re * w.powi(order as i32) * phase.cos();
            } else {
                acc += (c * d * Complex64::from_polar(1.0, w * x)).re;
            }
        }
        acc
    }

    /// Values of the `order`-th derivative at `l/m`, `m ≥ n`, by zero padding.
    pub fn resample(&self, m: usize, order: u32) -> Vec<f64> {
        let n = self.coeffs.len();
        assert!(m >= n, "resampling below the band limit");
        let mut spec = vec![Complex64::new(0.0, 0.0); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            let f = frequency(i, n);
            let w = 2.0 * PI * f as f64;
            if is_nyquist(i, n) {
                let half = c.re / 2.0;
                for g in [f, -f] {
                    let wg = 2.0 * PI * g as f64;
                    let bin = g.rem_euclid(m as i64) as usize;
                    spec[bin] += Complex64::new(0.0, wg).powu(order) * half;
                }
            } else {
                let bin = f.rem_euclid(m as i64) as usize;
                spec[bin] += c * Complex64::new(0.0, w).powu(order);
            }
        }
        let scaled: Vec<Complex64> = spec.into_iter().map(|c| c * m as f64).collect();
        fft::inverse_real(scaled, &[m])
    }

    /// `∫₀¹ f(x)²`-type integrals need only the coefficients: `Σ|c|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}
