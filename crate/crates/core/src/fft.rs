//! Multi-dimensional complex FFTs over row-major arrays.
//!
//! Plans are cached process-wide; rustfft plans are immutable once built so a
//! cached `Arc` can be shared between threads.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);
type PlanCache = (FftPlanner<f64>, HashMap<usize, PlanPair>);

fn plan(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().unwrap_or_else(|p| p.into_inner());
    let (planner, plans) = &mut *guard;
    if let Some(p) = plans.get(&n) {
        return p.clone();
    }
    let pair = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    plans.insert(n, pair.clone());
    pair
}

fn transform(data: &mut [Complex64], sizes: &[usize], inverse: bool) {
    let total: usize = sizes.iter().product();
    assert_eq!(data.len(), total, "buffer does not match grid sizes");
    let dim = sizes.len();
    for axis in 0..dim {
        let n = sizes[axis];
        let (fwd, inv) = plan(n);
        let fft = if inverse { inv } else { fwd };
        let stride: usize = sizes[axis + 1..].iter().product();
        if stride == 1 {
            fft.process(data);
            continue;
        }
        let outer = total / (n * stride);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for o in 0..outer {
            let base = o * n * stride;
            for s in 0..stride {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride + s];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, value) in line.iter().enumerate() {
                    data[base + j * stride + s] = *value;
                }
            }
        }
    }
}

/// Unnormalized forward DFT, `X_k = Σ_j x_j e^{-2πi jk/n}` along every axis.
pub fn forward(data: &mut [Complex64], sizes: &[usize]) {
    transform(data, sizes, false);
}

/// Inverse DFT including the `1/N` normalization.
pub fn inverse(data: &mut [Complex64], sizes: &[usize]) {
    transform(data, sizes, true);
    let scale = 1.0 / data.len() as f64;
    for x in data.iter_mut() {
        *x *= scale;
    }
}

/// Forward transform of a real array.
pub fn forward_real(values: &[f64], sizes: &[usize]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&mut buf, sizes);
    buf
}

/// Inverse transform keeping only the real part.
pub fn inverse_real(mut spectrum: Vec<Complex64>, sizes: &[usize]) -> Vec<f64> {
    inverse(&mut spectrum, sizes);
    spectrum.into_iter().map(|c| c.re).collect()
}

/// Signed integer frequency of DFT index `i` on an axis of length `n`.
/// The Nyquist index of an even axis maps to `-n/2`.
#[inline]
pub fn frequency(i: usize, n: usize) -> i64 {
    if 2 * i < n {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// True if `i` is the Nyquist index of an even-length axis.
#[inline]
pub fn is_nyquist(i: usize, n: usize) -> bool {
    n.is_multiple_of(2) && 2 * i == n
}

/// Iterates over row-major multi-indices of `sizes`, calling `f(flat, idx)`.
pub fn for_each_index(sizes: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = sizes.iter().product();
    let mut idx = vec![0usize; sizes.len()];
    for flat in 0..total {
        f(flat, &idx);
        for axis in (0..sizes.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < sizes[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_2d() {
        let sizes = [8, 16];
        let values: Vec<f64> = (0..128).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let back = inverse_real(forward_real(&values, &sizes), &sizes);
        for (a, b) in values.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_lands_in_its_bin() {
        let sizes = [16, 8];
        let mut values = vec![0.0; 128];
        for_each_index(&sizes, |flat, idx| {
            values[flat] = (2.0 * std::f64::consts::PI * (3.0 * idx[0] as f64 / 16.0)).cos();
        });
        let spec = forward_real(&values, &sizes);
        // cos splits equally between +3 and -3
        assert!((spec[3 * 8].re - 64.0).abs() < 1e-9);
        assert!((spec[13 * 8].re - 64.0).abs() < 1e-9);
        assert_eq!(frequency(13, 16), -3);
        assert_eq!(frequency(8, 16), -8);
        assert!(is_nyquist(8, 16));
    }
}
