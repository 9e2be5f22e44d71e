//! Homogeneous Neumann problems on the unit box `[0,1]^N`, reduced to the
//! periodic solver by even reflection across every face.

use super::spectral::{check_mean_zero, grad_energy_spectral, solve_spectral};
use super::{ScalarField, TorusGrid};
use crate::error::Result;
use crate::fft::for_each_index;

fn reflected_sizes(grid: &TorusGrid) -> Vec<usize> {
    grid.sizes().iter().map(|n| 2 * n).collect()
}

/// Even extension of a cell-centered box field to the doubled periodic box.
fn reflect(field: &ScalarField) -> Vec<f64> {
    let grid = field.grid();
    let sizes = grid.sizes();
    let big = reflected_sizes(grid);
    let mut out = vec![0.0; big.iter().product()];
    let mut src = vec![0usize; sizes.len()];
    for_each_index(&big, |flat, idx| {
        for (a, (&j, &n)) in idx.iter().zip(sizes).enumerate() {
            src[a] = if j < n { j } else { 2 * n - 1 - j };
        }
        out[flat] = field.values()[grid.flat_index(&src)];
    });
    out
}

fn restrict(grid: &TorusGrid, big: &[f64]) -> Vec<f64> {
    let sizes = reflected_sizes(grid);
    let mut out = vec![0.0; grid.len()];
    grid.for_each_cell(|flat, idx| {
        let mut f = 0;
        for (a, &i) in idx.iter().enumerate() {
            f = f * sizes[a] + i;
        }
        out[flat] = big[f];
    });
    out
}

/// Mean-zero solution of `-Δv = f` in the box with `∂_ν v = 0` on its faces.
pub fn solve_poisson_neumann(f: &ScalarField) -> Result<ScalarField> {
    check_mean_zero(f.values())?;
    let grid = f.grid();
    let big = reflect(f);
    let v = solve_spectral(&big, &reflected_sizes(grid), &vec![2.0; grid.dim()]);
    Ok(ScalarField::from_parts_unchecked(grid.clone(), restrict(grid, &v)))
}

/// `∫_Ω |∇v|²` over the box for a field whose even extension is smooth.
pub fn neumann_dirichlet_energy(v: &ScalarField) -> Result<f64> {
    v.ensure_finite()?;
    let grid = v.grid();
    let dim = grid.dim();
    let whole = grad_energy_spectral(&reflect(v), &reflected_sizes(grid), &vec![2.0; dim]);
    Ok(whole / (1u32 << dim) as f64)
}

/// Outward normal derivative of `v` on the box faces, sampled at the face
/// centers of the boundary cells, by spectral interpolation of the even
/// extension. Returns `(flux integral, max |∂_ν v|)`.
pub fn boundary_flux(v: &ScalarField) -> (f64, f64) {
    let grid = v.grid();
    let sizes = grid.sizes().to_vec();
    let big_grid = TorusGrid::new(&reflected_sizes(grid)).expect("doubled grid is valid");
    let ext = ScalarField::from_parts_unchecked(big_grid, reflect(v));
    let interp = super::spectral::TrigInterpolant::new(&ext);
    let dim = sizes.len();
    let mut total = 0.0;
    let mut max = 0.0f64;
    for axis in 0..dim {
        let face_area: f64 = (0..dim).filter(|&a| a != axis).map(|a| grid.spacing(a)).product();
        let others: Vec<usize> = (0..dim).filter(|&a| a != axis).map(|a| sizes[a]).collect();
        let count: usize = others.iter().product();
        for c in 0..count {
            let mut x = vec![0.0; dim];
            let mut rem = c;
            for a in (0..dim).rev().filter(|&a| a != axis) {
                x[a] = (rem % sizes[a]) as f64 / (2 * sizes[a]) as f64 + 0.25 / sizes[a] as f64;
                rem /= sizes[a];
            }
            for (pos, sign) in [(0.0, -1.0), (0.5, 1.0)] {
                // the extended grid has unit length, so box coordinates are halved
                x[axis] = pos;
                let d = sign * interp.eval_derivative(&x, axis) * 0.5;
                total += d * face_area;
                max = max.max(d.abs());
            }
        }
    }
    (total, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_cosine_mode() {
        let g = TorusGrid::new(&[64]).unwrap();
        let f = ScalarField::from_fn(&g, |x| (PI * x[0]).cos());
        let v = solve_poisson_neumann(&f).unwrap();
        for (i, val) in v.values().iter().enumerate() {
            let exact = (PI * g.coordinate(0, i)).cos() / (PI * PI);
            assert!((val - exact).abs() < 1e-14);
        }
        // ∫₀¹ (sin(πx)/π)² dx = 1/(2π²)
        let e = neumann_dirichlet_energy(&v).unwrap();
        assert!((e - 0.5 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn zero_source_and_non_mean_zero() {
        let g = TorusGrid::new(&[16, 16]).unwrap();
        let v = solve_poisson_neumann(&ScalarField::zeros(&g)).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
        assert!(solve_poisson_neumann(&ScalarField::constant(&g, 0.5)).is_err());
    }

    #[test]
    fn cosine_product_has_no_flux() {
        let g = TorusGrid::new(&[32, 16]).unwrap();
        let f = ScalarField::from_fn(&g, |x| (PI * x[0]).cos() * (2.0 * PI * x[1]).cos());
        let v = solve_poisson_neumann(&f).unwrap();
        let (total, max) = boundary_flux(&v);
        assert!(total.abs() < 1e-12 && max < 1e-12);
    }
}
