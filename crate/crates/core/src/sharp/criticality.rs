//! Euler–Lagrange residual `H + 4γv - λ` on a boundary mesh.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft::{for_each_index, frequency};
use crate::field::spectral::TrigInterpolant;
use crate::field::TorusGrid;
use crate::shape::{indicator_series, BoundaryMesh, ShapeConfig};

#[derive(Debug, Clone, Serialize)]
pub struct CriticalityReport {
    /// Boundary mean of `H + 4γv`.
    pub lambda: f64,
    pub residual_sup: f64,
    /// `H + 4γv - λ` per mesh node.
    pub residuals: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Trigonometric interpolant of `v_E` built from the exact (band-limited)
/// Fourier coefficients of `u_E`.
pub fn potential_interpolant(shape: &ShapeConfig, grid: &TorusGrid) -> Result<TrigInterpolant> {
    let mut series = indicator_series(shape, grid)?;
    let sizes = grid.sizes().to_vec();
    for_each_index(&sizes, |flat, idx| {
        let q2: f64 = idx
            .iter()
            .zip(&sizes)
            .map(|(&i, &n)| (frequency(i, n) as f64).powi(2))
            .sum();
        series[flat] = if q2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            series[flat] / (4.0 * PI * PI * q2)
        };
    });
    Ok(TrigInterpolant::from_series(grid, &series))
}

/// Residual of `H_{∂E} + 4γv_E = λ` at the mesh nodes, `λ` taken as the
/// weighted boundary mean.
pub fn el_residual(
    shape: &ShapeConfig,
    mesh: &BoundaryMesh,
    gamma: f64,
    grid: &TorusGrid,
) -> Result<CriticalityReport> {
    if grid.dim() != 2 || shape.dim() != 2 {
        return Err(Error::Unsupported("criticality residuals are planar".into()));
    }
    let mut warnings = Vec::new();
    let h = grid.spacing(0).max(grid.spacing(1));
    for (i, c) in mesh.components.iter().enumerate() {
        let spacing = c.weights.iter().fold(0.0f64, |m, &w| m.max(w));
        if spacing > 2.0 * h {
            warnings.push(format!(
                "component {i}: node spacing {spacing:.3e} is coarser than the grid ({h:.3e})"
            ));
        }
        let kmax = c.curvature.iter().fold(0.0f64, |m, &k| m.max(k.abs()));
        if kmax * h > 0.25 {
            warnings.push(format!(
                "component {i}: curvature {kmax:.3e} under-resolved by the grid"
            ));
        }
    }
    let v = if gamma != 0.0 {
        Some(potential_interpolant(shape, grid)?)
    } else {
        None
    };
    let values: Vec<f64> = mesh
        .points()
        .zip(mesh.curvature())
        .map(|(p, &k)| k + v.as_ref().map_or(0.0, |v| 4.0 * gamma * v.eval(p)))
        .collect();
    let weights: Vec<f64> = mesh.weights().copied().collect();
    let total: f64 = weights.iter().sum();
    let lambda = values.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>() / total;
    let residuals: Vec<f64> = values.iter().map(|x| x - lambda).collect();
    let residual_sup = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(CriticalityReport {
        lambda,
        residual_sup,
        residuals,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::boundary_mesh;

    #[test]
    fn lamella_is_critical() {
        let grid = TorusGrid::new(&[64, 256]).unwrap();
        for (k, m) in [(1, 0.0), (2, 0.3), (3, -0.4)] {
            let s = ShapeConfig::lamella(k, m, 1, 2).unwrap();
            let mesh = boundary_mesh(&s, 64).unwrap();
            let r = el_residual(&s, &mesh, 5.0, &grid).unwrap();
            assert!(r.residual_sup < 1e-6, "{}", r.residual_sup);
        }
    }

    #[test]
    fn droplet_without_nonlocal_term() {
        let grid = TorusGrid::new(&[64, 64]).unwrap();
        let s = ShapeConfig::droplet(&[0.5, 0.5], 0.2).unwrap();
        let mesh = boundary_mesh(&s, 128).unwrap();
        let r = el_residual(&s, &mesh, 0.0, &grid).unwrap();
        assert!(r.residual_sup < 1e-8);
        assert!((r.lambda - 5.0).abs() < 1e-12);
    }
}
