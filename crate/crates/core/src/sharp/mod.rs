//! The sharp-interface energy `J(E) = P(E) + γ∫|∇v_E|²`.

pub mod criticality;
pub mod isoperimetric;
pub mod lipschitz;
pub mod neumann;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::spectral::{dirichlet_energy, solve_poisson_periodic};
use crate::field::{ScalarField, TorusGrid};
use crate::shape::{perimeter_grid, project, IndicatorField, ShapeConfig};

pub use criticality::{el_residual, CriticalityReport};
pub use isoperimetric::{isoperimetric_compare, strip_disc_crossing, Candidate};
pub use lipschitz::{nonlocal_lipschitz_check, LipschitzReport};
pub use neumann::energy_neumann;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub perimeter: f64,
    /// `∫|∇v_E|²`.
    pub nonlocal: f64,
    pub gamma: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(perimeter: f64, nonlocal: f64, gamma: f64) -> Self {
        Self {
            perimeter,
            nonlocal,
            gamma,
            total: perimeter + gamma * nonlocal,
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} must be finite and ≥ 0"
        )));
    }
    Ok(())
}

/// `∫|∇v|²` for `-Δv = u - mean(u)`.
pub fn nonlocal_of_field(u: &ScalarField) -> Result<f64> {
    let v = solve_poisson_periodic(&u.mean_removed())?;
    dirichlet_energy(&v)
}

/// Energy of a parametric shape. The perimeter is exact; the nonlocal term
/// uses the band-limited projection of `u_E` on `grid`.
pub fn energy_of_shape(shape: &ShapeConfig, gamma: f64, grid: &TorusGrid) -> Result<EnergyBreakdown> {
    check_gamma(gamma)?;
    let u = project(shape, grid)?;
    Ok(EnergyBreakdown::new(
        shape.perimeter_exact(),
        nonlocal_of_field(&u)?,
        gamma,
    ))
}

/// Energy of a grid indicator: contour perimeter plus spectral nonlocal term.
pub fn energy_of_field(u: &IndicatorField, gamma: f64) -> Result<EnergyBreakdown> {
    check_gamma(gamma)?;
    Ok(EnergyBreakdown::new(
        perimeter_grid(u)?,
        nonlocal_of_field(u.field())?,
        gamma,
    ))
}

/// `a²(1-a)²/(3k²)`, the nonlocal energy of `L_k`.
pub fn lamella_nonlocal(k: usize, m: f64) -> f64 {
    let a = 0.5 * (m + 1.0);
    (a * (1.0 - a)).powi(2) / (3.0 * (k * k) as f64)
}

pub fn lamella_closed_form(k: usize, m: f64, gamma: f64) -> EnergyBreakdown {
    EnergyBreakdown::new(2.0 * k as f64, lamella_nonlocal(k, m), gamma)
}

/// Minimizer over `k ≥ 1` of the lamella closed form; ties go to the smaller
/// `k`. The objective is convex in `k`, so the descent stops at the first
/// non-improvement.
pub fn optimal_strip_count(m: f64, gamma: f64) -> usize {
    let f = |k: usize| lamella_closed_form(k, m, gamma).total;
    let mut k = 1;
    while f(k + 1) < f(k) {
        k += 1;
    }
    k
}

/// Writes `m,gamma,k,perimeter,nonlocal,total` rows.
pub fn write_energy_table<W: Write>(rows: &[(f64, usize, EnergyBreakdown)], mut out: W) -> Result<()> {
    writeln!(out, "m,gamma,k,perimeter,nonlocal,total")?;
    for (m, k, e) in rows {
        writeln!(
            out,
            "{m:e},{:e},{k},{:e},{:e},{:e}",
            e.gamma, e.perimeter, e.nonlocal, e.total
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((lamella_closed_form(1, 0.0, 1.0).total - (2.0 + 1.0 / 48.0)).abs() < 1e-15);
        assert!((lamella_nonlocal(2, 0.0) - 1.0 / 192.0).abs() < 1e-16);
        assert!(lamella_nonlocal(1, 1.0 - 1e-9) < 1e-18);
    }

    #[test]
    fn optimal_k() {
        assert_eq!(optimal_strip_count(0.0, 0.0), 1);
        let mut last = 1;
        for g in [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6] {
            let k = optimal_strip_count(0.0, g);
            assert!(k >= last);
            last = k;
        }
        // stationarity of 2k + γ/(48k²): k* = (γ/48)^{1/3}
        let k = optimal_strip_count(0.0, 48e6) as f64;
        assert!((k - 100.0).abs() <= 1.0);
    }

    #[test]
    fn shape_energy_matches_closed_form() {
        let grid = TorusGrid::new(&[8, 512]).unwrap();
        for k in 1..=5 {
            for m in [-0.5, 0.0, 0.5] {
                let s = ShapeConfig::lamella(k, m, 1, 2).unwrap();
                let e = energy_of_shape(&s, 1.0, &grid).unwrap();
                let c = lamella_closed_form(k, m, 1.0);
                assert!(
                    (e.total - c.total).abs() < 1e-6,
                    "k={k} m={m}: {} vs {}",
                    e.total,
                    c.total
                );
            }
        }
    }

    #[test]
    fn negative_gamma_rejected() {
        let grid = TorusGrid::new(&[8, 8]).unwrap();
        let s = ShapeConfig::lamella(1, 0.0, 1, 2).unwrap();
        assert!(energy_of_shape(&s, -1.0, &grid).is_err());
    }
}
