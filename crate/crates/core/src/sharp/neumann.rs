//! Energy of a set compactly contained in the unit box, with the Neumann
//! potential.

use super::{check_gamma, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::field::neumann::{neumann_dirichlet_energy, solve_poisson_neumann};
use crate::shape::{perimeter_grid, IndicatorField};

/// Cells within this many layers of a face must carry a single value.
const WALL_LAYERS: usize = 2;

fn touches_boundary(u: &IndicatorField) -> bool {
    let grid = u.grid();
    let sizes = grid.sizes().to_vec();
    let mut seen: Option<f64> = None;
    let mut mixed = false;
    grid.for_each_cell(|flat, idx| {
        let near = idx
            .iter()
            .zip(&sizes)
            .any(|(&i, &n)| i < WALL_LAYERS || i >= n - WALL_LAYERS);
        if near {
            let v = u.field().values()[flat];
            match seen {
                None => seen = Some(v),
                Some(s) if s != v => mixed = true,
                _ => {}
            }
        }
    });
    mixed
}

/// `P_Ω(E) + γ∫_Ω|∇v_E|²` with `v_E` the mean-zero Neumann potential.
pub fn energy_neumann(u: &IndicatorField, gamma: f64) -> Result<EnergyBreakdown> {
    check_gamma(gamma)?;
    if touches_boundary(u) {
        return Err(Error::InvalidParameter("interface touches the box boundary".into()));
    }
    let v = solve_poisson_neumann(&u.field().mean_removed())?;
    Ok(EnergyBreakdown::new(
        perimeter_grid(u)?,
        neumann_dirichlet_energy(&v)?,
        gamma,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::neumann::boundary_flux;
    use crate::field::TorusGrid;
    use crate::shape::{rasterize, ShapeConfig};
    use std::f64::consts::PI;

    #[test]
    fn centered_disc() {
        let g = TorusGrid::new(&[128, 128]).unwrap();
        let u = rasterize(&ShapeConfig::droplet(&[0.5, 0.5], 0.25).unwrap(), &g).unwrap();
        let e0 = energy_neumann(&u, 0.0).unwrap();
        assert!((e0.perimeter / (2.0 * PI * 0.25) - 1.0).abs() < 0.01);
        let e = energy_neumann(&u, 3.0).unwrap();
        assert!(e.nonlocal > 0.0);
        assert_eq!(e.total, e.perimeter + 3.0 * e.nonlocal);

        let v = solve_poisson_neumann(&u.field().mean_removed()).unwrap();
        let vals = v.values();
        for i in 0..128 {
            for j in 0..128 {
                let a = vals[i * 128 + j];
                assert!((a - vals[(127 - i) * 128 + j]).abs() < 1e-10);
                assert!((a - vals[i * 128 + 127 - j]).abs() < 1e-10);
            }
        }
        let (flux, _) = boundary_flux(&v);
        assert!(flux.abs() < 1e-8);
    }

    #[test]
    fn touching_set_rejected() {
        let g = TorusGrid::new(&[32, 32]).unwrap();
        let u = rasterize(&ShapeConfig::lamella(1, 0.0, 1, 2).unwrap(), &g).unwrap();
        assert!(energy_neumann(&u, 1.0).is_err());
    }
}
