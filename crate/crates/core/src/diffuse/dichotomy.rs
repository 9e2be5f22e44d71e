//! Comparing the long-time behavior of the flow near a lamella with the sign
//! of its second variation.

use serde::Serialize;

use super::flow::FlowState;
use super::profile::tanh_profile;
use crate::error::Result;
use crate::field::{ScalarField, TorusGrid};
use crate::secvar::{mode_direction, StabilityReport};
use crate::shape::{
    alpha_distance, rasterize, volume_fraction, GraphPerturbation, IndicatorField, Lamella, ShapeConfig,
};

/// Thresholded states within this many cells of the lamella count as returned.
pub const ATTRACT_CELLS: usize = 2;
/// Minimal energy drop for an escape.
pub const ESCAPE_DROP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DichotomyOutcome {
    Attracted,
    Escaped,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowVerdict {
    pub outcome: DichotomyOutcome,
    pub alpha_cells: usize,
    pub alpha: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
}

impl FlowVerdict {
    pub fn energy_drop(&self) -> f64 {
        self.initial_energy - self.final_energy
    }
}

/// Optimal profile of `L_k` with its interfaces displaced along the mode of
/// `report`, scaled to the given amplitude and volume-corrected.
pub fn seeded_lamella(
    base: Lamella,
    report: &StabilityReport,
    amplitude: f64,
    grid: &TorusGrid,
    epsilon: f64,
) -> Result<ScalarField> {
    let n = grid.size(base.lateral_axes()[0]);
    let psi = mode_direction(base, report, n)?
        .into_iter()
        .map(|row| row.into_iter().map(|v| amplitude * v).collect())
        .collect();
    let g = GraphPerturbation::new(base, psi)?.volume_corrected()?;
    tanh_profile(&ShapeConfig::Graph(g), grid, epsilon)
}

/// Thresholds the final state and measures `α` against the rasterized
/// lamella carrying the thresholded volume fraction: at finite `ε` the zero
/// level set encloses a volume that differs from `(1+m)/2` by `O(ε)`.
pub fn classify_flow(base: Lamella, initial_energy: f64, state: &FlowState) -> Result<FlowVerdict> {
    let sign = IndicatorField::threshold(&state.u);
    let m_eff = volume_fraction(&sign).clamp(-1.0 + 1e-12, 1.0 - 1e-12);
    let target = rasterize(&ShapeConfig::Lamella(Lamella { m: m_eff, ..base }), state.u.grid())?;
    let a = alpha_distance(&target, &sign)?;
    let final_energy = state.energy().total;
    let outcome = if a.cells <= ATTRACT_CELLS {
        DichotomyOutcome::Attracted
    } else if initial_energy - final_energy >= ESCAPE_DROP {
        DichotomyOutcome::Escaped
    } else {
        DichotomyOutcome::Undecided
    };
    Ok(FlowVerdict {
        outcome,
        alpha_cells: a.cells,
        alpha: a.value,
        initial_energy,
        final_energy,
    })
}
