//! Difference quotients of the nonlocal term against the symmetric
//! difference of the sets.

use serde::Serialize;

use super::nonlocal_of_field;
use crate::error::Result;
use crate::shape::IndicatorField;

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    /// `max |N(E) - N(F)| / |E △ F|` over the admissible pairs.
    pub max_ratio: f64,
    /// One entry per pair; `None` for identical sets.
    pub ratios: Vec<Option<f64>>,
    pub skipped: usize,
}

/// `|E △ F|` in volume units.
pub fn symmetric_difference(ue: &IndicatorField, uf: &IndicatorField) -> Result<f64> {
    ue.field().check_same_grid(uf.field())?;
    let cells = ue
        .field()
        .values()
        .iter()
        .zip(uf.field().values())
        .filter(|(a, b)| a != b)
        .count();
    Ok(cells as f64 * ue.grid().cell_volume())
}

pub fn nonlocal_lipschitz_check(pairs: &[(IndicatorField, IndicatorField)]) -> Result<LipschitzReport> {
    let mut ratios = Vec::with_capacity(pairs.len());
    let mut max_ratio = 0.0f64;
    let mut skipped = 0;
    for (e, f) in pairs {
        let d = symmetric_difference(e, f)?;
        if d == 0.0 {
            skipped += 1;
            ratios.push(None);
            continue;
        }
        let r = (nonlocal_of_field(e.field())? - nonlocal_of_field(f.field())?).abs() / d;
        max_ratio = max_ratio.max(r);
        ratios.push(Some(r));
    }
    Ok(LipschitzReport {
        max_ratio,
        ratios,
        skipped,
    })
}
