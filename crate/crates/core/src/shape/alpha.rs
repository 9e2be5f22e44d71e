//! Asymmetry index `α(E,F) = min_x |E △ (x+F)|` over grid translations.

use serde::Serialize;

use super::raster::IndicatorField;
use crate::error::{Error, Result};
use crate::fft;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaResult {
    /// `|E △ (x+F)|` at the optimal shift, in units of volume.
    pub value: f64,
    /// Same, in cells.
    pub cells: usize,
    /// Optimal shift in grid cells per axis.
    pub shift: Vec<usize>,
}

fn indicator01(u: &IndicatorField) -> Vec<f64> {
    u.field()
        .values()
        .iter()
        .map(|&v| if v > 0.0 { 1.0 } else { 0.0 })
        .collect()
}

/// FFT cross-correlation of the {0,1} indicators gives `|E ∩ (x+F)|` for all
/// shifts at once. Ties go to the lexicographically smallest shift.
pub fn alpha_distance(ue: &IndicatorField, uf: &IndicatorField) -> Result<AlphaResult> {
    if ue.grid() != uf.grid() {
        return Err(Error::GridMismatch("alpha_distance needs a common grid".into()));
    }
    let grid = ue.grid();
    let sizes = grid.sizes();
    let a = fft::forward_real(&indicator01(ue), sizes);
    let b = fft::forward_real(&indicator01(uf), sizes);
    let prod: Vec<_> = a.iter().zip(&b).map(|(x, y)| x * y.conj()).collect();
    let overlap = fft::inverse_real(prod, sizes);
    let (ne, nf) = (ue.count() as i64, uf.count() as i64);
    let mut best = (i64::MAX, 0usize);
    for (flat, c) in overlap.iter().enumerate() {
        let sym = ne + nf - 2 * c.round() as i64;
        if sym < best.0 {
            best = (sym, flat);
        }
    }
    let cells = best.0 as usize;
    Ok(AlphaResult {
        value: cells as f64 * grid.cell_volume(),
        cells,
        shift: grid.unflatten(best.1),
    })
}

/// Exhaustive `O(n²)` shift scan, used to cross-check the FFT path.
pub fn alpha_distance_brute_force(ue: &IndicatorField, uf: &IndicatorField) -> Result<AlphaResult> {
    if ue.grid() != uf.grid() {
        return Err(Error::GridMismatch("alpha_distance needs a common grid".into()));
    }
    let grid = ue.grid();
    let sizes = grid.sizes().to_vec();
    let (e, f) = (ue.field().values(), uf.field().values());
    let mut best: Option<(usize, usize)> = None;
    for s in 0..grid.len() {
        let shift = grid.unflatten(s);
        let mut count = 0;
        grid.for_each_cell(|flat, idx| {
            // (x+F)(y) = F(y - x)
            let src: Vec<usize> = idx
                .iter()
                .zip(&shift)
                .zip(&sizes)
                .map(|((&i, &d), &n)| (i + n - d) % n)
                .collect();
            if (e[flat] > 0.0) != (f[grid.flat_index(&src)] > 0.0) {
                count += 1;
            }
        });
        if best.is_none_or(|(c, _)| count < c) {
            best = Some((count, s));
        }
    }
    let (cells, s) = best.expect("grid is non-empty");
    Ok(AlphaResult {
        value: cells as f64 * grid.cell_volume(),
        cells,
        shift: grid.unflatten(s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TorusGrid;
    use crate::shape::{rasterize, ShapeConfig};

    #[test]
    fn identical_and_translated_sets() {
        let g = TorusGrid::new(&[32, 32]).unwrap();
        let e = rasterize(&ShapeConfig::droplet(&[0.3, 0.4], 0.2).unwrap(), &g).unwrap();
        let r = alpha_distance(&e, &e).unwrap();
        assert_eq!((r.cells, r.shift.clone()), (0, vec![0, 0]));
        // cell-aligned translate by (5, 3) cells
        let f = rasterize(
            &ShapeConfig::droplet(&[0.3 + 5.0 / 32.0, 0.4 + 3.0 / 32.0], 0.2).unwrap(),
            &g,
        )
        .unwrap();
        let r = alpha_distance(&f, &e).unwrap();
        assert_eq!(r.cells, 0);
        assert_eq!(r.shift, vec![5, 3]);
    }

    #[test]
    fn strip_versus_disc_matches_brute_force() {
        let g = TorusGrid::new(&[32, 32]).unwrap();
        let e = rasterize(&ShapeConfig::lamella(1, 0.0, 1, 2).unwrap(), &g).unwrap();
        let r = (0.5 / std::f64::consts::PI).sqrt();
        let f = rasterize(&ShapeConfig::droplet(&[0.5, 0.5], r).unwrap(), &g).unwrap();
        assert_eq!(
            alpha_distance(&e, &f).unwrap(),
            alpha_distance_brute_force(&e, &f).unwrap()
        );
    }
}
