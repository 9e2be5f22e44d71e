//! Periodic grids on the unit torus and real fields sampled on them.
//!
//! Samples sit at cell centers `(i + 1/2)/n` along each axis. The same grid
//! type doubles as the cell-centered grid of the unit box `[0,1]^N` for the
//! Neumann solver.

pub mod fourier1d;
pub mod green;
pub mod neumann;
pub mod snapshot;
pub mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::for_each_index;
use crate::tolerances::MIN_GRID_SIZE;

/// Uniform grid on the unit flat torus `T^N`, `N ∈ {1,2,3}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    sizes: Vec<usize>,
}

impl TorusGrid {
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > 3 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1, 2 or 3, got {}",
                sizes.len()
            )));
        }
        if let Some(&n) = sizes.iter().find(|&&n| n < MIN_GRID_SIZE) {
            return Err(Error::InvalidGrid(format!(
                "axis size {n} is below the minimum of {MIN_GRID_SIZE}"
            )));
        }
        Ok(Self { sizes: sizes.to_vec() })
    }

    /// Grid of dimension `dim`; `sizes` must list one count per axis.
    pub fn make(dim: usize, sizes: &[usize]) -> Result<Self> {
        if sizes.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} axis sizes, got {}",
                sizes.len()
            )));
        }
        Self::new(sizes)
    }

    /// Cubic grid with `n` samples per axis.
    pub fn uniform(dim: usize, n: usize) -> Result<Self> {
        Self::new(&vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, axis: usize) -> usize {
        self.sizes[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        1.0 / self.sizes[axis] as f64
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Cell-center coordinate of index `i` on `axis`.
    #[inline]
    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        (i as f64 + 0.5) / self.sizes[axis] as f64
    }

    pub fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(axis, &i)| self.coordinate(axis, i))
            .collect()
    }

    /// Row-major flat index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.sizes).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Row-major multi-index of a flat index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.sizes[axis];
            flat /= self.sizes[axis];
        }
        idx
    }

    pub fn for_each_cell(&self, f: impl FnMut(usize, &[usize])) {
        for_each_index(&self.sizes, f);
    }
}

/// Real field sampled at the cell centers of a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts_unchecked(grid: TorusGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &TorusGrid, value: f64) -> Self {
        Self {
            values: vec![value; grid.len()],
            grid: grid.clone(),
        }
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: &TorusGrid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        let mut x = vec![0.0; grid.dim()];
        grid.for_each_cell(|flat, idx| {
            for (axis, &i) in idx.iter().enumerate() {
                x[axis] = grid.coordinate(axis, i);
            }
            values[flat] = f(&x);
        });
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Grid approximation of `∫ self · other dx`.
    pub fn inner(&self, other: &ScalarField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_volume())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Copy with the grid mean removed.
    pub fn mean_removed(&self) -> ScalarField {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid.sizes(),
                other.grid.sizes()
            )));
        }
        Ok(())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_grid_examples() {
        let g = TorusGrid::make(2, &[256, 256]).unwrap();
        assert_eq!(g.spacing(0), 1.0 / 256.0);
        assert_eq!(g.dim(), 2);
        let g1 = TorusGrid::make(1, &[1024]).unwrap();
        assert_eq!(g1.len(), 1024);
        let g3 = TorusGrid::make(3, &[64, 64, 64]).unwrap();
        assert!((g3.cell_volume() * g3.len() as f64 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_under_resolved_and_bad_dims() {
        assert!(matches!(TorusGrid::new(&[4, 64]), Err(Error::InvalidGrid(_))));
        assert!(TorusGrid::new(&[]).is_err());
        assert!(TorusGrid::new(&[8, 8, 8, 8]).is_err());
        assert!(TorusGrid::make(2, &[16]).is_err());
    }

    #[test]
    fn flat_index_round_trip() {
        let g = TorusGrid::new(&[8, 16, 32]).unwrap();
        for flat in [0, 1, 77, 4095] {
            assert_eq!(g.flat_index(&g.unflatten(flat)), flat);
        }
    }

    #[test]
    fn field_rejects_nan_and_length_mismatch() {
        let g = TorusGrid::new(&[8]).unwrap();
        assert!(ScalarField::new(g.clone(), vec![0.0; 7]).is_err());
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(ScalarField::new(g, v), Err(Error::NonFinite)));
    }
}
