//! Uniform square discretization of the study area.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TransitError};

/// Square city of side `side_length` km cut into `n_cells x n_cells` cells of
/// side `cell_size` km. Cell `n` (0-based) has center `(n + 1/2) * cell_size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    side_length: f64,
    cell_size: f64,
    n_cells: usize,
}

impl Grid {
    pub fn new(side_length: f64, cell_size: f64) -> Result<Self> {
        if !(side_length > 0.0 && side_length.is_finite()) {
            return Err(TransitError::InvalidGrid(format!(
                "side length must be positive, got {side_length}"
            )));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(TransitError::InvalidGrid(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        let ratio = side_length / cell_size;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * n.max(1.0) {
            return Err(TransitError::InvalidGrid(format!(
                "side length {side_length} km is not an integer multiple of cell size {cell_size} km \
                 ({side_length} / {cell_size} = {ratio})"
            )));
        }
        Ok(Grid {
            side_length,
            cell_size,
            n_cells: n as usize,
        })
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_size * self.cell_size
    }

    pub fn area(&self) -> f64 {
        self.side_length * self.side_length
    }

    /// Center coordinate of 0-based cell index `n` along either axis.
    pub fn center(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.cell_size
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|n| self.center(n)).collect()
    }

    /// Number of cells spanned by `length` km, if it is a whole multiple.
    pub fn cells_in(&self, length: f64) -> Option<usize> {
        let ratio = length / self.cell_size;
        let k = ratio.round();
        ((ratio - k).abs() <= 1e-9 * k.max(1.0) && k >= 1.0).then_some(k as usize)
    }
}
