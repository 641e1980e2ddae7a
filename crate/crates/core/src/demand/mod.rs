//! Origin-destination demand fields on the grid and their aggregation into
//! direction-indexed boarding, alighting, flux and transfer densities.

mod aggregate;
mod chessboard;
mod io;
mod smooth;

pub use aggregate::{aggregate_demand, reduce_flux, DemandAggregates, Direction, DirectionField, FluxMaxima};
pub use chessboard::{
    generate_chessboard_demand, solve_chessboard_densities, ChessboardDensities, ChessboardLayout,
    ChessboardSpec, DEFAULT_FLOW_RATIO,
};
pub use io::{read_od_csv, write_od_csv};
pub use smooth::{generate_smooth_demand, SmoothDemandParams};

use crate::error::{Result, TransitError};
use crate::grid::Grid;

/// Relative tolerance on `sum density * cell_size^4 == total_demand`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Discretized passenger demand density `lambda(xo, yo, xd, yd)` in
/// pas/(km^4 hr), one value per (origin cell, destination cell).
#[derive(Debug, Clone, PartialEq)]
pub struct OdMatrix {
    grid: Grid,
    density: Vec<f64>,
    total_demand: f64,
}

impl OdMatrix {
    /// Wraps a density array (index order `xo, yo, xd, yd`) after checking
    /// non-negativity and that it integrates to `total_demand`.
    pub fn new(grid: Grid, density: Vec<f64>, total_demand: f64) -> Result<Self> {
        let n = grid.n_cells();
        if density.len() != n.pow(4) {
            return Err(TransitError::InvalidDemand(format!(
                "expected {} entries, got {}",
                n.pow(4),
                density.len()
            )));
        }
        if let Some(v) = density.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(TransitError::InvalidDemand(format!(
                "density entries must be finite and non-negative, found {v}"
            )));
        }
        let od = OdMatrix {
            grid,
            density,
            total_demand,
        };
        let sum = od.integrated_total();
        if (sum - total_demand).abs() > NORMALIZATION_TOL * total_demand.abs().max(1e-300) {
            return Err(TransitError::InvalidDemand(format!(
                "density integrates to {sum}, expected total demand {total_demand}"
            )));
        }
        Ok(od)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn total_demand(&self) -> f64 {
        self.total_demand
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn index(&self, xo: usize, yo: usize, xd: usize, yd: usize) -> usize {
        let n = self.grid.n_cells();
        ((xo * n + yo) * n + xd) * n + yd
    }

    pub fn get(&self, xo: usize, yo: usize, xd: usize, yd: usize) -> f64 {
        self.density[self.index(xo, yo, xd, yd)]
    }

    /// `sum density * cell_size^4` (pas/hr).
    pub fn integrated_total(&self) -> f64 {
        let w = self.grid.cell_area() * self.grid.cell_area();
        self.density.iter().sum::<f64>() * w
    }

    /// Per-cell origin plus destination density (pas/(km^2 hr)), indexed `x * n + y`.
    pub fn origin_destination_marginal(&self) -> Vec<f64> {
        let n = self.grid.n_cells();
        let a = self.grid.cell_area();
        let mut out = vec![0.0; n * n];
        for xo in 0..n {
            for yo in 0..n {
                for xd in 0..n {
                    for yd in 0..n {
                        let v = self.get(xo, yo, xd, yd) * a;
                        out[xo * n + yo] += v;
                        out[xd * n + yd] += v;
                    }
                }
            }
        }
        out
    }
}

/// Constant density `D / |R|^4` everywhere.
pub fn generate_uniform_demand(grid: &Grid, total_demand: f64) -> Result<OdMatrix> {
    check_total(total_demand)?;
    let n = grid.n_cells();
    let value = total_demand / grid.area().powi(2);
    OdMatrix::new(*grid, vec![value; n.pow(4)], total_demand)
}

pub(crate) fn check_total(total_demand: f64) -> Result<()> {
    if !(total_demand > 0.0 && total_demand.is_finite()) {
        return Err(TransitError::InvalidDemand(format!(
            "total demand must be positive, got {total_demand}"
        )));
    }
    Ok(())
}

/// Scales an unnormalized field so that it integrates to `total_demand`.
pub(crate) fn normalize(grid: &Grid, mut raw: Vec<f64>, total_demand: f64) -> Result<OdMatrix> {
    check_total(total_demand)?;
    let w = grid.cell_area() * grid.cell_area();
    let mass = raw.iter().sum::<f64>() * w;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(TransitError::InvalidDemand(
            "unnormalized demand field integrates to zero".into(),
        ));
    }
    let scale = total_demand / mass;
    raw.iter_mut().for_each(|v| *v *= scale);
    OdMatrix::new(*grid, raw, total_demand)
}
