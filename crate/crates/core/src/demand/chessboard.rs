//! Chessboard demand: alternating high (H) and low (L) density blocks with
//! constant OD density inside each of the four H/L combinations.

use serde::{Deserialize, Serialize};

use super::{check_total, OdMatrix};
use crate::error::{Result, TransitError};
use crate::grid::Grid;

/// Default share of demand leaving/arriving in H, and of H-origin demand that stays in H.
pub const DEFAULT_FLOW_RATIO: f64 = 0.9;

/// Block layout for patterns 1..=4 (block sides 5, 2.5, 2 and 1 km); the
/// block touching the origin corner is H.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChessboardLayout {
    pub pattern_id: u8,
    pub block_side: f64,
}

impl ChessboardLayout {
    pub fn pattern(pattern_id: u8) -> Result<Self> {
        let block_side = match pattern_id {
            1 => 5.0,
            2 => 2.5,
            3 => 2.0,
            4 => 1.0,
            _ => {
                return Err(TransitError::InvalidDemand(format!(
                    "chessboard pattern must be 1..=4, got {pattern_id}"
                )))
            }
        };
        Ok(ChessboardLayout {
            pattern_id,
            block_side,
        })
    }

    /// H/L membership of every cell, indexed `x * n + y`.
    pub fn high_cells(&self, grid: &Grid) -> Result<Vec<bool>> {
        let k = grid.cells_in(self.block_side).ok_or_else(|| {
            TransitError::InvalidDemand(format!(
                "block side {} km is not a multiple of the cell size {} km",
                self.block_side,
                grid.cell_size()
            ))
        })?;
        let n = grid.n_cells();
        let mut out = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                out.push((x / k + y / k) % 2 == 0);
            }
        }
        Ok(out)
    }
}

/// Solved OD densities (pas/(km^4 hr)) and marginals (pas/(km^2 hr)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChessboardDensities {
    pub high_to_high: f64,
    pub high_to_low: f64,
    pub low_to_high: f64,
    pub low_to_low: f64,
    pub departures_high: f64,
    pub departures_low: f64,
    pub arrivals_high: f64,
    pub arrivals_low: f64,
}

/// Everything that defines one chessboard instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChessboardSpec {
    pub layout: ChessboardLayout,
    pub rho_high: f64,
    pub rho_high_high: f64,
    /// km^2
    pub area_high: f64,
    pub area_low: f64,
    pub densities: ChessboardDensities,
}

/// Closed-form solution of the H/L flow system.
///
/// `area_high * departures_high = rho_high * D` (same for arrivals), and the
/// H->L flow is `(1 - rho_high_high)` times the H->H flow.
pub fn solve_chessboard_densities(
    total_demand: f64,
    area_high: f64,
    area_low: f64,
    rho_high: f64,
    rho_high_high: f64,
) -> Result<ChessboardDensities> {
    check_total(total_demand)?;
    if !(area_high > 0.0 && area_low > 0.0) {
        return Err(TransitError::InvalidDemand(format!(
            "H and L areas must be positive, got {area_high} and {area_low}"
        )));
    }
    for (name, r) in [("rho_H", rho_high), ("rho_HH", rho_high_high)] {
        if !(r > 0.0 && r < 1.0) {
            return Err(TransitError::InvalidDemand(format!("{name} must lie in (0, 1), got {r}")));
        }
    }
    let (d, rh, rl, p, q) = (total_demand, area_high, area_low, rho_high, rho_high_high);
    let denom = 2.0 - q;
    let high_to_high = d * p / (rh * rh * denom);
    let cross = d * p * (1.0 - q) / (rh * rl * denom);
    let low_to_low = d * (2.0 - q - 3.0 * p + 2.0 * p * q) / (rl * rl * denom);
    if low_to_low < 0.0 {
        return Err(TransitError::InfeasibleRatios(low_to_low));
    }
    Ok(ChessboardDensities {
        high_to_high,
        high_to_low: cross,
        low_to_high: cross,
        low_to_low,
        departures_high: rh * high_to_high + rl * cross,
        departures_low: rh * cross + rl * low_to_low,
        arrivals_high: rh * high_to_high + rl * cross,
        arrivals_low: rh * cross + rl * low_to_low,
    })
}

impl ChessboardDensities {
    /// Relative residuals of the eight balance equations: four marginal
    /// definitions, two demand totals, and the H departure/arrival shares.
    pub fn balance_residuals(
        &self,
        total_demand: f64,
        area_high: f64,
        area_low: f64,
        rho_high: f64,
    ) -> [f64; 8] {
        let (rh, rl, d) = (area_high, area_low, total_demand);
        let rel = |lhs: f64, rhs: f64| (lhs - rhs).abs() / rhs.abs().max(lhs.abs()).max(1e-300);
        [
            rel(self.departures_high, rh * self.high_to_high + rl * self.high_to_low),
            rel(self.departures_low, rh * self.low_to_high + rl * self.low_to_low),
            rel(self.arrivals_high, rh * self.high_to_high + rl * self.low_to_high),
            rel(self.arrivals_low, rh * self.high_to_low + rl * self.low_to_low),
            rel(rh * self.departures_high + rl * self.departures_low, d),
            rel(rh * self.arrivals_high + rl * self.arrivals_low, d),
            rel(rh * self.departures_high / d, rho_high),
            rel(rh * self.arrivals_high / d, rho_high),
        ]
    }

    /// Relative residual of `R_L * l_HL = (1 - rho_HH) * R_H * l_HH`.
    pub fn split_residual(&self, area_high: f64, area_low: f64, rho_high_high: f64) -> f64 {
        let lhs = area_low * self.high_to_low;
        let rhs = (1.0 - rho_high_high) * area_high * self.high_to_high;
        (lhs - rhs).abs() / rhs.abs().max(1e-300)
    }
}

pub fn generate_chessboard_demand(
    grid: &Grid,
    total_demand: f64,
    pattern_id: u8,
    rho_high: f64,
    rho_high_high: f64,
) -> Result<(OdMatrix, ChessboardSpec)> {
    let layout = ChessboardLayout::pattern(pattern_id)?;
    let high = layout.high_cells(grid)?;
    let n_high = high.iter().filter(|h| **h).count();
    let area_high = n_high as f64 * grid.cell_area();
    let area_low = grid.area() - area_high;
    let densities = solve_chessboard_densities(total_demand, area_high, area_low, rho_high, rho_high_high)?;

    let cells = high.len();
    let mut raw = Vec::with_capacity(cells * cells);
    for &o in &high {
        for &d in &high {
            raw.push(match (o, d) {
                (true, true) => densities.high_to_high,
                (true, false) => densities.high_to_low,
                (false, true) => densities.low_to_high,
                (false, false) => densities.low_to_low,
            });
        }
    }
    let od = OdMatrix::new(*grid, raw, total_demand)?;
    Ok((
        od,
        ChessboardSpec {
            layout,
            rho_high,
            rho_high_high,
            area_high,
            area_low,
            densities,
        },
    ))
}
