//! Routing of OD demand onto the grid network.
//!
//! Every trip between distinct cells rides an L-shaped path. Trips sharing a
//! row or column use one leg; all others transfer exactly once, half of them
//! riding horizontally first and half vertically first. Trips inside a single
//! cell never enter the network.
//!
//! A leg contributes its flow to the on-board flux of every cell from its
//! boarding cell up to, but excluding, its alighting cell, so the flux field
//! integrates to the passenger-km of the demand exactly.

use serde::{Deserialize, Serialize};

use super::OdMatrix;
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    East,
    West,
    North,
    South,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::East, Direction::West, Direction::North, Direction::South];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::East => "E",
            Direction::West => "W",
            Direction::North => "N",
            Direction::South => "S",
        }
    }

    pub fn is_east_west(self) -> bool {
        matches!(self, Direction::East | Direction::West)
    }

    fn horizontal(from: usize, to: usize) -> Direction {
        if to > from {
            Direction::East
        } else {
            Direction::West
        }
    }

    fn vertical(from: usize, to: usize) -> Direction {
        if to > from {
            Direction::North
        } else {
            Direction::South
        }
    }
}

/// Densities for one travel direction, each indexed `x * n + y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionField {
    /// Initial boardings, pas/(km^2 hr).
    pub boarding: Vec<f64>,
    /// Final alightings, pas/(km^2 hr).
    pub alighting: Vec<f64>,
    /// On-board flux, pas/(km hr).
    pub flux: Vec<f64>,
    /// Boardings after a transfer, pas/(km^2 hr).
    pub transfer: Vec<f64>,
}

impl DirectionField {
    fn zeros(cells: usize) -> Self {
        DirectionField {
            boarding: vec![0.0; cells],
            alighting: vec![0.0; cells],
            flux: vec![0.0; cells],
            transfer: vec![0.0; cells],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandAggregates {
    pub grid: Grid,
    /// Total demand D of the source OD matrix, including same-cell trips.
    pub total_demand: f64,
    /// Indexed by [`Direction::index`].
    pub fields: [DirectionField; 4],
}

impl DemandAggregates {
    /// All-zero aggregates, for building small cases by hand.
    pub fn zeros(grid: Grid, total_demand: f64) -> Self {
        let cells = grid.n_cells() * grid.n_cells();
        DemandAggregates {
            grid,
            total_demand,
            fields: [
                DirectionField::zeros(cells),
                DirectionField::zeros(cells),
                DirectionField::zeros(cells),
                DirectionField::zeros(cells),
            ],
        }
    }

    pub fn field_mut(&mut self, d: Direction) -> &mut DirectionField {
        &mut self.fields[d.index()]
    }

    pub fn field(&self, d: Direction) -> &DirectionField {
        &self.fields[d.index()]
    }

    pub fn cell(&self, x: usize, y: usize) -> usize {
        x * self.grid.n_cells() + y
    }

    fn sum_over(&self, pick: impl Fn(&DirectionField) -> &Vec<f64>) -> f64 {
        let a = self.grid.cell_area();
        self.fields.iter().map(|f| pick(f).iter().sum::<f64>()).sum::<f64>() * a
    }

    /// Total initial boardings (pas/hr).
    pub fn total_boardings(&self) -> f64 {
        self.sum_over(|f| &f.boarding)
    }

    pub fn total_alightings(&self) -> f64 {
        self.sum_over(|f| &f.alighting)
    }

    pub fn total_transfers(&self) -> f64 {
        self.sum_over(|f| &f.transfer)
    }

    /// Passenger-km per hour carried by the network.
    pub fn passenger_km(&self) -> f64 {
        self.sum_over(|f| &f.flux)
    }

    /// `(E + W)` or `(N + S)` sum of one quantity at a cell.
    pub fn axis_sum(&self, east_west: bool, cell: usize, pick: impl Fn(&DirectionField) -> &Vec<f64>) -> f64 {
        let (a, b) = if east_west {
            (Direction::East, Direction::West)
        } else {
            (Direction::North, Direction::South)
        };
        pick(self.field(a))[cell] + pick(self.field(b))[cell]
    }

    /// Boardings plus alightings over all four directions at a cell.
    pub fn access_load(&self, cell: usize) -> f64 {
        self.fields.iter().map(|f| f.boarding[cell] + f.alighting[cell]).sum()
    }

    /// Initial plus transfer boardings onto the given axis at a cell.
    pub fn wait_load(&self, east_west: bool, cell: usize) -> f64 {
        self.axis_sum(east_west, cell, |f| &f.boarding) + self.axis_sum(east_west, cell, |f| &f.transfer)
    }
}

struct Router<'a> {
    n: usize,
    fields: &'a mut [DirectionField; 4],
}

impl Router<'_> {
    fn cell(&self, x: usize, y: usize) -> usize {
        x * self.n + y
    }

    /// Adds `flux` to the half-open span `[from, to)` of a row or column.
    fn ride(&mut self, dir: Direction, fixed: usize, from: usize, to: usize, flux: f64) {
        let horizontal = dir.is_east_west();
        let step = |k: usize| if to > from { from + k } else { from - k };
        for k in 0..from.abs_diff(to) {
            let c = if horizontal {
                self.cell(step(k), fixed)
            } else {
                self.cell(fixed, step(k))
            };
            self.fields[dir.index()].flux[c] += flux;
        }
    }
}

pub fn aggregate_demand(grid: &Grid, od: &OdMatrix) -> DemandAggregates {
    let n = grid.n_cells();
    let dx = grid.cell_size();
    let area = grid.cell_area();
    let mut agg = DemandAggregates::zeros(*grid, od.total_demand());
    let mut router = Router { n, fields: &mut agg.fields };

    for xo in 0..n {
        for yo in 0..n {
            for xd in 0..n {
                for yd in 0..n {
                    let lambda = od.get(xo, yo, xd, yd);
                    if lambda == 0.0 || (xo == xd && yo == yd) {
                        continue;
                    }
                    // trips per hour for this cell pair
                    let trips = lambda * area * area;
                    let origin = router.cell(xo, yo);
                    let destination = router.cell(xd, yd);
                    if yo == yd || xo == xd {
                        let dir = if yo == yd {
                            Direction::horizontal(xo, xd)
                        } else {
                            Direction::vertical(yo, yd)
                        };
                        let f = &mut router.fields[dir.index()];
                        f.boarding[origin] += trips / area;
                        f.alighting[destination] += trips / area;
                        if yo == yd {
                            router.ride(dir, yo, xo, xd, trips / dx);
                        } else {
                            router.ride(dir, xo, yo, yd, trips / dx);
                        }
                        continue;
                    }

                    let half = 0.5 * trips;
                    let h = Direction::horizontal(xo, xd);
                    let v = Direction::vertical(yo, yd);

                    // horizontal first, transfer at (xd, yo)
                    let corner = router.cell(xd, yo);
                    router.fields[h.index()].boarding[origin] += half / area;
                    router.ride(h, yo, xo, xd, half / dx);
                    router.fields[v.index()].transfer[corner] += half / area;
                    router.ride(v, xd, yo, yd, half / dx);
                    router.fields[v.index()].alighting[destination] += half / area;

                    // vertical first, transfer at (xo, yd)
                    let corner = router.cell(xo, yd);
                    router.fields[v.index()].boarding[origin] += half / area;
                    router.ride(v, xo, yo, yd, half / dx);
                    router.fields[h.index()].transfer[corner] += half / area;
                    router.ride(h, yd, xo, xd, half / dx);
                    router.fields[h.index()].alighting[destination] += half / area;
                }
            }
        }
    }
    agg
}

/// Capacity-relevant flux maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxMaxima {
    /// Max over E/W and all x of the flux in each row, indexed by y.
    pub rows_east_west: Vec<f64>,
    /// Max over N/S and all y of the flux in each column, indexed by x.
    pub columns_north_south: Vec<f64>,
    pub global_east_west: f64,
    pub global_north_south: f64,
}

pub fn reduce_flux(agg: &DemandAggregates) -> FluxMaxima {
    let n = agg.grid.n_cells();
    let mut rows = vec![0.0f64; n];
    let mut cols = vec![0.0f64; n];
    for x in 0..n {
        for y in 0..n {
            let c = agg.cell(x, y);
            for d in Direction::ALL {
                let f = agg.field(d).flux[c];
                if d.is_east_west() {
                    rows[y] = rows[y].max(f);
                } else {
                    cols[x] = cols[x].max(f);
                }
            }
        }
    }
    FluxMaxima {
        global_east_west: rows.iter().copied().fold(0.0, f64::max),
        global_north_south: cols.iter().copied().fold(0.0, f64::max),
        rows_east_west: rows,
        columns_north_south: cols,
    }
}
