use geoprog::{GpProblem, Monomial, Posynomial};
use serde::{Deserialize, Serialize};

use super::{Axis, DesignVariables, ModelParams, NetworkKind};
use crate::demand::{reduce_flux, DemandAggregates, Direction};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityConstraint {
    pub axis: Axis,
    pub index: usize,
    pub flux: f64,
}

/// The design problem as a GP over `[delta_ew.., delta_ns.., h_ew.., h_ns..]`.
#[derive(Debug, Clone)]
pub struct TransitGp {
    pub kind: NetworkKind,
    pub n_cells: usize,
    pub problem: GpProblem,
    /// Design-independent cost (transfer penalties and cruise time), hr.
    pub dropped_constant: f64,
    /// Source of each inequality, in order.
    pub constraints: Vec<CapacityConstraint>,
}

impl TransitGp {
    pub fn design(&self, r: &[f64]) -> Result<DesignVariables> {
        DesignVariables::from_vector(self.kind, self.n_cells, r)
    }

    /// Total cost `Z` of a design as seen by the GP.
    pub fn total_cost(&self, design: &DesignVariables) -> Result<f64> {
        Ok(self.problem.objective.eval(&design.to_vector())? + self.dropped_constant)
    }
}

struct Terms {
    n_vars: usize,
    objective: Posynomial,
}

impl Terms {
    fn add(&mut self, coefficient: f64, exponents: &[(usize, f64)]) -> Result<()> {
        if coefficient > 0.0 {
            self.objective
                .push(Monomial::sparse(coefficient, self.n_vars, exponents)?)?;
        }
        Ok(())
    }
}

pub fn build_gp(kind: NetworkKind, agg: &DemandAggregates, params: &ModelParams) -> Result<TransitGp> {
    params.validate()?;
    let grid = agg.grid;
    let n = grid.n_cells();
    let g = kind.groups(n);
    let n_vars = 4 * g;
    let group = |line: usize| match kind {
        NetworkKind::Heterogeneous => line,
        NetworkKind::Homogeneous => 0,
    };
    let d_ew = |y: usize| group(y);
    let d_ns = |x: usize| g + group(x);
    let h_ew = |y: usize| 2 * g + group(y);
    let h_ns = |x: usize| 3 * g + group(x);

    let p = params;
    let w = grid.cell_area();
    let mut t = Terms {
        n_vars,
        objective: Posynomial::empty(n_vars),
    };
    let mut dropped = 0.0;

    for x in 0..n {
        for y in 0..n {
            let c = agg.cell(x, y);
            let (de, dn, he, hn) = (d_ew(y), d_ns(x), h_ew(y), h_ns(x));

            t.add(2.0 * p.pi_l / p.mu * w, &[(de, 1.0)])?;
            t.add(2.0 * p.pi_l / p.mu * w, &[(dn, 1.0)])?;
            t.add(4.0 * p.pi_s / p.mu * w, &[(de, 1.0), (dn, 1.0)])?;
            let per_vehicle = (p.pi_k + p.pi_h / p.v) / p.mu * 2.0 * w;
            t.add(per_vehicle, &[(de, 1.0), (he, -1.0)])?;
            t.add(per_vehicle, &[(dn, 1.0), (hn, -1.0)])?;
            let dwell = p.pi_h * p.tau / p.mu * 2.0 * w;
            t.add(dwell, &[(de, 1.0), (dn, 1.0), (he, -1.0)])?;
            t.add(dwell, &[(de, 1.0), (dn, 1.0), (hn, -1.0)])?;

            let walk = p.beta_w / (4.0 * p.v_w) * agg.access_load(c) * w;
            t.add(walk, &[(de, -1.0)])?;
            t.add(walk, &[(dn, -1.0)])?;
            t.add(0.5 * agg.wait_load(true, c) * w, &[(he, 1.0)])?;
            t.add(0.5 * agg.wait_load(false, c) * w, &[(hn, 1.0)])?;

            let fl_ew = agg.axis_sum(true, c, |f| &f.flux);
            let fl_ns = agg.axis_sum(false, c, |f| &f.flux);
            t.add(p.tau * fl_ew * w, &[(dn, 1.0)])?;
            t.add(p.tau * fl_ns * w, &[(de, 1.0)])?;

            let tr: f64 = Direction::ALL.iter().map(|d| agg.field(*d).transfer[c]).sum();
            dropped += ((fl_ew + fl_ns) / p.v + p.sigma * tr) * w;
        }
    }
    t.objective.simplify();

    let maxima = reduce_flux(agg);
    let (ew, ns) = match kind {
        NetworkKind::Heterogeneous => (maxima.rows_east_west, maxima.columns_north_south),
        NetworkKind::Homogeneous => (vec![maxima.global_east_west], vec![maxima.global_north_south]),
    };
    let mut inequalities = Vec::new();
    let mut constraints = Vec::new();
    for (axis, fluxes, delta0, h0) in [(Axis::EastWest, ew, 0, 2 * g), (Axis::NorthSouth, ns, g, 3 * g)] {
        for (i, flux) in fluxes.into_iter().enumerate() {
            if flux > 0.0 {
                let m = Monomial::sparse(flux / p.capacity, n_vars, &[(h0 + i, 1.0), (delta0 + i, -1.0)])?;
                inequalities.push(Posynomial::from(m));
                constraints.push(CapacityConstraint { axis, index: i, flux });
            }
        }
    }

    let problem = GpProblem::new(
        DesignVariables::variable_names(kind, n),
        t.objective,
        inequalities,
        Vec::new(),
    )?;
    Ok(TransitGp {
        kind,
        n_cells: n,
        problem,
        dropped_constant: dropped,
        constraints,
    })
}
