use serde::{Deserialize, Serialize};

use super::{Axis, DesignVariables, ModelParams, NetworkKind};
use crate::demand::{reduce_flux, DemandAggregates, Direction};
use crate::error::Result;

/// Cost components. Agency quantities are network totals per hour;
/// passenger times are hours spent per hour of operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Total cost in passenger-hour equivalents, `Z_A / mu + Z_P`.
    #[serde(rename = "Z")]
    pub z: f64,
    /// Agency cost, $/hr.
    #[serde(rename = "Z_A")]
    pub z_agency: f64,
    #[serde(rename = "Z_P")]
    pub z_passenger: f64,
    /// Line length, km.
    #[serde(rename = "N_l")]
    pub line_km: f64,
    #[serde(rename = "N_s")]
    pub stops: f64,
    /// Vehicle-km per hour.
    #[serde(rename = "N_k")]
    pub vehicle_km: f64,
    /// Vehicle-hours per hour (fleet size).
    #[serde(rename = "N_h")]
    pub vehicle_hours: f64,
    #[serde(rename = "T_a")]
    pub access: f64,
    #[serde(rename = "T_w")]
    pub waiting: f64,
    #[serde(rename = "T_r")]
    pub riding: f64,
    #[serde(rename = "T_t")]
    pub transfer: f64,
    #[serde(rename = "Z_per_passenger")]
    pub z_per_passenger: f64,
}

/// Direct evaluation by midpoint sums over cells.
pub fn evaluate_cost(design: &DesignVariables, agg: &DemandAggregates, params: &ModelParams) -> Result<CostBreakdown> {
    let grid = agg.grid;
    design.validate(&grid)?;
    params.validate()?;
    let n = grid.n_cells();
    let w = grid.cell_area();
    let p = params;

    let (mut line_km, mut stops, mut vehicle_km, mut vehicle_hours) = (0.0, 0.0, 0.0, 0.0);
    let (mut access, mut waiting, mut riding, mut transfer) = (0.0, 0.0, 0.0, 0.0);

    for x in 0..n {
        for y in 0..n {
            let c = agg.cell(x, y);
            let (ge, gn) = (design.group(y), design.group(x));
            let d_ew = design.delta_ew[ge];
            let d_ns = design.delta_ns[gn];
            let h_ew = design.headway_ew[ge];
            let h_ns = design.headway_ns[gn];
            let (q_ew, q_ns) = (d_ew / h_ew, d_ns / h_ns);

            // two directions per axis
            line_km += 2.0 * (d_ew + d_ns) * w;
            stops += 4.0 * d_ew * d_ns * w;
            vehicle_km += 2.0 * (q_ew + q_ns) * w;
            // a vehicle on an E/W line stops at every N/S line it crosses
            vehicle_hours += (2.0 * q_ew * (1.0 / p.v + p.tau * d_ns) + 2.0 * q_ns * (1.0 / p.v + p.tau * d_ew)) * w;

            access += p.beta_w / (4.0 * p.v_w) * agg.access_load(c) * (1.0 / d_ew + 1.0 / d_ns) * w;
            waiting += 0.5 * (agg.wait_load(true, c) * h_ew + agg.wait_load(false, c) * h_ns) * w;

            let fl_ew = agg.axis_sum(true, c, |f| &f.flux);
            let fl_ns = agg.axis_sum(false, c, |f| &f.flux);
            riding += ((fl_ew + fl_ns) / p.v + p.tau * (fl_ew * d_ns + fl_ns * d_ew)) * w;

            let tr: f64 = Direction::ALL.iter().map(|d| agg.field(*d).transfer[c]).sum();
            transfer += p.sigma * tr * w;
        }
    }

    let z_agency = p.pi_l * line_km + p.pi_s * stops + p.pi_k * vehicle_km + p.pi_h * vehicle_hours;
    let z_passenger = access + waiting + riding + transfer;
    let z = z_agency / p.mu + z_passenger;
    Ok(CostBreakdown {
        z,
        z_agency,
        z_passenger,
        line_km,
        stops,
        vehicle_km,
        vehicle_hours,
        access,
        waiting,
        riding,
        transfer,
        z_per_passenger: z / agg.total_demand,
    })
}

/// Load factor of one capacity constraint, `flux * h / (C * delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Utilization {
    pub axis: Axis,
    /// Row (E/W) or column (N/S); 0 for homogeneous networks.
    pub index: usize,
    /// Governing maximum flux, pas/(km hr).
    pub flux: f64,
    pub value: f64,
}

/// One entry per row and column (heterogeneous) or per axis (homogeneous).
pub fn capacity_utilization(design: &DesignVariables, agg: &DemandAggregates, params: &ModelParams) -> Result<Vec<Utilization>> {
    design.validate(&agg.grid)?;
    let maxima = reduce_flux(agg);
    let (ew, ns) = match design.kind {
        NetworkKind::Heterogeneous => (maxima.rows_east_west, maxima.columns_north_south),
        NetworkKind::Homogeneous => (vec![maxima.global_east_west], vec![maxima.global_north_south]),
    };
    let mut out = Vec::with_capacity(ew.len() + ns.len());
    for (axis, fluxes) in [(Axis::EastWest, ew), (Axis::NorthSouth, ns)] {
        for (i, flux) in fluxes.into_iter().enumerate() {
            let value = flux * design.headway(axis)[i] / (params.capacity * design.delta(axis)[i]);
            out.push(Utilization { axis, index: i, flux, value });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::{aggregate_demand, generate_uniform_demand};
    use crate::grid::Grid;

    fn empty(side: f64, cell: f64) -> DemandAggregates {
        DemandAggregates::zeros(Grid::new(side, cell).unwrap(), 1.0)
    }

    #[test]
    fn zero_demand_agency_only() {
        let agg = empty(10.0, 0.5);
        let p = ModelParams::default();
        let (d, h) = (0.7, 0.2);
        let design = DesignVariables::uniform(NetworkKind::Homogeneous, 20, d, h);
        let b = evaluate_cost(&design, &agg, &p).unwrap();
        let area = 100.0;
        assert!((b.line_km - 4.0 * d * area).abs() < 1e-10);
        assert!((b.stops - 4.0 * d * d * area).abs() < 1e-10);
        assert!((b.vehicle_km - 4.0 * d / h * area).abs() < 1e-10);
        let nh = 2.0 * area * (d / h) * (1.0 / p.v + p.tau * d) * 2.0;
        assert!((b.vehicle_hours - nh).abs() < 1e-10);
        assert_eq!(b.z_passenger, 0.0);
        assert!((b.z - b.z_agency / p.mu).abs() < 1e-12 * b.z);
    }

    #[test]
    fn identities_hold() {
        let g = Grid::new(10.0, 1.0).unwrap();
        let od = generate_uniform_demand(&g, 5000.0).unwrap();
        let agg = aggregate_demand(&g, &od);
        let p = ModelParams::with_mu(25.0);
        let design = DesignVariables::uniform(NetworkKind::Heterogeneous, 10, 0.4, 0.15);
        let b = evaluate_cost(&design, &agg, &p).unwrap();
        let za = p.pi_l * b.line_km + p.pi_s * b.stops + p.pi_k * b.vehicle_km + p.pi_h * b.vehicle_hours;
        assert!((za - b.z_agency).abs() <= 1e-12 * za);
        let zp = b.access + b.waiting + b.riding + b.transfer;
        assert!((zp - b.z_passenger).abs() <= 1e-12 * zp);
        assert!((b.z - (b.z_agency / p.mu + b.z_passenger)).abs() <= 1e-12 * b.z);
        assert!((b.z_per_passenger * 5000.0 - b.z).abs() <= 1e-12 * b.z);
    }

    #[test]
    fn total_from_components() {
        // Z_A = 100 $, Z_P = 10 hr, mu = 25 -> 14 hr
        assert!((100.0 / 25.0 + 10.0 - 14.0f64).abs() < 1e-15);
    }

    #[test]
    fn line_costs_do_not_enter_at_zero_price() {
        let g = Grid::new(10.0, 1.0).unwrap();
        let od = generate_uniform_demand(&g, 5000.0).unwrap();
        let agg = aggregate_demand(&g, &od);
        let p = ModelParams::default();
        assert_eq!((p.pi_l, p.pi_s), (0.0, 0.0));
        let design = DesignVariables::uniform(NetworkKind::Homogeneous, 10, 0.4, 0.15);
        let b = evaluate_cost(&design, &agg, &p).unwrap();
        let rest = (p.pi_k * b.vehicle_km + p.pi_h * b.vehicle_hours) / p.mu + b.z_passenger;
        assert_eq!(b.z, rest);
    }

    #[test]
    fn binding_utilization() {
        let mut agg = empty(10.0, 0.5);
        let c = agg.cell(4, 3);
        agg.field_mut(Direction::East).flux[c] = 400.0;
        let p = ModelParams::default();
        let design = DesignVariables::uniform(NetworkKind::Heterogeneous, 20, 0.5, 0.1);
        let u = capacity_utilization(&design, &agg, &p).unwrap();
        assert_eq!(u.len(), 40);
        let row = u.iter().find(|u| u.axis == Axis::EastWest && u.index == 3).unwrap();
        assert!((row.value - 1.0).abs() < 1e-15);
        assert!(u.iter().filter(|u| !(u.axis == Axis::EastWest && u.index == 3)).all(|u| u.value == 0.0));

        let mut doubled = design.clone();
        doubled.delta_ew[3] = 1.0;
        let u2 = capacity_utilization(&doubled, &agg, &p).unwrap();
        assert!((u2[3].value - 0.5).abs() < 1e-15);

        let hom = DesignVariables::uniform(NetworkKind::Homogeneous, 20, 0.5, 0.1);
        assert_eq!(capacity_utilization(&hom, &agg, &p).unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_design() {
        let agg = empty(2.0, 1.0);
        let mut d = DesignVariables::uniform(NetworkKind::Heterogeneous, 2, 0.5, 0.1);
        d.delta_ew[0] = -1.0;
        assert!(evaluate_cost(&d, &agg, &ModelParams::default()).is_err());
    }
}
