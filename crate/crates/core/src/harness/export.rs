use std::io::Write;

use super::scenario::ComparisonRow;
use crate::cost::CostBreakdown;
use crate::demand::{DemandAggregates, Direction, OdMatrix};
use crate::error::Result;

/// Per-passenger cost components, one line per method and scenario:
/// `Z_A / mu / D`, `T_a / D`, `T_w / D`, `T_r / D`, `T_t / D` and their sum.
pub fn export_breakdown<W: Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "pattern",
        "D",
        "vot",
        "network",
        "method",
        "agency_per_pax",
        "T_a_per_pax",
        "T_w_per_pax",
        "T_r_per_pax",
        "T_t_per_pax",
        "Z_per_pax",
    ])?;
    for r in rows {
        for (method, b) in [("gp", &r.breakdown_gp), ("cd", &r.breakdown_cd)] {
            let parts = per_passenger(b, r.mu, r.total_demand);
            let mut rec = vec![
                r.pattern.to_string(),
                r.total_demand.to_string(),
                r.mu.to_string(),
                r.network.label().to_string(),
                method.to_string(),
            ];
            rec.extend(parts.iter().map(|x| x.to_string()));
            rec.push(b.z_per_passenger.to_string());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn per_passenger(b: &CostBreakdown, mu: f64, d: f64) -> [f64; 5] {
    [b.z_agency / mu / d, b.access / d, b.waiting / d, b.riding / d, b.transfer / d]
}

/// Origin plus destination density per cell, pas/(km^2 hr).
pub fn export_demand_heatmap<W: Write>(od: &OdMatrix, out: W) -> Result<()> {
    let g = od.grid();
    let n = g.n_cells();
    let m = od.origin_destination_marginal();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x_idx", "y_idx", "x_km", "y_km", "density"])?;
    for x in 0..n {
        for y in 0..n {
            w.write_record([
                (x + 1).to_string(),
                (y + 1).to_string(),
                g.center(x).to_string(),
                g.center(y).to_string(),
                m[x * n + y].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Direction-indexed boarding, alighting, flux and transfer densities.
pub fn export_aggregates<W: Write>(agg: &DemandAggregates, out: W) -> Result<()> {
    let n = agg.grid.n_cells();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["direction", "x_idx", "y_idx", "lambda_bo", "lambda_al", "lambda_fl", "lambda_tr"])?;
    for d in Direction::ALL {
        let f = agg.field(d);
        for x in 0..n {
            for y in 0..n {
                let c = agg.cell(x, y);
                w.write_record([
                    d.label().to_string(),
                    (x + 1).to_string(),
                    (y + 1).to_string(),
                    f.boarding[c].to_string(),
                    f.alighting[c].to_string(),
                    f.flux[c].to_string(),
                    f.transfer[c].to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
