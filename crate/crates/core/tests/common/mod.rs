//! Helpers shared by the integration tests: an exhaustive-search oracle for
//! homogeneous networks and finite-difference elasticities.
#![allow(dead_code)]

use transit_ca::cost::{evaluate_cost, DesignVariables, ModelParams};
use transit_ca::demand::{reduce_flux, DemandAggregates, Direction};

/// Area sums of a demand field, enough to write the homogeneous cost in
/// closed form without going through the library's evaluator.
#[derive(Debug, Clone, Copy)]
pub struct HomogeneousSums {
    area: f64,
    access: f64,
    wait_ew: f64,
    wait_ns: f64,
    flux_ew: f64,
    flux_ns: f64,
    transfers: f64,
    flux_max_ew: f64,
    flux_max_ns: f64,
}

impl HomogeneousSums {
    pub fn new(agg: &DemandAggregates) -> Self {
        let w = agg.grid.cell_area();
        let (mut s, m) = (
            HomogeneousSums {
                area: agg.grid.area(),
                access: 0.0,
                wait_ew: 0.0,
                wait_ns: 0.0,
                flux_ew: 0.0,
                flux_ns: 0.0,
                transfers: 0.0,
                flux_max_ew: 0.0,
                flux_max_ns: 0.0,
            },
            reduce_flux(agg),
        );
        let cells = agg.grid.n_cells() * agg.grid.n_cells();
        for c in 0..cells {
            for d in Direction::ALL {
                let f = agg.field(d);
                s.access += (f.boarding[c] + f.alighting[c]) * w;
                s.transfers += f.transfer[c] * w;
                if d.is_east_west() {
                    s.wait_ew += (f.boarding[c] + f.transfer[c]) * w;
                    s.flux_ew += f.flux[c] * w;
                } else {
                    s.wait_ns += (f.boarding[c] + f.transfer[c]) * w;
                    s.flux_ns += f.flux[c] * w;
                }
            }
        }
        s.flux_max_ew = m.global_east_west;
        s.flux_max_ns = m.global_north_south;
        s
    }

    fn feasible(&self, p: &ModelParams, x: [f64; 4]) -> bool {
        let [de, dn, he, hn] = x;
        self.flux_max_ew * he <= p.capacity * de && self.flux_max_ns * hn <= p.capacity * dn
    }

    /// Total cost Z of a homogeneous design `[delta_ew, delta_ns, h_ew, h_ns]`.
    pub fn z(&self, p: &ModelParams, x: [f64; 4]) -> f64 {
        let [de, dn, he, hn] = x;
        let a = self.area;
        let agency = p.pi_l * 2.0 * (de + dn) * a
            + p.pi_s * 4.0 * de * dn * a
            + p.pi_k * 2.0 * (de / he + dn / hn) * a
            + p.pi_h * (2.0 * de / he * (1.0 / p.v + p.tau * dn) + 2.0 * dn / hn * (1.0 / p.v + p.tau * de)) * a;
        agency / p.mu
            + p.beta_w / (4.0 * p.v_w) * self.access * (1.0 / de + 1.0 / dn)
            + 0.5 * (self.wait_ew * he + self.wait_ns * hn)
            + (self.flux_ew + self.flux_ns) / p.v
            + p.tau * (self.flux_ew * dn + self.flux_ns * de)
            + p.sigma * self.transfers
    }

    /// Best feasible point of a 200-per-axis log grid (delta in [1e-2, 10],
    /// h in [1e-3, 1]), refined by compass search in log space.
    pub fn brute_force(&self, p: &ModelParams) -> (f64, [f64; 4]) {
        const K: usize = 200;
        let axis = |lo: f64, hi: f64| -> Vec<f64> {
            (0..K)
                .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (K - 1) as f64).exp())
                .collect()
        };
        let deltas = axis(1e-2, 1e1);
        let hs = axis(1e-3, 1.0);
        // given both densities the two headways separate
        let best_h = |coef: f64, wait: f64, cap: f64| -> f64 {
            let mut best = (f64::INFINITY, f64::NAN);
            for &h in &hs {
                if h > cap {
                    break;
                }
                let v = coef / h + 0.5 * wait * h;
                if v < best.0 {
                    best = (v, h);
                }
            }
            best.1
        };
        let mut best = (f64::INFINITY, [0.0; 4]);
        for &de in &deltas {
            for &dn in &deltas {
                let ce = 2.0 * de * self.area * (p.pi_k + p.pi_h / p.v + p.pi_h * p.tau * dn) / p.mu;
                let cn = 2.0 * dn * self.area * (p.pi_k + p.pi_h / p.v + p.pi_h * p.tau * de) / p.mu;
                let cap_e = if self.flux_max_ew > 0.0 { p.capacity * de / self.flux_max_ew } else { f64::INFINITY };
                let cap_n = if self.flux_max_ns > 0.0 { p.capacity * dn / self.flux_max_ns } else { f64::INFINITY };
                let he = best_h(ce, self.wait_ew, cap_e);
                let hn = best_h(cn, self.wait_ns, cap_n);
                if he.is_nan() || hn.is_nan() {
                    continue;
                }
                let x = [de, dn, he, hn];
                let z = self.z(p, x);
                if z < best.0 {
                    best = (z, x);
                }
            }
        }
        self.refine(p, best.1, 1000f64.ln() / (K - 1) as f64)
    }

    fn refine(&self, p: &ModelParams, start: [f64; 4], step0: f64) -> (f64, [f64; 4]) {
        let mut dirs: Vec<[f64; 4]> = Vec::new();
        for i in 0..4 {
            for si in [-1.0, 1.0] {
                let mut d = [0.0; 4];
                d[i] = si;
                dirs.push(d);
                for j in (i + 1)..4 {
                    for sj in [-1.0, 1.0] {
                        let mut d2 = d;
                        d2[j] = sj;
                        dirs.push(d2);
                    }
                }
            }
        }
        let mut s = start.map(f64::ln);
        let mut z = self.z(p, start);
        let mut step = step0;
        while step > 1e-10 {
            let mut moved = false;
            for d in &dirs {
                let trial = [s[0] + step * d[0], s[1] + step * d[1], s[2] + step * d[2], s[3] + step * d[3]];
                let x = trial.map(f64::exp);
                if !self.feasible(p, x) {
                    continue;
                }
                let zt = self.z(p, x);
                if zt < z {
                    s = trial;
                    z = zt;
                    moved = true;
                    break;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        (z, s.map(f64::exp))
    }
}

/// `x dZ/dx / Z` for every design variable, by central differences in log space.
pub fn elasticities(design: &DesignVariables, agg: &DemandAggregates, p: &ModelParams) -> Vec<f64> {
    let r = design.to_vector();
    let z0 = evaluate_cost(design, agg, p).unwrap().z;
    let eps: f64 = 1e-6;
    (0..r.len())
        .map(|i| {
            let at = |f: f64| {
                let mut x = r.clone();
                x[i] *= f;
                let d = DesignVariables::from_vector(design.kind, agg.grid.n_cells(), &x).unwrap();
                evaluate_cost(&d, agg, p).unwrap().z
            };
            (at(eps.exp()) - at((-eps).exp())) / (2.0 * eps) / z0
        })
        .collect()
}
