//! Coordinate-descent baseline: closed-form headway and line-density
//! updates from the first-order conditions, followed by a capacity clamp on
//! the headways. Starts are drawn at random and the best is kept.
//!
//! Within one iteration the headways are computed from the previous
//! densities, the densities from the new unclamped headways and the previous
//! cross-axis design, and the clamp is applied last.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{evaluate_cost, Axis, CostBreakdown, DesignVariables, ModelParams, NetworkKind};
use crate::demand::{reduce_flux, DemandAggregates};
use crate::error::{Result, TransitError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CdOptions {
    pub max_iterations: usize,
    /// Stop when `|Z_m - Z_{m-1}| / Z_m` falls below this.
    pub tol: f64,
    pub n_starts: usize,
    pub seed: u64,
    /// Log-uniform initialization range for line densities, 1/km.
    pub delta_init: [f64; 2],
    /// Log-uniform initialization range for headways, hr.
    pub headway_init: [f64; 2],
    /// Headway used for line groups that carry no boardings.
    pub h_max: f64,
    /// Line density used for line groups with no access demand.
    pub delta_min: f64,
}

impl Default for CdOptions {
    fn default() -> Self {
        CdOptions {
            max_iterations: 500,
            tol: 1e-9,
            n_starts: 10,
            seed: 0,
            delta_init: [0.05, 2.0],
            headway_init: [0.02, 0.5],
            h_max: 1.0,
            delta_min: 0.01,
        }
    }
}

impl CdOptions {
    pub fn validate(&self) -> Result<()> {
        let range_ok = |r: [f64; 2]| r[0] > 0.0 && r[1] >= r[0] && r[1].is_finite();
        if !(self.tol > 0.0) || self.n_starts == 0 || self.max_iterations == 0 {
            return Err(TransitError::InvalidConfig(
                "CD needs tol > 0, n_starts >= 1 and max_iterations >= 1".into(),
            ));
        }
        if !range_ok(self.delta_init) || !range_ok(self.headway_init) || !(self.h_max > 0.0 && self.delta_min > 0.0) {
            return Err(TransitError::InvalidConfig("CD initialization ranges must be positive".into()));
        }
        Ok(())
    }
}

/// Per-group sums that do not depend on the design.
#[derive(Debug, Clone)]
struct AxisData {
    /// `sum access_load * cell_area` over the group's cells.
    access: Vec<f64>,
    /// `sum wait_load * cell_area` for boardings onto this axis.
    wait: Vec<f64>,
    /// `sum (cross-axis flux) * cell_area`: riders on perpendicular lines
    /// dwell at this axis' stops.
    cross_flux: Vec<f64>,
    /// Capacity-governing flux per group.
    flux_max: Vec<f64>,
}

/// Demand-side inputs of the closed-form updates, precomputed once.
#[derive(Debug, Clone)]
pub struct CdContext<'a> {
    pub agg: &'a DemandAggregates,
    pub params: ModelParams,
    pub kind: NetworkKind,
    ew: AxisData,
    ns: AxisData,
}

impl<'a> CdContext<'a> {
    pub fn new(agg: &'a DemandAggregates, params: &ModelParams, kind: NetworkKind) -> Result<Self> {
        params.validate()?;
        let n = agg.grid.n_cells();
        let g = kind.groups(n);
        let w = agg.grid.cell_area();
        let group = |line: usize| if g == 1 { 0 } else { line };
        let empty = || AxisData {
            access: vec![0.0; g],
            wait: vec![0.0; g],
            cross_flux: vec![0.0; g],
            flux_max: vec![0.0; g],
        };
        let (mut ew, mut ns) = (empty(), empty());
        for x in 0..n {
            for y in 0..n {
                let c = agg.cell(x, y);
                let (ge, gn) = (group(y), group(x));
                let access = agg.access_load(c) * w;
                ew.access[ge] += access;
                ns.access[gn] += access;
                ew.wait[ge] += agg.wait_load(true, c) * w;
                ns.wait[gn] += agg.wait_load(false, c) * w;
                ew.cross_flux[ge] += agg.axis_sum(false, c, |f| &f.flux) * w;
                ns.cross_flux[gn] += agg.axis_sum(true, c, |f| &f.flux) * w;
            }
        }
        let maxima = reduce_flux(agg);
        match kind {
            NetworkKind::Heterogeneous => {
                ew.flux_max = maxima.rows_east_west;
                ns.flux_max = maxima.columns_north_south;
            }
            NetworkKind::Homogeneous => {
                ew.flux_max = vec![maxima.global_east_west];
                ns.flux_max = vec![maxima.global_north_south];
            }
        }
        Ok(CdContext {
            agg,
            params: *params,
            kind,
            ew,
            ns,
        })
    }

    fn groups(&self) -> usize {
        self.ew.access.len()
    }

    fn data(&self, axis: Axis) -> &AxisData {
        match axis {
            Axis::EastWest => &self.ew,
            Axis::NorthSouth => &self.ns,
        }
    }

    /// For each group of `axis`, area-weighted sums over its cells of the
    /// perpendicular line density and of that density divided by
    /// `cross_headway`.
    fn cross_sums(&self, axis: Axis, design: &DesignVariables, cross_headway: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.agg.grid.n_cells();
        let w = self.agg.grid.cell_area();
        let g = self.groups();
        let (mut delta, mut freq) = (vec![0.0; g], vec![0.0; g]);
        let d_other = design.delta(other(axis));
        for own in 0..n {
            for cross in 0..n {
                let (go, gc) = (design.group(own), design.group(cross));
                delta[go] += d_other[gc] * w;
                freq[go] += d_other[gc] / cross_headway[gc] * w;
            }
        }
        (delta, freq)
    }

    /// Coefficient `c_g` of `delta / h` in `Z` for each group.
    fn vehicle_coefficient(&self, axis: Axis, design: &DesignVariables) -> Vec<f64> {
        let p = &self.params;
        let (cross_delta, _) = self.cross_sums(axis, design, design.headway(other(axis)));
        let area = self.group_area();
        cross_delta
            .iter()
            .map(|cd| 2.0 / p.mu * ((p.pi_k + p.pi_h / p.v) * area + p.pi_h * p.tau * cd))
            .collect()
    }

    fn group_area(&self) -> f64 {
        let grid = &self.agg.grid;
        grid.area() / self.groups() as f64
    }
}

fn other(axis: Axis) -> Axis {
    match axis {
        Axis::EastWest => Axis::NorthSouth,
        Axis::NorthSouth => Axis::EastWest,
    }
}

/// Unclamped optimal headways for the current densities, `(EW, NS)`.
pub fn cd_step_headways(ctx: &CdContext, design: &DesignVariables, opts: &CdOptions) -> (Vec<f64>, Vec<f64>) {
    let step = |axis: Axis| -> Vec<f64> {
        let c = ctx.vehicle_coefficient(axis, design);
        let data = ctx.data(axis);
        c.iter()
            .zip(design.delta(axis))
            .zip(&data.wait)
            .map(|((c, d), wait)| {
                let w = 0.5 * wait;
                if w > 0.0 {
                    (c * d / w).sqrt()
                } else {
                    opts.h_max
                }
            })
            .collect()
    };
    (step(Axis::EastWest), step(Axis::NorthSouth))
}

/// Optimal line densities given candidate headways `h_tilde` (both axes)
/// and the previous densities, `(EW, NS)`.
pub fn cd_step_densities(
    ctx: &CdContext,
    design: &DesignVariables,
    h_tilde: &(Vec<f64>, Vec<f64>),
    opts: &CdOptions,
) -> (Vec<f64>, Vec<f64>) {
    let p = &ctx.params;
    let area = ctx.group_area();
    let step = |axis: Axis, h: &[f64], h_cross: &[f64]| -> Vec<f64> {
        let data = ctx.data(axis);
        let c = ctx.vehicle_coefficient(axis, design);
        let (cross_delta, cross_freq) = ctx.cross_sums(axis, design, h_cross);
        (0..ctx.groups())
            .map(|g| {
                let b = p.beta_w / (4.0 * p.v_w) * data.access[g];
                if !(b > 0.0) {
                    return opts.delta_min;
                }
                let a = 2.0 * p.pi_l / p.mu * area
                    + 4.0 * p.pi_s / p.mu * cross_delta[g]
                    + 2.0 * p.pi_h * p.tau / p.mu * cross_freq[g]
                    + p.tau * data.cross_flux[g]
                    + c[g] / h[g];
                (b / a).sqrt()
            })
            .collect()
    };
    (
        step(Axis::EastWest, &h_tilde.0, &h_tilde.1),
        step(Axis::NorthSouth, &h_tilde.1, &h_tilde.0),
    )
}

/// Caps each headway at `C delta / flux`; returns the feasible headways and
/// the number of groups that were capped.
pub fn cd_enforce_capacity(
    ctx: &CdContext,
    delta: &(Vec<f64>, Vec<f64>),
    h_tilde: &(Vec<f64>, Vec<f64>),
) -> ((Vec<f64>, Vec<f64>), usize) {
    let mut clamps = 0;
    let mut clamp = |axis: Axis, d: &[f64], h: &[f64]| -> Vec<f64> {
        let fl = &ctx.data(axis).flux_max;
        (0..h.len())
            .map(|g| {
                if fl[g] > 0.0 {
                    let cap = ctx.params.capacity * d[g] / fl[g];
                    if h[g] > cap {
                        clamps += 1;
                        return cap;
                    }
                }
                h[g]
            })
            .collect()
    };
    let ew = clamp(Axis::EastWest, &delta.0, &h_tilde.0);
    let ns = clamp(Axis::NorthSouth, &delta.1, &h_tilde.1);
    ((ew, ns), clamps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdTrace {
    pub start: usize,
    pub seed: u64,
    /// `Z` after each iteration.
    pub z: Vec<f64>,
    /// Capped groups per iteration.
    pub clamp_events: Vec<usize>,
    pub converged: bool,
    /// Index into `z` of the returned design.
    pub returned_iteration: usize,
    pub initial_design: DesignVariables,
    pub final_design: DesignVariables,
}

impl CdTrace {
    pub fn iterations(&self) -> usize {
        self.z.len()
    }

    pub fn total_clamps(&self) -> usize {
        self.clamp_events.iter().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("CdTrace serializes")
    }
}

#[derive(Debug, Clone)]
pub struct CdRun {
    pub design: DesignVariables,
    pub breakdown: CostBreakdown,
    pub trace: CdTrace,
}

/// Random initial design for one start.
pub fn initial_design(ctx: &CdContext, opts: &CdOptions, seed: u64) -> DesignVariables {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ctx.groups();
    let mut draw = |r: [f64; 2]| -> Vec<f64> {
        (0..g)
            .map(|_| {
                if r[0] == r[1] {
                    r[0]
                } else {
                    rng.gen_range(r[0].ln()..r[1].ln()).exp()
                }
            })
            .collect()
    };
    DesignVariables {
        kind: ctx.kind,
        delta_ew: draw(opts.delta_init),
        delta_ns: draw(opts.delta_init),
        headway_ew: draw(opts.headway_init),
        headway_ns: draw(opts.headway_init),
    }
}

/// One CD run from `start` (a design), iterating until the relative change
/// in `Z` drops below `opts.tol`.
pub fn run_cd_from(ctx: &CdContext, start: DesignVariables, opts: &CdOptions) -> Result<CdRun> {
    opts.validate()?;
    start.validate(&ctx.agg.grid)?;
    if start.kind != ctx.kind {
        return Err(TransitError::DesignMismatch("start design has the wrong network kind".into()));
    }
    let mut design = start.clone();
    let mut z_prev = evaluate_cost(&design, ctx.agg, &ctx.params)?.z;
    let mut zs = Vec::new();
    let mut clamps = Vec::new();
    let mut converged = false;
    let mut best: Option<(f64, usize, DesignVariables)> = None;

    for m in 0..opts.max_iterations {
        let h_tilde = cd_step_headways(ctx, &design, opts);
        let delta = cd_step_densities(ctx, &design, &h_tilde, opts);
        let (h, k) = cd_enforce_capacity(ctx, &delta, &h_tilde);
        design = DesignVariables {
            kind: ctx.kind,
            delta_ew: delta.0,
            delta_ns: delta.1,
            headway_ew: h.0,
            headway_ns: h.1,
        };
        let z = evaluate_cost(&design, ctx.agg, &ctx.params)?.z;
        zs.push(z);
        clamps.push(k);
        if best.as_ref().map_or(true, |b| z < b.0) {
            best = Some((z, m, design.clone()));
        }
        if (z - z_prev).abs() < opts.tol * z {
            converged = true;
            break;
        }
        z_prev = z;
    }

    let (returned_iteration, design) = if converged {
        (zs.len() - 1, design)
    } else {
        let (_, m, d) = best.expect("at least one iteration");
        (m, d)
    };
    let breakdown = evaluate_cost(&design, ctx.agg, &ctx.params)?;
    Ok(CdRun {
        trace: CdTrace {
            start: 0,
            seed: 0,
            z: zs,
            clamp_events: clamps,
            converged,
            returned_iteration,
            initial_design: start,
            final_design: design.clone(),
        },
        design,
        breakdown,
    })
}

/// Single start number `start`, seeded with `opts.seed + start`.
pub fn run_cd(ctx: &CdContext, opts: &CdOptions, start: usize) -> Result<CdRun> {
    let seed = opts.seed.wrapping_add(start as u64);
    let mut run = run_cd_from(ctx, initial_design(ctx, opts, seed), opts)?;
    run.trace.start = start;
    run.trace.seed = seed;
    Ok(run)
}

#[derive(Debug, Clone)]
pub struct CdMultistart {
    pub best: CdRun,
    /// Final `Z` of every start, in start order.
    pub final_z: Vec<f64>,
    pub iterations: Vec<usize>,
}

impl CdMultistart {
    /// `max - min` of the final objective values.
    pub fn spread(&self) -> f64 {
        let max = self.final_z.iter().copied().fold(f64::MIN, f64::max);
        let min = self.final_z.iter().copied().fold(f64::MAX, f64::min);
        max - min
    }
}

/// Runs `opts.n_starts` independent starts (in parallel) and keeps the
/// lowest final `Z`; ties go to the earliest start.
pub fn run_cd_multistart(ctx: &CdContext, opts: &CdOptions) -> Result<CdMultistart> {
    opts.validate()?;
    let runs: Vec<CdRun> = (0..opts.n_starts)
        .into_par_iter()
        .map(|s| run_cd(ctx, opts, s))
        .collect::<Result<_>>()?;
    let final_z: Vec<f64> = runs.iter().map(|r| r.breakdown.z).collect();
    let iterations = runs.iter().map(|r| r.trace.iterations()).collect();
    let best_idx = (0..runs.len())
        .min_by(|a, b| final_z[*a].total_cmp(&final_z[*b]).then(a.cmp(b)))
        .expect("n_starts >= 1");
    let best = runs.into_iter().nth(best_idx).expect("index in range");
    Ok(CdMultistart {
        best,
        final_z,
        iterations,
    })
}
