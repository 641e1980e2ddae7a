//! Log-barrier interior-point solver for geometric programs.
//!
//! The convex problem is solved in sum-exp form, `min F(s) = sum exp(a.s+b)`,
//! subject to `ln f_u(s) <= 0`. Each centering step minimizes
//! `t F(s) - sum_u ln(-ln f_u(s))` with damped Newton; `t` grows
//! geometrically until the duality-gap bound `U / t` falls below the
//! requested fraction of the objective.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::convex::{to_convex_form, AffineMap, ConvexGp, ExpSum};
use crate::error::GpError;
use crate::kkt::{check_kkt, stationarity_residual, KktReport};
use crate::problem::GpProblem;

/// Coordinates beyond this magnitude in log-space (r ~ 1e65) mean the iterate is running
/// off to 0 or infinity.
const DIVERGENCE_LIMIT: f64 = 150.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub t_initial: f64,
    pub t_growth: f64,
    /// Stop when `U / t < gap_tol * F`.
    pub gap_tol: f64,
    /// Inner stop when half the squared Newton decrement drops below this.
    pub newton_tol: f64,
    pub max_newton: usize,
    pub max_outer: usize,
    pub armijo: f64,
    pub backtrack: f64,
    /// Repaired starting points satisfy `f_u <= feasibility_margin`.
    pub feasibility_margin: f64,
    pub stationarity_tol: f64,
    pub feasibility_tol: f64,
    /// Optional starting point in the original variables. When given, the
    /// unconstrained pre-solve is skipped and the barrier starts here.
    pub start: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            t_initial: 1.0,
            t_growth: 20.0,
            gap_tol: 1e-9,
            newton_tol: 1e-10,
            max_newton: 200,
            max_outer: 60,
            armijo: 0.01,
            backtrack: 0.5,
            feasibility_margin: 0.99,
            stationarity_tol: 1e-6,
            feasibility_tol: 1e-8,
            start: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIterations,
    /// The objective decreases without bound along some direction.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: f64,
    pub outer_iterations: usize,
    pub newton_iterations: usize,
    pub kkt: KktReport,
    /// `U / t` at termination (0 when no constraint is active).
    pub gap_bound: f64,
    pub relative_gap: f64,
    pub barrier_used: bool,
    pub wall_time_ms: f64,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("SolveReport serializes")
    }
}

#[derive(Debug, Clone)]
pub struct GpSolution {
    pub r: Vec<f64>,
    /// Multipliers of `ln f_u <= 0`.
    pub duals: Vec<f64>,
    pub report: SolveReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Centering {
    Converged,
    Stalled,
    IterationCap,
    Diverged,
}

/// Barrier objective `t F(z) - sum ln(-g_u(z))` (or plain `F` when `t` is `None`).
struct Barrier<'a> {
    gp: &'a ConvexGp,
    t: Option<f64>,
}

impl Barrier<'_> {
    /// `value(z + dz) - value(z)` without cancellation; infinite when the
    /// step leaves the domain.
    fn change(&self, z: &[f64], dz: &[f64]) -> f64 {
        let f0 = match self.gp.objective.value(z) {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        let df = f0 * self.gp.objective.log_ratio(z, dz).exp_m1();
        match self.t {
            None => df,
            Some(t) => {
                let mut total = t * df;
                for g in &self.gp.inequalities {
                    let g0 = g.log_value(z);
                    // (-g1) / (-g0) = 1 + lr / g0
                    let rel = g.log_ratio(z, dz) / g0;
                    if !(rel > -1.0) {
                        return f64::INFINITY;
                    }
                    total -= rel.ln_1p();
                }
                total
            }
        }
    }

    fn derivatives(&self, z: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>), GpError> {
        let obj = self.gp.objective.sum_exp(z)?;
        match self.t {
            None => Ok((obj.gradient, obj.hessian)),
            Some(t) => {
                let mut grad = obj.gradient * t;
                let mut hess = obj.hessian * t;
                for g in &self.gp.inequalities {
                    let so = g.log_sum_exp(z);
                    let slack = -so.value;
                    grad += &so.gradient / slack;
                    hess += &so.hessian / slack;
                    hess += &so.gradient * so.gradient.transpose() / (slack * slack);
                }
                Ok((grad, hess))
            }
        }
    }
}

/// Solves `hess * dx = -grad` by Cholesky, adding a ridge when needed.
fn newton_direction(grad: &DVector<f64>, mut hess: DMatrix<f64>) -> Option<DVector<f64>> {
    let n = grad.len();
    let mut ridge = 1e-12 * (1.0 + hess.trace().abs() / n.max(1) as f64);
    for _ in 0..30 {
        if let Some(ch) = Cholesky::new(hess.clone()) {
            return Some(ch.solve(&(-grad)));
        }
        for i in 0..n {
            hess[(i, i)] += ridge;
        }
        ridge *= 10.0;
    }
    None
}

fn center(
    barrier: &Barrier<'_>,
    z: &mut Vec<f64>,
    opts: &SolverOptions,
    newton_count: &mut usize,
    require_stationary: bool,
) -> Result<Centering, GpError> {
    for _ in 0..opts.max_newton {
        if z.iter().any(|x| x.abs() > DIVERGENCE_LIMIT) {
            return Ok(Centering::Diverged);
        }
        let (grad, hess) = barrier.derivatives(z)?;
        let Some(dx) = newton_direction(&grad, hess) else {
            return Ok(Centering::Stalled);
        };
        *newton_count += 1;
        let slope = grad.dot(&dx);
        let decrement = -slope;
        if 0.5 * decrement <= opts.newton_tol {
            let stationary = !require_stationary
                || stationarity_residual(barrier.gp, z, &[])? <= 1e-3 * opts.stationarity_tol;
            if stationary {
                return Ok(Centering::Converged);
            }
        }
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-14 {
            let dz: Vec<f64> = dx.iter().map(|d| step * d).collect();
            let change = barrier.change(z, &dz);
            if change.is_finite() && change <= opts.armijo * step * slope {
                z.iter_mut().zip(&dz).for_each(|(a, d)| *a += d);
                accepted = true;
                break;
            }
            step *= opts.backtrack;
        }
        if !accepted {
            return Ok(Centering::Stalled);
        }
    }
    Ok(Centering::IterationCap)
}

fn project_start(r0: &[f64], map: &AffineMap, n: usize) -> Result<Vec<f64>, GpError> {
    if r0.len() != n {
        return Err(GpError::DimensionMismatch {
            expected: n,
            found: r0.len(),
        });
    }
    if let Some((i, x)) = r0.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        return Err(GpError::NonPositiveVariable { index: i, value: *x });
    }
    let s = DVector::from_iterator(n, r0.iter().map(|x| x.ln()));
    // Least-squares coordinates of s in the equality-feasible affine set.
    let z = (map.basis.transpose() * (s - &map.origin)).iter().copied().collect();
    Ok(z)
}

/// Moves `z` until every constraint satisfies `ln f_u <= ln margin`.
///
/// A violated constraint is pushed back along the variables that carry a
/// positive exponent in it (or along its full gradient if none do).
fn repair_start(gp: &ConvexGp, z: &mut [f64], margin: f64) -> bool {
    let target = margin.ln();
    for _ in 0..200 {
        let mut clean = true;
        for g in &gp.inequalities {
            let gv = g.log_value(z);
            if gv <= target {
                continue;
            }
            clean = false;
            let grad = g.log_sum_exp(z).gradient;
            let positive: Vec<(usize, f64)> = grad
                .iter()
                .enumerate()
                .filter(|(_, a)| **a > 0.0)
                .map(|(i, a)| (i, *a))
                .collect();
            let dir: Vec<(usize, f64)> = if positive.is_empty() {
                grad.iter().copied().enumerate().collect()
            } else {
                positive
            };
            let norm2: f64 = dir.iter().map(|(_, a)| a * a).sum();
            if norm2 == 0.0 {
                return false;
            }
            // Overshoot by a factor 0.9 in r-space.
            let step = (gv - target + (1.0f64 / 0.9).ln()) / norm2;
            for (i, a) in dir {
                z[i] -= step * a;
            }
        }
        if clean {
            return true;
        }
    }
    gp.inequalities.iter().all(|g| g.log_value(z) <= target)
}

pub fn solve_gp(p: &GpProblem, opts: &SolverOptions) -> Result<GpSolution, GpError> {
    let started = Instant::now();
    p.validate()?;
    let full = to_convex_form(p);
    let (gp, map) = full.eliminate_equalities()?;
    let n_constraints = gp.inequalities.len();

    let mut z = match &opts.start {
        Some(r0) => project_start(r0, &map, p.n_vars())?,
        None => vec![0.0; gp.n_vars],
    };
    let mut newton = 0usize;
    let mut outer = 0usize;
    let mut gap_bound = 0.0;
    let mut barrier_used = false;
    let mut hit_cap = false;
    let mut duals = vec![0.0; n_constraints];

    // Unconstrained minimizer; if it is feasible it is the answer.
    let phase0 = if opts.start.is_some() && n_constraints > 0 {
        Centering::Stalled
    } else {
        center(&Barrier { gp: &gp, t: None }, &mut z, opts, &mut newton, true)?
    };
    let feasible_now = opts.start.is_none()
        && gp.inequalities.iter().all(|g| g.log_value(&z) < 0.0);
    let mut status = match phase0 {
        Centering::Diverged if n_constraints == 0 => Some(SolveStatus::Unbounded),
        Centering::IterationCap if n_constraints == 0 => Some(SolveStatus::MaxIterations),
        _ => None,
    };

    let needs_barrier = status.is_none()
        && n_constraints > 0
        && !(matches!(phase0, Centering::Converged | Centering::Stalled) && feasible_now);
    if needs_barrier {
        barrier_used = true;
        if phase0 == Centering::Diverged {
            z = vec![0.0; gp.n_vars];
        }
        if !repair_start(&gp, &mut z, opts.feasibility_margin) {
            status = Some(SolveStatus::Infeasible);
        } else {
            let mut t = opts.t_initial;
            loop {
                outer += 1;
                let b = Barrier { gp: &gp, t: Some(t) };
                match center(&b, &mut z, opts, &mut newton, false)? {
                    Centering::Diverged => {
                        status = Some(SolveStatus::Unbounded);
                        break;
                    }
                    Centering::IterationCap => hit_cap = true,
                    _ => {}
                }
                gap_bound = n_constraints as f64 / t;
                let f = gp.objective.value(&z)?;
                if gap_bound < opts.gap_tol * f {
                    break;
                }
                if outer >= opts.max_outer {
                    hit_cap = true;
                    break;
                }
                t *= opts.t_growth;
            }
            duals = gp
                .inequalities
                .iter()
                .map(|g: &ExpSum| 1.0 / (t * (-g.log_value(&z))))
                .collect();
        }
    }

    let s = map.apply(&z);
    let r: Vec<f64> = s.iter().map(|x| x.exp()).collect();
    let objective = p.objective.eval(&r)?;
    let kkt = check_kkt(p, &r, &duals)?;
    let relative_gap = if objective > 0.0 { gap_bound / objective } else { gap_bound };

    let status = status.unwrap_or_else(|| {
        let certified = kkt.stationarity < opts.stationarity_tol
            && kkt.primal_feasibility <= 1.0 + opts.feasibility_tol
            && relative_gap < opts.gap_tol;
        if certified {
            SolveStatus::Optimal
        } else if hit_cap || matches!(phase0, Centering::IterationCap) {
            SolveStatus::MaxIterations
        } else if kkt.primal_feasibility > 1.0 + opts.feasibility_tol {
            SolveStatus::Infeasible
        } else {
            SolveStatus::MaxIterations
        }
    });

    Ok(GpSolution {
        r,
        duals,
        report: SolveReport {
            status,
            objective,
            outer_iterations: outer,
            newton_iterations: newton,
            kkt,
            gap_bound,
            relative_gap,
            barrier_used,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    })
}
