//! First-order optimality certificates for geometric programs.
//!
//! Residuals are measured on the log-space problem
//! `min F(s) s.t. ln f_u(s) <= 0, a_w . s + b_w = 0`, so the inequality duals
//! are the multipliers of the logarithmic constraints.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::convex::{to_convex_form, ConvexGp};
use crate::error::GpError;
use crate::problem::GpProblem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `||grad F + sum_u l_u grad ln f_u||` (equality component removed),
    /// divided by `sum_k e_k ||a_k||`.
    pub stationarity: f64,
    /// `max_u f_u(r)` evaluated in the original variables; feasible iff `<= 1`.
    pub primal_feasibility: f64,
    /// `max(0, -min_u l_u)`.
    pub dual_infeasibility: f64,
    /// `sum_u l_u |ln f_u(r)| / F(r)`.
    pub complementarity: f64,
    /// Largest equality violation `|ln g_w(r)|`.
    pub equality_residual: f64,
}

pub fn check_kkt(p: &GpProblem, r: &[f64], duals: &[f64]) -> Result<KktReport, GpError> {
    p.validate()?;
    if duals.len() != p.inequalities.len() {
        return Err(GpError::DimensionMismatch {
            expected: p.inequalities.len(),
            found: duals.len(),
        });
    }
    let objective_value = p.objective.eval(r)?;
    let primal_feasibility = p.max_inequality(r)?;
    let s: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let c = to_convex_form(p);
    let stationarity = stationarity_residual(&c, &s, duals)?;

    let mut complementarity = 0.0;
    for (f, l) in p.inequalities.iter().zip(duals) {
        complementarity += l * f.eval(r)?.ln().abs();
    }
    let equality_residual = c
        .equalities
        .iter()
        .map(|e| (e.a.iter().zip(&s).map(|(a, x)| a * x).sum::<f64>() + e.b).abs())
        .fold(0.0, f64::max);

    Ok(KktReport {
        stationarity,
        primal_feasibility,
        dual_infeasibility: duals.iter().fold(0.0f64, |m, l| m.max(-l)),
        complementarity: complementarity / objective_value,
        equality_residual,
    })
}

pub(crate) fn stationarity_residual(
    c: &ConvexGp,
    s: &[f64],
    duals: &[f64],
) -> Result<f64, GpError> {
    let mut grad = c.objective.sum_exp(s)?.gradient;
    for (g, l) in c.inequalities.iter().zip(duals) {
        if *l != 0.0 {
            grad += g.log_sum_exp(s).gradient * *l;
        }
    }
    if !c.equalities.is_empty() {
        // Remove the best equality-multiplier combination A^T nu.
        let n = c.n_vars;
        let m = c.equalities.len();
        let at = DMatrix::from_fn(n, m, |i, j| c.equalities[j].a[i]);
        let svd = at.clone().svd(true, true);
        let nu = svd.solve(&grad, 1e-12).unwrap_or_else(|_| DVector::zeros(m));
        grad -= at * nu;
    }
    let scale = c.objective.gradient_scale(s);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    Ok(grad.norm() / scale)
}

/// Multipliers for the constraints active at `r` (within `active_tol` in
/// log-space), fitted by least squares and clipped at zero. Used to certify
/// points produced by methods that do not carry duals.
pub fn estimate_duals(p: &GpProblem, r: &[f64], active_tol: f64) -> Result<Vec<f64>, GpError> {
    let s: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let c = to_convex_form(p);
    let grad_f = c.objective.sum_exp(&s)?.gradient;
    let active: Vec<usize> = c
        .inequalities
        .iter()
        .enumerate()
        .filter(|(_, g)| g.log_value(&s) >= -active_tol)
        .map(|(u, _)| u)
        .collect();
    let mut duals = vec![0.0; c.inequalities.len()];
    if active.is_empty() {
        return Ok(duals);
    }
    let n = c.n_vars;
    let cols: Vec<DVector<f64>> = active
        .iter()
        .map(|&u| c.inequalities[u].log_sum_exp(&s).gradient)
        .collect();
    let jac = DMatrix::from_fn(n, active.len(), |i, j| cols[j][i]);
    let svd = jac.svd(true, true);
    if let Ok(l) = svd.solve(&(-grad_f), 1e-12) {
        for (k, &u) in active.iter().enumerate() {
            duals[u] = l[k].max(0.0);
        }
    }
    Ok(duals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posynomial::{Monomial, Posynomial};

    fn r_plus_inverse() -> GpProblem {
        GpProblem::unconstrained(
            Posynomial::new(
                1,
                vec![
                    Monomial::new(1.0, vec![1.0]).unwrap(),
                    Monomial::new(1.0, vec![-1.0]).unwrap(),
                ],
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn optimum_has_vanishing_residuals() {
        let rep = check_kkt(&r_plus_inverse(), &[1.0], &[]).unwrap();
        assert!(rep.stationarity < 1e-10);
        assert_eq!(rep.primal_feasibility, 0.0);
        assert_eq!(rep.complementarity, 0.0);
    }

    #[test]
    fn perturbed_point_is_not_stationary() {
        let rep = check_kkt(&r_plus_inverse(), &[1.1], &[]).unwrap();
        // (1.1 - 1/1.1) / (1.1 + 1/1.1)
        let expected = (1.1 - 1.0 / 1.1) / (1.1 + 1.0 / 1.1);
        assert!((rep.stationarity - expected).abs() < 1e-12);
        assert!(rep.stationarity > 1e-3);
    }

    #[test]
    fn active_constraint_multiplier() {
        // min 1/r s.t. r/2 <= 1  ->  r* = 2, grad F = -1/2, grad ln f = 1, l = 1/2
        let obj = Posynomial::from(Monomial::new(1.0, vec![-1.0]).unwrap());
        let con = Posynomial::from(Monomial::new(0.5, vec![1.0]).unwrap());
        let p = GpProblem::new(vec!["r".into()], obj, vec![con], vec![]).unwrap();
        let duals = estimate_duals(&p, &[2.0], 1e-9).unwrap();
        assert!((duals[0] - 0.5).abs() < 1e-12);
        let rep = check_kkt(&p, &[2.0], &duals).unwrap();
        assert!(rep.stationarity < 1e-12);
        assert!((rep.primal_feasibility - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inputs_untouched() {
        let p = r_plus_inverse();
        let before = p.clone();
        let r = vec![1.3];
        check_kkt(&p, &r, &[]).unwrap();
        assert_eq!(p, before);
        assert_eq!(r, vec![1.3]);
    }
}
