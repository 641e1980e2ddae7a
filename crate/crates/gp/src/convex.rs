//! Log-space image of a geometric program.
//!
//! With `s = ln r` and `b = ln d`, every posynomial becomes a sum of
//! exponentials of affine functions, `sum_k exp(a_k . s + b_k)`, and every
//! monomial equality becomes an affine equality `a . s + b = 0`.
//!
//! Exponent vectors are stored sparsely: the transit problems have at most
//! three non-zero exponents per term.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::GpError;
use crate::posynomial::Posynomial;
use crate::problem::GpProblem;

/// Largest exponent accepted after the max-shift is undone.
const MAX_EXP: f64 = 700.0;

/// `sum_k exp(a_k . s + b_k)` with sparse `a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    rows: Vec<Vec<(usize, f64)>>,
    offsets: Vec<f64>,
}

/// Value, gradient and Hessian of a scalar function of `s`.
#[derive(Debug, Clone)]
pub struct SecondOrder {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl ExpSum {
    pub fn from_posynomial(p: &Posynomial) -> Self {
        let mut rows = Vec::with_capacity(p.len());
        let mut offsets = Vec::with_capacity(p.len());
        for t in p.terms() {
            rows.push(
                t.exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a != 0.0)
                    .map(|(i, a)| (i, *a))
                    .collect(),
            );
            offsets.push(t.coefficient().ln());
        }
        ExpSum { rows, offsets }
    }

    pub fn from_parts(rows: Vec<Vec<(usize, f64)>>, offsets: Vec<f64>) -> Self {
        assert_eq!(rows.len(), offsets.len());
        ExpSum { rows, offsets }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// True when the sum is a single exponential (an affine function after `ln`).
    pub fn is_monomial(&self) -> bool {
        self.rows.len() == 1
    }

    /// Affine arguments `a_k . s + b_k`.
    pub fn arguments(&self, s: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.offsets)
            .map(|(row, b)| row.iter().map(|(i, a)| a * s[*i]).sum::<f64>() + b)
            .collect()
    }

    /// `ln sum_k exp(.)` computed with a max-shift; never overflows.
    pub fn log_value(&self, s: &[f64]) -> f64 {
        let args = self.arguments(s);
        let shift = args.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return shift;
        }
        shift + args.iter().map(|c| (c - shift).exp()).sum::<f64>().ln()
    }

    pub fn value(&self, s: &[f64]) -> Result<f64, GpError> {
        let lv = self.log_value(s);
        if lv > MAX_EXP {
            return Err(GpError::ScaleOverflow(lv));
        }
        Ok(lv.exp())
    }

    /// `ln(f(s + ds) / f(s))`, accurate even when the ratio is within
    /// roundoff of one.
    pub fn log_ratio(&self, s: &[f64], ds: &[f64]) -> f64 {
        let (weights, _) = self.shifted_weights(s);
        let total: f64 = weights.iter().sum();
        let moved: f64 = self
            .rows
            .iter()
            .zip(&weights)
            .map(|(row, w)| w * row.iter().map(|(i, a)| a * ds[*i]).sum::<f64>().exp_m1())
            .sum();
        (moved / total).ln_1p()
    }

    /// Shifted weights `exp(c_k - shift)` and the shift.
    fn shifted_weights(&self, s: &[f64]) -> (Vec<f64>, f64) {
        let args = self.arguments(s);
        let shift = args.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (args.iter().map(|c| (c - shift).exp()).collect(), shift)
    }

    /// `sum_k w_k a_k` and `sum_k w_k a_k a_k^T` for the given weights.
    fn weighted_moments(&self, n: usize, weights: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for (row, w) in self.rows.iter().zip(weights) {
            for &(i, ai) in row {
                grad[i] += w * ai;
                for &(j, aj) in row {
                    hess[(i, j)] += w * ai * aj;
                }
            }
        }
        (grad, hess)
    }

    /// Sum-exp form: value, gradient `sum e_k a_k`, Hessian `sum e_k a_k a_k^T`.
    pub fn sum_exp(&self, s: &[f64]) -> Result<SecondOrder, GpError> {
        let n = s.len();
        if self.rows.is_empty() {
            return Ok(SecondOrder {
                value: 0.0,
                gradient: DVector::zeros(n),
                hessian: DMatrix::zeros(n, n),
            });
        }
        let (weights, shift) = self.shifted_weights(s);
        let total: f64 = weights.iter().sum();
        let log_value = shift + total.ln();
        if !(log_value <= MAX_EXP) {
            return Err(GpError::ScaleOverflow(log_value));
        }
        let scale = shift.exp();
        let (g, h) = self.weighted_moments(n, &weights);
        Ok(SecondOrder {
            value: total * scale,
            gradient: g * scale,
            hessian: h * scale,
        })
    }

    /// Log-sum-exp form used for constraints: `g = ln sum exp(.)`,
    /// `grad = sum p_k a_k`, `hess = sum p_k a_k a_k^T - grad grad^T` with
    /// softmax weights `p_k`.
    pub fn log_sum_exp(&self, s: &[f64]) -> SecondOrder {
        let n = s.len();
        let (weights, shift) = self.shifted_weights(s);
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let (g, mut h) = self.weighted_moments(n, &probs);
        h -= &g * g.transpose();
        SecondOrder {
            value: shift + total.ln(),
            gradient: g,
            hessian: h,
        }
    }

    /// `sum_k e_k ||a_k||_2`: the gradient magnitude before cancellation.
    pub fn gradient_scale(&self, s: &[f64]) -> f64 {
        let (weights, shift) = self.shifted_weights(s);
        let scale = shift.exp();
        self.rows
            .iter()
            .zip(&weights)
            .map(|(row, w)| w * row.iter().map(|(_, a)| a * a).sum::<f64>().sqrt())
            .sum::<f64>()
            * scale
    }
}

/// Affine equality `a . s + b = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineEquality {
    pub a: Vec<f64>,
    pub b: f64,
}

/// A geometric program in log variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexGp {
    pub n_vars: usize,
    pub objective: ExpSum,
    pub inequalities: Vec<ExpSum>,
    pub equalities: Vec<AffineEquality>,
}

/// `s = origin + basis * z`, the parametrization of the equality-feasible set.
#[derive(Debug, Clone)]
pub struct AffineMap {
    pub origin: DVector<f64>,
    pub basis: DMatrix<f64>,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        AffineMap {
            origin: DVector::zeros(n),
            basis: DMatrix::identity(n, n),
        }
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let z = DVector::from_column_slice(z);
        (&self.origin + &self.basis * z).iter().copied().collect()
    }

    pub fn reduced_dim(&self) -> usize {
        self.basis.ncols()
    }
}

pub fn to_convex_form(p: &GpProblem) -> ConvexGp {
    ConvexGp {
        n_vars: p.n_vars(),
        objective: ExpSum::from_posynomial(&p.objective),
        inequalities: p.inequalities.iter().map(ExpSum::from_posynomial).collect(),
        equalities: p
            .equalities
            .iter()
            .map(|m| AffineEquality {
                a: m.exponents().to_vec(),
                b: m.coefficient().ln(),
            })
            .collect(),
    }
}

/// Objective in the sum-exp form `F(s) = sum_k exp(a_k . s + b_k)`.
pub fn objective_value_grad_hess(c: &ConvexGp, s: &[f64]) -> Result<SecondOrder, GpError> {
    if s.len() != c.n_vars {
        return Err(GpError::DimensionMismatch {
            expected: c.n_vars,
            found: s.len(),
        });
    }
    c.objective.sum_exp(s)
}

impl ConvexGp {
    /// Removes affine equalities by substituting `s = origin + basis * z`.
    ///
    /// Returns the problem in `z` together with the map back to `s`.
    pub fn eliminate_equalities(&self) -> Result<(ConvexGp, AffineMap), GpError> {
        let n = self.n_vars;
        if self.equalities.is_empty() {
            return Ok((self.clone(), AffineMap::identity(n)));
        }
        let m = self.equalities.len();
        let a = DMatrix::from_fn(m, n, |i, j| self.equalities[i].a[j]);
        let rhs = DVector::from_fn(m, |i, _| -self.equalities[i].b);

        // Minimum-norm particular solution via the pseudo-inverse.
        let svd = a.clone().svd(true, true);
        let origin = svd
            .solve(&rhs, 1e-12)
            .map_err(|_| GpError::InconsistentEqualities(f64::NAN))?;
        let residual = (&a * &origin - &rhs).amax();
        if residual > 1e-9 * (1.0 + rhs.amax()) {
            return Err(GpError::InconsistentEqualities(residual));
        }

        // Null space from the eigenvectors of A^T A with vanishing eigenvalue.
        let eig = SymmetricEigen::new(a.transpose() * &a);
        let top = eig.eigenvalues.amax().max(1.0);
        let null_cols: Vec<usize> = (0..n)
            .filter(|&k| eig.eigenvalues[k].abs() <= 1e-10 * top)
            .collect();
        let basis = DMatrix::from_fn(n, null_cols.len(), |i, j| eig.eigenvectors[(i, null_cols[j])]);
        let map = AffineMap { origin, basis };

        let reduce = |e: &ExpSum| -> ExpSum {
            let mut rows = Vec::with_capacity(e.len());
            let mut offsets = Vec::with_capacity(e.len());
            for (row, b) in e.rows.iter().zip(&e.offsets) {
                let shift: f64 = row.iter().map(|(i, a)| a * map.origin[*i]).sum();
                let reduced: Vec<(usize, f64)> = (0..map.reduced_dim())
                    .map(|j| (j, row.iter().map(|(i, a)| a * map.basis[(*i, j)]).sum::<f64>()))
                    .filter(|(_, a)| a.abs() > 1e-14)
                    .collect();
                rows.push(reduced);
                offsets.push(b + shift);
            }
            ExpSum { rows, offsets }
        };
        let reduced = ConvexGp {
            n_vars: map.reduced_dim(),
            objective: reduce(&self.objective),
            inequalities: self.inequalities.iter().map(reduce).collect(),
            equalities: Vec::new(),
        };
        Ok((reduced, map))
    }
}
