//! Geometric programs in standard (posynomial) form.

use serde::{Deserialize, Serialize};

use crate::error::GpError;
use crate::posynomial::{Monomial, Posynomial};

/// `minimize f0(r)  s.t.  f_u(r) <= 1,  g_w(r) = 1,  r > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpProblem {
    pub variable_names: Vec<String>,
    pub objective: Posynomial,
    pub inequalities: Vec<Posynomial>,
    pub equalities: Vec<Monomial>,
}

impl GpProblem {
    pub fn new(
        variable_names: Vec<String>,
        objective: Posynomial,
        inequalities: Vec<Posynomial>,
        equalities: Vec<Monomial>,
    ) -> Result<Self, GpError> {
        let p = GpProblem {
            variable_names,
            objective,
            inequalities,
            equalities,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unconstrained problem with generated variable names `r1..rL`.
    pub fn unconstrained(objective: Posynomial) -> Result<Self, GpError> {
        let names = (1..=objective.n_vars()).map(|i| format!("r{i}")).collect();
        GpProblem::new(names, objective, Vec::new(), Vec::new())
    }

    pub fn n_vars(&self) -> usize {
        self.variable_names.len()
    }

    pub fn validate(&self) -> Result<(), GpError> {
        let n = self.n_vars();
        if self.objective.is_empty() {
            return Err(GpError::EmptyObjective);
        }
        let dims = std::iter::once(self.objective.n_vars())
            .chain(self.inequalities.iter().map(Posynomial::n_vars))
            .chain(self.equalities.iter().map(Monomial::n_vars));
        for d in dims {
            if d != n {
                return Err(GpError::DimensionMismatch {
                    expected: n,
                    found: d,
                });
            }
        }
        Ok(())
    }

    /// Largest constraint value `max_u f_u(r)` (0 when unconstrained).
    pub fn max_inequality(&self, r: &[f64]) -> Result<f64, GpError> {
        let mut worst: f64 = 0.0;
        for f in &self.inequalities {
            worst = worst.max(f.eval(r)?);
        }
        Ok(worst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("GpProblem serializes")
    }
}
