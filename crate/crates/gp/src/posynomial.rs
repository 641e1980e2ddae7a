//! Monomials and posynomials over strictly positive variables.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::GpError;

/// `d * r_1^a_1 * ... * r_L^a_L` with `d > 0`.
///
/// Zero-coefficient monomials are never constructed; a posynomial that would
/// contain one simply omits the term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MonomialWire", try_from = "MonomialWire")]
pub struct Monomial {
    coefficient: f64,
    exponents: Vec<f64>,
}

/// On-disk form: coefficients travel as logarithms.
#[derive(Serialize, Deserialize)]
struct MonomialWire {
    log_coefficient: f64,
    exponents: Vec<f64>,
}

impl From<Monomial> for MonomialWire {
    fn from(m: Monomial) -> Self {
        MonomialWire {
            log_coefficient: m.coefficient.ln(),
            exponents: m.exponents,
        }
    }
}

impl TryFrom<MonomialWire> for Monomial {
    type Error = GpError;

    fn try_from(w: MonomialWire) -> Result<Self, Self::Error> {
        Monomial::new(w.log_coefficient.exp(), w.exponents)
    }
}

impl Monomial {
    pub fn new(coefficient: f64, exponents: Vec<f64>) -> Result<Self, GpError> {
        if !(coefficient > 0.0 && coefficient.is_finite()) {
            return Err(GpError::NonPositiveCoefficient(coefficient));
        }
        if let Some(a) = exponents.iter().find(|a| !a.is_finite()) {
            return Err(GpError::NonFiniteExponent(*a));
        }
        Ok(Monomial {
            coefficient,
            exponents,
        })
    }

    /// A monomial with a single non-zero exponent pattern given sparsely.
    pub fn sparse(
        coefficient: f64,
        n_vars: usize,
        entries: &[(usize, f64)],
    ) -> Result<Self, GpError> {
        let mut exponents = vec![0.0; n_vars];
        for &(idx, a) in entries {
            if idx >= n_vars {
                return Err(GpError::DimensionMismatch {
                    expected: n_vars,
                    found: idx + 1,
                });
            }
            exponents[idx] += a;
        }
        Monomial::new(coefficient, exponents)
    }

    /// Constant monomial (all exponents zero).
    pub fn constant(coefficient: f64, n_vars: usize) -> Result<Self, GpError> {
        Monomial::new(coefficient, vec![0.0; n_vars])
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn n_vars(&self) -> usize {
        self.exponents.len()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, GpError> {
        Monomial::new(self.coefficient * factor, self.exponents.clone())
    }

    pub fn eval(&self, r: &[f64]) -> Result<f64, GpError> {
        check_point(r, self.n_vars())?;
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: &[f64]) -> f64 {
        let log_value: f64 = self
            .exponents
            .iter()
            .zip(r)
            .filter(|(a, _)| **a != 0.0)
            .map(|(a, x)| a * x.ln())
            .sum();
        self.coefficient * log_value.exp()
    }
}

/// Sum of monomials sharing one variable dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posynomial {
    n_vars: usize,
    terms: Vec<Monomial>,
}

impl Posynomial {
    pub fn new(n_vars: usize, terms: Vec<Monomial>) -> Result<Self, GpError> {
        for t in &terms {
            if t.n_vars() != n_vars {
                return Err(GpError::DimensionMismatch {
                    expected: n_vars,
                    found: t.n_vars(),
                });
            }
        }
        Ok(Posynomial { n_vars, terms })
    }

    pub fn empty(n_vars: usize) -> Self {
        Posynomial {
            n_vars,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, term: Monomial) -> Result<(), GpError> {
        if term.n_vars() != self.n_vars {
            return Err(GpError::DimensionMismatch {
                expected: self.n_vars,
                found: term.n_vars(),
            });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, r: &[f64]) -> Result<f64, GpError> {
        check_point(r, self.n_vars)?;
        Ok(self.terms.iter().map(|t| t.eval_unchecked(r)).sum())
    }

    /// Merges terms with identical exponent vectors, keeping first-seen order.
    pub fn simplify(&mut self) {
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut merged: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            let key: Vec<u64> = t.exponents.iter().map(|a| (a + 0.0).to_bits()).collect();
            match index.get(&key) {
                Some(&i) => merged[i].coefficient += t.coefficient,
                None => {
                    index.insert(key, merged.len());
                    merged.push(t);
                }
            }
        }
        self.terms = merged;
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, GpError> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.scaled(factor))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Posynomial {
            n_vars: self.n_vars,
            terms,
        })
    }
}

impl From<Monomial> for Posynomial {
    fn from(m: Monomial) -> Self {
        Posynomial {
            n_vars: m.n_vars(),
            terms: vec![m],
        }
    }
}

fn check_point(r: &[f64], n_vars: usize) -> Result<(), GpError> {
    if r.len() != n_vars {
        return Err(GpError::DimensionMismatch {
            expected: n_vars,
            found: r.len(),
        });
    }
    if let Some((i, x)) = r.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        return Err(GpError::NonPositiveVariable { index: i, value: *x });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn zero_exponents_give_coefficient() {
        let m = Monomial::new(1.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(m.eval(&[7.0, 3.0]).unwrap(), 1.0);
    }

    #[test]
    fn direct_arithmetic() {
        let m = Monomial::new(3.0, vec![2.0, -1.0]).unwrap();
        assert!((m.eval(&[2.0, 4.0]).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn irrational_exponents_at_unit_point() {
        let m = Monomial::new(LN_2, vec![PI, -100.0]).unwrap();
        assert_eq!(m.eval(&[1.0, 1.0]).unwrap(), LN_2);
    }

    #[test]
    fn two_term_posynomial_at_unit_point() {
        let p = Posynomial::new(
            3,
            vec![
                Monomial::new(LN_2, vec![PI, -100.0, 0.0]).unwrap(),
                Monomial::new(1.0, vec![0.0, 1.0, -4.0]).unwrap(),
            ],
        )
        .unwrap();
        assert!((p.eval(&[1.0, 1.0, 1.0]).unwrap() - (LN_2 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn single_term_matches_monomial() {
        let m = Monomial::new(2.5, vec![0.5, -1.5]).unwrap();
        let p = Posynomial::from(m.clone());
        let r = [3.0, 0.2];
        assert_eq!(p.eval(&r).unwrap(), m.eval(&r).unwrap());
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        let m = Monomial::new(1.0, vec![1.0]).unwrap();
        assert!(matches!(
            m.eval(&[0.0]),
            Err(GpError::NonPositiveVariable { index: 0, .. })
        ));
        assert!(Monomial::new(0.0, vec![1.0]).is_err());
        assert!(Monomial::new(-1.0, vec![1.0]).is_err());
    }

    #[test]
    fn simplify_merges_equal_exponents() {
        let mut p = Posynomial::new(
            2,
            vec![
                Monomial::new(1.0, vec![1.0, 0.0]).unwrap(),
                Monomial::new(2.0, vec![0.0, 1.0]).unwrap(),
                Monomial::new(3.0, vec![1.0, 0.0]).unwrap(),
            ],
        )
        .unwrap();
        let before = p.eval(&[1.3, 0.7]).unwrap();
        p.simplify();
        assert_eq!(p.len(), 2);
        assert_eq!(p.terms()[0].coefficient(), 4.0);
        assert!((p.eval(&[1.3, 0.7]).unwrap() - before).abs() < 1e-14);
    }

    #[test]
    fn wire_format_carries_log_coefficient() {
        let m = Monomial::new(std::f64::consts::E, vec![1.0, -2.0]).unwrap();
        let json = serde_json::to_value(&m).unwrap();
        assert!((json["log_coefficient"].as_f64().unwrap() - 1.0).abs() < 1e-15);
        let back: Monomial = serde_json::from_value(json).unwrap();
        assert!((back.coefficient() / m.coefficient() - 1.0).abs() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn value_dominates_every_term(
            coeffs in proptest::collection::vec(1e-3f64..1e3, 1..6),
            x in 0.05f64..20.0,
            y in 0.05f64..20.0,
        ) {
            let terms: Vec<Monomial> = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| Monomial::new(*c, vec![k as f64 - 2.0, 1.0 - k as f64 * 0.5]).unwrap())
                .collect();
            let p = Posynomial::new(2, terms.clone()).unwrap();
            let v = p.eval(&[x, y]).unwrap();
            proptest::prop_assert!(v > 0.0);
            for t in &terms {
                proptest::prop_assert!(v >= t.eval(&[x, y]).unwrap());
            }
        }
    }
}
