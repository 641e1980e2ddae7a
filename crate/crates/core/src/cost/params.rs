use serde::{Deserialize, Serialize};

use crate::error::{Result, TransitError};

/// Unit costs, speeds and behavioral weights.
///
/// Defaults are the reference values used throughout the experiments, with
/// `mu = 20 $/hr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    /// Line infrastructure, $/km.
    pub pi_l: f64,
    /// Per stop, $.
    pub pi_s: f64,
    /// Vehicle distance, $/(veh km).
    pub pi_k: f64,
    /// Vehicle time, $/(veh hr).
    pub pi_h: f64,
    /// Cruise speed, km/hr.
    pub v: f64,
    /// Walking speed, km/hr.
    pub v_w: f64,
    /// Vehicle capacity, pas/veh.
    #[serde(rename = "C")]
    pub capacity: f64,
    /// Perceived walking-time multiplier.
    pub beta_w: f64,
    /// Dwell time per stop, hr.
    pub tau: f64,
    /// Transfer penalty, hr.
    pub sigma: f64,
    /// Value of time, $/hr.
    pub mu: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            pi_l: 0.0,
            pi_s: 0.0,
            pi_k: 2.0,
            pi_h: 40.0,
            v: 25.0,
            v_w: 2.0,
            capacity: 80.0,
            beta_w: 2.0,
            tau: 30.0 / 3600.0,
            sigma: 60.0 / 3600.0,
            mu: 20.0,
        }
    }
}

impl ModelParams {
    pub fn with_mu(mu: f64) -> Self {
        ModelParams {
            mu,
            ..ModelParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("v", self.v), ("v_w", self.v_w), ("C", self.capacity), ("mu", self.mu)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(TransitError::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        for (name, value) in [
            ("pi_l", self.pi_l),
            ("pi_s", self.pi_s),
            ("pi_k", self.pi_k),
            ("pi_h", self.pi_h),
            ("beta_w", self.beta_w),
            ("tau", self.tau),
            ("sigma", self.sigma),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(TransitError::InvalidParams(format!("{name} must be non-negative, got {value}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = ModelParams::default();
        p.validate().unwrap();
        assert_eq!(p.tau * 3600.0, 30.0);
        assert_eq!(ModelParams::with_mu(5.0).mu, 5.0);
    }

    #[test]
    fn rejects_bad_values() {
        let mut p = ModelParams::default();
        p.capacity = 0.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::default();
        p.tau = -1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn json_uses_capacity_symbol() {
        let p: ModelParams = serde_json::from_str(r#"{"C": 60, "mu": 25}"#).unwrap();
        assert_eq!((p.capacity, p.mu, p.pi_h), (60.0, 25.0, 40.0));
        assert!(serde_json::from_str::<ModelParams>(r#"{"capacity": 60}"#).is_err());
    }
}
