//! Gaussian-bump demand surfaces (monocentric and commute patterns).

use serde::{Deserialize, Serialize};

use super::{normalize, OdMatrix};
use crate::error::Result;
use crate::grid::Grid;

/// Parameters of the product-form demand surface
///
/// ```text
/// lambda'(xo,yo,xd,yd) = prod_{t in {o,d}} [ a1 + a2 * sum_{g=1,2}
///     exp(-(a3[g] x_t - beta[t][g])^2 - (a4[g] y_t - beta_bar[t][g])^2) ]
/// ```
///
/// `beta[0]` / `beta_bar[0]` belong to origins, index 1 to destinations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothDemandParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: [f64; 2],
    pub alpha4: [f64; 2],
    pub beta: [[f64; 2]; 2],
    pub beta_bar: [[f64; 2]; 2],
}

impl SmoothDemandParams {
    /// Single peak at the city center.
    pub fn monocentric() -> Self {
        SmoothDemandParams {
            alpha1: 0.0016,
            alpha2: 0.065,
            alpha3: [0.5, 0.0],
            alpha4: [0.5, 0.0],
            beta: [[2.5, 0.0], [2.5, 0.0]],
            beta_bar: [[2.5, 0.0], [2.5, 0.0]],
        }
    }

    /// Origins concentrated near (2, 8) km, destinations near (8, 2) km.
    pub fn commute() -> Self {
        SmoothDemandParams {
            alpha1: 0.00044,
            alpha2: 0.70,
            alpha3: [0.5, 0.0],
            alpha4: [0.5, 0.0],
            beta: [[1.0, 0.0], [4.0, 0.0]],
            beta_bar: [[4.0, 0.0], [1.0, 0.0]],
        }
    }

    /// Bracketed factor for endpoint `theta` (0 = origin, 1 = destination).
    pub fn endpoint_factor(&self, theta: usize, x: f64, y: f64) -> f64 {
        let bumps: f64 = (0..2)
            .map(|g| {
                let u = self.alpha3[g] * x - self.beta[theta][g];
                let w = self.alpha4[g] * y - self.beta_bar[theta][g];
                (-u * u - w * w).exp()
            })
            .sum();
        self.alpha1 + self.alpha2 * bumps
    }
}

pub fn generate_smooth_demand(
    grid: &Grid,
    total_demand: f64,
    params: &SmoothDemandParams,
) -> Result<OdMatrix> {
    let n = grid.n_cells();
    let factor = |theta: usize| -> Vec<f64> {
        let mut f = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                f.push(params.endpoint_factor(theta, grid.center(x), grid.center(y)));
            }
        }
        f
    };
    let origin = factor(0);
    let destination = factor(1);
    let mut raw = Vec::with_capacity(n.pow(4));
    for o in &origin {
        for d in &destination {
            raw.push(o * d);
        }
    }
    normalize(grid, raw, total_demand)
}
