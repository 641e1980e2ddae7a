use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use geoprog::{check_kkt, estimate_duals, solve_gp, SolveReport, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::cd::{run_cd_multistart, CdContext, CdMultistart, CdOptions};
use crate::cost::{build_gp, evaluate_cost, CostBreakdown, DesignVariables, ModelParams, NetworkKind};
use crate::demand::{
    aggregate_demand, generate_chessboard_demand, generate_smooth_demand, generate_uniform_demand, DemandAggregates,
    OdMatrix, SmoothDemandParams, DEFAULT_FLOW_RATIO,
};
use crate::error::{Result, TransitError};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Uniform,
    Monocentric,
    Commute,
    Chessboard1,
    Chessboard2,
    Chessboard3,
    Chessboard4,
}

impl Pattern {
    /// The six heterogeneous patterns of the benchmark.
    pub const BENCHMARK: [Pattern; 6] = [
        Pattern::Monocentric,
        Pattern::Commute,
        Pattern::Chessboard1,
        Pattern::Chessboard2,
        Pattern::Chessboard3,
        Pattern::Chessboard4,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Pattern::Uniform => "uniform",
            Pattern::Monocentric => "monocentric",
            Pattern::Commute => "commute",
            Pattern::Chessboard1 => "chessboard1",
            Pattern::Chessboard2 => "chessboard2",
            Pattern::Chessboard3 => "chessboard3",
            Pattern::Chessboard4 => "chessboard4",
        }
    }

    fn chessboard_id(self) -> Option<u8> {
        match self {
            Pattern::Chessboard1 => Some(1),
            Pattern::Chessboard2 => Some(2),
            Pattern::Chessboard3 => Some(3),
            Pattern::Chessboard4 => Some(4),
            _ => None,
        }
    }

    /// OD matrix for this pattern; chessboards use `rho_high = rho_high_high = ratio`.
    pub fn generate(self, grid: &Grid, total_demand: f64, ratio: f64) -> Result<OdMatrix> {
        match self {
            Pattern::Uniform => generate_uniform_demand(grid, total_demand),
            Pattern::Monocentric => generate_smooth_demand(grid, total_demand, &SmoothDemandParams::monocentric()),
            Pattern::Commute => generate_smooth_demand(grid, total_demand, &SmoothDemandParams::commute()),
            _ => {
                let id = self.chessboard_id().expect("chessboard pattern");
                Ok(generate_chessboard_demand(grid, total_demand, id, ratio, ratio)?.0)
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Pattern {
    type Err = TransitError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| TransitError::InvalidConfig(format!("unknown demand pattern `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSettings {
    pub side_length: f64,
    pub cell_size: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            side_length: 10.0,
            cell_size: 0.5,
        }
    }
}

impl GridSettings {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.side_length, self.cell_size)
    }
}

fn default_ratio() -> f64 {
    DEFAULT_FLOW_RATIO
}

/// One benchmark case. `mu` overrides `params.mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub pattern: Pattern,
    #[serde(rename = "D")]
    pub total_demand: f64,
    pub mu: f64,
    pub network: NetworkKind,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub params: ModelParams,
    /// Chessboard `rho_H` and `rho_HH`.
    #[serde(default = "default_ratio")]
    pub chessboard_ratio: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub cd: CdOptions,
}

impl Scenario {
    pub fn new(pattern: Pattern, total_demand: f64, mu: f64, network: NetworkKind) -> Self {
        Scenario {
            pattern,
            total_demand,
            mu,
            network,
            grid: GridSettings::default(),
            params: ModelParams::default(),
            chessboard_ratio: DEFAULT_FLOW_RATIO,
            seed: 0,
            solver: SolverOptions::default(),
            cd: CdOptions::default(),
        }
    }

    pub fn key(&self) -> String {
        format!(
            "{}/D={}/mu={}/{}",
            self.pattern,
            self.total_demand,
            self.mu,
            self.network.label()
        )
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            mu: self.mu,
            ..self.params
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.total_demand > 0.0) {
            return Err(TransitError::InvalidConfig(format!(
                "scenario needs D > 0 and mu > 0, got D={} mu={}",
                self.total_demand, self.mu
            )));
        }
        self.model_params().validate()?;
        self.cd.validate()
    }

    pub fn demand(&self) -> Result<(OdMatrix, DemandAggregates)> {
        let grid = self.grid.build()?;
        let od = self.pattern.generate(&grid, self.total_demand, self.chessboard_ratio)?;
        let agg = aggregate_demand(&grid, &od);
        Ok((od, agg))
    }
}

/// One line of the GP-vs-CD comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub pattern: Pattern,
    #[serde(rename = "D")]
    pub total_demand: f64,
    pub mu: f64,
    pub network: NetworkKind,
    pub seed: u64,
    pub z_gp: f64,
    pub z_cd_best: f64,
    /// `100 (Z_cd - Z_gp) / Z_cd`.
    pub improvement_pct: f64,
    pub z_gp_per_pax: f64,
    pub z_cd_per_pax: f64,
    pub breakdown_gp: CostBreakdown,
    pub breakdown_cd: CostBreakdown,
    pub gp_report: SolveReport,
    pub gp_runtime_ms: f64,
    pub cd_runtime_ms: f64,
    /// Iterations and clamp events of the best CD start.
    pub cd_iterations: usize,
    pub cd_clamp_events: usize,
    pub cd_final_z: Vec<f64>,
    pub cd_spread: f64,
    pub cd_max_iterations: usize,
    pub cd_all_converged: bool,
    /// Stationarity residual of the GP problem at the best CD design, with
    /// least-squares multipliers for its active capacity constraints.
    pub cd_kkt_stationarity: Option<f64>,
}

impl ComparisonRow {
    /// Blanks out wall-clock fields so that reports are reproducible.
    pub fn without_timings(mut self) -> Self {
        self.gp_runtime_ms = 0.0;
        self.cd_runtime_ms = 0.0;
        self.gp_report.wall_time_ms = 0.0;
        self
    }
}

/// Everything a scenario produces.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub row: ComparisonRow,
    pub gp_design: DesignVariables,
    pub cd: CdMultistart,
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioOutcome> {
    run_inner(s).map_err(|e| TransitError::Scenario {
        scenario: s.key(),
        source: Box::new(e),
    })
}

fn run_inner(s: &Scenario) -> Result<ScenarioOutcome> {
    s.validate()?;
    let params = s.model_params();
    let (_, agg) = s.demand()?;

    let started = Instant::now();
    let gp = build_gp(s.network, &agg, &params)?;
    let sol = solve_gp(&gp.problem, &s.solver)?;
    let gp_design = gp.design(&sol.r)?;
    let breakdown_gp = evaluate_cost(&gp_design, &agg, &params)?;
    let gp_runtime_ms = started.elapsed().as_secs_f64() * 1e3;

    let started = Instant::now();
    let cd_opts = CdOptions {
        seed: s.seed,
        ..s.cd.clone()
    };
    let ctx = CdContext::new(&agg, &params, s.network)?;
    let cd = run_cd_multistart(&ctx, &cd_opts)?;
    let cd_runtime_ms = started.elapsed().as_secs_f64() * 1e3;

    let (z_gp, z_cd) = (breakdown_gp.z, cd.best.breakdown.z);
    let row = ComparisonRow {
        pattern: s.pattern,
        total_demand: s.total_demand,
        mu: s.mu,
        network: s.network,
        seed: s.seed,
        z_gp,
        z_cd_best: z_cd,
        improvement_pct: 100.0 * (z_cd - z_gp) / z_cd,
        z_gp_per_pax: breakdown_gp.z_per_passenger,
        z_cd_per_pax: cd.best.breakdown.z_per_passenger,
        breakdown_gp,
        breakdown_cd: cd.best.breakdown,
        gp_report: sol.report,
        gp_runtime_ms,
        cd_runtime_ms,
        cd_iterations: cd.best.trace.iterations(),
        cd_clamp_events: cd.best.trace.total_clamps(),
        cd_final_z: cd.final_z.clone(),
        cd_spread: cd.spread(),
        cd_max_iterations: cd.iterations.iter().copied().max().unwrap_or(0),
        cd_all_converged: cd.iterations.iter().all(|it| *it < cd_opts.max_iterations),
        cd_kkt_stationarity: cd_stationarity(&gp.problem, &cd.best.design),
    };
    Ok(ScenarioOutcome { row, gp_design, cd })
}

fn cd_stationarity(problem: &geoprog::GpProblem, design: &DesignVariables) -> Option<f64> {
    let r = design.to_vector();
    let duals = estimate_duals(problem, &r, 1e-9).ok()?;
    check_kkt(problem, &r, &duals).ok().map(|k| k.stationarity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_names_round_trip() {
        for p in Pattern::BENCHMARK.iter().chain([Pattern::Uniform].iter()) {
            assert_eq!(p.label().parse::<Pattern>().unwrap(), *p);
        }
        assert!("chessboard5".parse::<Pattern>().is_err());
    }

    #[test]
    fn scenario_json_rejects_unknown_keys() {
        let ok = r#"{"pattern": "commute", "D": 5000, "mu": 20, "network": "het"}"#;
        let s: Scenario = serde_json::from_str(ok).unwrap();
        assert_eq!(s.grid, GridSettings::default());
        assert_eq!(s.chessboard_ratio, 0.9);
        let bad = r#"{"pattern": "commute", "D": 5000, "mu": 20, "network": "het", "colour": 1}"#;
        assert!(serde_json::from_str::<Scenario>(bad).is_err());
    }

    #[test]
    fn mu_override() {
        let mut s = Scenario::new(Pattern::Uniform, 5000.0, 5.0, NetworkKind::Homogeneous);
        s.params.mu = 99.0;
        assert_eq!(s.model_params().mu, 5.0);
    }
}
