use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{run_scenario, ComparisonRow, GridSettings, Pattern, Scenario};
use crate::cd::CdOptions;
use crate::cost::{ModelParams, NetworkKind};
use crate::demand::DEFAULT_FLOW_RATIO;
use crate::error::{Result, TransitError};
use geoprog::SolverOptions;

fn default_patterns() -> Vec<Pattern> {
    Pattern::BENCHMARK.to_vec()
}

fn default_demands() -> Vec<f64> {
    vec![5_000.0, 10_000.0, 50_000.0, 100_000.0]
}

fn default_vots() -> Vec<f64> {
    vec![25.0, 20.0, 5.0]
}

fn default_networks() -> Vec<NetworkKind> {
    vec![NetworkKind::Heterogeneous, NetworkKind::Homogeneous]
}

fn default_ratio() -> f64 {
    DEFAULT_FLOW_RATIO
}

/// Cartesian sweep over patterns, demand levels, values of time and network
/// kinds. Defaults reproduce the full benchmark grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_patterns")]
    pub patterns: Vec<Pattern>,
    #[serde(default = "default_demands")]
    pub demands: Vec<f64>,
    #[serde(default = "default_vots")]
    pub vots: Vec<f64>,
    #[serde(default = "default_networks")]
    pub networks: Vec<NetworkKind>,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default = "default_ratio")]
    pub chessboard_ratio: f64,
    /// Base seed; scenario `i` uses `seed + 1000 i`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub cd: CdOptions,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Write wall-clock times into `results.csv` and `timings.csv`. Off by
    /// default so repeated sweeps produce identical files.
    #[serde(default)]
    pub record_runtime: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl SweepConfig {
    pub fn scenarios(&self) -> Vec<Scenario> {
        let mut out = Vec::new();
        for &network in &self.networks {
            for &pattern in &self.patterns {
                for &d in &self.demands {
                    for &mu in &self.vots {
                        let seed = self.seed.wrapping_add(1000 * out.len() as u64);
                        out.push(Scenario {
                            pattern,
                            total_demand: d,
                            mu,
                            network,
                            grid: self.grid,
                            params: self.params,
                            chessboard_ratio: self.chessboard_ratio,
                            seed,
                            solver: self.solver.clone(),
                            cd: self.cd.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutput {
    pub rows: Vec<ComparisonRow>,
    /// `(scenario key, error message)` for every case that failed.
    pub failures: Vec<(String, String)>,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    let scenarios = config.scenarios();
    let run = || -> Vec<std::result::Result<ComparisonRow, (String, String)>> {
        scenarios
            .par_iter()
            .map(|s| run_scenario(s).map(|o| o.row).map_err(|e| (s.key(), e.to_string())))
            .collect()
    };
    let results = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| TransitError::InvalidConfig(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    Ok(SweepOutput { rows, failures })
}

/// Mean improvement of GP over CD reported in the benchmark table, for
/// side-by-side comparison.
pub fn reference_improvement(network: NetworkKind, total_demand: f64, mu: f64) -> Option<f64> {
    let d = [5_000.0, 10_000.0, 50_000.0, 100_000.0].iter().position(|x| *x == total_demand)?;
    let m = [25.0, 20.0, 5.0].iter().position(|x| *x == mu)?;
    let table = match network {
        NetworkKind::Heterogeneous => [[2.70, 2.86, 3.84], [2.21, 2.37, 3.35], [1.26, 1.37, 1.07], [0.89, 0.87, 0.67]],
        NetworkKind::Homogeneous => [[3.09, 3.28, 4.45], [2.51, 2.69, 3.76], [1.40, 1.52, 0.80], [0.81, 0.58, 0.50]],
    };
    Some(table[d][m])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub network: NetworkKind,
    #[serde(rename = "D")]
    pub total_demand: f64,
    pub mu: f64,
    pub n_rows: usize,
    pub mean_improvement_pct: f64,
    pub min_improvement_pct: f64,
    pub max_improvement_pct: f64,
    pub reference_improvement_pct: Option<f64>,
}

/// Mean improvement per `(network, D, mu)`, in first-seen order.
pub fn summarize(rows: &[ComparisonRow]) -> Vec<SummaryCell> {
    let mut keys: Vec<(NetworkKind, f64, f64)> = Vec::new();
    for r in rows {
        let k = (r.network, r.total_demand, r.mu);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(network, d, mu)| {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| r.network == network && r.total_demand == d && r.mu == mu)
                .map(|r| r.improvement_pct)
                .collect();
            SummaryCell {
                network,
                total_demand: d,
                mu,
                n_rows: v.len(),
                mean_improvement_pct: v.iter().sum::<f64>() / v.len() as f64,
                min_improvement_pct: v.iter().copied().fold(f64::INFINITY, f64::min),
                max_improvement_pct: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                reference_improvement_pct: reference_improvement(network, d, mu),
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_results_csv<W: Write>(rows: &[ComparisonRow], record_runtime: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "pattern",
        "D",
        "vot",
        "network",
        "method",
        "Z",
        "Z_per_pax",
        "improvement_pct",
        "iterations",
        "clamp_events",
        "runtime_ms",
        "kkt_stationarity",
        "seed",
    ])?;
    let time = |t: f64| if record_runtime { format!("{t:.3}") } else { String::new() };
    for r in rows {
        let common = [r.pattern.to_string(), r.total_demand.to_string(), r.mu.to_string(), r.network.label().to_string()];
        let gp = [
            "gp".to_string(),
            r.z_gp.to_string(),
            r.z_gp_per_pax.to_string(),
            r.improvement_pct.to_string(),
            r.gp_report.newton_iterations.to_string(),
            String::new(),
            time(r.gp_runtime_ms),
            r.gp_report.kkt.stationarity.to_string(),
            r.seed.to_string(),
        ];
        let cd = [
            "cd".to_string(),
            r.z_cd_best.to_string(),
            r.z_cd_per_pax.to_string(),
            String::new(),
            r.cd_iterations.to_string(),
            r.cd_clamp_events.to_string(),
            time(r.cd_runtime_ms),
            opt(r.cd_kkt_stationarity),
            r.seed.to_string(),
        ];
        w.write_record(common.iter().chain(gp.iter()))?;
        w.write_record(common.iter().chain(cd.iter()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(cells: &[SummaryCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "network",
        "D",
        "vot",
        "n_rows",
        "mean_improvement_pct",
        "min_improvement_pct",
        "max_improvement_pct",
        "reference_improvement_pct",
    ])?;
    for c in cells {
        w.write_record([
            c.network.label().to_string(),
            c.total_demand.to_string(),
            c.mu.to_string(),
            c.n_rows.to_string(),
            c.mean_improvement_pct.to_string(),
            c.min_improvement_pct.to_string(),
            c.max_improvement_pct.to_string(),
            opt(c.reference_improvement_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `results.csv`, `summary.csv`, `reports.json`, `failures.csv` and,
/// when runtimes are recorded, `timings.csv` into `dir`.
pub fn write_sweep_outputs(dir: &Path, output: &SweepOutput, record_runtime: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_results_csv(&output.rows, record_runtime, fs::File::create(dir.join("results.csv"))?)?;
    write_summary_csv(&summarize(&output.rows), fs::File::create(dir.join("summary.csv"))?)?;

    let reports: Vec<ComparisonRow> = if record_runtime {
        output.rows.clone()
    } else {
        output.rows.iter().cloned().map(ComparisonRow::without_timings).collect()
    };
    fs::write(dir.join("reports.json"), serde_json::to_string_pretty(&reports)?)?;

    let mut f = csv::Writer::from_path(dir.join("failures.csv"))?;
    f.write_record(["scenario", "error"])?;
    for (k, e) in &output.failures {
        f.write_record([k, e])?;
    }
    f.flush()?;

    if record_runtime {
        let mut t = csv::Writer::from_path(dir.join("timings.csv"))?;
        t.write_record(["pattern", "D", "vot", "network", "gp_ms", "cd_ms"])?;
        for r in &output.rows {
            t.write_record([
                r.pattern.to_string(),
                r.total_demand.to_string(),
                r.mu.to_string(),
                r.network.label().to_string(),
                format!("{:.3}", r.gp_runtime_ms),
                format!("{:.3}", r.cd_runtime_ms),
            ])?;
        }
        t.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_144_cases() {
        let c = SweepConfig::default();
        assert_eq!(c.scenarios().len(), 144);
        assert_eq!(c.scenarios()[1].seed, 1000);
        assert!(serde_json::from_str::<SweepConfig>(r#"{"demand": [1]}"#).is_err());
    }

    #[test]
    fn reference_table_lookup() {
        assert_eq!(reference_improvement(NetworkKind::Heterogeneous, 5000.0, 5.0), Some(3.84));
        assert_eq!(reference_improvement(NetworkKind::Homogeneous, 100_000.0, 20.0), Some(0.58));
        assert_eq!(reference_improvement(NetworkKind::Homogeneous, 7.0, 20.0), None);
    }
}
