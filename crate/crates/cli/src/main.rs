use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use transit_ca::cd::{run_cd_multistart, CdContext, CdOptions};
use transit_ca::cost::{build_gp, capacity_utilization, evaluate_cost, NetworkKind};
use transit_ca::demand::{aggregate_demand, read_od_csv, write_od_csv, DEFAULT_FLOW_RATIO};
use transit_ca::grid::Grid;
use transit_ca::harness::{
    export_aggregates, export_breakdown, export_demand_heatmap, run_sweep, write_sweep_outputs, ComparisonRow,
    Pattern, Scenario, SweepConfig,
};

#[derive(Parser)]
#[command(name = "transit-ca", version, about = "Grid transit network design: GP vs coordinate descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Demand generation.
    Demand {
        #[command(subcommand)]
        action: DemandCommand,
    },
    /// Solve one scenario with a single method.
    Solve {
        #[arg(long, value_enum)]
        method: Method,
        /// Overrides the scenario's network kind.
        #[arg(long)]
        network: Option<NetworkKind>,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a GP-vs-CD sweep and write results.csv, summary.csv and reports.json.
    Sweep {
        /// JSON sweep config; defaults reproduce the full benchmark grid.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Record wall-clock runtimes (makes outputs non-reproducible).
        #[arg(long)]
        record_runtime: bool,
    },
    /// Plot-ready CSV exports.
    Export {
        #[arg(long, value_enum)]
        what: ExportKind,
        /// reports.json for `breakdown`, an OD CSV otherwise.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum DemandCommand {
    /// Write an OD matrix CSV.
    Gen {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        total: f64,
        #[arg(long, default_value_t = 10.0)]
        side: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Accepted for interface stability; every generator is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chessboard rho_H = rho_HH.
        #[arg(long, default_value_t = DEFAULT_FLOW_RATIO)]
        ratio: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the routed aggregates here.
        #[arg(long)]
        aggregates: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Gp,
    Cd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Breakdown,
    Heatmap,
    Aggregates,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))
}

fn solve(method: Method, network: Option<NetworkKind>, scenario: &Path, out: &Path) -> Result<()> {
    let mut s: Scenario = read_json(scenario)?;
    if let Some(kind) = network {
        s.network = kind;
    }
    s.validate()?;
    let params = s.model_params();
    let (_, agg) = s.demand()?;
    fs::create_dir_all(out)?;
    let design = match method {
        Method::Gp => {
            let gp = build_gp(s.network, &agg, &params)?;
            let sol = geoprog::solve_gp(&gp.problem, &s.solver)?;
            write_json(&out.join("gp_report.json"), &sol.report)?;
            fs::write(out.join("gp_problem.json"), gp.problem.to_json())?;
            gp.design(&sol.r)?
        }
        Method::Cd => {
            let ctx = CdContext::new(&agg, &params, s.network)?;
            let opts = CdOptions {
                seed: s.seed,
                ..s.cd.clone()
            };
            let multi = run_cd_multistart(&ctx, &opts)?;
            fs::write(out.join("cd_trace.json"), multi.best.trace.to_json())?;
            write_json(&out.join("cd_final_z.json"), &multi.final_z)?;
            multi.best.design
        }
    };
    let breakdown = evaluate_cost(&design, &agg, &params)?;
    write_json(&out.join("design.json"), &design)?;
    write_json(&out.join("breakdown.json"), &breakdown)?;
    write_json(&out.join("utilization.json"), &capacity_utilization(&design, &agg, &params)?)?;
    println!("{} Z = {:.6} ({:.6} per passenger)", s.key(), breakdown.z, breakdown.z_per_passenger);
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Demand {
            action:
                DemandCommand::Gen {
                    pattern,
                    total,
                    side,
                    delta,
                    seed: _,
                    ratio,
                    out,
                    aggregates,
                },
        } => {
            let grid = Grid::new(side, delta)?;
            let od = pattern.generate(&grid, total, ratio)?;
            write_od_csv(&od, create(&out)?)?;
            if let Some(path) = aggregates {
                export_aggregates(&aggregate_demand(&grid, &od), create(&path)?)?;
            }
        }
        Command::Solve {
            method,
            network,
            scenario,
            out,
        } => solve(method, network, &scenario, &out)?,
        Command::Sweep {
            config,
            out,
            jobs,
            record_runtime,
        } => {
            let mut cfg: SweepConfig = match config {
                Some(path) => read_json(&path)?,
                None => SweepConfig::default(),
            };
            if jobs.is_some() {
                cfg.jobs = jobs;
            }
            cfg.record_runtime |= record_runtime;
            let output = run_sweep(&cfg)?;
            write_sweep_outputs(&out, &output, cfg.record_runtime)?;
            println!("{} rows, {} failures -> {}", output.rows.len(), output.failures.len(), out.display());
            if !output.failures.is_empty() {
                bail!("{} scenarios failed, see failures.csv", output.failures.len());
            }
        }
        Command::Export { what, input, out } => match what {
            ExportKind::Breakdown => {
                let rows: Vec<ComparisonRow> = read_json(&input)?;
                export_breakdown(&rows, create(&out)?)?;
            }
            ExportKind::Heatmap | ExportKind::Aggregates => {
                let od = read_od_csv(File::open(&input).with_context(|| format!("opening {}", input.display()))?)?;
                if matches!(what, ExportKind::Heatmap) {
                    export_demand_heatmap(&od, create(&out)?)?;
                } else {
                    export_aggregates(&aggregate_demand(od.grid(), &od), create(&out)?)?;
                }
            }
        },
    }
    Ok(())
}
