//! Scenario pipeline (demand, GP solve, CD multistart, comparison), the
//! parameter sweep, and CSV exports.

mod export;
mod scenario;
mod sweep;

pub use export::{export_aggregates, export_breakdown, export_demand_heatmap};
pub use scenario::{run_scenario, ComparisonRow, GridSettings, Pattern, Scenario, ScenarioOutcome};
pub use sweep::{
    reference_improvement, run_sweep, summarize, write_results_csv, write_summary_csv, write_sweep_outputs, SummaryCell,
    SweepConfig, SweepOutput,
};
