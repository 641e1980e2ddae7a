//! System cost of a grid transit network: agency cost `Z_A`, passenger time
//! `Z_P`, and the capacity constraints, both as a direct evaluator and as a
//! geometric program.

mod design;
mod evaluate;
mod gp_build;
mod params;

pub use design::{Axis, DesignVariables, NetworkKind};
pub use evaluate::{capacity_utilization, evaluate_cost, CostBreakdown, Utilization};
pub use gp_build::{build_gp, CapacityConstraint, TransitGp};
pub use params::ModelParams;
