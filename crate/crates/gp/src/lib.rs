//! Geometric programming: posynomial modeling, the log-space convex form, and
//! an interior-point solver with KKT certification.

mod convex;
mod error;
mod kkt;
mod posynomial;
mod problem;
mod solver;

pub use convex::{
    objective_value_grad_hess, to_convex_form, AffineEquality, AffineMap, ConvexGp, ExpSum,
    SecondOrder,
};
pub use error::GpError;
pub use kkt::{check_kkt, estimate_duals, KktReport};
pub use posynomial::{Monomial, Posynomial};
pub use problem::GpProblem;
pub use solver::{solve_gp, GpSolution, SolveReport, SolveStatus, SolverOptions};
