pub mod cd;
pub mod cost;
pub mod demand;
pub mod error;
pub mod grid;
pub mod harness;
